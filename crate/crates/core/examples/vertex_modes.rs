// Mode products, the level-4 affine triple and its Sugawara vector.

use std::sync::Arc;

use voalab::fock::{Mode, Monomial, StateVector};
use voalab::lattice::Lattice;
use voalab::vertex::VertexEngine;
use voalab::{GaussScalar, Rational, Result};

/// Returns `E_(1) F` and the central charge of the Sugawara vector of the
/// diagonal sl2 in `V_{A1^4}`.
pub fn run_example() -> Result<(StateVector, Rational)> {
    let l = Arc::new(Lattice::new("A1^4", (0..4).map(|i| (0..4).map(|j| if i == j { 2 } else { 0 }).collect()).collect())?);
    let engine = VertexEngine::new(l, 8);
    let (mut e, mut f, mut h) = (StateVector::zero(), StateVector::zero(), StateVector::zero());
    for i in 0..4 {
        let mut p = vec![0i64; 4];
        p[i] = 1;
        e.add_scaled(&StateVector::exp(&p), &GaussScalar::one());
        p[i] = -1;
        f.add_scaled(&StateVector::exp(&p), &GaussScalar::one());
        h.add_scaled(&StateVector::from_monomial(Monomial::new(&[0; 4], vec![Mode { dir: i as u16, n: 1 }])), &GaussScalar::one());
    }
    engine.check_affine_triple(&e, &h, &f, 4)?;
    let e1f = engine.mode_apply(&e, 1, &f)?;
    let omega = engine.sugawara_sl2(&e, &h, &f, 4)?;
    let cert = engine.is_conformal(&omega, 3)?;
    Ok((e1f, cert.central_charge))
}

fn main() -> Result<()> {
    let (e1f, c) = run_example()?;
    println!("E_(1) F = {e1f}");
    println!("Sugawara central charge: {c}");
    Ok(())
}
