// The involution rho of `V_{A1^3}` and the conjugate of the lifted
// isometry `ttilde`, compared with its closed form.

use std::sync::Arc;

use voalab::autos::AutBuilder;
use voalab::fock::{GradedBasis, Mode, Monomial, StateVector};
use voalab::lattice::{Isometry, Lattice};
use voalab::Result;

/// Returns `rho(a1(-1) 1)` and whether `rho ttilde rho^-1` equals
/// `inn_{(a2+a3)/4} t13` on grades up to 3.
pub fn run_example() -> Result<(StateVector, bool)> {
    let l = Arc::new(Lattice::new("L", vec![vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]])?);
    let mut b = AutBuilder::new(Arc::new(GradedBasis::build(l.clone(), 3)));
    b.add_isometry(Arc::new(Isometry::of_lattice("t13", l.clone(), &[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]])?));
    b.add_isometry(Arc::new(Isometry::of_lattice("ttilde", l, &[vec![0, 0, 1], vec![0, -1, 0], vec![-1, 0, 0]])?));
    let rho = b.build_str("inner([0,1/4,1/4])*sigma(1)*sigma(2)*sigma(3)")?;
    b.add_named("rho", rho.clone());
    let alpha1 = StateVector::from_monomial(Monomial::new(&[0, 0, 0], vec![Mode { dir: 0, n: 1 }]));
    let image = rho.apply(&alpha1)?;
    let taup = b.build_str("rho*lift(ttilde)*inv(rho)")?;
    let closed = b.build_str("inner([0,1/4,1/4])*lift(t13)")?;
    Ok((image, taup.equal_on_grades(&closed, 3)?))
}

fn main() -> Result<()> {
    let (image, equal) = run_example()?;
    println!("rho(a1) = {image}");
    println!("rho ttilde rho^-1 = inn t13: {equal}");
    Ok(())
}
