// Automorphisms from the expression language, compared on every grade.

use std::sync::Arc;

use voalab::autos::AutBuilder;
use voalab::fock::GradedBasis;
use voalab::lattice::Lattice;
use voalab::scalar::int;
use voalab::Result;

/// Checks `sigma^2 = 1`, `sigma theta sigma = inn_{a/4}` and that `theta`
/// differs from the identity, on grades up to 4 of `V_{A1}`.
pub fn run_example() -> Result<[bool; 3]> {
    let l = Arc::new(Lattice::new("A1", vec![vec![2]])?);
    let mut b = AutBuilder::new(Arc::new(GradedBasis::build(l, 4)));
    b.add_vector("a", vec![int(1)]);
    let square = b.build_str("sigma(1)*sigma(1)")?.is_identity_up_to(4);
    let conj = b.build_str("sigma(1)*theta*sigma(1)")?.equal_on_grades(&b.build_str("inner(1/4*a)")?, 4)?;
    let theta_trivial = b.build_str("theta")?.is_identity_up_to(4);
    Ok([square, conj, theta_trivial])
}

fn main() -> Result<()> {
    let [square, conj, theta] = run_example()?;
    println!("sigma^2 = 1: {square}");
    println!("sigma theta sigma = inn(a/4): {conj}");
    println!("theta = 1: {theta}");
    Ok(())
}
