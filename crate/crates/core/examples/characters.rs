// Characters, twisted characters and Burnside averages.

use std::sync::Arc;

use voalab::autos::{AutBuilder, AutGroup, DEFAULT_GROUP_BOUND};
use voalab::fock::GradedBasis;
use voalab::lattice::{Isometry, Lattice, LatticeSpan};
use voalab::qseries::{burnside_orbifold_dims, twisted_character, voa_character};
use voalab::scalar::int;
use voalab::Result;

/// Returns the character of `V_{A1}`, the twisted character of `g` on
/// `V_{Z gamma1 + Z gamma2}` and the Burnside dimensions of `<g, theta>`.
pub fn run_example() -> Result<(Vec<usize>, bool, Vec<usize>)> {
    let w = 4;
    let a1 = Arc::new(Lattice::new("A1", vec![vec![2]])?);
    let chi = voa_character(&LatticeSpan::Full(a1), &[int(0)], w)?.integer_dims()?;
    let d = Arc::new(Lattice::new("D", vec![vec![12, 0], vec![0, 4]])?);
    let basis = Arc::new(GradedBasis::build(d.clone(), w));
    let mut b = AutBuilder::new(basis.clone());
    b.add_isometry(Arc::new(Isometry::of_lattice("n2", d, &[vec![1, 0], vec![0, -1]])?));
    let g = b.build_str("inner([1/24,1/8])*lift(n2)")?;
    let closed = twisted_character(&g, w)?.closed_form;
    let group = AutGroup::generate(vec![g, b.build_str("theta")?], basis, DEFAULT_GROUP_BOUND)?;
    let burn = burnside_orbifold_dims(&group, w)?.integer_dims()?;
    Ok((chi, closed, burn))
}

fn main() -> Result<()> {
    let (chi, closed, burn) = run_example()?;
    println!("character of V_A1: {chi:?}");
    println!("twisted character of g in closed form: {closed}");
    println!("Burnside dimensions of <g, theta>: {burn:?}");
    Ok(())
}
