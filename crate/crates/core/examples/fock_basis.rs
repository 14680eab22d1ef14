// Graded monomial bases of lattice vertex algebras.

use std::sync::Arc;

use voalab::fock::GradedBasis;
use voalab::lattice::Lattice;
use voalab::Result;

/// Graded dimensions of `V_{A1}` and `V_{A1^4}` up to weight 4.
pub fn run_example() -> Result<(Vec<usize>, Vec<usize>)> {
    let a1 = Arc::new(Lattice::new("A1", vec![vec![2]])?);
    let a14 = Arc::new(Lattice::new("A1^4", (0..4).map(|i| (0..4).map(|j| if i == j { 2 } else { 0 }).collect()).collect())?);
    Ok((GradedBasis::build(a1, 4).dims(), GradedBasis::build(a14, 4).dims()))
}

fn main() -> Result<()> {
    let (a1, a14) = run_example()?;
    println!("V_A1:   {a1:?}");
    println!("V_A1^4: {a14:?}");
    Ok(())
}
