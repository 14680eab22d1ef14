// Lattices, sublattices, coset representatives and isometries.

use std::sync::Arc;

use voalab::lattice::{coset_decomposition, Isometry, Lattice, LatticeSpan, Sublattice};
use voalab::Result;

/// Returns the coset representatives of `P` in `A1^3` and the order of the
/// lattice isometry `a1 -> a3 -> -a1, a2 -> -a2`.
pub fn run_example() -> Result<(Vec<Vec<i64>>, u32)> {
    let l = Arc::new(Lattice::new("L", vec![vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]])?);
    let p = Sublattice::new("P", l.clone(), vec![vec![1, -2, 1], vec![1, 0, -1], vec![1, 1, 1]])?;
    let reps = coset_decomposition(&l, &p)?;
    let full = LatticeSpan::Full(l.clone());
    let e = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
    let ttilde = Isometry::from_images("ttilde", full.clone(), full, &e, &[vec![0, 0, 1], vec![0, -1, 0], vec![-1, 0, 0]])?;
    Ok((reps, ttilde.order(16)?))
}

fn main() -> Result<()> {
    let (reps, order) = run_example()?;
    println!("{} cosets of P in L:", reps.len());
    for r in &reps {
        println!("  {r:?}");
    }
    println!("order of ttilde: {order}");
    Ok(())
}
