// Commutant of a lattice Virasoro vector against the lattice vertex algebra
// of the orthogonal complement.

use std::sync::Arc;

use voalab::commutant::{commutant_dims, compare_subspaces, sublattice_algebra};
use voalab::fock::GradedBasis;
use voalab::lattice::{Lattice, LatticeSpan, Sublattice};
use voalab::vertex::VertexEngine;
use voalab::Result;

/// Dimensions of `Com(omega_{ZH})` in `V_{A1^4}` and whether it equals
/// `V_{sqrt2 A3}` as a subspace, on grades up to 3.
pub fn run_example() -> Result<(Vec<usize>, bool)> {
    let w = 3;
    let l = Arc::new(Lattice::new("A1^4", (0..4).map(|i| (0..4).map(|j| if i == j { 2 } else { 0 }).collect()).collect())?);
    let basis = Arc::new(GradedBasis::build(l.clone(), w + 1));
    let zh = Arc::new(Sublattice::new("ZH", l.clone(), vec![vec![1, 1, 1, 1]])?);
    let a3 = Arc::new(Sublattice::new("sqrt2A3", l, vec![vec![1, -1, 0, 0], vec![0, 1, -1, 0], vec![0, 0, 1, -1]])?);
    let omega = VertexEngine::for_basis(&basis).lattice_virasoro(&LatticeSpan::Sub(zh))?;
    let com = commutant_dims(&basis, &omega, w)?;
    let va3 = sublattice_algebra(&basis, &LatticeSpan::Sub(a3), w)?;
    let equal = compare_subspaces("Com", &com, &va3, w).iter().all(|r| r.ok);
    Ok((com.dims(), equal))
}

fn main() -> Result<()> {
    let (dims, equal) = run_example()?;
    println!("Com(omega_ZH): {dims:?}");
    println!("equal to V_sqrt2A3: {equal}");
    Ok(())
}
