// The fixed points of the cyclic permutation on the commutant of the
// diagonal affine sl2 in `V_{A1^4}`, against the Z2 x Z2 orbifold of
// `V_{Z gamma1} (x) V_{Z gamma2}`.

use voalab::scenario::{builtin_paper_scenario, RunOptions, Runner};
use voalab::Result;

/// Dimensions of the two sides up to weight 3.
pub fn run_example() -> Result<(Vec<usize>, Vec<usize>)> {
    let sc = builtin_paper_scenario();
    let mut r = Runner::new(&sc, RunOptions { max_weight: 3, ..Default::default() })?;
    Ok((r.dims_of("Mt")?, r.dims_of("orbG")?))
}

fn main() -> Result<()> {
    let (mt, orb) = run_example()?;
    println!("M^tau:        {mt:?}");
    println!("orbifold (G): {orb:?}");
    Ok(())
}
