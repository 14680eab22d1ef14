// Exact Gaussian rationals and quarter-turn phases.

use voalab::scalar::rat;
use voalab::{GaussScalar, Result};

/// Returns `(z * z^-1, e^(2 pi i 3/4), 1/3 is representable)`.
pub fn run_example() -> Result<(GaussScalar, GaussScalar, bool)> {
    let z: GaussScalar = "3/2-2i".parse()?;
    let unit = &z * &z.inv()?;
    let phase = GaussScalar::phase(&rat(3, 4))?;
    let third = GaussScalar::phase(&rat(1, 3)).is_ok();
    Ok((unit, phase, third))
}

fn main() -> Result<()> {
    let (unit, phase, third) = run_example()?;
    println!("z * z^-1 = {unit}");
    println!("e^(2 pi i 3/4) = {phase}");
    println!("e^(2 pi i/3) representable: {third}");
    Ok(())
}
