// A small scenario written inline, parsed, printed canonically and run.

use voalab::scenario::{parse_scenario, Report, RunOptions, Runner};
use voalab::Result;

const SCENARIO: &str = "
lattice A1 rank 1
2
vector A1 a = 1
state A1 w = virasoro(A1)
auto A1 t = theta
group A1 T = t
space A1 plus = fixed(T)
check conformal_A1 = conformal(w, 1)
check conj = autos_equal(A1, sigma(1)*theta*sigma(1), inner(1/4*a))
check fixed_vs_burnside = burnside_fixed(T)
check plus_dims = dims_expected(plus, [1, 1, 2])
";

pub fn run_example() -> Result<Report> {
    let sc = parse_scenario(SCENARIO)?;
    assert_eq!(parse_scenario(&sc.to_string())?, sc);
    let mut runner = Runner::new(&sc, RunOptions { max_weight: 3, ..Default::default() })?;
    Ok(runner.run())
}

fn main() -> Result<()> {
    print!("{}", run_example()?.to_text());
    Ok(())
}
