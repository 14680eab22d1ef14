//! Line-oriented scenario files: lattice, state, automorphism and subspace
//! definitions followed by named checks.
//!
//! ```text
//! lattice A1 rank 1
//! 2
//! vector A1 a = 1
//! state A1 w = virasoro(A1)
//! auto A1 s = sigma(1)
//! check conj = autos_equal(A1, sigma(1)*theta*sigma(1), inner(1/4*a))
//! ```
//!
//! Definitions are evaluated lazily and cached, so a filtered run only pays
//! for what its checks need. The printed form is canonical: printing then
//! parsing gives back an equal scenario, and its SHA-256 is the scenario
//! hash recorded in reports.

mod ast;
mod parse;
mod report;
mod run;

pub use ast::{CheckKind, Item, Scenario, SeriesExpr, SpaceExpr, StateAtom, StateExpr};
pub use parse::parse_scenario;
pub use report::{CheckResult, DimTable, Report, Row, Status};
pub use run::{RunOptions, Runner};

/// The scenario encoding the full orbifold-commutant pipeline.
pub const PAPER_SCENARIO: &str = include_str!("../../scenarios/paper.scn");

pub fn builtin_paper_scenario() -> Scenario {
    parse_scenario(PAPER_SCENARIO).expect("the builtin scenario parses")
}
