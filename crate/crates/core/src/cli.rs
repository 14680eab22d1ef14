//! The `voalab` command line. Exit codes: 0 success, 1 a failed check or
//! computation, 2 a usage, parse or name error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commutant::{commutant_dims, commutant_in, sublattice_algebra};
use crate::error::VoaError;
use crate::lattice::LatticeSpan;
use crate::scalar::parse_rational;
use crate::scenario::{builtin_paper_scenario, parse_scenario, RunOptions, Runner, Scenario};

#[derive(Debug, Parser)]
#[command(name = "voalab", version, about = "Exact computations in lattice vertex operator algebras")]
pub struct Cli {
    /// Worker threads for grade-parallel linear algebra (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the checks of a scenario file (`paper` for the builtin one).
    Run {
        scenario: String,
        #[arg(long, default_value_t = 4)]
        max_weight: u32,
        #[arg(long, value_enum, default_value_t = Output::Text)]
        output: Output,
        /// Run only the named checks (repeatable).
        #[arg(long = "check")]
        checks: Vec<String>,
        /// Compare every commutant with the annihilator of all modes on grades up to 2.
        #[arg(long)]
        strict_annihilation: bool,
        /// Append per-check timings.
        #[arg(long)]
        timings: bool,
    },
    /// Graded dimensions of `V_<lattice>`, a space or a series.
    Dims {
        name: String,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, default_value_t = 4)]
        max_weight: u32,
    },
    /// Character of `V_{shift + S}`; the shift is in the coordinates of the basis of `S`.
    Character {
        name: String,
        #[arg(long, allow_hyphen_values = true)]
        shift: Option<String>,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, default_value_t = 4)]
        max_weight: u32,
    },
    /// Graded dimensions of the commutant of a state, optionally inside a space.
    Commutant {
        state: String,
        #[arg(long = "in")]
        inside: Option<String>,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, default_value_t = 4)]
        max_weight: u32,
    },
    /// Compare two automorphism expressions on every grade up to the cutoff.
    AutoCheck {
        lhs: String,
        rhs: String,
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, default_value_t = 4)]
        max_weight: u32,
    },
}

/// Parses `args` (program name first) and runs, writing to `out`.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    if let Some(n) = cli.jobs {
        // the global pool can only be set once per process; later calls keep the first
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "voalab: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &VoaError) -> i32 {
    match e {
        VoaError::Parse(_) | VoaError::UnknownName(_) | VoaError::Io(_) => 2,
        _ => 1,
    }
}

fn load(path: Option<&str>) -> Result<Scenario, VoaError> {
    match path {
        None | Some("paper") => Ok(builtin_paper_scenario()),
        Some(p) => {
            let text = std::fs::read_to_string(PathBuf::from(p)).map_err(|e| VoaError::Io(format!("{p}: {e}")))?;
            parse_scenario(&text)
        }
    }
}

fn options(max_weight: u32) -> RunOptions {
    RunOptions { max_weight, ..Default::default() }
}

fn write_dims(out: &mut dyn Write, dims: &[usize]) -> Result<(), VoaError> {
    for (n, d) in dims.iter().enumerate() {
        writeln!(out, "{n} {d}").map_err(io)?;
    }
    Ok(())
}

fn io(e: std::io::Error) -> VoaError {
    VoaError::Io(e.to_string())
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, VoaError> {
    match cmd {
        Command::Run { scenario, max_weight, output, checks, strict_annihilation, timings } => {
            let sc = load(Some(&scenario))?;
            let opts = RunOptions { max_weight, checks, strict_annihilation };
            let report = Runner::new(&sc, opts)?.run();
            match (output, timings) {
                (Output::Text, false) => write!(out, "{}", report.to_text()),
                (Output::Text, true) => write!(out, "{}{}", report.to_text(), report.timings_text()),
                (Output::Json, false) => writeln!(out, "{}", report.to_json()),
                (Output::Json, true) => writeln!(out, "{}", report.to_json_with_timings()),
            }
            .map_err(io)?;
            Ok(if report.success() { 0 } else { 1 })
        }
        Command::Dims { name, scenario, max_weight } => {
            let sc = load(scenario.as_deref())?;
            let mut r = Runner::new(&sc, options(max_weight))?;
            let span_name = name.strip_prefix("V_").unwrap_or(&name);
            let dims = match r.span(span_name) {
                Ok(span) => {
                    let basis = r.basis(span.ambient().name())?;
                    match span {
                        LatticeSpan::Full(_) => basis.dims()[..=max_weight as usize].to_vec(),
                        LatticeSpan::Sub(_) => sublattice_algebra(&basis, &span, max_weight)?.dims(),
                    }
                }
                Err(_) => r.dims_of(&name)?,
            };
            write_dims(out, &dims)?;
            Ok(0)
        }
        Command::Character { name, shift, scenario, max_weight } => {
            let sc = load(scenario.as_deref())?;
            let r = Runner::new(&sc, options(max_weight))?;
            let shift = shift
                .map(|s| s.split([',', ' ']).filter(|t| !t.is_empty()).map(parse_rational).collect::<Result<Vec<_>, _>>())
                .transpose()?;
            let series = r.character(name.strip_prefix("V_").unwrap_or(&name), shift.as_deref())?;
            write!(out, "{series}").map_err(io)?;
            Ok(0)
        }
        Command::Commutant { state, inside, scenario, max_weight } => {
            let sc = load(scenario.as_deref())?;
            let mut r = Runner::new(&sc, options(max_weight))?;
            let lat = r.home(&state)?;
            let e = r.state(&state)?;
            let com = match inside {
                None => commutant_dims(&r.basis(lat)?, &e, max_weight)?,
                Some(s) => {
                    if r.home(&s)? != lat {
                        return Err(VoaError::Domain(format!("{s} and {state} live on different lattices")));
                    }
                    commutant_in(&*r.space(&s)?, &e, max_weight)?
                }
            };
            write_dims(out, &com.dims())?;
            Ok(0)
        }
        Command::AutoCheck { lhs, rhs, lattice, scenario, max_weight } => {
            let sc = load(scenario.as_deref())?;
            let mut r = Runner::new(&sc, options(max_weight))?;
            r.lattice(&lattice)?;
            let a = r.dsl(&lattice, &crate::autos::parse_dsl(&lhs)?)?;
            let b = r.dsl(&lattice, &crate::autos::parse_dsl(&rhs)?)?;
            let top = max_weight.min(a.cutoff());
            if a.equal_on_grades(&b, top)? {
                writeln!(out, "EQUAL").map_err(io)?;
                Ok(0)
            } else {
                writeln!(out, "DIFFERENT").map_err(io)?;
                Ok(1)
            }
        }
    }
}
