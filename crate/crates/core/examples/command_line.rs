// The command-line front end driven in-process.

/// Output and exit code of `voalab dims V_A1 --max-weight 3`.
pub fn run_example() -> (String, i32) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = voalab::cli::run_cli(["voalab", "dims", "V_A1", "--max-weight", "3"], &mut out, &mut err);
    (String::from_utf8(out).expect("utf-8"), code)
}

fn main() {
    let (out, code) = run_example();
    print!("{out}");
    std::process::exit(code);
}
