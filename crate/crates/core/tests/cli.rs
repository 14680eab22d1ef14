use std::io::Write;

use voalab::cli::run_cli;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(std::iter::once("voalab").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn temp_file(name: &str, text: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("voalab-{}-{name}", std::process::id()));
    std::fs::File::create(&path).unwrap().write_all(text.as_bytes()).unwrap();
    path
}

#[test]
fn dims_of_lattice_algebra() {
    let (code, out, _) = run(&["dims", "V_A1", "--max-weight", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out, "0 1\n1 3\n2 4\n3 7\n");
}

#[test]
fn dims_of_sublattice_and_space() {
    let (code, out, _) = run(&["dims", "sqrt2A3", "--max-weight", "2"]);
    assert_eq!((code, out.as_str()), (0, "0 1\n1 3\n2 21\n"));
    let (code, out, _) = run(&["dims", "Mt", "--max-weight", "2"]);
    assert_eq!((code, out.as_str()), (0, "0 1\n1 0\n2 2\n"));
}

#[test]
fn character_with_shift() {
    let (code, out, _) = run(&["character", "Zgamma2", "--shift", "1/2", "--max-weight", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out, "q^(2/4): 2\nq^(6/4): 2\nq^(10/4): 4\n");
    let (code, _, _) = run(&["character", "Zgamma2", "--shift", "x"]);
    assert_eq!(code, 2);
}

#[test]
fn commutant_of_a_state() {
    let (code, out, _) = run(&["commutant", "wU", "--max-weight", "3"]);
    assert_eq!((code, out.as_str()), (0, "0 1\n1 0\n2 6\n3 10\n"));
}

#[test]
fn auto_check_equal_and_different() {
    let (code, out, _) = run(&["auto-check", "sigma(1)*theta*sigma(1)", "inner(1/4*a)", "--lattice", "A1"]);
    assert_eq!((code, out.as_str()), (0, "EQUAL\n"));
    let (code, out, _) = run(&["auto-check", "sigma(1)", "theta", "--lattice", "A1", "--max-weight", "2"]);
    assert_eq!((code, out.as_str()), (1, "DIFFERENT\n"));
}

#[test]
fn run_builtin_text_and_json() {
    let (code, out, _) = run(&["run", "paper", "--max-weight", "1", "--check", "headline", "--check", "taup_u"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("PASS headline") && out.contains("PASS taup_u"), "{out}");
    assert!(out.contains("summary: 2 passed, 0 failed"));
    let (code, out, _) = run(&["run", "paper", "--max-weight", "1", "--check", "cosets_L", "--output", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["failed"], 0);
}

#[test]
fn run_output_is_deterministic_without_timings() {
    let args = ["run", "paper", "--max-weight", "1", "--check", "sigma_theta_sigma"];
    assert_eq!(run(&args).1, run(&args).1);
    let (_, out, _) = run(&["run", "paper", "--max-weight", "1", "--check", "sigma_theta_sigma", "--timings"]);
    assert!(out.len() > run(&args).1.len());
}

#[test]
fn failing_scenario_exits_one() {
    let path = temp_file("fail.scn", "lattice A1 rank 1\n2\nsublattice S of A1\n2\ncheck c = coset_count(A1, S, 3)\n");
    let (code, out, _) = run(&["run", path.to_str().unwrap(), "--max-weight", "1"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("FAIL c"));
}

#[test]
fn definition_and_usage_errors_exit_two() {
    let odd = temp_file("odd.scn", "lattice B rank 1\n3\n");
    let garbage = temp_file("garbage.scn", "this is not a scenario\n");
    for args in [
        vec!["dims", "nosuch"],
        vec!["run", "/nonexistent/voalab.scn"],
        vec!["run", "paper", "--check", "nosuch"],
        vec!["run", odd.to_str().unwrap()],
        vec!["run", garbage.to_str().unwrap()],
        vec!["auto-check", "sigma(", "theta", "--lattice", "A1"],
        vec!["frobnicate"],
    ] {
        let (code, _, err) = run(&args);
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
    std::fs::remove_file(odd).ok();
    std::fs::remove_file(garbage).ok();
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    for sub in ["run", "dims", "character", "commutant", "auto-check"] {
        assert!(out.contains(sub), "{sub}");
    }
}
