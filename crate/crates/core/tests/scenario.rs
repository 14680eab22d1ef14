use voalab::scenario::{builtin_paper_scenario, parse_scenario, Item, RunOptions, Runner, Status, PAPER_SCENARIO};
use voalab::VoaError;

const SMALL: &str = "
lattice A1 rank 1
2
vector A1 a = 1
state A1 w = virasoro(A1)
auto A1 t = theta
group A1 T = t
space A1 plus = fixed(T)
check c = conformal(w, 1)
check? d = dims_expected(plus, [1, 1, 2])
";

#[test]
fn builtin_scenario_round_trips() {
    let sc = builtin_paper_scenario();
    let printed = sc.to_string();
    let again = parse_scenario(&printed).unwrap();
    assert_eq!(again, sc);
    assert_eq!(again.to_string(), printed);
    assert_eq!(again.hash(), sc.hash());
}

#[test]
fn builtin_scenario_is_the_shipped_text() {
    assert_eq!(parse_scenario(PAPER_SCENARIO).unwrap(), builtin_paper_scenario());
}

#[test]
fn hash_ignores_comments_and_layout() {
    let a = parse_scenario(SMALL).unwrap();
    let b = parse_scenario(&SMALL.replace("theta", "theta   # the involution").replace("\n", "\n\n")).unwrap();
    assert_eq!(a.hash(), b.hash());
    assert_eq!(a.hash().len(), 64);
    let c = parse_scenario(&SMALL.replace("[1, 1, 2]", "[1, 1, 3]")).unwrap();
    assert_ne!(a.hash(), c.hash());
}

#[test]
fn builtin_scenario_names_enough_checks() {
    let sc = builtin_paper_scenario();
    let names: Vec<&str> = sc.checks().map(|(n, _, _)| n).collect();
    assert!(names.len() >= 14);
    for must in ["com_ZH", "nested_ZH_K0", "orbifold_coset_U", "taup_closed_form", "taup_u", "headline"] {
        assert!(names.contains(&must), "{must} missing");
    }
}

#[test]
fn optional_checks_are_marked() {
    let sc = parse_scenario(SMALL).unwrap();
    let flags: Vec<bool> = sc.checks().map(|(_, o, _)| o).collect();
    assert_eq!(flags, vec![false, true]);
    assert!(sc.items.iter().any(|it| matches!(it, Item::Group { .. })));
}

fn rejects(text: &str) -> VoaError {
    parse_scenario(text).expect_err(text)
}

#[test]
fn malformed_scenarios_are_rejected() {
    let base = "lattice A1 rank 1\n2\n";
    for bad in [
        "lattice A1 rank x\n2\n",
        "lattice A1 rank 2\n2 0\n",
        "sublattice S of A1\n",
        "frobnicate A1\n",
        &format!("{base}state A1 w = virasoro(B)\n"),
        &format!("{base}auto A1 t = theta\nauto A1 t = theta\n"),
        &format!("{base}auto A1 t = sigma(\n"),
        &format!("{base}check c = conformal(w, 1)\n"),
        &format!("{base}check c = nosuchkind(A1)\n"),
        &format!("{base}group A1 G = t\n"),
        &format!("{base}isometry f from A1 to A1\n"),
    ] {
        let e = rejects(bad);
        assert!(matches!(e, VoaError::Parse(_) | VoaError::UnknownName(_)), "{bad}: {e:?}");
    }
}

#[test]
fn invalid_lattice_is_a_definition_error() {
    let sc = parse_scenario("lattice B rank 1\n3\ncheck c = basis_character(B)\n").unwrap();
    let e = Runner::new(&sc, RunOptions::default()).err().expect("odd lattice accepted");
    assert!(matches!(e, VoaError::Parse(_)), "{e:?}");
}

#[test]
fn unknown_check_filter_is_rejected() {
    let sc = parse_scenario(SMALL).unwrap();
    let opts = RunOptions { checks: vec!["nope".into()], ..Default::default() };
    assert!(matches!(Runner::new(&sc, opts).err(), Some(VoaError::UnknownName(_))));
}

#[test]
fn check_filter_runs_only_named_checks() {
    let sc = builtin_paper_scenario();
    let opts = RunOptions { max_weight: 2, checks: vec!["cosets_L".into(), "sigma_theta_sigma".into()], ..Default::default() };
    let report = Runner::new(&sc, opts).unwrap().run();
    assert_eq!(report.checks.len(), 2);
    assert!(report.success());
}

#[test]
fn failing_check_is_reported_not_fatal() {
    let text = SMALL.replace("[1, 1, 2]", "[1, 2, 2]").replace("check? d", "check d");
    let sc = parse_scenario(&text).unwrap();
    let report = Runner::new(&sc, RunOptions { max_weight: 3, ..Default::default() }).unwrap().run();
    assert_eq!((report.passed, report.failed), (1, 1));
    assert_eq!(report.check("d").unwrap().status, Status::Fail);
    assert!(!report.success());
}

#[test]
fn builtin_scenario_passes_at_weight_zero() {
    let sc = builtin_paper_scenario();
    let report = Runner::new(&sc, RunOptions { max_weight: 0, ..Default::default() }).unwrap().run();
    assert!(report.success(), "{}", report.to_text());
}

#[test]
fn strict_annihilation_agrees_with_kernel_criterion() {
    let sc = builtin_paper_scenario();
    let opts = RunOptions { max_weight: 2, checks: vec!["com_ZH".into()], strict_annihilation: true };
    let report = Runner::new(&sc, opts).unwrap().run();
    assert!(report.checks.iter().any(|c| c.name.starts_with("strict_annihilation_")));
    assert!(report.success(), "{}", report.to_text());
}

#[test]
fn report_text_and_json_are_deterministic() {
    let sc = parse_scenario(SMALL).unwrap();
    let run = || Runner::new(&sc, RunOptions { max_weight: 3, ..Default::default() }).unwrap().run();
    let (a, b) = (run(), run());
    assert_eq!(a.to_text(), b.to_text());
    assert_eq!(a.to_json(), b.to_json());
    let json: serde_json::Value = serde_json::from_str(&a.to_json()).unwrap();
    assert_eq!(json["max_weight"], 3);
    assert!(a.to_text().contains(&sc.hash()));
}
