//! Acceptance criteria at the default cutoff W = 4, every equality exact.
//! Each test prints one PASS or FAIL line.

use std::sync::{Arc, OnceLock};
use std::time::Duration;

use voalab::autos::AutBuilder;
use voalab::fock::{GradedBasis, Mode, Monomial, StateVector};
use voalab::lattice::{coset_decomposition, Lattice, LatticeSpan, Sublattice};
use voalab::qseries::voa_character;
use voalab::scalar::{int, rat};
use voalab::scenario::{builtin_paper_scenario, Report, RunOptions, Runner};
use voalab::vertex::VertexEngine;
use voalab::GaussScalar;

const W: u32 = 4;

fn report() -> &'static Report {
    static REPORT: OnceLock<Report> = OnceLock::new();
    REPORT.get_or_init(|| {
        let sc = builtin_paper_scenario();
        Runner::new(&sc, RunOptions { max_weight: W, ..Default::default() }).unwrap().run()
    })
}

/// Verdict for a criterion: the named scenario checks must all pass within
/// `budget`, and `extra` holds the outcome of the direct assertions.
fn criterion(n: u32, title: &str, checks: &[&str], budget: Duration, extra: Result<(), String>) {
    let r = report();
    let mut problems = Vec::new();
    let mut spent = Duration::ZERO;
    for &name in checks {
        match r.check(name) {
            Some(c) if c.passed() => spent += c.elapsed,
            Some(c) => problems.push(format!("{name}: {}", c.detail)),
            None => problems.push(format!("{name}: missing")),
        }
    }
    if spent > budget {
        problems.push(format!("took {spent:?}, budget {budget:?}"));
    }
    if let Err(e) = extra {
        problems.push(e);
    }
    if problems.is_empty() {
        println!("PASS criterion {n}: {title} ({} checks, {spent:.1?})", checks.len());
    } else {
        println!("FAIL criterion {n}: {title}: {}", problems.join("; "));
        panic!("criterion {n} failed");
    }
}

fn ensure(cond: bool, what: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn diag(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 2 } else { 0 }).collect()).collect()
}

fn h(rank: usize, dir: usize) -> StateVector {
    StateVector::from_monomial(Monomial::new(&vec![0; rank], vec![Mode { dir: dir as u16, n: 1 }]))
}

fn sum(parts: impl IntoIterator<Item = StateVector>) -> StateVector {
    let mut s = StateVector::zero();
    for p in parts {
        s.add_scaled(&p, &GaussScalar::one());
    }
    s
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

#[test]
fn criterion_01_foundations() {
    let extra = (|| {
        let a14 = Arc::new(Lattice::new("A1^4", diag(4)).map_err(|e| e.to_string())?);
        let sub = Sublattice::new(
            "ZH+sqrt2A3",
            a14.clone(),
            vec![vec![1, 1, 1, 1], vec![1, -1, 0, 0], vec![0, 1, -1, 0], vec![0, 0, 1, -1]],
        )
        .map_err(|e| e.to_string())?;
        let reps = coset_decomposition(&a14, &sub).map_err(|e| e.to_string())?;
        ensure(reps.len() == 4, "A1^4 over ZH + sqrt2A3 should have 4 cosets")?;
        let l = Arc::new(Lattice::new("L", diag(3)).map_err(|e| e.to_string())?);
        let p = Sublattice::new("P", l.clone(), vec![vec![1, -2, 1], vec![1, 0, -1], vec![1, 1, 1]]).map_err(|e| e.to_string())?;
        ensure(coset_decomposition(&l, &p).map_err(|e| e.to_string())?.len() == 6, "L over P should have 6 cosets")?;
        let z: GaussScalar = "2/3+5/7i".parse().map_err(|e: voalab::VoaError| e.to_string())?;
        ensure(&z * &z.inv().map_err(|e| e.to_string())? == GaussScalar::one(), "z z^-1 = 1")?;
        let quarter = GaussScalar::phase(&rat(1, 4)).map_err(|e| e.to_string())?;
        ensure(quarter == GaussScalar::i(), "e^(2 pi i/4) = i")
    })();
    criterion(
        1,
        "scalars, isometries and coset counts",
        &[
            "scalars", "iso_tau", "iso_tau_sqrt2A3", "iso_ttilde", "iso_t13", "iso_tau_N", "iso_nu", "iso_j",
            "iso_stretch", "tau_restricts", "ttilde_restricts", "nu_intertwines", "cosets_A14", "cosets_L",
            "cosets_L_reps", "P_basis",
        ],
        secs(10),
        extra,
    );
}

#[test]
fn criterion_02_vertex_axioms() {
    criterion(2, "vertex algebra axioms", &["axioms_A14", "axioms_L", "axioms_D"], secs(60), Ok(()));
}

#[test]
fn criterion_03_conformal() {
    criterion(
        3,
        "conformal certificates",
        &[
            "conformal_A1", "conformal_L", "conformal_A14", "conformal_ZH", "conformal_Zgamma", "conformal_Zgamma1",
            "conformal_Zgamma2", "conformal_U", "conformal_K0", "commuting_ZH_K0",
        ],
        secs(60),
        Ok(()),
    );
}

#[test]
fn criterion_04_affine_triple() {
    let extra = (|| {
        let l = Arc::new(Lattice::new("A1^4", diag(4)).map_err(|e| e.to_string())?);
        let eng = VertexEngine::new(l, 8);
        let point = |i: usize, s: i64| {
            let mut p = vec![0i64; 4];
            p[i] = s;
            StateVector::exp(&p)
        };
        let e = sum((0..4).map(|i| point(i, 1)));
        let f = sum((0..4).map(|i| point(i, -1)));
        let hh = sum((0..4).map(|i| h(4, i)));
        let m = |u: &StateVector, n: i64, v: &StateVector| eng.mode_apply(u, n, v).map_err(|e| e.to_string());
        let vac = eng.vacuum();
        ensure(m(&hh, 0, &e)? == e.scaled(&GaussScalar::from(int(2))), "H_(0) E = 2E")?;
        ensure(m(&e, 0, &f)? == hh, "E_(0) F = H")?;
        ensure(m(&e, 1, &f)? == vac.scaled(&GaussScalar::from(int(4))), "E_(1) F = 4")?;
        ensure(m(&hh, 1, &hh)? == vac.scaled(&GaussScalar::from(int(8))), "H_(1) H = 8")
    })();
    criterion(4, "level-4 affine triple", &["affine_level4"], secs(10), extra);
}

#[test]
fn criterion_05_commutants() {
    let extra = (|| {
        let l = Arc::new(Lattice::new("A1^4", diag(4)).map_err(|e| e.to_string())?);
        let a3 = Arc::new(
            Sublattice::new("sqrt2A3", l, vec![vec![1, -1, 0, 0], vec![0, 1, -1, 0], vec![0, 0, 1, -1]])
                .map_err(|e| e.to_string())?,
        );
        let chi = voa_character(&LatticeSpan::Sub(a3), &[int(0), int(0), int(0)], W)
            .and_then(|s| s.integer_dims())
            .map_err(|e| e.to_string())?;
        let com = report().dims.iter().find(|d| d.name == "ComZH").ok_or("ComZH not computed")?;
        ensure(com.dims == chi, "Com(omega_ZH) dims equal the theta-over-eta dims of V_sqrt2A3")?;
        ensure(chi == vec![1, 3, 21, 58, 165], "V_sqrt2A3 dims 1 3 21 58 165")
    })();
    criterion(
        5,
        "commutant identities",
        &["com_ZH", "com_ZH_character", "nested_ZH_K0", "M_inside_sqrt2A3", "orbifold_coset_U", "tau_is_lift"],
        secs(300),
        extra,
    );
}

#[test]
fn criterion_06_conjugations() {
    let extra = (|| {
        let l = Arc::new(Lattice::new("A1", vec![vec![2]]).map_err(|e| e.to_string())?);
        let mut b = AutBuilder::new(Arc::new(GradedBasis::build(l, W + 1)));
        b.add_vector("a", vec![int(1)]);
        let s = b.build_str("sigma(1)").map_err(|e| e.to_string())?;
        let x = h(1, 0);
        let e = sum([StateVector::exp(&[1]), StateVector::exp(&[-1])]);
        ensure(s.apply(&x).map_err(|e| e.to_string())? == e, "sigma(a(-1)) = e^a + e^-a")?;
        ensure(s.apply(&e).map_err(|e| e.to_string())? == x, "sigma(e^a + e^-a) = a(-1)")
    })();
    criterion(
        6,
        "sigma and inner conjugations on V_A1",
        &["sigma_involution", "sigma_theta_sigma", "inner_theta_conjugate"],
        secs(30),
        extra,
    );
}

#[test]
fn criterion_07_rho() {
    criterion(
        7,
        "rho images, rho(V_N) = V_L^+ and rho(omega_K0) = omega_Zgamma",
        &["rho_generators", "rho_homomorphism", "rho_VN", "rho_K0", "rho_M"],
        secs(300),
        Ok(()),
    );
}

#[test]
fn criterion_08_taup_closed_form() {
    criterion(
        8,
        "rho ttilde rho^-1 = (1 x inn x inn) t13",
        &["ttilde_factorization", "taup_closed_form", "taup_order"],
        secs(60),
        Ok(()),
    );
}

/// The stated eigenvalue `+i` for `u = e(a1-a2) + i e(a3-a2)` contradicts the
/// action values of tau' on `e(a1-a2)` and `e(a3-a2)`, which give `-i`; `+i`
/// belongs to the conjugate vector. Both facts are asserted, and the eigenvalue
/// pair `{i, -i}` on the twisted summand is what the minimal-polynomial split
/// checks.
#[test]
fn criterion_09_taup_action() {
    let extra = (|| {
        let sc = builtin_paper_scenario();
        let mut r = Runner::new(&sc, RunOptions { max_weight: 2, ..Default::default() }).map_err(|e| e.to_string())?;
        let taup = r.auto("taup").map_err(|e| e.to_string())?;
        let u = r.state("u").map_err(|e| e.to_string())?;
        let image = taup.apply(&u).map_err(|e| e.to_string())?;
        let i = GaussScalar::i();
        ensure(image == u.scaled(&-&i), "tau'(u) = -i u")?;
        ensure(image != u.scaled(&i), "tau'(u) differs from +i u")?;
        let a12 = StateVector::exp(&[1, -1, 0]);
        let a32 = StateVector::exp(&[0, -1, 1]);
        ensure(taup.apply(&a12).map_err(|e| e.to_string())? == a32, "tau' e(a1-a2) = e(a3-a2)")?;
        ensure(
            taup.apply(&a32).map_err(|e| e.to_string())? == a12.scaled(&-&GaussScalar::one()),
            "tau' e(a3-a2) = -e(a1-a2)",
        )
    })();
    criterion(
        9,
        "tau' action values, eigenvalues -i on u and +i on its conjugate, x^2-1 / x^2+1 split, fixed points",
        &[
            "taup_values", "taup_u", "com_gamma_split", "com_gamma_untwisted", "com_gamma_character",
            "taup_square_untwisted", "taup_square_twisted", "taup_restricts_to_g", "taup_fixed", "taup_fixed_orbifold",
        ],
        secs(300),
        extra,
    );
}

#[test]
fn criterion_10_headline() {
    let extra = (|| {
        let dims = |name: &str| report().dims.iter().find(|d| d.name == name).map(|d| d.dims.clone());
        let mt = dims("Mt").ok_or("M^tau not computed")?;
        ensure(mt.len() == W as usize + 1, "M^tau computed on every grade")?;
        ensure(mt[..3] == [1, 0, 2], "M^tau grades 0..2 are 1 0 2")?;
        for other in ["orbG", "orb12", "burn", "ComLplusT"] {
            ensure(dims(other).as_ref() == Some(&mt), &format!("{other} agrees with M^tau"))?;
        }
        Ok(())
    })();
    criterion(
        10,
        "M^tau equals the Z2 x Z2 orbifold of V_Zgamma1 x V_Zgamma2 (four pipelines)",
        &["group_G", "group_G12", "conjugate_g1", "conjugate_g2", "headline", "headline_low_grades"],
        secs(600),
        extra,
    );
}

#[test]
fn criterion_11_cross_oracle() {
    criterion(
        11,
        "basis dims = characters, closed-form twisted characters = traces, Burnside = fixed spaces",
        &[
            "character_A1", "character_A14", "character_L", "character_D", "character_sqrt2A3", "character_N",
            "character_Zgamma12", "twisted_G", "twisted_G12", "burnside_G", "burnside_G12", "burnside_A1", "burnside_T",
        ],
        secs(600),
        Ok(()),
    );
}

#[test]
fn whole_scenario_passes() {
    let r = report();
    assert_eq!(r.failed, 0, "{}", r.to_text());
    assert_eq!(r.checks.len(), 80);
}

/// The stretch setting W = 6: about 15 minutes on one core, so opt-in with
/// `cargo test --release --test acceptance -- --ignored`.
#[test]
#[ignore]
fn stretch_weight_six() {
    let sc = builtin_paper_scenario();
    let start = std::time::Instant::now();
    let r = Runner::new(&sc, RunOptions { max_weight: 6, ..Default::default() }).unwrap().run();
    let mt = r.dims.iter().find(|d| d.name == "Mt").map(|d| d.dims.clone());
    let ok = r.success() && mt.as_deref() == Some(&[1, 0, 2, 3, 9, 13, 28][..]) && start.elapsed() <= secs(1800);
    println!(
        "{} stretch W=6: {} passed, {} failed, M^tau {:?}, {:.0?}",
        if ok { "PASS" } else { "FAIL" },
        r.passed,
        r.failed,
        mt.unwrap_or_default(),
        start.elapsed()
    );
    assert!(ok, "{}", r.to_text());
}
