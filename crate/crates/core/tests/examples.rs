//! Every example compiles into this test binary and its results are checked.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));
        }
    };
}

example!(scalars);
example!(lattices);
example!(fock_basis);
example!(vertex_modes);
example!(automorphisms);
example!(commutants);
example!(characters);
example!(rho_conjugation);
example!(orbifold_headline);
example!(scenario_file);
example!(command_line);

use voalab::scalar::rat;
use voalab::GaussScalar;

#[test]
fn scalars_example() {
    let (unit, phase, third) = scalars::run_example().unwrap();
    assert_eq!(unit, GaussScalar::one());
    assert_eq!(phase, GaussScalar::new(rat(0, 1), rat(-1, 1)));
    assert!(!third);
}

#[test]
fn lattices_example() {
    let (reps, order) = lattices::run_example().unwrap();
    assert_eq!(reps.len(), 6);
    assert_eq!(order, 4);
}

#[test]
fn fock_basis_example() {
    let (a1, a14) = fock_basis::run_example().unwrap();
    assert_eq!(a1, vec![1, 3, 4, 7, 13]);
    assert_eq!(a14, vec![1, 12, 70, 280, 913]);
}

#[test]
fn vertex_modes_example() {
    let (e1f, c) = vertex_modes::run_example().unwrap();
    assert_eq!(e1f.to_string(), "(4)*e^[0,0,0,0]");
    assert_eq!(c, rat(2, 1));
}

#[test]
fn automorphisms_example() {
    assert_eq!(automorphisms::run_example().unwrap(), [true, true, false]);
}

#[test]
fn commutants_example() {
    let (dims, equal) = commutants::run_example().unwrap();
    assert_eq!(dims, vec![1, 3, 21, 58]);
    assert!(equal);
}

#[test]
fn characters_example() {
    let (chi, closed, burn) = characters::run_example().unwrap();
    assert_eq!(chi, vec![1, 3, 4, 7, 13]);
    assert!(closed);
    assert_eq!(burn, vec![1, 0, 2, 3, 9]);
}

#[test]
fn rho_conjugation_example() {
    let (image, equal) = rho_conjugation::run_example().unwrap();
    assert_eq!(image.to_string(), "(1)*e^[-1,0,0] + (1)*e^[1,0,0]");
    assert!(equal);
}

#[test]
fn orbifold_headline_example() {
    let (mt, orb) = orbifold_headline::run_example().unwrap();
    assert_eq!(mt, vec![1, 0, 2, 3]);
    assert_eq!(mt, orb);
}

#[test]
fn scenario_file_example() {
    let report = scenario_file::run_example().unwrap();
    assert!(report.success());
    assert_eq!(report.to_text().matches("PASS").count(), 4);
}

#[test]
fn command_line_example() {
    let (out, code) = command_line::run_example();
    assert_eq!(code, 0);
    assert_eq!(out, "0 1\n1 3\n2 4\n3 7\n");
}
