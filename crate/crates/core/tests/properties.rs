use std::sync::Arc;

use proptest::prelude::*;
use voalab::autos::AutBuilder;
use voalab::fock::{GradedBasis, StateVector};
use voalab::lattice::{Lattice, LatticeSpan};
use voalab::qseries::voa_character;
use voalab::scalar::int;
use voalab::vertex::VertexEngine;
use voalab::GaussScalar;

fn a1_squared() -> Arc<Lattice> {
    Arc::new(Lattice::new("A1^2", vec![vec![2, 0], vec![0, 2]]).unwrap())
}

fn point() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-1i64..=1, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// `e^a_(n) e^b` vanishes for `n >= -<a,b>` and is `e^(a+b)` at `n = -<a,b> - 1`.
    #[test]
    fn exponential_modes(a in point(), b in point(), shift in 0i64..3) {
        let eng = VertexEngine::new(a1_squared(), 8);
        let ab = 2 * (a[0] * b[0] + a[1] * b[1]);
        let (ea, eb) = (StateVector::exp(&a), StateVector::exp(&b));
        prop_assert!(eng.mode_apply(&ea, -ab + shift, &eb).unwrap().is_zero());
        let sum: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        prop_assert_eq!(eng.mode_apply(&ea, -ab - 1, &eb).unwrap(), StateVector::exp(&sum));
    }

    /// `inn_h inn_k = inn_(h+k)` for quarter-integral `h, k`.
    #[test]
    fn inner_automorphisms_compose(h in prop::collection::vec(-4i64..4, 2), k in prop::collection::vec(-4i64..4, 2)) {
        let mut b = AutBuilder::new(Arc::new(GradedBasis::build(a1_squared(), 2)));
        let hk: Vec<i64> = h.iter().zip(&k).map(|(x, y)| x + y).collect();
        let direct = b.build_str(&format!("inner([{}/4,{}/4])", hk[0], hk[1])).unwrap();
        let composed = b.build_str(&format!("inner([{}/4,{}/4])*inner([{}/4,{}/4])", h[0], h[1], k[0], k[1])).unwrap();
        prop_assert!(composed.equal_on_grades(&direct, 2).unwrap());
    }

    /// Automorphisms act linearly.
    #[test]
    fn automorphisms_are_linear(a in point(), b in point(), re in -3i64..3, im in -3i64..3) {
        let mut builder = AutBuilder::new(Arc::new(GradedBasis::build(a1_squared(), 4)));
        let g = builder.build_str("sigma(1)*theta*inner([1/4,1/2])").unwrap();
        let c = GaussScalar::new(int(re), int(im));
        let (x, y) = (StateVector::exp(&a), StateVector::exp(&b));
        let mut xy = x.clone();
        xy.add_scaled(&y, &c);
        let mut expected = g.apply(&x).unwrap();
        expected.add_scaled(&g.apply(&y).unwrap(), &c);
        prop_assert_eq!(g.apply(&xy).unwrap(), expected);
    }

    /// Basis dimensions of `V_L` for diagonal even lattices equal the
    /// theta-over-eta coefficients.
    #[test]
    fn basis_dims_match_character(d in prop::collection::vec(1i64..4, 1..3)) {
        let gram: Vec<Vec<i64>> =
            (0..d.len()).map(|i| (0..d.len()).map(|j| if i == j { 2 * d[i] } else { 0 }).collect()).collect();
        let l = Arc::new(Lattice::new("L", gram).unwrap());
        let zero = vec![int(0); d.len()];
        let chi = voa_character(&LatticeSpan::Full(l.clone()), &zero, 3).unwrap().integer_dims().unwrap();
        prop_assert_eq!(GradedBasis::build(l, 3).dims(), chi);
    }
}
