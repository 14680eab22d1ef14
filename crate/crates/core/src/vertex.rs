//! Vertex operator modes `u_(n) v` on a lattice vertex algebra with trivial
//! cocycle, plus Virasoro and Sugawara vectors and conformal certificates.
//!
//! `e^alpha_(n)` is computed in closed form from
//! `Y(e^alpha, z) = E^-(-alpha, z) E^+(-alpha, z) e^alpha z^{alpha(0)}`;
//! every other mode is reduced to it by the iterate formula, stripping one
//! Heisenberg creation mode at a time.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};

use crate::error::{Result, VoaError};
use crate::fock::{GradedBasis, Mode, Monomial, StateVector};
use crate::lattice::{invert, Lattice, LatticeSpan};
use crate::scalar::{int, GaussScalar, Rational};

/// Binomial coefficient `C(n, k)` for `n >= 0`.
fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Generalized binomial `C(m, j)` for any integer `m`.
fn gbinom(m: i64, j: i64) -> i64 {
    if j < 0 {
        return 0;
    }
    if m >= 0 {
        binom(m, j)
    } else {
        let s = if j % 2 == 0 { 1 } else { -1 };
        s * binom(-m + j - 1, j)
    }
}

/// A single product request `u_(n) v`.
#[derive(Debug, Clone)]
pub struct ModeRequest {
    pub u: StateVector,
    pub n: i64,
    pub v: StateVector,
}

impl ModeRequest {
    /// Evaluates the request, checking the weight formula on homogeneous input.
    pub fn evaluate(&self, engine: &VertexEngine) -> Result<StateVector> {
        let out = engine.mode_apply(&self.u, self.n, &self.v)?;
        let l = engine.lattice();
        if let (Some(wu), Some(wv), Some(wo)) = (self.u.weight(l)?, self.v.weight(l)?, out.weight(l)?) {
            if wo != wu + wv - self.n - 1 {
                return Err(VoaError::Consistency(format!(
                    "u_({}) v has weight {wo}, expected {}",
                    self.n,
                    wu + wv - self.n - 1
                )));
            }
        }
        Ok(out)
    }
}

/// Entries kept in the product memo before it is cleared.
const MEMO_LIMIT: usize = 1 << 18;

type Memo = HashMap<(Monomial, i64, Monomial), Arc<StateVector>>;

/// Clones share the product memo.
#[derive(Clone)]
pub struct VertexEngine {
    lattice: Arc<Lattice>,
    cutoff: u32,
    memo: Arc<Mutex<Memo>>,
}

impl fmt::Debug for VertexEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VertexEngine").field("lattice", &self.lattice.name()).field("cutoff", &self.cutoff).finish()
    }
}

impl VertexEngine {
    pub fn new(lattice: Arc<Lattice>, cutoff: u32) -> Self {
        VertexEngine { lattice, cutoff, memo: Arc::new(Mutex::new(HashMap::new())) }
    }

    pub fn for_basis(basis: &GradedBasis) -> Self {
        Self::new(basis.lattice().clone(), basis.cutoff())
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn vacuum(&self) -> StateVector {
        StateVector::vacuum(self.rank())
    }

    fn gram(&self, i: usize, j: usize) -> i64 {
        self.lattice.gram()[i][j]
    }

    /// `<e_dir, mu>` for a lattice point `mu`.
    fn pair_dir_point(&self, dir: usize, mu: &[i32]) -> i64 {
        mu.iter().enumerate().map(|(j, &x)| self.gram(dir, j) * x as i64).sum()
    }

    /// `h_dir(m)` on a monomial for `m >= 0`, as (monomial, integer coefficient) pairs.
    fn heis_down_dir(&self, dir: usize, m: u32, mono: &Monomial) -> Vec<(Monomial, i64)> {
        if m == 0 {
            let c = self.pair_dir_point(dir, mono.point_ref());
            return if c == 0 { Vec::new() } else { vec![(mono.clone(), c)] };
        }
        let mut out: Vec<(Monomial, i64)> = Vec::new();
        for (k, md) in mono.modes().iter().enumerate() {
            if md.n == m {
                let g = self.gram(dir, md.dir as usize);
                if g != 0 {
                    let reduced = mono.without_mode_at(k);
                    match out.iter_mut().find(|(x, _)| *x == reduced) {
                        Some((_, c)) => *c += m as i64 * g,
                        None => out.push((reduced, m as i64 * g)),
                    }
                }
            }
        }
        out
    }

    /// `beta(m) v` for a rational direction `beta` (lattice coordinates).
    pub fn heis_apply(&self, beta: &[Rational], m: i64, v: &StateVector) -> StateVector {
        let mut out = StateVector::zero();
        for (mono, c) in v.terms() {
            for (dir, b) in beta.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let bc = c.scale(b);
                if m < 0 {
                    out.add_term(mono.with_mode(Mode { dir: dir as u16, n: (-m) as u32 }), &bc);
                } else {
                    for (r, k) in self.heis_down_dir(dir, m as u32, mono) {
                        out.add_term(r, &bc.scale(&int(k)));
                    }
                }
            }
        }
        out
    }

    fn heis_apply_int(&self, alpha: &[i64], m: i64, v: &StateVector) -> StateVector {
        let beta: Vec<Rational> = alpha.iter().map(|&x| int(x)).collect();
        self.heis_apply(&beta, m, v)
    }

    /// `e^alpha_(n) v`.
    pub fn exp_apply(&self, alpha: &[i64], n: i64, v: &StateVector) -> Result<StateVector> {
        let mut out = StateVector::zero();
        for (mono, c) in v.terms() {
            let r = self.exp_apply_mono(alpha, n, mono)?;
            out.add_scaled(&r, c);
        }
        Ok(out)
    }

    fn exp_apply_mono(&self, alpha: &[i64], n: i64, mono: &Monomial) -> Result<StateVector> {
        let mu = mono.point();
        let wa = self.lattice.norm_int(alpha) / 2;
        let wv = mono.weight(&self.lattice);
        let w = wa + wv - n - 1;
        if w < 0 {
            return Ok(StateVector::zero());
        }
        self.check_cutoff(w)?;
        let pair = self.lattice.inner_int(alpha, &mu);
        let level = mono.heisenberg_level();
        let shifted: Vec<i64> = mu.iter().zip(alpha).map(|(a, b)| a + b).collect();
        // S_k = -(1/k) sum_{j=1..k} alpha(j) S_{k-j}
        let mut s: Vec<StateVector> = vec![StateVector::from_monomial(mono.clone())];
        for k in 1..=level {
            let mut acc = StateVector::zero();
            for j in 1..=k {
                let prev = &s[(k - j) as usize];
                if !prev.is_zero() {
                    acc.add_scaled(&self.heis_apply_int(alpha, j, prev), &GaussScalar::one());
                }
            }
            s.push(acc.scaled(&GaussScalar::from_ratio(-1, k)));
        }
        let mut out = StateVector::zero();
        for (k, sk) in s.iter().enumerate() {
            let need = k as i64 - pair - n - 1;
            if need < 0 || sk.is_zero() {
                continue;
            }
            let base = sk.map_monomials(|m| StateVector::from_monomial(m.with_point(&shifted)));
            // T_r = (1/r) sum_{s=1..r} alpha(-s) T_{r-s}
            let mut t: Vec<StateVector> = vec![base];
            for r in 1..=need {
                let mut acc = StateVector::zero();
                for q in 1..=r {
                    acc.add_scaled(&self.heis_apply_int(alpha, -q, &t[(r - q) as usize]), &GaussScalar::one());
                }
                t.push(acc.scaled(&GaussScalar::from_ratio(1, r)));
            }
            out.add_scaled(&t[need as usize], &GaussScalar::one());
        }
        Ok(out)
    }

    fn check_cutoff(&self, w: i64) -> Result<()> {
        if w > self.cutoff as i64 {
            return Err(VoaError::CutoffExceeded { weight: w, cutoff: self.cutoff });
        }
        Ok(())
    }

    /// `u_(n) v` for arbitrary states.
    pub fn mode_apply(&self, u: &StateVector, n: i64, v: &StateVector) -> Result<StateVector> {
        let mut out = StateVector::zero();
        for (um, cu) in u.terms() {
            for (vm, cv) in v.terms() {
                let r = self.mono_mode(um, n, vm)?;
                out.add_scaled(&r, &(cu * cv));
            }
        }
        Ok(out)
    }

    /// `um_(n) vm`, memoized.
    fn mono_mode(&self, um: &Monomial, n: i64, vm: &Monomial) -> Result<Arc<StateVector>> {
        let w = um.weight(&self.lattice) + vm.weight(&self.lattice) - n - 1;
        if w < 0 {
            return Ok(Arc::new(StateVector::zero()));
        }
        self.check_cutoff(w)?;
        let key = (um.clone(), n, vm.clone());
        if let Some(hit) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(hit.clone());
        }
        let r = Arc::new(self.mono_mode_uncached(um, n, vm)?);
        let mut memo = self.memo.lock().expect("memo lock");
        if memo.len() >= MEMO_LIMIT {
            memo.clear();
        }
        memo.insert(key, r.clone());
        Ok(r)
    }

    fn mono_mode_uncached(&self, um: &Monomial, n: i64, vm: &Monomial) -> Result<StateVector> {
        let wu = um.weight(&self.lattice);
        let wv = vm.weight(&self.lattice);
        if um.modes().is_empty() {
            return self.exp_apply_mono(&um.point(), n, vm);
        }
        // u = h_i(-k) u'
        let Mode { dir, n: k } = um.modes()[0];
        let k = k as i64;
        let i = dir as usize;
        let rest = um.without_mode_at(0);
        let wr = wu - k;
        let mut out = StateVector::zero();
        // sum_j C(k+j-1, j) h_i(-k-j) (u'_(n+j) v)
        let mut j = 0;
        while wr + wv - n - j - 1 >= 0 {
            let inner = self.mono_mode(&rest, n + j, vm)?;
            if !inner.is_zero() {
                let c = binom(k + j - 1, j);
                let mut e = vec![Rational::zero(); self.rank()];
                e[i] = Rational::one();
                let raised = self.heis_apply(&e, -k - j, &inner);
                out.add_scaled(&raised, &GaussScalar::from_int(c));
            }
            j += 1;
        }
        // - (-1)^k sum_j C(k+j-1, j) u'_(n-k-j) (h_i(j) v)
        let sign = if k % 2 == 0 { -1 } else { 1 };
        for j in 0..=vm.heisenberg_level() {
            for (red, c0) in self.heis_down_dir(i, j as u32, vm) {
                let inner = self.mono_mode(&rest, n - k - j, &red)?;
                if !inner.is_zero() {
                    let c = sign * binom(k + j - 1, j) * c0;
                    out.add_scaled(&inner, &GaussScalar::from_int(c));
                }
            }
        }
        Ok(out)
    }

    /// `omega = 1/2 sum_{a,b} (G^{-1})_{ab} b_a(-1) b_b(-1) 1` for a basis `b`
    /// of the given (sub)lattice; equals the orthonormal-basis expression.
    pub fn lattice_virasoro(&self, span: &LatticeSpan) -> Result<StateVector> {
        if span.ambient().as_ref() != self.lattice.as_ref() {
            return Err(VoaError::Domain(format!(
                "{} does not live in {}",
                span.name(),
                self.lattice.name()
            )));
        }
        let basis = span.basis();
        let g: Vec<Vec<Rational>> = span.gram().iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        let ginv = invert(&g).expect("positive definite");
        let mut out = StateVector::zero();
        let vac = self.vacuum();
        let half = Rational::new(1.into(), 2.into());
        for (a, ba) in basis.iter().enumerate() {
            let first = self.heis_apply_int(ba, -1, &vac);
            for (b, bb) in basis.iter().enumerate() {
                if ginv[a][b].is_zero() {
                    continue;
                }
                let second = self.heis_apply_int(bb, -1, &first);
                out.add_scaled(&second, &GaussScalar::real(&ginv[a][b] * &half));
            }
        }
        Ok(out)
    }

    /// Checks the level-`k` sl2 relations for a weight-one triple.
    pub fn check_affine_triple(&self, e: &StateVector, h: &StateVector, f: &StateVector, k: i64) -> Result<()> {
        let vac = self.vacuum();
        let zero = StateVector::zero();
        let rels: Vec<(&str, &StateVector, i64, &StateVector, StateVector)> = vec![
            ("H_(0)E = 2E", h, 0, e, e.scaled(&GaussScalar::from_int(2))),
            ("H_(0)F = -2F", h, 0, f, f.scaled(&GaussScalar::from_int(-2))),
            ("E_(0)F = H", e, 0, f, h.clone()),
            ("H_(1)H = 2k", h, 1, h, vac.scaled(&GaussScalar::from_int(2 * k))),
            ("E_(1)F = k", e, 1, f, vac.scaled(&GaussScalar::from_int(k))),
            ("H_(0)H = 0", h, 0, h, zero.clone()),
            ("E_(0)E = 0", e, 0, e, zero.clone()),
            ("F_(0)F = 0", f, 0, f, zero.clone()),
            ("E_(1)E = 0", e, 1, e, zero.clone()),
            ("F_(1)F = 0", f, 1, f, zero.clone()),
            ("H_(1)E = 0", h, 1, e, zero.clone()),
            ("H_(1)F = 0", h, 1, f, zero),
        ];
        for (name, a, n, b, expected) in rels {
            if self.mode_apply(a, n, b)? != expected {
                return Err(VoaError::NotAffineTriple(format!("{name} fails")));
            }
        }
        Ok(())
    }

    /// Sugawara vector `(1/(2(k+2))) (1/2 H_(-1)H + E_(-1)F + F_(-1)E)`.
    pub fn sugawara_sl2(&self, e: &StateVector, h: &StateVector, f: &StateVector, k: i64) -> Result<StateVector> {
        if k <= 0 {
            return Err(VoaError::NotAffineTriple(format!("level {k} is not positive")));
        }
        self.check_affine_triple(e, h, f, k)?;
        let mut casimir = self.mode_apply(h, -1, h)?.scaled(&GaussScalar::from_ratio(1, 2));
        casimir.add_scaled(&self.mode_apply(e, -1, f)?, &GaussScalar::one());
        casimir.add_scaled(&self.mode_apply(f, -1, e)?, &GaussScalar::one());
        Ok(casimir.scaled(&GaussScalar::from_ratio(1, 2 * (k + 2))))
    }

    /// Certifies `e` as a conformal vector up to weight `w`.
    ///
    /// The Virasoro relations are checked for `|m|, |n| <= 2` on every basis
    /// vector of grade at most `w - 2`, for those `(m, n)` whose intermediate
    /// states stay within the engine cutoff.
    pub fn is_conformal(&self, e: &StateVector, w: u32) -> Result<ConformalCertificate> {
        let fail = |identity: &str, grade: u32| VoaError::NotConformal { identity: identity.to_string(), grade };
        if w > self.cutoff {
            return Err(VoaError::CutoffExceeded { weight: w as i64, cutoff: self.cutoff });
        }
        match e.weight(&self.lattice) {
            Ok(Some(2)) => {}
            _ => return Err(fail("e is homogeneous of weight 2", 2)),
        }
        if self.mode_apply(e, 1, e)? != e.scaled(&GaussScalar::from_int(2)) {
            return Err(fail("e_(1)e = 2e", 2));
        }
        if !self.mode_apply(e, 2, e)?.is_zero() {
            return Err(fail("e_(2)e = 0", 1));
        }
        let e3 = self.mode_apply(e, 3, e)?;
        let vac_mono = Monomial::vacuum(self.rank());
        let half_c = e3.coeff(&vac_mono);
        if e3.len() > 1 || !half_c.is_real() {
            return Err(fail("e_(3)e = (c/2) 1", 0));
        }
        let c = &half_c.re * int(2);
        let c_g = GaussScalar::real(c.clone());
        if w >= 2 {
            let basis = GradedBasis::build(self.lattice.clone(), w - 2);
            for g in 0..=w - 2 {
                for mono in basis.grade(g) {
                    let v = StateVector::from_monomial(mono.clone());
                    self.check_virasoro_on(e, &c_g, g, &v).map_err(|err| match err {
                        VoaError::NotConformal { identity, .. } => fail(&identity, g),
                        other => other,
                    })?;
                }
            }
        }
        Ok(ConformalCertificate { e: e.clone(), central_charge: c, cutoff: w })
    }

    fn check_virasoro_on(&self, e: &StateVector, c: &GaussScalar, g: u32, v: &StateVector) -> Result<()> {
        let top = self.cutoff as i64;
        let g = g as i64;
        let lm = |x: &StateVector, k: i64| self.mode_apply(e, k + 1, x);
        // L_k v for every k used below, computed once
        let mut single: HashMap<i64, StateVector> = HashMap::new();
        for m in -2i64..=2 {
            for n in (m + 1)..=2 {
                if g - m > top || g - n > top || g - m - n > top {
                    continue;
                }
                for k in [m, n, m + n] {
                    if !single.contains_key(&k) {
                        single.insert(k, lm(v, k)?);
                    }
                }
                let lhs = &lm(&single[&n], m)? - &lm(&single[&m], n)?;
                let mut rhs = single[&(m + n)].scaled(&GaussScalar::from_int(m - n));
                if m + n == 0 {
                    let central = GaussScalar::from_ratio(m * m * m - m, 12);
                    rhs.add_scaled(v, &(&central * c));
                }
                if lhs != rhs {
                    return Err(VoaError::NotConformal {
                        identity: format!("[L_{m}, L_{n}] = ({m}-{n}) L_{} + central", m + n),
                        grade: g as u32,
                    });
                }
            }
        }
        Ok(())
    }

    /// `e1_(n) e2 = 0` for all `n >= 0`.
    pub fn commuting_pair(&self, e1: &StateVector, e2: &StateVector) -> Result<bool> {
        let top = match (e1.weight(&self.lattice)?, e2.weight(&self.lattice)?) {
            (Some(a), Some(b)) => a + b - 1,
            _ => return Ok(true),
        };
        for n in 0..=top.max(0) {
            if !self.mode_apply(e1, n, e2)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `u_(n) v == (-1)^{n+1} sum_j (-1)^j D^(j) (v_(n+j) u)` with
    /// `D = omega_(0)`.
    pub fn skew_symmetry_holds(&self, omega: &StateVector, u: &StateVector, n: i64, v: &StateVector) -> Result<bool> {
        let lhs = self.mode_apply(u, n, v)?;
        let (wu, wv) = match (u.weight(&self.lattice)?, v.weight(&self.lattice)?) {
            (Some(a), Some(b)) => (a, b),
            _ => return Ok(lhs.is_zero()),
        };
        let mut rhs = StateVector::zero();
        let mut j = 0i64;
        while wu + wv - n - j - 1 >= 0 {
            let mut t = self.mode_apply(v, n + j, u)?;
            let mut fact = 1i64;
            for q in 1..=j {
                t = self.mode_apply(omega, 0, &t)?;
                fact *= q;
            }
            let sign = if (n + 1 + j) % 2 == 0 { 1 } else { -1 };
            rhs.add_scaled(&t, &GaussScalar::from_ratio(sign, fact));
            j += 1;
        }
        Ok(lhs == rhs)
    }

    /// `[a_(m), b_(n)] w == sum_j C(m, j) (a_(j) b)_(m+n-j) w`.
    pub fn commutator_holds(&self, a: &StateVector, m: i64, b: &StateVector, n: i64, w: &StateVector) -> Result<bool> {
        let lhs = &self.mode_apply(a, m, &self.mode_apply(b, n, w)?)? - &self.mode_apply(b, n, &self.mode_apply(a, m, w)?)?;
        let wa = a.weight(&self.lattice)?.unwrap_or(0);
        let wb = b.weight(&self.lattice)?.unwrap_or(0);
        let mut rhs = StateVector::zero();
        let mut j = 0i64;
        while wa + wb - j - 1 >= 0 {
            let c = gbinom(m, j);
            if c != 0 {
                let ab = self.mode_apply(a, j, b)?;
                if !ab.is_zero() {
                    rhs.add_scaled(&self.mode_apply(&ab, m + n - j, w)?, &GaussScalar::from_int(c));
                }
            }
            j += 1;
        }
        Ok(lhs == rhs)
    }
}

/// Evidence that a weight-two vector generates a Virasoro algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalCertificate {
    pub e: StateVector,
    pub central_charge: Rational,
    pub cutoff: u32,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn diag(entries: &[i64]) -> Arc<Lattice> {
        let d = entries.len();
        let gram = (0..d).map(|i| (0..d).map(|j| if i == j { entries[i] } else { 0 }).collect()).collect();
        Arc::new(Lattice::new("L", gram).unwrap())
    }

    fn h(engine: &VertexEngine, dirs: &[(usize, u32)], point: &[i64]) -> StateVector {
        let _ = engine;
        let modes = dirs.iter().map(|&(d, n)| Mode { dir: d as u16, n }).collect();
        StateVector::from_monomial(Monomial::new(point, modes))
    }

    #[test]
    fn heisenberg_contractions() {
        let e = VertexEngine::new(diag(&[2]), 4);
        let a1 = h(&e, &[(0, 1)], &[0]);
        let out = e.heis_apply(&[int(1)], 1, &a1);
        assert_eq!(out, e.vacuum().scaled(&GaussScalar::from_int(2)));
        let ea = StateVector::exp(&[1]);
        assert_eq!(e.heis_apply(&[int(1)], 0, &ea), ea.scaled(&GaussScalar::from_int(2)));
        for m in 0..3 {
            assert!(e.heis_apply(&[int(1)], m, &e.vacuum()).is_zero());
        }
    }

    #[test]
    fn exponential_modes_rank_one() {
        let e = VertexEngine::new(diag(&[2]), 4);
        let vac = e.vacuum();
        assert_eq!(e.exp_apply(&[1], -1, &vac).unwrap(), StateVector::exp(&[1]));
        let em = StateVector::exp(&[-1]);
        assert_eq!(e.exp_apply(&[1], 0, &em).unwrap(), h(&e, &[(0, 1)], &[0]));
        assert_eq!(e.exp_apply(&[1], 1, &em).unwrap(), vac);
        let mut expected = h(&e, &[(0, 1), (0, 1)], &[0]).scaled(&GaussScalar::from_ratio(1, 2));
        expected.add_scaled(&h(&e, &[(0, 2)], &[0]), &GaussScalar::from_ratio(1, 2));
        assert_eq!(e.exp_apply(&[1], -1, &em).unwrap(), expected);
    }

    #[test]
    fn cutoff_is_enforced() {
        let e = VertexEngine::new(diag(&[2]), 1);
        let ea = StateVector::exp(&[1]);
        assert!(matches!(e.exp_apply(&[1], -1, &ea), Err(VoaError::CutoffExceeded { .. })));
    }

    #[test]
    fn heisenberg_state_modes() {
        let e = VertexEngine::new(diag(&[2]), 4);
        let a = h(&e, &[(0, 1)], &[0]);
        let ea = StateVector::exp(&[1]);
        for n in -2..3 {
            let direct = e.heis_apply(&[int(1)], n, &ea);
            assert_eq!(e.mode_apply(&a, n, &ea).unwrap(), direct, "n = {n}");
        }
    }

    #[test]
    fn virasoro_vectors() {
        let a1 = diag(&[2]);
        let e = VertexEngine::new(a1.clone(), 4);
        let w = e.lattice_virasoro(&LatticeSpan::Full(a1)).unwrap();
        assert_eq!(w, h(&e, &[(0, 1), (0, 1)], &[0]).scaled(&GaussScalar::from_ratio(1, 4)));
        let zh = diag(&[8]);
        let e8 = VertexEngine::new(zh.clone(), 2);
        let w8 = e8.lattice_virasoro(&LatticeSpan::Full(zh)).unwrap();
        assert_eq!(w8, h(&e8, &[(0, 1), (0, 1)], &[0]).scaled(&GaussScalar::from_ratio(1, 16)));
    }

    #[test]
    fn virasoro_grades_and_translates() {
        let a1 = diag(&[2]);
        let e = VertexEngine::new(a1.clone(), 4);
        let w = e.lattice_virasoro(&LatticeSpan::Full(a1.clone())).unwrap();
        let b = GradedBasis::build(a1, 3);
        for g in 0..=3 {
            for m in b.grade(g) {
                let v = StateVector::from_monomial(m.clone());
                assert_eq!(e.mode_apply(&w, 1, &v).unwrap(), v.scaled(&GaussScalar::from_int(g as i64)));
            }
        }
        let ea = StateVector::exp(&[1]);
        assert_eq!(e.mode_apply(&w, 0, &ea).unwrap(), h(&e, &[(0, 1)], &[1]));
    }

    #[test]
    fn sugawara_level_one_is_lattice_virasoro() {
        let a1 = diag(&[2]);
        let e = VertexEngine::new(a1.clone(), 4);
        let ee = StateVector::exp(&[1]);
        let ff = StateVector::exp(&[-1]);
        let hh = h(&e, &[(0, 1)], &[0]);
        let s = e.sugawara_sl2(&ee, &hh, &ff, 1).unwrap();
        assert_eq!(s, e.lattice_virasoro(&LatticeSpan::Full(a1)).unwrap());
        assert!(matches!(e.sugawara_sl2(&ee, &hh, &ff, 2), Err(VoaError::NotAffineTriple(_))));
    }

    #[test]
    fn conformal_certificates() {
        let a1 = diag(&[2]);
        let e = VertexEngine::new(a1.clone(), 4);
        let w = e.lattice_virasoro(&LatticeSpan::Full(a1)).unwrap();
        let cert = e.is_conformal(&w, 4).unwrap();
        assert_eq!(cert.central_charge, int(1));
        let bad = h(&e, &[(0, 1), (0, 1)], &[0]);
        assert!(matches!(e.is_conformal(&bad, 4), Err(VoaError::NotConformal { .. })));
        assert!(!e.commuting_pair(&w, &w).unwrap());
        let _ = rat(1, 2);
    }

    #[test]
    fn orthogonal_virasoros_commute() {
        let l = diag(&[2, 2]);
        let e = VertexEngine::new(l.clone(), 4);
        let s1 = crate::lattice::Sublattice::new("x", l.clone(), vec![vec![1, 0]]).unwrap();
        let s2 = crate::lattice::Sublattice::new("y", l.clone(), vec![vec![0, 1]]).unwrap();
        let w1 = e.lattice_virasoro(&LatticeSpan::Sub(Arc::new(s1))).unwrap();
        let w2 = e.lattice_virasoro(&LatticeSpan::Sub(Arc::new(s2))).unwrap();
        assert!(e.commuting_pair(&w1, &w2).unwrap());
        assert_eq!(&w1 + &w2, e.lattice_virasoro(&LatticeSpan::Full(l)).unwrap());
    }

    #[test]
    fn binomials() {
        assert_eq!(gbinom(-1, 3), -1);
        assert_eq!(gbinom(-2, 2), 3);
        assert_eq!(gbinom(3, 2), 3);
        assert_eq!(gbinom(2, 3), 0);
    }
}
