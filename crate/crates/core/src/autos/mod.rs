//! Automorphisms of a lattice vertex algebra, realized as per-grade matrices
//! on a [`GradedBasis`], together with the symbolic expression they came from.

pub mod dsl;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::error::{Result, VoaError};
use crate::fock::linalg::{Echelon, Inserted};
use crate::fock::{GradeMatrix, GradedBasis, Mode, Monomial, SVec, StateVector, Subspace};
use crate::lattice::{invert, Isometry, Lattice, LatticeSpan};
use crate::scalar::{int, GaussScalar, Rational};
use crate::vertex::VertexEngine;

pub use dsl::{parse_dsl, parse_vec_lit, DslExpr, VecLit};
pub(crate) use dsl::is_name;

/// Symbolic shape of an automorphism, kept for display and closed-form
/// characters. Composition is left to right as written: `Compose([a, b])`
/// is `a ∘ b`.
#[derive(Debug, Clone, PartialEq)]
pub enum AutExpr {
    Lifted(Arc<Isometry>),
    Inner(Vec<Rational>),
    Propagated(String),
    Compose(Vec<AutExpr>),
    Inverse(Box<AutExpr>),
}

/// `inn_h ∘ lift(D)` with `D` diagonal with entries `±1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalForm {
    pub h: Vec<Rational>,
    pub signs: Vec<i8>,
}

impl DiagonalForm {
    fn identity(d: usize) -> Self {
        DiagonalForm { h: vec![Rational::zero(); d], signs: vec![1; d] }
    }

    /// `(inn_h D)(inn_k E) = inn_{h + Dk} (DE)`.
    fn then(&self, other: &DiagonalForm) -> DiagonalForm {
        let h = self
            .h
            .iter()
            .zip(&other.h)
            .zip(&self.signs)
            .map(|((a, b), &s)| a + b * int(s as i64))
            .collect();
        let signs = self.signs.iter().zip(&other.signs).map(|(a, b)| a * b).collect();
        DiagonalForm { h, signs }
    }

    /// `(inn_h D)^{-1} = inn_{-Dh} D`.
    fn inverse(&self) -> DiagonalForm {
        let h = self.h.iter().zip(&self.signs).map(|(a, &s)| -(a * int(s as i64))).collect();
        DiagonalForm { h, signs: self.signs.clone() }
    }
}

impl AutExpr {
    /// Normal form `inn_h ∘ lift(D)` when every leaf is inner or a diagonal
    /// sign isometry; `None` otherwise.
    pub fn diagonal_form(&self, lattice: &Lattice) -> Option<DiagonalForm> {
        let d = lattice.rank();
        match self {
            AutExpr::Inner(h) => Some(DiagonalForm { h: h.clone(), signs: vec![1; d] }),
            AutExpr::Lifted(iso) => {
                if !iso.is_endomorphism_of_lattice() {
                    return None;
                }
                let mut signs = Vec::with_capacity(d);
                for (i, img) in iso.basis_images().iter().enumerate() {
                    for (j, &x) in img.iter().enumerate() {
                        if (i == j && x.abs() != 1) || (i != j && x != 0) {
                            return None;
                        }
                    }
                    signs.push(img[i] as i8);
                }
                Some(DiagonalForm { h: vec![Rational::zero(); d], signs })
            }
            AutExpr::Propagated(_) => None,
            AutExpr::Compose(parts) => {
                let mut acc = DiagonalForm::identity(d);
                for p in parts {
                    acc = acc.then(&p.diagonal_form(lattice)?);
                }
                Some(acc)
            }
            AutExpr::Inverse(x) => Some(x.diagonal_form(lattice)?.inverse()),
        }
    }
}

impl fmt::Display for AutExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AutExpr::Lifted(iso) => write!(f, "lift({})", iso.name()),
            AutExpr::Inner(h) => {
                let parts: Vec<String> = h.iter().map(|x| x.to_string()).collect();
                write!(f, "inner([{}])", parts.join(","))
            }
            AutExpr::Propagated(s) => write!(f, "{s}"),
            AutExpr::Compose(parts) => {
                let s: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "{}", s.join("*"))
            }
            AutExpr::Inverse(x) => write!(f, "inv({x})"),
        }
    }
}

/// A weight-preserving automorphism of `V_L`, known on every grade up to the
/// basis cutoff.
#[derive(Debug, Clone)]
pub struct Automorphism {
    expr: AutExpr,
    basis: Arc<GradedBasis>,
    mats: Vec<GradeMatrix>,
}

fn engine_for(basis: &GradedBasis) -> VertexEngine {
    VertexEngine::for_basis(basis)
}

impl Automorphism {
    fn from_parts(expr: AutExpr, basis: Arc<GradedBasis>, mats: Vec<GradeMatrix>) -> Result<Self> {
        let a = Automorphism { expr, basis, mats };
        a.check_fixes_vacuum_and_virasoro()?;
        Ok(a)
    }

    fn check_fixes_vacuum_and_virasoro(&self) -> Result<()> {
        if !self.mats[0].is_identity() {
            return Err(VoaError::NotAnAutomorphism(format!("{} does not fix the vacuum", self.expr)));
        }
        if self.basis.cutoff() >= 2 {
            let l = self.basis.lattice().clone();
            let omega = engine_for(&self.basis).lattice_virasoro(&LatticeSpan::Full(l))?;
            if self.apply(&omega)? != omega {
                return Err(VoaError::NotAnAutomorphism(format!(
                    "{} does not fix the Virasoro vector",
                    self.expr
                )));
            }
        }
        Ok(())
    }

    pub fn identity(basis: Arc<GradedBasis>) -> Self {
        let mats = (0..=basis.cutoff()).map(|n| GradeMatrix::identity(basis.dim(n))).collect();
        Automorphism { expr: AutExpr::Compose(Vec::new()), basis, mats }
    }

    /// The lift `h(-n) -> (gh)(-n)`, `e^mu -> e^{g mu}` of a lattice isometry.
    pub fn lifted(iso: Arc<Isometry>, basis: Arc<GradedBasis>) -> Result<Self> {
        let l = basis.lattice().clone();
        match (iso.source(), iso.target()) {
            (LatticeSpan::Full(a), LatticeSpan::Full(b)) if a == &l && b == &l => {}
            _ => {
                return Err(VoaError::Domain(format!(
                    "{} is not an isometry of {} onto itself",
                    iso.name(),
                    l.name()
                )))
            }
        }
        if !l.is_pairwise_even() {
            return Err(VoaError::UnsupportedLift(iso.name().to_string()));
        }
        let d = l.rank();
        let dir_images: Vec<Vec<Rational>> = (0..d)
            .map(|i| {
                let e: Vec<i64> = (0..d).map(|j| i64::from(i == j)).collect();
                iso.apply_point(&e).map(|v| v.iter().map(|&x| int(x)).collect())
            })
            .collect::<Result<_>>()?;
        let engine = engine_for(&basis);
        let mats = (0..=basis.cutoff())
            .into_par_iter()
            .map(|n| {
                let cols = basis
                    .grade(n)
                    .iter()
                    .map(|m| {
                        let mut img = StateVector::exp(&iso.apply_point(&m.point())?);
                        for md in m.modes() {
                            img = engine.heis_apply(&dir_images[md.dir as usize], -(md.n as i64), &img);
                        }
                        basis.coords(n, &img)
                    })
                    .collect::<Result<Vec<SVec>>>()?;
                Ok(GradeMatrix::from_columns(cols))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(AutExpr::Lifted(iso), basis, mats)
    }

    /// `inn_h = exp(2 pi i h(0))`: `e^mu -> phase(<h, mu>) e^mu`.
    pub fn inner(h: Vec<Rational>, basis: Arc<GradedBasis>) -> Result<Self> {
        let l = basis.lattice().clone();
        if h.len() != l.rank() {
            return Err(VoaError::Domain(format!("inner vector has {} coordinates, expected {}", h.len(), l.rank())));
        }
        for j in 0..l.rank() {
            let e: Vec<i64> = (0..l.rank()).map(|k| i64::from(j == k)).collect();
            GaussScalar::phase(&l.inner_qi(&h, &e))?;
        }
        let mut mats = Vec::new();
        for n in 0..=basis.cutoff() {
            let cols = basis
                .grade(n)
                .iter()
                .enumerate()
                .map(|(i, m)| Ok(vec![(i as u32, GaussScalar::phase(&l.inner_qi(&h, &m.point()))?)]))
                .collect::<Result<Vec<SVec>>>()?;
            mats.push(GradeMatrix::from_columns(cols));
        }
        Self::from_parts(AutExpr::Inner(h), basis, mats)
    }

    /// Extends a map on the weight-one space to the subalgebra generated by
    /// it, grade by grade, using spanning words `a_(-k) b`.
    ///
    /// Every spanning word is mapped and the induced relations are checked,
    /// so the result is well defined whenever this returns `Ok`.
    pub fn propagate(images: &[StateVector], basis: Arc<GradedBasis>, label: &str) -> Result<Self> {
        let w = basis.cutoff();
        let mut mats = vec![GradeMatrix::identity(1)];
        if w == 0 {
            return Self::from_parts(AutExpr::Propagated(label.to_string()), basis, mats);
        }
        let d1 = basis.dim(1);
        if images.len() != d1 {
            return Err(VoaError::Domain(format!("expected {d1} weight-one images, got {}", images.len())));
        }
        let img1: Vec<SVec> = images.iter().map(|v| basis.coords(1, v)).collect::<Result<_>>()?;
        mats.push(GradeMatrix::from_columns(img1));
        let engine = engine_for(&basis);
        let gens: Vec<StateVector> = (0..d1).map(|i| basis.basis_state(1, i)).collect();
        for n in 2..=w {
            let dim = basis.dim(n);
            let mut ech = Echelon::with_companions(dim, dim, false);
            for k in 1..=n {
                let src = n - k;
                for b in 0..basis.dim(src) {
                    let bs = basis.basis_state(src, b);
                    let tb = basis.state(src, mats[src as usize].column(b));
                    for (a, ga) in gens.iter().enumerate() {
                        let ta = basis.state(1, mats[1].column(a));
                        let word = engine.mode_apply(ga, -(k as i64), &bs)?;
                        let image = engine.mode_apply(&ta, -(k as i64), &tb)?;
                        let wc = basis.coords(n, &word)?;
                        let ic = basis.coords(n, &image)?;
                        if let Inserted::Dependent(res) = ech.insert_with(&wc, Some(&ic)) {
                            if !res.is_empty() {
                                return Err(VoaError::NotAnAutomorphism(format!(
                                    "{label}: relations among spanning words of weight {n} are not preserved"
                                )));
                            }
                        }
                    }
                }
            }
            if ech.rank() != dim {
                return Err(VoaError::NotGenerated(n));
            }
            let cols: Vec<SVec> = ech.into_sorted().into_iter().map(|(_, _, y)| y).collect();
            mats.push(GradeMatrix::from_columns(cols));
        }
        Self::from_parts(AutExpr::Propagated(label.to_string()), basis, mats)
    }

    /// The involution of `V_{Z alpha}` (`<alpha,alpha> = 2`) with
    /// `alpha -> E`, `E -> alpha`, `F -> -F`, where `E = e^alpha + e^-alpha`
    /// and `F = e^alpha - e^-alpha`.
    pub fn sigma_rank_one(basis: Arc<GradedBasis>) -> Result<Self> {
        let l = basis.lattice();
        if l.gram() != [vec![2]] {
            return Err(VoaError::Domain(format!("sigma needs the rank-one lattice with Gram [2], got {}", l.name())));
        }
        let half = GaussScalar::from_ratio(1, 2);
        let alpha = StateVector::from_monomial(Monomial::new(&[0], vec![Mode { dir: 0, n: 1 }]));
        let ep = StateVector::exp(&[1]);
        let em = StateVector::exp(&[-1]);
        let img = |a: i64, p: i64, m: i64| {
            let mut v = alpha.scaled(&GaussScalar::from_int(a));
            v.add_scaled(&ep, &GaussScalar::from_int(p));
            v.add_scaled(&em, &GaussScalar::from_int(m));
            v.scaled(&half)
        };
        // grade-one basis order: e^-alpha, alpha, e^alpha
        let images = vec![img(1, 1, -1), img(0, 2, 2), img(1, -1, 1)];
        if basis.cutoff() >= 1 {
            let expected: Vec<Monomial> = vec![Monomial::exp(&[-1]), Monomial::new(&[0], vec![Mode { dir: 0, n: 1 }]), Monomial::exp(&[1])];
            debug_assert_eq!(basis.grade(1), expected.as_slice());
        }
        Self::propagate(&images, basis, "sigma")
    }

    /// Extends an automorphism of `V_{Z e_block}` to `V_L` acting trivially
    /// on the other orthogonal blocks. `block` is zero-based.
    pub fn on_block(local: &Automorphism, block: usize, basis: Arc<GradedBasis>, label: &str) -> Result<Self> {
        let l = basis.lattice().clone();
        let d = l.rank();
        if block >= d {
            return Err(VoaError::Domain(format!("block {} out of range 1..={d}", block + 1)));
        }
        if (0..d).any(|j| j != block && l.gram()[block][j] != 0) {
            return Err(VoaError::Domain(format!("basis vector {} is not an orthogonal block of {}", block + 1, l.name())));
        }
        if local.basis.lattice().gram() != [vec![l.gram()[block][block]]] || local.basis.cutoff() < basis.cutoff() {
            return Err(VoaError::Domain("block automorphism does not match the block lattice or cutoff".into()));
        }
        let lb = local.basis.clone();
        let mats = (0..=basis.cutoff())
            .into_par_iter()
            .map(|n| {
                let cols = basis
                    .grade(n)
                    .iter()
                    .map(|m| {
                        let mut point = m.point();
                        let mu = point[block];
                        let inside: Vec<Mode> =
                            m.modes().iter().filter(|x| x.dir as usize == block).map(|x| Mode { dir: 0, n: x.n }).collect();
                        let outside: Vec<Mode> = m.modes().iter().filter(|x| x.dir as usize != block).copied().collect();
                        let local_m = Monomial::new(&[mu], inside);
                        let lw = local_m.weight(lb.lattice()) as u32;
                        let li = lb.index_of(lw, &local_m).expect("block monomial in basis");
                        let mut img = StateVector::zero();
                        for (j, c) in local.mats[lw as usize].column(li) {
                            let t = &lb.grade(lw)[*j as usize];
                            point[block] = t.point()[0];
                            let mut modes = outside.clone();
                            modes.extend(t.modes().iter().map(|x| Mode { dir: block as u16, n: x.n }));
                            img.add_term(Monomial::new(&point, modes), c);
                        }
                        basis.coords(n, &img)
                    })
                    .collect::<Result<Vec<SVec>>>()?;
                Ok(GradeMatrix::from_columns(cols))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(AutExpr::Propagated(label.to_string()), basis, mats)
    }

    /// `sigma` on the rank-one block `block` (zero-based) of `V_L`.
    pub fn sigma(block: usize, basis: Arc<GradedBasis>) -> Result<Self> {
        let l = basis.lattice().clone();
        if l.rank() == 1 {
            return Self::sigma_rank_one(basis);
        }
        let a1 = Arc::new(Lattice::new("A1", vec![vec![2]])?);
        let local = Self::sigma_rank_one(Arc::new(GradedBasis::build(a1, basis.cutoff())))?;
        Self::on_block(&local, block, basis, &format!("sigma({})", block + 1))
    }

    pub fn expr(&self) -> &AutExpr {
        &self.expr
    }

    pub fn basis(&self) -> &Arc<GradedBasis> {
        &self.basis
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        self.basis.lattice()
    }

    pub fn cutoff(&self) -> u32 {
        self.basis.cutoff()
    }

    pub fn matrix(&self, n: u32) -> &GradeMatrix {
        &self.mats[n as usize]
    }

    pub fn with_expr(mut self, expr: AutExpr) -> Self {
        self.expr = expr;
        self
    }

    fn same_space(&self, other: &Automorphism) -> Result<()> {
        if self.basis.lattice() != other.basis.lattice() || self.basis.cutoff() != other.basis.cutoff() {
            return Err(VoaError::Domain("automorphisms act on different spaces".into()));
        }
        Ok(())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        self.same_space(other)?;
        let mats = self.mats.iter().zip(&other.mats).map(|(a, b)| a.compose(b)).collect();
        let mut parts = Vec::new();
        for e in [&self.expr, &other.expr] {
            match e {
                AutExpr::Compose(ps) => parts.extend(ps.iter().cloned()),
                x => parts.push(x.clone()),
            }
        }
        Ok(Automorphism { expr: AutExpr::Compose(parts), basis: self.basis.clone(), mats })
    }

    pub fn inverse(&self) -> Result<Automorphism> {
        let mats = self.mats.iter().map(|m| m.inverse()).collect::<Result<_>>()?;
        Ok(Automorphism { expr: AutExpr::Inverse(Box::new(self.expr.clone())), basis: self.basis.clone(), mats })
    }

    pub fn power(&self, k: u32) -> Automorphism {
        let mats = self.mats.iter().map(|m| m.power(k)).collect();
        let expr = AutExpr::Compose(vec![self.expr.clone(); k as usize]);
        Automorphism { expr, basis: self.basis.clone(), mats }
    }

    /// Image of a state; every homogeneous component must lie within the
    /// cutoff.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        let mut out = StateVector::zero();
        for (w, part) in v.by_weight(self.lattice()) {
            if w > self.cutoff() as i64 {
                match apply_leafwise(&self.expr, self.lattice(), &part)? {
                    Some(img) => {
                        out.add_scaled(&img, &GaussScalar::one());
                        continue;
                    }
                    None => return Err(VoaError::CutoffExceeded { weight: w, cutoff: self.cutoff() }),
                }
            }
            if w < 0 {
                return Err(VoaError::CutoffExceeded { weight: w, cutoff: self.cutoff() });
            }
            let n = w as u32;
            let c = self.basis.coords(n, &part)?;
            let img = self.mats[n as usize].apply(&c);
            out.add_scaled(&self.basis.state(n, &img), &GaussScalar::one());
        }
        Ok(out)
    }

    /// Identical matrices on every grade `<= w`.
    pub fn equal_on_grades(&self, other: &Automorphism, w: u32) -> Result<bool> {
        self.same_space(other)?;
        if w > self.cutoff() {
            return Err(VoaError::CutoffExceeded { weight: w as i64, cutoff: self.cutoff() });
        }
        Ok((0..=w as usize).all(|n| self.mats[n] == other.mats[n]))
    }

    pub fn is_identity_up_to(&self, w: u32) -> bool {
        (0..=w.min(self.cutoff()) as usize).all(|n| self.mats[n].is_identity())
    }

    pub fn trace_on_grade(&self, n: u32) -> Result<GaussScalar> {
        if n > self.cutoff() {
            return Err(VoaError::CutoffExceeded { weight: n as i64, cutoff: self.cutoff() });
        }
        Ok(self.mats[n as usize].trace())
    }

    /// Least `k <= bound` with `self^k = 1` on every grade `<= w`.
    pub fn order_of(&self, w: u32, bound: u32) -> Result<u32> {
        let w = w.min(self.cutoff());
        let mut cur: Vec<GradeMatrix> = self.mats[..=w as usize].to_vec();
        for k in 1..=bound {
            if cur.iter().all(|m| m.is_identity()) {
                return Ok(k);
            }
            cur = cur.iter().zip(&self.mats).map(|(c, m)| m.compose(c)).collect();
        }
        Err(VoaError::OrderExceedsBound { bound })
    }

    /// Whether the automorphism maps `sub` into itself on grade `n`.
    pub fn preserves(&self, sub: &Subspace) -> bool {
        let m = &self.mats[sub.grade() as usize];
        sub.basis().iter().all(|v| sub.contains(&m.apply(v)))
    }

    pub fn fixed_on_grade(&self, n: u32) -> Subspace {
        let m = &self.mats[n as usize];
        let whole = Subspace::whole(n, m.dim());
        whole.kernel_on(&m.minus_scalar(&GaussScalar::one()))
    }

    /// Whether `p(self)` vanishes on `sub`, for `p = x^2 - c`.
    pub fn square_is_scalar_on(&self, sub: &Subspace, c: &GaussScalar) -> bool {
        let m = &self.mats[sub.grade() as usize];
        sub.basis().iter().all(|v| {
            let sq = m.apply(&m.apply(v));
            crate::fock::linalg::sv_axpy(&sq, v, &-c).is_empty()
        })
    }

    /// Samples `samples` triples `(u, n, v)` of basis vectors and checks
    /// `a(u_(n) v) = a(u)_(n) a(v)`.
    pub fn check_homomorphism(&self, samples: usize, seed: u64) -> Result<()> {
        let w = self.cutoff();
        let engine = engine_for(&self.basis);
        let mut rng = StdRng::seed_from_u64(seed);
        let mut done = 0;
        let mut attempts = 0;
        while done < samples && attempts < samples * 50 {
            attempts += 1;
            let gu = rng.random_range(0..=w);
            let gv = rng.random_range(0..=w);
            if self.basis.dim(gu) == 0 || self.basis.dim(gv) == 0 {
                continue;
            }
            let top = gu as i64 + gv as i64 - 1;
            let lo = gu as i64 + gv as i64 - 1 - w as i64;
            let n = rng.random_range(lo..=top);
            let u = self.basis.basis_state(gu, rng.random_range(0..self.basis.dim(gu)));
            let v = self.basis.basis_state(gv, rng.random_range(0..self.basis.dim(gv)));
            let lhs = self.apply(&engine.mode_apply(&u, n, &v)?)?;
            let rhs = engine.mode_apply(&self.apply(&u)?, n, &self.apply(&v)?)?;
            if lhs != rhs {
                return Err(VoaError::NotAnAutomorphism(format!(
                    "{}: a({u}_({n}) {v}) differs from a(u)_({n}) a(v)",
                    self.expr
                )));
            }
            done += 1;
        }
        Ok(())
    }
}

/// Applies an expression built from lifts and inner automorphisms directly,
/// without grade matrices; `None` when a leaf has no closed form.
fn apply_leafwise(expr: &AutExpr, l: &Arc<Lattice>, v: &StateVector) -> Result<Option<StateVector>> {
    Ok(match expr {
        AutExpr::Inner(h) => {
            let mut out = StateVector::zero();
            for (m, c) in v.terms() {
                out.add_term(m.clone(), &(c * &GaussScalar::phase(&l.inner_qi(h, &m.point()))?));
            }
            Some(out)
        }
        AutExpr::Lifted(iso) => Some(lift_state(iso, l, v)?),
        AutExpr::Propagated(_) => None,
        AutExpr::Compose(parts) => {
            let mut cur = v.clone();
            for p in parts.iter().rev() {
                match apply_leafwise(p, l, &cur)? {
                    Some(x) => cur = x,
                    None => return Ok(None),
                }
            }
            Some(cur)
        }
        AutExpr::Inverse(x) => match x.as_ref() {
            AutExpr::Inner(h) => apply_leafwise(&AutExpr::Inner(h.iter().map(|r| -r).collect()), l, v)?,
            AutExpr::Lifted(iso) => Some(lift_state(&iso.inverse()?, l, v)?),
            AutExpr::Compose(parts) => {
                let inv = parts.iter().rev().map(|p| AutExpr::Inverse(Box::new(p.clone()))).collect();
                apply_leafwise(&AutExpr::Compose(inv), l, v)?
            }
            AutExpr::Inverse(y) => apply_leafwise(y, l, v)?,
            AutExpr::Propagated(_) => None,
        },
    })
}

fn lift_state(iso: &Isometry, l: &Arc<Lattice>, v: &StateVector) -> Result<StateVector> {
    let d = l.rank();
    let engine = VertexEngine::new(l.clone(), u32::MAX);
    let dirs: Vec<Vec<Rational>> = (0..d)
        .map(|i| {
            let e: Vec<i64> = (0..d).map(|j| i64::from(i == j)).collect();
            iso.apply_point(&e).map(|v| v.iter().map(|&x| int(x)).collect())
        })
        .collect::<Result<_>>()?;
    let mut out = StateVector::zero();
    for (m, c) in v.terms() {
        let mut img = StateVector::exp(&iso.apply_point(&m.point())?);
        for md in m.modes() {
            img = engine.heis_apply(&dirs[md.dir as usize], -(md.n as i64), &img);
        }
        out.add_scaled(&img, c);
    }
    Ok(out)
}

/// A finite group generated by automorphisms, enumerated by closure with
/// equality tested on all grades up to the cutoff. Equality beyond the
/// cutoff is not certified.
#[derive(Debug, Clone)]
pub struct AutGroup {
    generators: Vec<Automorphism>,
    elements: Vec<Automorphism>,
}

pub const DEFAULT_GROUP_BOUND: usize = 64;

impl AutGroup {
    pub fn generate(generators: Vec<Automorphism>, basis: Arc<GradedBasis>, bound: usize) -> Result<Self> {
        for g in &generators {
            if g.basis.lattice() != basis.lattice() || g.cutoff() != basis.cutoff() {
                return Err(VoaError::Domain("group generators act on different spaces".into()));
            }
        }
        let mut elements = vec![Automorphism::identity(basis)];
        let mut frontier = 0;
        while frontier < elements.len() {
            let x = elements[frontier].clone();
            frontier += 1;
            for g in &generators {
                let y = g.compose(&x)?;
                let mut seen = false;
                for e in &elements {
                    if e.mats == y.mats {
                        seen = true;
                        break;
                    }
                }
                if !seen {
                    if elements.len() >= bound {
                        return Err(VoaError::OrderExceedsBound { bound: bound as u32 });
                    }
                    elements.push(y);
                }
            }
        }
        Ok(AutGroup { generators, elements })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Automorphism] {
        &self.generators
    }

    pub fn elements(&self) -> &[Automorphism] {
        &self.elements
    }

    /// Common fixed space of the generators on grade `n`, checked against
    /// the average trace over all elements.
    pub fn fixed_space(&self, n: u32) -> Result<Subspace> {
        let basis = &self.elements[0].basis;
        let mut fixed = Subspace::whole(n, basis.dim(n));
        for g in &self.generators {
            let m = &g.mats[n as usize];
            let imgs: Vec<SVec> = fixed
                .basis()
                .iter()
                .map(|v| crate::fock::linalg::sv_axpy(&m.apply(v), v, &-GaussScalar::one()))
                .collect();
            fixed = fixed.kernel_on(&imgs);
        }
        let avg = self.average_trace(n)?;
        if avg != GaussScalar::from_int(fixed.dim() as i64) {
            return Err(VoaError::Consistency(format!(
                "fixed space at grade {n} has dimension {} but the average trace is {avg}",
                fixed.dim()
            )));
        }
        Ok(fixed)
    }

    pub fn average_trace(&self, n: u32) -> Result<GaussScalar> {
        let mut total = GaussScalar::zero();
        for e in &self.elements {
            total += &e.trace_on_grade(n)?;
        }
        Ok(total.scale(&Rational::new(1.into(), (self.elements.len() as i64).into())))
    }
}

/// Builds automorphisms from DSL expressions, resolving vector, isometry and
/// automorphism names.
#[derive(Clone)]
pub struct AutBuilder {
    basis: Arc<GradedBasis>,
    vectors: HashMap<String, Vec<Rational>>,
    isometries: HashMap<String, Arc<Isometry>>,
    named: HashMap<String, Automorphism>,
    sigma_cache: HashMap<usize, Automorphism>,
}

impl AutBuilder {
    pub fn new(basis: Arc<GradedBasis>) -> Self {
        AutBuilder {
            basis,
            vectors: HashMap::new(),
            isometries: HashMap::new(),
            named: HashMap::new(),
            sigma_cache: HashMap::new(),
        }
    }

    pub fn basis(&self) -> &Arc<GradedBasis> {
        &self.basis
    }

    pub fn add_vector(&mut self, name: &str, coords: Vec<Rational>) {
        self.vectors.insert(name.to_string(), coords);
    }

    pub fn add_isometry(&mut self, iso: Arc<Isometry>) {
        self.isometries.insert(iso.name().to_string(), iso);
    }

    pub fn add_named(&mut self, name: &str, a: Automorphism) {
        self.named.insert(name.to_string(), a);
    }

    pub fn named(&self, name: &str) -> Option<&Automorphism> {
        self.named.get(name)
    }

    pub fn resolve_vector(&self, v: &VecLit) -> Result<Vec<Rational>> {
        let d = self.basis.lattice().rank();
        match v {
            VecLit::Coords(c) => {
                if c.len() != d {
                    return Err(VoaError::Domain(format!("vector has {} coordinates, expected {d}", c.len())));
                }
                Ok(c.clone())
            }
            VecLit::Combo(terms) => {
                let mut out = vec![Rational::zero(); d];
                for (r, name) in terms {
                    let x = self.vectors.get(name).ok_or_else(|| VoaError::UnknownName(name.clone()))?;
                    for (o, xi) in out.iter_mut().zip(x) {
                        *o += r * xi;
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn build(&mut self, e: &DslExpr) -> Result<Automorphism> {
        let basis = self.basis.clone();
        match e {
            DslExpr::Lift(name) => {
                let iso = self.isometries.get(name).cloned().ok_or_else(|| VoaError::UnknownName(name.clone()))?;
                Automorphism::lifted(iso, basis)
            }
            DslExpr::Inner(v) => Automorphism::inner(self.resolve_vector(v)?, basis),
            DslExpr::Sigma(k) => {
                if *k == 0 {
                    return Err(VoaError::Domain("block indices start at 1".into()));
                }
                if let Some(a) = self.sigma_cache.get(k) {
                    return Ok(a.clone());
                }
                let a = Automorphism::sigma(k - 1, basis)?;
                self.sigma_cache.insert(*k, a.clone());
                Ok(a)
            }
            DslExpr::Theta => {
                let l = basis.lattice().clone();
                Automorphism::lifted(Arc::new(Isometry::negation(l)), basis)
            }
            DslExpr::Perm(cycle) => {
                let l = basis.lattice().clone();
                let iso = Isometry::block_cycle(format!("perm({})", join_usize(cycle)), l, cycle)?;
                Automorphism::lifted(Arc::new(iso), basis)
            }
            DslExpr::Inv(x) => self.build(x)?.inverse(),
            DslExpr::Compose(parts) => {
                let mut acc: Option<Automorphism> = None;
                for p in parts {
                    let a = self.build(p)?;
                    acc = Some(match acc {
                        None => a,
                        Some(prev) => prev.compose(&a)?,
                    });
                }
                Ok(acc.unwrap_or_else(|| Automorphism::identity(basis)))
            }
            DslExpr::Named(name) => self.named.get(name).cloned().ok_or_else(|| VoaError::UnknownName(name.clone())),
        }
    }

    pub fn build_str(&mut self, src: &str) -> Result<Automorphism> {
        let e = parse_dsl(src)?;
        self.build(&e)
    }
}

fn join_usize(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Moves a state of `V_S` (`S` the source of `iso`, sitting inside some
/// ambient lattice) to `V_T`, sending `e^mu -> e^{iso mu}` and
/// `h(-n) -> (iso h)(-n)`.
///
/// The state must lie in `V_S`: lattice points in `S` and no Heisenberg
/// content orthogonal to `S` (checked via annihilation by `x(m)`, `m > 0`,
/// for `x` spanning the orthogonal complement).
pub fn transport_state(iso: &Isometry, source_basis: &GradedBasis, v: &StateVector) -> Result<StateVector> {
    let src = iso.source();
    let amb = src.ambient().clone();
    if source_basis.lattice() != &amb {
        return Err(VoaError::Domain(format!("state lives in {}, not in {}", source_basis.lattice().name(), amb.name())));
    }
    let engine = engine_for(source_basis);
    let perp = match src {
        LatticeSpan::Full(_) => Vec::new(),
        LatticeSpan::Sub(s) => s.orthogonal_complement(),
    };
    let level = v.terms().map(|(m, _)| m.heisenberg_level()).max().unwrap_or(0);
    for x in &perp {
        for m in 1..=level {
            if !engine.heis_apply(x, m, v).is_zero() {
                return Err(VoaError::Domain(format!("state is not in V_{}", src.name())));
            }
        }
    }
    // projection of each ambient direction onto the span of S, then mapped
    let d = amb.rank();
    let sb = src.basis();
    let gs: Vec<Vec<Rational>> = src.gram().iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
    let gsi = invert(&gs).expect("positive definite");
    let mut dir_images: Vec<Vec<Rational>> = Vec::with_capacity(d);
    for i in 0..d {
        let e: Vec<i64> = (0..d).map(|j| i64::from(i == j)).collect();
        let pairings: Vec<Rational> = sb.iter().map(|b| int(amb.inner_int(b, &e))).collect();
        let mut proj = vec![Rational::zero(); d];
        for (a, ba) in sb.iter().enumerate() {
            let ca: Rational = (0..sb.len()).map(|b| &gsi[a][b] * &pairings[b]).sum();
            for (p, &x) in proj.iter_mut().zip(ba) {
                *p += &ca * int(x);
            }
        }
        dir_images.push(iso.apply_q(&proj)?);
    }
    let tgt_rank = iso.target().ambient().rank();
    let out_engine = VertexEngine::new(iso.target().ambient().clone(), u32::MAX);
    let mut out = StateVector::zero();
    for (m, c) in v.terms() {
        if !src.contains(&m.point()) {
            return Err(VoaError::Domain(format!("charge of {m} is not in {}", src.name())));
        }
        let mut img = StateVector::exp(&iso.apply_point(&m.point())?);
        for md in m.modes() {
            img = out_engine.heis_apply(&dir_images[md.dir as usize], -(md.n as i64), &img);
        }
        debug_assert!(img.terms().all(|(t, _)| t.point().len() == tgt_rank));
        out.add_scaled(&img, c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn a1(w: u32) -> Arc<GradedBasis> {
        let l = Arc::new(Lattice::new("A1", vec![vec![2]]).unwrap());
        Arc::new(GradedBasis::build(l, w))
    }

    #[test]
    fn theta_and_inner_on_a1() {
        let b = a1(4);
        let mut builder = AutBuilder::new(b.clone());
        builder.add_vector("a", vec![int(1)]);
        let theta = builder.build_str("theta").unwrap();
        assert_eq!(theta.apply(&StateVector::exp(&[1])).unwrap(), StateVector::exp(&[-1]));
        assert_eq!(theta.order_of(4, 8).unwrap(), 2);
        assert_eq!(theta.trace_on_grade(1).unwrap(), GaussScalar::from_int(-1));
        let inn = builder.build_str("inner(1/4*a)").unwrap();
        assert_eq!(inn.apply(&StateVector::exp(&[1])).unwrap(), StateVector::exp(&[1]).scaled(&GaussScalar::from_int(-1)));
        assert_eq!(inn.trace_on_grade(1).unwrap(), GaussScalar::from_int(-1));
        assert!(builder.build_str("inner(0*a)").unwrap().is_identity_up_to(4));
        assert!(matches!(builder.build_str("inner(1/6*a)"), Err(VoaError::UnrepresentablePhase(_))));
    }

    #[test]
    fn sigma_conjugates_theta() {
        let b = a1(4);
        let mut builder = AutBuilder::new(b.clone());
        builder.add_vector("a", vec![int(1)]);
        let s = builder.build_str("sigma(1)").unwrap();
        assert!(s.power(2).is_identity_up_to(4));
        let lhs = builder.build_str("sigma(1)*theta*sigma(1)").unwrap();
        let rhs = builder.build_str("inner(1/4*a)").unwrap();
        assert!(lhs.equal_on_grades(&rhs, 4).unwrap());
        let conj = builder.build_str("inner(-1/8*a)*inner(1/4*a)*theta*inner(1/8*a)").unwrap();
        let theta = builder.build_str("theta").unwrap();
        assert!(conj.equal_on_grades(&theta, 4).unwrap());
        s.check_homomorphism(25, 7).unwrap();
    }

    #[test]
    fn group_fixed_spaces() {
        let b = a1(4);
        let mut builder = AutBuilder::new(b.clone());
        let theta = builder.build_str("theta").unwrap();
        let g = AutGroup::generate(vec![theta], b.clone(), DEFAULT_GROUP_BOUND).unwrap();
        assert_eq!(g.order(), 2);
        let dims: Vec<usize> = (0..=4).map(|n| g.fixed_space(n).unwrap().dim()).collect();
        // (dim + trace)/2: dims 1, 3, 4, 7, 13; traces from prod (1 + q^n)^-1 = 1 - q - q^3 + q^4
        assert_eq!(dims, vec![1, 1, 2, 3, 7]);
        let e = b.coords(1, &(&StateVector::exp(&[1]) + &StateVector::exp(&[-1]))).unwrap();
        assert!(g.fixed_space(1).unwrap().contains(&e));
    }

    #[test]
    fn diagonal_forms_compose() {
        let b = a1(2);
        let mut builder = AutBuilder::new(b.clone());
        let a = builder.build_str("inner([1/4])*theta").unwrap();
        let f = a.expr().diagonal_form(b.lattice()).unwrap();
        assert_eq!(f, DiagonalForm { h: vec![rat(1, 4)], signs: vec![-1] });
        let inv = a.inverse().unwrap();
        let fi = inv.expr().diagonal_form(b.lattice()).unwrap();
        assert_eq!(fi, DiagonalForm { h: vec![rat(1, 4)], signs: vec![-1] });
        assert!(builder.build_str("sigma(1)").unwrap().expr().diagonal_form(b.lattice()).is_none());
    }

    #[test]
    fn block_sigma_matches_direct_propagation() {
        let l = Arc::new(Lattice::new("A1^2", vec![vec![2, 0], vec![0, 2]]).unwrap());
        let b = Arc::new(GradedBasis::build(l, 3));
        let block = Automorphism::sigma(1, b.clone()).unwrap();
        // direct propagation from the weight-one images
        let images: Vec<StateVector> = (0..b.dim(1)).map(|i| block.apply(&b.basis_state(1, i)).unwrap()).collect();
        let direct = Automorphism::propagate(&images, b.clone(), "direct").unwrap();
        assert!(direct.equal_on_grades(&block, 3).unwrap());
    }

    #[test]
    fn bad_propagation_is_rejected() {
        let b = a1(3);
        // alpha -> 2 alpha does not extend
        let images: Vec<StateVector> =
            (0..3).map(|i| b.basis_state(1, i).scaled(&GaussScalar::from_int(if i == 1 { 2 } else { 1 }))).collect();
        assert!(Automorphism::propagate(&images, b, "bad").is_err());
    }
}
