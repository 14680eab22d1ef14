//! Graded subspaces of `V_L` computed exactly: commutants as kernels of
//! `e_(0)`, orbifold fixed points, images, and the identities relating them.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::autos::{AutGroup, Automorphism};
use crate::error::{Result, VoaError};
use crate::fock::linalg::{kernel_of_columns, sv_axpy};
use crate::fock::{GradedBasis, SVec, StateVector, Subspace};
use crate::lattice::LatticeSpan;
use crate::scalar::GaussScalar;
use crate::vertex::VertexEngine;

/// A subspace of every grade `0..=cutoff` of `V_L`.
#[derive(Debug, Clone)]
pub struct ComputedSubspace {
    basis: Arc<GradedBasis>,
    grades: Vec<Subspace>,
    provenance: String,
}

impl ComputedSubspace {
    pub fn new(basis: Arc<GradedBasis>, grades: Vec<Subspace>, provenance: impl Into<String>) -> Self {
        ComputedSubspace { basis, grades, provenance: provenance.into() }
    }

    pub fn whole(basis: Arc<GradedBasis>, w: u32) -> Self {
        let grades = (0..=w).map(|n| Subspace::whole(n, basis.dim(n))).collect();
        Self::new(basis, grades, "whole")
    }

    pub fn basis(&self) -> &Arc<GradedBasis> {
        &self.basis
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn cutoff(&self) -> u32 {
        self.grades.len() as u32 - 1
    }

    pub fn grade(&self, n: u32) -> &Subspace {
        &self.grades[n as usize]
    }

    pub fn grades(&self) -> &[Subspace] {
        &self.grades
    }

    pub fn dims(&self) -> Vec<usize> {
        self.grades.iter().map(|g| g.dim()).collect()
    }

    pub fn with_provenance(mut self, p: impl Into<String>) -> Self {
        self.provenance = p.into();
        self
    }

    pub fn contains_vacuum(&self) -> bool {
        self.grades[0].dim() == 1
    }

    /// Whether a homogeneous state lies in the subspace.
    pub fn contains_state(&self, v: &StateVector) -> Result<bool> {
        for (w, part) in v.by_weight(self.basis.lattice()) {
            if w < 0 || w > self.cutoff() as i64 {
                return Err(VoaError::CutoffExceeded { weight: w, cutoff: self.cutoff() });
            }
            let c = self.basis.coords(w as u32, &part)?;
            if !self.grades[w as usize].contains(&c) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn same_space(&self, other: &ComputedSubspace) -> Result<u32> {
        if self.basis.lattice() != other.basis.lattice() {
            return Err(VoaError::Domain("subspaces live in different lattice algebras".into()));
        }
        Ok(self.cutoff().min(other.cutoff()))
    }

    pub fn intersect(&self, other: &ComputedSubspace) -> Result<ComputedSubspace> {
        let w = self.same_space(other)?;
        let grades = (0..=w as usize)
            .into_par_iter()
            .map(|n| self.grades[n].intersection(&other.grades[n]))
            .collect::<Result<Vec<_>>>()?;
        Ok(ComputedSubspace::new(
            self.basis.clone(),
            grades,
            format!("intersection({}, {})", self.provenance, other.provenance),
        ))
    }

    /// Truncation to grades `0..=w`.
    pub fn truncate(&self, w: u32) -> ComputedSubspace {
        let w = w.min(self.cutoff());
        ComputedSubspace::new(self.basis.clone(), self.grades[..=w as usize].to_vec(), self.provenance.clone())
    }
}

impl PartialEq for ComputedSubspace {
    fn eq(&self, other: &Self) -> bool {
        self.basis.lattice() == other.basis.lattice() && self.grades == other.grades && self.provenance == other.provenance
    }
}

impl fmt::Display for ComputedSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.dims().iter().map(|d| d.to_string()).collect();
        write!(f, "{} [{}]", self.provenance, dims.join(", "))
    }
}

/// Images `e_(0) b` of the basis of grade `n`, in coordinates of grade `n+1`.
fn zero_mode_images(engine: &VertexEngine, basis: &GradedBasis, e: &StateVector, n: u32, vecs: &[SVec]) -> Result<Vec<SVec>> {
    vecs.par_iter()
        .map(|v| {
            let st = basis.state(n, v);
            let img = engine.mode_apply(e, 0, &st)?;
            basis.coords(n + 1, &img)
        })
        .collect()
}

fn headroom(basis: &GradedBasis, w: u32) -> Result<()> {
    if w + 1 > basis.cutoff() {
        return Err(VoaError::CutoffExceeded { weight: w as i64 + 1, cutoff: basis.cutoff() });
    }
    Ok(())
}

/// `Com_V(e) = ker e_(0)` on every grade `n <= w`. Needs the basis to reach
/// weight `w + 1`.
pub fn commutant_dims(basis: &Arc<GradedBasis>, e: &StateVector, w: u32) -> Result<ComputedSubspace> {
    headroom(basis, w)?;
    let engine = VertexEngine::for_basis(basis);
    let grades = (0..=w)
        .into_par_iter()
        .map(|n| {
            let units: Vec<SVec> = (0..basis.dim(n) as u32).map(|i| vec![(i, GaussScalar::one())]).collect();
            let cols = zero_mode_images(&engine, basis, e, n, &units)?;
            let ker = kernel_of_columns(&cols);
            Ok(Subspace::from_spanning(n, basis.dim(n), &ker))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComputedSubspace::new(basis.clone(), grades, "commutant"))
}

/// `Com_U(e)` for a computed subspace `U`: the kernel of `e_(0)` restricted
/// to `U`.
pub fn commutant_in(sub: &ComputedSubspace, e: &StateVector, w: u32) -> Result<ComputedSubspace> {
    let basis = sub.basis();
    headroom(basis, w)?;
    let w = w.min(sub.cutoff());
    let engine = VertexEngine::for_basis(basis);
    let grades = (0..=w)
        .into_par_iter()
        .map(|n| {
            let g = sub.grade(n);
            let cols = zero_mode_images(&engine, basis, e, n, g.basis())?;
            Ok(g.kernel_on(&cols))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComputedSubspace::new(basis.clone(), grades, format!("commutant in {}", sub.provenance())))
}

/// The common kernel of `u_(n)`, `n >= 0`, for every `u` in `generators`,
/// on grades `<= w`.
pub fn annihilator(basis: &Arc<GradedBasis>, generators: &[StateVector], w: u32) -> Result<ComputedSubspace> {
    let engine = VertexEngine::for_basis(basis);
    let l = basis.lattice();
    let mut wts = Vec::new();
    for g in generators {
        wts.push(g.weight(l)?.unwrap_or(0));
    }
    let grades = (0..=w)
        .into_par_iter()
        .map(|n| {
            let mut sub = Subspace::whole(n, basis.dim(n));
            for (g, &wg) in generators.iter().zip(&wts) {
                for k in 0..(wg + n as i64) {
                    let target = wg + n as i64 - k - 1;
                    if target > basis.cutoff() as i64 {
                        return Err(VoaError::CutoffExceeded { weight: target, cutoff: basis.cutoff() });
                    }
                    let cols = sub
                        .basis()
                        .iter()
                        .map(|v| basis.coords(target as u32, &engine.mode_apply(g, k, &basis.state(n, v))?))
                        .collect::<Result<Vec<SVec>>>()?;
                    sub = sub.kernel_on(&cols);
                }
            }
            Ok(sub)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComputedSubspace::new(basis.clone(), grades, "annihilator"))
}

/// `V_{shift + S}` as a subspace: monomials whose charge lies in `shift + S`.
pub fn charge_subspace(basis: &Arc<GradedBasis>, span: &LatticeSpan, shift: &[i64], w: u32) -> Result<ComputedSubspace> {
    if span.ambient() != basis.lattice() {
        return Err(VoaError::Domain(format!("{} is not a sublattice of {}", span.name(), basis.lattice().name())));
    }
    let w = w.min(basis.cutoff());
    let grades = (0..=w)
        .map(|n| {
            let vecs: Vec<SVec> = basis
                .grade(n)
                .iter()
                .enumerate()
                .filter(|(_, m)| {
                    let p: Vec<i64> = m.point().iter().zip(shift).map(|(a, b)| a - b).collect();
                    span.contains(&p)
                })
                .map(|(i, _)| vec![(i as u32, GaussScalar::one())])
                .collect();
            Subspace::from_spanning(n, basis.dim(n), &vecs)
        })
        .collect();
    Ok(ComputedSubspace::new(basis.clone(), grades, format!("charges in {}", span.name())))
}

/// The Heisenberg subalgebra part along `span` tensored with its lattice
/// part: `V_S` for a sublattice `S` of the ambient lattice, as monomials in
/// `S`-charges and Heisenberg modes restricted to `S (x) Q`.
pub fn sublattice_algebra(basis: &Arc<GradedBasis>, span: &LatticeSpan, w: u32) -> Result<ComputedSubspace> {
    let charges = charge_subspace(basis, span, &vec![0; basis.lattice().rank()], w)?;
    let perp = match span {
        LatticeSpan::Full(_) => return Ok(charges.with_provenance(format!("V_{}", span.name()))),
        LatticeSpan::Sub(s) => s.orthogonal_complement(),
    };
    let engine = VertexEngine::for_basis(basis);
    let mut grades = Vec::new();
    for n in 0..=charges.cutoff() {
        let mut sub = charges.grade(n).clone();
        for x in &perp {
            for m in 1..=n as i64 {
                let cols = sub
                    .basis()
                    .iter()
                    .map(|v| basis.coords(n - m as u32, &engine.heis_apply(x, m, &basis.state(n, v))))
                    .collect::<Result<Vec<SVec>>>()?;
                sub = sub.kernel_on(&cols);
            }
        }
        grades.push(sub);
    }
    Ok(ComputedSubspace::new(basis.clone(), grades, format!("V_{}", span.name())))
}

/// Restriction of `a - 1` to each grade of `sub`, and its kernel.
fn fixed_in(sub: &Subspace, a: &Automorphism) -> Subspace {
    let m = a.matrix(sub.grade());
    let cols: Vec<SVec> = sub.basis().iter().map(|v| sv_axpy(&m.apply(v), v, &-GaussScalar::one())).collect();
    sub.kernel_on(&cols)
}

/// `sub^G`: the common fixed points of the generators of `G` in `sub`.
pub fn orbifold(sub: &ComputedSubspace, group: &AutGroup, w: u32) -> Result<ComputedSubspace> {
    let w = w.min(sub.cutoff());
    for g in group.generators() {
        if g.lattice() != sub.basis().lattice() {
            return Err(VoaError::Domain("group acts on a different space".into()));
        }
        for n in 0..=w {
            if !g.preserves(sub.grade(n)) {
                return Err(VoaError::Consistency(format!(
                    "{} does not preserve {} at grade {n}",
                    g.expr(),
                    sub.provenance()
                )));
            }
        }
    }
    let grades = (0..=w)
        .into_par_iter()
        .map(|n| {
            let mut s = sub.grade(n).clone();
            for g in group.generators() {
                s = fixed_in(&s, g);
            }
            s
        })
        .collect();
    Ok(ComputedSubspace::new(sub.basis().clone(), grades, format!("{}^G", sub.provenance())))
}

/// Gradewise image under an automorphism.
pub fn image_subspace(a: &Automorphism, sub: &ComputedSubspace) -> Result<ComputedSubspace> {
    if a.lattice() != sub.basis().lattice() {
        return Err(VoaError::Domain("automorphism acts on a different space".into()));
    }
    let w = sub.cutoff().min(a.cutoff());
    let grades = (0..=w).into_par_iter().map(|n| sub.grade(n).image(a.matrix(n))).collect();
    Ok(ComputedSubspace::new(sub.basis().clone(), grades, format!("{}({})", a.expr(), sub.provenance())))
}

/// One line of a check report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub check: String,
    pub grade: u32,
    pub lhs: usize,
    pub rhs: usize,
    pub ok: bool,
}

impl fmt::Display for ReportRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "check={} grade={} lhs={} rhs={} status={}",
            self.check,
            self.grade,
            self.lhs,
            self.rhs,
            if self.ok { "OK" } else { "FAIL" }
        )
    }
}

/// Rows comparing two subspaces grade by grade: equal dimensions and, when
/// they live in the same space, equal subspaces.
pub fn compare_subspaces(name: &str, lhs: &ComputedSubspace, rhs: &ComputedSubspace, w: u32) -> Vec<ReportRow> {
    let same = lhs.basis().lattice() == rhs.basis().lattice();
    (0..=w.min(lhs.cutoff()).min(rhs.cutoff()))
        .map(|n| {
            let a = lhs.grade(n);
            let b = rhs.grade(n);
            let ok = if same { a == b } else { a.dim() == b.dim() };
            ReportRow { check: name.to_string(), grade: n, lhs: a.dim(), rhs: b.dim(), ok }
        })
        .collect()
}

/// Rows comparing dimension lists.
pub fn compare_dims(name: &str, lhs: &[usize], rhs: &[usize]) -> Vec<ReportRow> {
    let n = lhs.len().max(rhs.len());
    (0..n)
        .map(|k| {
            let a = lhs.get(k).copied();
            let b = rhs.get(k).copied();
            ReportRow {
                check: name.to_string(),
                grade: k as u32,
                lhs: a.unwrap_or(0),
                rhs: b.unwrap_or(0),
                ok: a.is_some() && a == b,
            }
        })
        .collect()
}

/// `Com_V(e1 + e2) = Com_{Com_V(e1)}(e2)` gradewise.
pub fn verify_nested(basis: &Arc<GradedBasis>, e1: &StateVector, e2: &StateVector, w: u32) -> Result<Vec<ReportRow>> {
    // e1_(n) e2 reaches weight 3 whatever the basis cutoff
    let engine = VertexEngine::new(basis.lattice().clone(), basis.cutoff().max(4));
    if !engine.commuting_pair(e1, e2)? {
        return Err(VoaError::Domain("the two conformal vectors do not commute".into()));
    }
    let sum = e1 + e2;
    let direct = commutant_dims(basis, &sum, w)?;
    let first = commutant_dims(basis, e1, w)?;
    let nested = commutant_in(&first, e2, w)?;
    Ok(compare_subspaces("nested", &direct, &nested, w))
}

/// `(Com_V(e))^G = Com_{V^G}(e)` gradewise.
pub fn verify_orbifold_coset(basis: &Arc<GradedBasis>, e: &StateVector, group: &AutGroup, w: u32) -> Result<Vec<ReportRow>> {
    for g in group.generators() {
        if &g.apply(e)? != e {
            return Err(VoaError::Domain(format!("{} does not fix the conformal vector", g.expr())));
        }
    }
    let com = commutant_dims(basis, e, w)?;
    let lhs = orbifold(&com, group, w)?;
    let whole = ComputedSubspace::whole(basis.clone(), w);
    let fixed = orbifold(&whole, group, w)?;
    let rhs = commutant_in(&fixed, e, w)?;
    Ok(compare_subspaces("orbifold-coset", &lhs, &rhs, w))
}

/// First grade where `a` does not preserve `sub` or `a^2 != c` on it.
pub fn square_acts_as(a: &Automorphism, sub: &ComputedSubspace, c: &GaussScalar) -> Result<Option<u32>> {
    for n in 0..=sub.cutoff().min(a.cutoff()) {
        if !a.preserves(sub.grade(n)) || !a.square_is_scalar_on(sub.grade(n), c) {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autos::{AutBuilder, DEFAULT_GROUP_BOUND};
    use crate::lattice::{Lattice, Sublattice};

    fn lat(name: &str, diag: &[i64]) -> Arc<Lattice> {
        let d = diag.len();
        let gram = (0..d).map(|i| (0..d).map(|j| if i == j { diag[i] } else { 0 }).collect()).collect();
        Arc::new(Lattice::new(name, gram).unwrap())
    }

    #[test]
    fn commutant_of_full_virasoro_is_vacuum() {
        let l = lat("A1", &[2]);
        let b = Arc::new(GradedBasis::build(l.clone(), 5));
        let engine = VertexEngine::for_basis(&b);
        let w = engine.lattice_virasoro(&LatticeSpan::Full(l)).unwrap();
        let c = commutant_dims(&b, &w, 4).unwrap();
        assert_eq!(c.dims(), vec![1, 0, 0, 0, 0]);
        assert!(matches!(commutant_dims(&b, &w, 5), Err(VoaError::CutoffExceeded { .. })));
    }

    #[test]
    fn orthogonal_commutants_and_nesting() {
        let l = lat("A1^2", &[2, 2]);
        let b = Arc::new(GradedBasis::build(l.clone(), 4));
        let engine = VertexEngine::for_basis(&b);
        let s1 = Arc::new(Sublattice::new("x", l.clone(), vec![vec![1, 0]]).unwrap());
        let s2 = Arc::new(Sublattice::new("y", l.clone(), vec![vec![0, 1]]).unwrap());
        let w1 = engine.lattice_virasoro(&LatticeSpan::Sub(s1)).unwrap();
        let w2 = engine.lattice_virasoro(&LatticeSpan::Sub(s2.clone())).unwrap();
        let c1 = commutant_dims(&b, &w1, 3).unwrap();
        // Com(V_x) = V_y, whose dims are those of V_A1
        assert_eq!(c1.dims(), vec![1, 3, 4, 7]);
        let vy = sublattice_algebra(&b, &LatticeSpan::Sub(s2), 3).unwrap();
        assert_eq!(vy, c1.clone().with_provenance("V_y"));
        let rows = verify_nested(&b, &w1, &w2, 3).unwrap();
        assert!(rows.iter().all(|r| r.ok));
        assert!(rows.iter().all(|r| r.lhs == usize::from(r.grade == 0)));
        let rows0 = verify_nested(&b, &w1, &w2, 0).unwrap();
        assert_eq!(rows0.len(), 1);
        assert_eq!(rows0[0].to_string(), "check=nested grade=0 lhs=1 rhs=1 status=OK");
    }

    #[test]
    fn theta_orbifold_by_burnside() {
        let l = lat("A1", &[2]);
        let b = Arc::new(GradedBasis::build(l, 4));
        let mut builder = AutBuilder::new(b.clone());
        let g = AutGroup::generate(vec![builder.build_str("theta").unwrap()], b.clone(), DEFAULT_GROUP_BOUND).unwrap();
        let whole = ComputedSubspace::whole(b.clone(), 4);
        let plus = orbifold(&whole, &g, 4).unwrap();
        for n in 0..=4 {
            let t = g.elements()[1].trace_on_grade(n).unwrap();
            let expected = (GaussScalar::from_int(b.dim(n) as i64) + t).scale(&crate::scalar::rat(1, 2));
            assert_eq!(GaussScalar::from_int(plus.dims()[n as usize] as i64), expected);
        }
        let trivial = AutGroup::generate(vec![], b.clone(), DEFAULT_GROUP_BOUND).unwrap();
        assert_eq!(orbifold(&whole, &trivial, 4).unwrap().dims(), whole.dims());
    }

    #[test]
    fn strict_annihilation_matches_kernel() {
        let l = lat("A1^2", &[2, 2]);
        let b = Arc::new(GradedBasis::build(l.clone(), 3));
        let engine = VertexEngine::for_basis(&b);
        let s1 = Arc::new(Sublattice::new("x", l.clone(), vec![vec![1, 0]]).unwrap());
        let w1 = engine.lattice_virasoro(&LatticeSpan::Sub(s1)).unwrap();
        let c = commutant_dims(&b, &w1, 2).unwrap();
        let gens = vec![StateVector::exp(&[1, 0]), StateVector::exp(&[-1, 0])];
        let strict = annihilator(&b, &gens, 2).unwrap();
        assert_eq!(strict.grades(), c.grades());
    }
}
