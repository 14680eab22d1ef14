//! Exact sparse linear algebra over Q(i) on a single grade.
//!
//! Vectors are sorted `(index, coefficient)` lists with no zero entries.
//! Subspaces are kept in reduced row echelon form with the pivot at the first
//! nonzero coordinate and leading coefficient 1, so equal subspaces compare
//! equal structurally.

use std::collections::{BinaryHeap, HashMap};

use rayon::prelude::*;

use crate::error::{Result, VoaError};
use crate::scalar::GaussScalar;

pub type SVec = Vec<(u32, GaussScalar)>;

pub fn sv_get(v: &SVec, i: u32) -> Option<&GaussScalar> {
    v.binary_search_by_key(&i, |(k, _)| *k).ok().map(|p| &v[p].1)
}

pub fn sv_scale(v: &SVec, c: &GaussScalar) -> SVec {
    if c.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(i, x)| (*i, x * c)).collect()
}

/// `a + c * b`.
pub fn sv_axpy(a: &SVec, b: &SVec, c: &GaussScalar) -> SVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            let x = &b[j].1 * c;
            if !x.is_zero() {
                out.push((b[j].0, x));
            }
            j += 1;
        } else {
            let x = &a[i].1 + &(&b[j].1 * c);
            if !x.is_zero() {
                out.push((a[i].0, x));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn sv_from_dense(v: Vec<GaussScalar>) -> SVec {
    v.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i as u32, x)).collect()
}

/// Dense scratch accumulator for `v - sum c_k rows_k`.
struct Acc {
    slots: Vec<Option<GaussScalar>>,
    touched: Vec<u32>,
}

impl Acc {
    fn new(dim: usize) -> Self {
        Acc { slots: vec![None; dim], touched: Vec::new() }
    }

    fn load(&mut self, v: &SVec) {
        for (i, x) in v {
            self.slots[*i as usize] = Some(x.clone());
            self.touched.push(*i);
        }
    }

    fn sub_scaled(&mut self, v: &SVec, c: &GaussScalar) {
        for (i, x) in v {
            let t = x * c;
            match &mut self.slots[*i as usize] {
                Some(s) => *s -= &t,
                slot @ None => {
                    *slot = Some(-t);
                    self.touched.push(*i);
                }
            }
        }
    }

    fn take(&mut self) -> SVec {
        self.touched.sort_unstable();
        self.touched.dedup();
        let mut out = Vec::with_capacity(self.touched.len());
        for &i in &self.touched {
            if let Some(x) = self.slots[i as usize].take() {
                if !x.is_zero() {
                    out.push((i, x));
                }
            }
        }
        self.touched.clear();
        out
    }
}

/// Incrementally built, fully reduced echelon form, optionally carrying a
/// companion vector per row that undergoes the same row operations.
pub struct Echelon {
    dim: usize,
    companion_dim: usize,
    pivot_last: bool,
    rows: Vec<SVec>,
    companions: Vec<SVec>,
    pivot_row: HashMap<u32, usize>,
}

pub enum Inserted {
    Pivot(u32),
    /// The vector was dependent; carries the reduced companion.
    Dependent(SVec),
}

impl Echelon {
    pub fn new(dim: usize, pivot_last: bool) -> Self {
        Self::with_companions(dim, 0, pivot_last)
    }

    pub fn with_companions(dim: usize, companion_dim: usize, pivot_last: bool) -> Self {
        Echelon { dim, companion_dim, pivot_last, rows: Vec::new(), companions: Vec::new(), pivot_row: HashMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &SVec) -> SVec {
        self.reduce_with(v, None).0
    }

    fn reduce_with(&self, v: &SVec, y: Option<&SVec>) -> (SVec, SVec) {
        let hits: Vec<(usize, GaussScalar)> =
            v.iter().filter_map(|(i, c)| self.pivot_row.get(i).map(|&r| (r, c.clone()))).collect();
        if hits.is_empty() {
            return (v.clone(), y.cloned().unwrap_or_default());
        }
        let mut acc = Acc::new(self.dim);
        acc.load(v);
        for (r, c) in &hits {
            acc.sub_scaled(&self.rows[*r], c);
        }
        let reduced = acc.take();
        let comp = match y {
            Some(y) => {
                let mut acc = Acc::new(self.companion_dim);
                acc.load(y);
                for (r, c) in &hits {
                    acc.sub_scaled(&self.companions[*r], c);
                }
                acc.take()
            }
            None => Vec::new(),
        };
        (reduced, comp)
    }

    pub fn insert(&mut self, v: &SVec) -> Option<u32> {
        match self.insert_with(v, None) {
            Inserted::Pivot(p) => Some(p),
            Inserted::Dependent(_) => None,
        }
    }

    pub fn insert_with(&mut self, v: &SVec, y: Option<&SVec>) -> Inserted {
        let (mut r, mut comp) = self.reduce_with(v, y);
        if r.is_empty() {
            return Inserted::Dependent(comp);
        }
        let (p, lead) = if self.pivot_last { r.last().unwrap().clone() } else { r[0].clone() };
        if !lead.is_one() {
            let inv = lead.inv().expect("nonzero pivot");
            r = sv_scale(&r, &inv);
            comp = sv_scale(&comp, &inv);
        }
        for k in 0..self.rows.len() {
            if let Some(c) = sv_get(&self.rows[k], p).cloned() {
                let neg = -c;
                self.rows[k] = sv_axpy(&self.rows[k], &r, &neg);
                if y.is_some() {
                    self.companions[k] = sv_axpy(&self.companions[k], &comp, &neg);
                }
            }
        }
        self.pivot_row.insert(p, self.rows.len());
        self.rows.push(r);
        self.companions.push(comp);
        Inserted::Pivot(p)
    }

    /// Rows sorted by pivot, with their companions.
    pub fn into_sorted(self) -> Vec<(u32, SVec, SVec)> {
        let mut out: Vec<(u32, SVec, SVec)> = Vec::with_capacity(self.rows.len());
        let mut pivots: Vec<(u32, usize)> = self.pivot_row.into_iter().collect();
        pivots.sort();
        let mut rows: Vec<Option<SVec>> = self.rows.into_iter().map(Some).collect();
        let mut comps: Vec<Option<SVec>> = self.companions.into_iter().map(Some).collect();
        for (p, r) in pivots {
            out.push((p, rows[r].take().unwrap(), comps[r].take().unwrap()));
        }
        out
    }
}

/// Row echelon form without back-substitution. Each row is scaled so that
/// its last entry, the pivot, is 1; rows stay sparse because earlier rows are
/// never touched again.
struct Forward {
    rows: HashMap<u32, SVec>,
    scratch: Vec<Option<GaussScalar>>,
}

impl Forward {
    fn new(dim: usize) -> Self {
        Forward { rows: HashMap::new(), scratch: vec![None; dim] }
    }

    /// Reduces `v` from its top index down and keeps the remainder as a new
    /// row when it is nonzero.
    fn insert(&mut self, v: &SVec) {
        let mut heap: BinaryHeap<u32> = BinaryHeap::with_capacity(v.len());
        for (i, c) in v {
            self.scratch[*i as usize] = Some(c.clone());
            heap.push(*i);
        }
        let mut rest: SVec = Vec::new();
        let mut last = None;
        while let Some(i) = heap.pop() {
            // entries are only ever added below `i`, so duplicates pop together
            if last == Some(i) {
                continue;
            }
            last = Some(i);
            let Some(c) = self.scratch[i as usize].take() else { continue };
            if c.is_zero() {
                continue;
            }
            match self.rows.get(&i) {
                Some(row) => {
                    for (j, x) in &row[..row.len() - 1] {
                        let t = x * &c;
                        match &mut self.scratch[*j as usize] {
                            Some(s) => *s -= &t,
                            slot @ None => *slot = Some(-t),
                        }
                        heap.push(*j);
                    }
                }
                None => rest.push((i, c)),
            }
        }
        if rest.is_empty() {
            return;
        }
        rest.reverse();
        let (p, lead) = rest.last().cloned().expect("nonempty");
        if !lead.is_one() {
            rest = sv_scale(&rest, &lead.inv().expect("nonzero pivot"));
        }
        self.rows.insert(p, rest);
    }
}

/// Canonical kernel of `rows . x = 0` in `n` unknowns by exact forward
/// elimination and back-substitution.
pub(crate) fn kernel_exact(rows: &[SVec], n: usize) -> Vec<SVec> {
    let mut fwd = Forward::new(n);
    for r in rows {
        fwd.insert(r);
        if fwd.rows.len() == n {
            break;
        }
    }
    let mut pivots: Vec<u32> = fwd.rows.keys().copied().collect();
    pivots.sort_unstable();
    let mut out = Vec::new();
    let mut x: Vec<Option<GaussScalar>> = vec![None; n];
    for f in 0..n as u32 {
        if fwd.rows.contains_key(&f) {
            continue;
        }
        // the kernel vector with 1 at `f` and 0 at every other free index
        x[f as usize] = Some(GaussScalar::one());
        for &p in pivots.iter().filter(|&&p| p > f) {
            let row = &fwd.rows[&p];
            let mut s = GaussScalar::zero();
            for (j, c) in &row[..row.len() - 1] {
                if let Some(xj) = &x[*j as usize] {
                    s += &(c * xj);
                }
            }
            if !s.is_zero() {
                x[p as usize] = Some(-s);
            }
        }
        let mut v: SVec = Vec::new();
        for (j, xj) in x.iter_mut().enumerate().skip(f as usize) {
            if let Some(c) = xj.take() {
                v.push((j as u32, c));
            }
        }
        out.push(v);
    }
    out
}

/// Components with at least this many sources are solved modulo primes.
const MODULAR_THRESHOLD: usize = 24;

/// Kernel of the linear map sending source basis vector `j` to `cols[j]`,
/// as a canonical (first-pivot) reduced echelon basis.
///
/// The map is split into connected components of its sparsity pattern and
/// each component is solved independently.
pub fn kernel_of_columns(cols: &[SVec]) -> Vec<SVec> {
    let n = cols.len();
    if n == 0 {
        return Vec::new();
    }
    // union-find over sources; targets are linked to the first source seen
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut owner: HashMap<u32, usize> = HashMap::new();
    for (j, c) in cols.iter().enumerate() {
        for (t, _) in c {
            match owner.get(t) {
                Some(&k) => {
                    let (a, b) = (find(&mut parent, j), find(&mut parent, k));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
                None => {
                    owner.insert(*t, j);
                }
            }
        }
    }
    let mut comps: HashMap<usize, Vec<usize>> = HashMap::new();
    for j in 0..n {
        let r = find(&mut parent, j);
        comps.entry(r).or_default().push(j);
    }
    let mut comps: Vec<Vec<usize>> = comps.into_values().collect();
    comps.sort();
    let mut kernel: Vec<SVec> = comps
        .par_iter()
        .flat_map_iter(|sources| {
            if sources.len() == 1 && cols[sources[0]].is_empty() {
                return vec![vec![(sources[0] as u32, GaussScalar::one())]];
            }
            let mut by_target: HashMap<u32, SVec> = HashMap::new();
            for (lj, &j) in sources.iter().enumerate() {
                for (t, c) in &cols[j] {
                    by_target.entry(*t).or_default().push((lj as u32, c.clone()));
                }
            }
            let mut targets: Vec<u32> = by_target.keys().copied().collect();
            targets.sort_unstable();
            let rows: Vec<SVec> = targets.into_iter().filter_map(|t| by_target.remove(&t)).collect();
            let local = if sources.len() >= MODULAR_THRESHOLD {
                super::modular::kernel_modular(&rows, sources.len())
            } else {
                None
            };
            let local = local.unwrap_or_else(|| kernel_exact(&rows, sources.len()));
            local.into_iter().map(|v| v.into_iter().map(|(j, c)| (sources[j as usize] as u32, c)).collect()).collect::<Vec<SVec>>()
        })
        .collect();
    kernel.sort_by_key(|v| v[0].0);
    kernel
}

/// A subspace of one grade, in canonical reduced echelon form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    grade: u32,
    ambient_dim: usize,
    rows: Vec<SVec>,
}

impl Subspace {
    pub fn zero(grade: u32, ambient_dim: usize) -> Self {
        Subspace { grade, ambient_dim, rows: Vec::new() }
    }

    pub fn whole(grade: u32, ambient_dim: usize) -> Self {
        let rows = (0..ambient_dim as u32).map(|i| vec![(i, GaussScalar::one())]).collect();
        Subspace { grade, ambient_dim, rows }
    }

    pub fn from_spanning(grade: u32, ambient_dim: usize, vecs: &[SVec]) -> Self {
        let mut ech = Echelon::new(ambient_dim, false);
        for v in vecs {
            ech.insert(v);
            if ech.rank() == ambient_dim {
                break;
            }
        }
        let rows = ech.into_sorted().into_iter().map(|(_, r, _)| r).collect();
        Subspace { grade, ambient_dim, rows }
    }

    /// Wraps vectors already in canonical form (as produced by
    /// [`kernel_of_columns`]).
    fn from_canonical(grade: u32, ambient_dim: usize, rows: Vec<SVec>) -> Self {
        debug_assert!(rows.windows(2).all(|w| w[0][0].0 < w[1][0].0));
        Subspace { grade, ambient_dim, rows }
    }

    pub fn grade(&self) -> u32 {
        self.grade
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[SVec] {
        &self.rows
    }

    pub fn is_whole(&self) -> bool {
        self.rows.len() == self.ambient_dim
    }

    fn pivots(&self) -> HashMap<u32, usize> {
        self.rows.iter().enumerate().map(|(k, r)| (r[0].0, k)).collect()
    }

    /// Remainder of `v` modulo this subspace (zero at every pivot).
    pub fn reduce(&self, v: &SVec) -> SVec {
        let piv = self.pivots();
        let hits: Vec<(usize, GaussScalar)> =
            v.iter().filter_map(|(i, c)| piv.get(i).map(|&r| (r, c.clone()))).collect();
        if hits.is_empty() {
            return v.clone();
        }
        let mut acc = Acc::new(self.ambient_dim);
        acc.load(v);
        for (r, c) in &hits {
            acc.sub_scaled(&self.rows[*r], c);
        }
        acc.take()
    }

    pub fn contains(&self, v: &SVec) -> bool {
        self.reduce(v).is_empty()
    }

    fn same_grade(&self, other: &Subspace) -> Result<()> {
        if self.grade != other.grade || self.ambient_dim != other.ambient_dim {
            return Err(VoaError::GradeMismatch(self.grade, other.grade));
        }
        Ok(())
    }

    pub fn contains_subspace(&self, other: &Subspace) -> Result<bool> {
        self.same_grade(other)?;
        Ok(other.rows.iter().all(|r| self.contains(r)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.same_grade(other)?;
        let all: Vec<SVec> = self.rows.iter().chain(&other.rows).cloned().collect();
        Ok(Subspace::from_spanning(self.grade, self.ambient_dim, &all))
    }

    /// Linear combination `sum coeffs_k * basis_k`.
    pub fn combine(&self, coeffs: &SVec) -> SVec {
        let mut acc = Acc::new(self.ambient_dim);
        for (k, c) in coeffs {
            acc.sub_scaled(&self.rows[*k as usize], &-c);
        }
        acc.take()
    }

    /// `{ v in self : f(v) = 0 }`, given `images[k] = f(basis_k)`.
    pub fn kernel_on(&self, images: &[SVec]) -> Subspace {
        assert_eq!(images.len(), self.rows.len());
        let ker = kernel_of_columns(images);
        let vecs: Vec<SVec> = ker.iter().map(|c| self.combine(c)).collect();
        if self.is_whole() {
            // combination of unit rows is already canonical
            return Subspace::from_canonical(self.grade, self.ambient_dim, vecs);
        }
        Subspace::from_spanning(self.grade, self.ambient_dim, &vecs)
    }

    /// Intersection, with the rank identity `dim(A+B) + dim(A∩B) = dim A + dim B`
    /// checked on every call.
    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.same_grade(other)?;
        let images: Vec<SVec> = self.rows.iter().map(|r| other.reduce(r)).collect();
        let meet = self.kernel_on(&images);
        let join = self.sum(other)?;
        if join.dim() + meet.dim() != self.dim() + other.dim() {
            return Err(VoaError::Consistency(format!(
                "rank identity fails at grade {}: {} + {} != {} + {}",
                self.grade,
                join.dim(),
                meet.dim(),
                self.dim(),
                other.dim()
            )));
        }
        Ok(meet)
    }

    pub fn image(&self, m: &GradeMatrix) -> Subspace {
        let imgs: Vec<SVec> = self.rows.iter().map(|r| m.apply(r)).collect();
        Subspace::from_spanning(self.grade, self.ambient_dim, &imgs)
    }
}

/// A square matrix on one grade, stored by columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradeMatrix {
    dim: usize,
    cols: Vec<SVec>,
}

impl GradeMatrix {
    pub fn from_columns(cols: Vec<SVec>) -> Self {
        GradeMatrix { dim: cols.len(), cols }
    }

    pub fn identity(dim: usize) -> Self {
        GradeMatrix { dim, cols: (0..dim as u32).map(|i| vec![(i, GaussScalar::one())]).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, j: usize) -> &SVec {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[SVec] {
        &self.cols
    }

    pub fn apply(&self, v: &SVec) -> SVec {
        let mut acc = Acc::new(self.dim);
        for (j, c) in v {
            acc.sub_scaled(&self.cols[*j as usize], &-c);
        }
        acc.take()
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &GradeMatrix) -> GradeMatrix {
        GradeMatrix { dim: self.dim, cols: first.cols.par_iter().map(|c| self.apply(c)).collect() }
    }

    pub fn trace(&self) -> GaussScalar {
        let mut t = GaussScalar::zero();
        for (j, c) in self.cols.iter().enumerate() {
            if let Some(x) = sv_get(c, j as u32) {
                t += x;
            }
        }
        t
    }

    pub fn is_identity(&self) -> bool {
        self.cols.iter().enumerate().all(|(j, c)| c.len() == 1 && c[0].0 == j as u32 && c[0].1.is_one())
    }

    /// `self - c * I` column by column.
    pub fn minus_scalar(&self, c: &GaussScalar) -> Vec<SVec> {
        self.cols
            .iter()
            .enumerate()
            .map(|(j, col)| sv_axpy(col, &vec![(j as u32, GaussScalar::one())], &-c))
            .collect()
    }

    pub fn inverse(&self) -> Result<GradeMatrix> {
        let mut ech = Echelon::with_companions(self.dim, self.dim, false);
        for (j, c) in self.cols.iter().enumerate() {
            if let Inserted::Dependent(_) = ech.insert_with(c, Some(&vec![(j as u32, GaussScalar::one())])) {
                return Err(VoaError::Domain("matrix is singular".into()));
            }
        }
        let rows = ech.into_sorted();
        Ok(GradeMatrix { dim: self.dim, cols: rows.into_iter().map(|(_, _, y)| y).collect() })
    }

    pub fn power(&self, k: u32) -> GradeMatrix {
        let mut acc = GradeMatrix::identity(self.dim);
        for _ in 0..k {
            acc = self.compose(&acc);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(n: i64) -> GaussScalar {
        GaussScalar::from_int(n)
    }

    fn sv(pairs: &[(u32, i64)]) -> SVec {
        pairs.iter().map(|&(i, x)| (i, g(x))).collect()
    }

    #[test]
    fn kernel_of_zero_and_identity() {
        let zero: Vec<SVec> = vec![Vec::new(); 3];
        let k = kernel_of_columns(&zero);
        assert_eq!(Subspace::from_canonical(0, 3, k), Subspace::whole(0, 3));
        let id = GradeMatrix::identity(3);
        assert!(kernel_of_columns(id.columns()).is_empty());
    }

    #[test]
    fn kernel_is_canonical() {
        // columns: e0 -> t0, e1 -> 2 t0, e2 -> t1, e3 -> t1
        let cols = vec![sv(&[(0, 1)]), sv(&[(0, 2)]), sv(&[(1, 1)]), sv(&[(1, 1)])];
        let k = kernel_of_columns(&cols);
        let expected = Subspace::from_spanning(0, 4, &[sv(&[(0, 2), (1, -1)]), sv(&[(2, 1), (3, -1)])]);
        assert_eq!(Subspace::from_spanning(0, 4, &k), expected);
        assert_eq!(k, expected.basis().to_vec());
    }

    #[test]
    fn membership_and_ops() {
        let a = Subspace::from_spanning(1, 3, &[sv(&[(0, 1)]), sv(&[(2, 1)])]);
        assert!(a.contains(&sv(&[(0, 1), (2, -1)])));
        assert!(!a.contains(&sv(&[(1, 1)])));
        assert_eq!(a.intersection(&a).unwrap(), a);
        let b = Subspace::from_spanning(1, 3, &[sv(&[(1, 1), (2, 1)])]);
        assert_eq!(a.intersection(&b).unwrap().dim(), 0);
        assert_eq!(a.sum(&b).unwrap(), Subspace::whole(1, 3));
        let c = Subspace::zero(2, 3);
        assert!(matches!(a.intersection(&c), Err(VoaError::GradeMismatch(1, 2))));
    }

    #[test]
    fn inverse_and_trace() {
        let m = GradeMatrix::from_columns(vec![sv(&[(1, 1)]), sv(&[(0, 1)]), sv(&[(2, -1)])]);
        assert_eq!(m.trace(), g(-1));
        assert!(m.compose(&m.inverse().unwrap()).is_identity());
        assert!(m.power(2).is_identity());
        let sing = GradeMatrix::from_columns(vec![sv(&[(0, 1)]), sv(&[(0, 1)])]);
        assert!(sing.inverse().is_err());
    }

    fn arb_vecs() -> impl Strategy<Value = Vec<SVec>> {
        prop::collection::vec(prop::collection::vec((0u32..6, -3i64..4), 0..4), 1..6).prop_map(|vs| {
            vs.into_iter()
                .map(|pairs| {
                    let mut m = std::collections::BTreeMap::new();
                    for (i, x) in pairs {
                        *m.entry(i).or_insert(0) += x;
                    }
                    m.into_iter().filter(|(_, x)| *x != 0).map(|(i, x)| (i, g(x))).collect()
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn echelon_form_is_canonical(vs in arb_vecs()) {
            let a = Subspace::from_spanning(0, 6, &vs);
            let mut rev = vs.clone();
            rev.reverse();
            let scaled: Vec<SVec> = rev.iter().map(|v| sv_scale(v, &g(-3))).collect();
            prop_assert_eq!(Subspace::from_spanning(0, 6, &scaled), a);
        }

        #[test]
        fn rank_nullity(vs in arb_vecs(), ws in arb_vecs()) {
            let a = Subspace::from_spanning(0, 6, &vs);
            let b = Subspace::from_spanning(0, 6, &ws);
            let meet = a.intersection(&b).unwrap();
            prop_assert!(a.contains_subspace(&meet).unwrap());
            prop_assert!(b.contains_subspace(&meet).unwrap());
        }

        #[test]
        fn kernel_vectors_are_annihilated(vs in arb_vecs()) {
            let ker = kernel_of_columns(&vs);
            prop_assert_eq!(ker.len() + Subspace::from_spanning(0, 6, &vs).dim(), vs.len());
            for k in &ker {
                let mut acc: SVec = Vec::new();
                for (j, c) in k {
                    acc = sv_axpy(&acc, &vs[*j as usize], c);
                }
                prop_assert!(acc.is_empty());
            }
        }
    }
}
