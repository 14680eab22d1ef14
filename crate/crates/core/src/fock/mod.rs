//! The graded state space of a lattice vertex algebra up to a weight cutoff.
//!
//! A basis monomial is a product of Heisenberg creation modes `h_i(-n)`
//! (with `h_i` the i-th lattice basis vector) applied to `e^mu`.

pub mod linalg;
mod modular;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Result, VoaError};
use crate::lattice::Lattice;
use crate::scalar::GaussScalar;

pub use linalg::{GradeMatrix, SVec, Subspace};

/// One creation operator `h_dir(-n)`, `n >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    pub dir: u16,
    pub n: u32,
}

fn canonical_key(m: &Mode) -> (u16, std::cmp::Reverse<u32>) {
    (m.dir, std::cmp::Reverse(m.n))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    point: SmallVec<[i32; 4]>,
    modes: SmallVec<[Mode; 6]>,
}

impl Monomial {
    pub fn new(point: &[i64], mut modes: Vec<Mode>) -> Self {
        modes.sort_by_key(canonical_key);
        Monomial {
            point: point.iter().map(|&x| i32::try_from(x).expect("lattice coordinate fits in i32")).collect(),
            modes: modes.into_iter().collect(),
        }
    }

    pub fn vacuum(rank: usize) -> Self {
        Monomial { point: SmallVec::from_elem(0, rank), modes: SmallVec::new() }
    }

    pub fn exp(point: &[i64]) -> Self {
        Self::new(point, Vec::new())
    }

    pub fn point(&self) -> Vec<i64> {
        self.point.iter().map(|&x| x as i64).collect()
    }

    pub fn point_ref(&self) -> &[i32] {
        &self.point
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn heisenberg_level(&self) -> i64 {
        self.modes.iter().map(|m| m.n as i64).sum()
    }

    pub fn weight(&self, lattice: &Lattice) -> i64 {
        let p = self.point();
        self.heisenberg_level() + lattice.norm_int(&p) / 2
    }

    pub fn with_mode(&self, mode: Mode) -> Monomial {
        let mut modes = self.modes.clone();
        let pos = modes.iter().position(|m| canonical_key(m) > canonical_key(&mode)).unwrap_or(modes.len());
        modes.insert(pos, mode);
        Monomial { point: self.point.clone(), modes }
    }

    pub fn without_mode_at(&self, idx: usize) -> Monomial {
        let mut modes = self.modes.clone();
        modes.remove(idx);
        Monomial { point: self.point.clone(), modes }
    }

    pub fn with_point(&self, point: &[i64]) -> Monomial {
        Monomial { point: point.iter().map(|&x| x as i32).collect(), modes: self.modes.clone() }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.modes {
            write!(f, "h{}(-{})", m.dir + 1, m.n)?;
        }
        let cells: Vec<String> = self.point.iter().map(|x| x.to_string()).collect();
        write!(f, "e^[{}]", cells.join(","))
    }
}

/// A finite linear combination of basis monomials.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct StateVector {
    terms: BTreeMap<Monomial, GaussScalar>,
}

impl StateVector {
    pub fn zero() -> Self {
        StateVector::default()
    }

    pub fn from_monomial(m: Monomial) -> Self {
        Self::term(m, GaussScalar::one())
    }

    pub fn term(m: Monomial, c: GaussScalar) -> Self {
        let mut v = StateVector::zero();
        v.add_term(m, &c);
        v
    }

    pub fn vacuum(rank: usize) -> Self {
        Self::from_monomial(Monomial::vacuum(rank))
    }

    pub fn exp(point: &[i64]) -> Self {
        Self::from_monomial(Monomial::exp(point))
    }

    pub fn add_term(&mut self, m: Monomial, c: &GaussScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &StateVector, c: &GaussScalar) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            self.add_term(m.clone(), &(x * c));
        }
    }

    pub fn scaled(&self, c: &GaussScalar) -> StateVector {
        if c.is_zero() {
            return StateVector::zero();
        }
        StateVector { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> GaussScalar {
        self.terms.get(m).cloned().unwrap_or_else(GaussScalar::zero)
    }

    /// The common weight of all terms; `None` for the zero vector.
    pub fn weight(&self, lattice: &Lattice) -> Result<Option<i64>> {
        let mut w = None;
        for m in self.terms.keys() {
            let mw = m.weight(lattice);
            match w {
                None => w = Some(mw),
                Some(x) if x != mw => {
                    return Err(VoaError::Domain(format!("state is not homogeneous (weights {x} and {mw})")))
                }
                _ => {}
            }
        }
        Ok(w)
    }

    /// Splits into homogeneous components.
    pub fn by_weight(&self, lattice: &Lattice) -> BTreeMap<i64, StateVector> {
        let mut out: BTreeMap<i64, StateVector> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.weight(lattice)).or_default().add_term(m.clone(), c);
        }
        out
    }

    pub fn map_monomials(&self, mut f: impl FnMut(&Monomial) -> StateVector) -> StateVector {
        let mut out = StateVector::zero();
        for (m, c) in &self.terms {
            out.add_scaled(&f(m), c);
        }
        out
    }
}

impl std::ops::Add for &StateVector {
    type Output = StateVector;
    fn add(self, o: &StateVector) -> StateVector {
        let mut v = self.clone();
        v.add_scaled(o, &GaussScalar::one());
        v
    }
}

impl std::ops::Sub for &StateVector {
    type Output = StateVector;
    fn sub(self, o: &StateVector) -> StateVector {
        let mut v = self.clone();
        v.add_scaled(o, &GaussScalar::from_int(-1));
        v
    }
}

impl std::ops::Neg for &StateVector {
    type Output = StateVector;
    fn neg(self) -> StateVector {
        self.scaled(&GaussScalar::from_int(-1))
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("({c})*{m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Basis of `(V_L)_n` for every `n <= cutoff`.
#[derive(Debug, Clone)]
pub struct GradedBasis {
    lattice: Arc<Lattice>,
    cutoff: u32,
    grades: Vec<Vec<Monomial>>,
    index: Vec<HashMap<Monomial, usize>>,
}

impl GradedBasis {
    pub fn build(lattice: Arc<Lattice>, cutoff: u32) -> Self {
        let d = lattice.rank();
        let points = lattice.vectors_up_to_norm(2 * cutoff as i64);
        let mut grades: Vec<Vec<Monomial>> = vec![Vec::new(); cutoff as usize + 1];
        let mut heis_cache: HashMap<i64, Vec<Vec<Mode>>> = HashMap::new();
        for p in &points {
            let pw = lattice.norm_int(p) / 2;
            for n in pw..=cutoff as i64 {
                let level = n - pw;
                let parts = heis_cache.entry(level).or_insert_with(|| colored_partitions(d, level as u32));
                for modes in parts.iter() {
                    grades[n as usize].push(Monomial::new(p, modes.clone()));
                }
            }
        }
        for g in grades.iter_mut() {
            g.sort();
        }
        let index = grades.iter().map(|g| g.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect()).collect();
        GradedBasis { lattice, cutoff, grades, index }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn dim(&self, n: u32) -> usize {
        self.grades.get(n as usize).map_or(0, |g| g.len())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.grades.iter().map(|g| g.len()).collect()
    }

    pub fn grade(&self, n: u32) -> &[Monomial] {
        &self.grades[n as usize]
    }

    pub fn index_of(&self, n: u32, m: &Monomial) -> Option<usize> {
        self.index.get(n as usize)?.get(m).copied()
    }

    /// Coordinates of a homogeneous vector of weight `n`.
    pub fn coords(&self, n: u32, v: &StateVector) -> Result<SVec> {
        if n > self.cutoff {
            return Err(VoaError::CutoffExceeded { weight: n as i64, cutoff: self.cutoff });
        }
        let mut out: Vec<(u32, GaussScalar)> = Vec::with_capacity(v.len());
        for (m, c) in v.terms() {
            let i = self.index_of(n, m).ok_or_else(|| {
                VoaError::Domain(format!("monomial {m} is not a basis vector of weight {n}"))
            })?;
            out.push((i as u32, c.clone()));
        }
        out.sort_by_key(|(i, _)| *i);
        Ok(out)
    }

    pub fn state(&self, n: u32, coords: &SVec) -> StateVector {
        let mut v = StateVector::zero();
        for (i, c) in coords {
            v.add_term(self.grades[n as usize][*i as usize].clone(), c);
        }
        v
    }

    pub fn basis_state(&self, n: u32, i: usize) -> StateVector {
        StateVector::from_monomial(self.grades[n as usize][i].clone())
    }
}

/// All multisets of modes `(dir, n)` with `dir < d` and total level `level`,
/// in canonical order.
pub fn colored_partitions(d: usize, level: u32) -> Vec<Vec<Mode>> {
    let mut atoms: Vec<Mode> = Vec::new();
    for dir in 0..d as u16 {
        for n in (1..=level).rev() {
            atoms.push(Mode { dir, n });
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(atoms: &[Mode], start: usize, left: u32, cur: &mut Vec<Mode>, out: &mut Vec<Vec<Mode>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for k in start..atoms.len() {
            if atoms[k].n <= left {
                cur.push(atoms[k]);
                rec(atoms, k, left - atoms[k].n, cur, out);
                cur.pop();
            }
        }
    }
    rec(&atoms, 0, level, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(entries: &[i64]) -> Arc<Lattice> {
        let d = entries.len();
        let gram = (0..d).map(|i| (0..d).map(|j| if i == j { entries[i] } else { 0 }).collect()).collect();
        Arc::new(Lattice::new("L", gram).unwrap())
    }

    #[test]
    fn rank_one_grades() {
        let b = GradedBasis::build(diag(&[2]), 4);
        assert_eq!(b.dims(), vec![1, 3, 4, 7, 13]);
        assert_eq!(b.grade(0), &[Monomial::vacuum(1)]);
        let g1: Vec<String> = b.grade(1).iter().map(|m| m.to_string()).collect();
        assert_eq!(g1, vec!["e^[-1]", "h1(-1)e^[0]", "e^[1]"]);
    }

    #[test]
    fn rank_four_grade_one() {
        let b = GradedBasis::build(diag(&[2, 2, 2, 2]), 1);
        assert_eq!(b.dim(1), 12);
    }

    #[test]
    fn zero_cutoff_is_vacuum_only() {
        let b = GradedBasis::build(diag(&[2, 2]), 0);
        assert_eq!(b.dims(), vec![1]);
    }

    #[test]
    fn weight_of_gamma() {
        let l = diag(&[2, 2, 2]);
        assert_eq!(Monomial::exp(&[1, 1, 1]).weight(&l), 3);
        let m = Monomial::new(&[1, 0, 0], vec![Mode { dir: 2, n: 1 }, Mode { dir: 0, n: 2 }, Mode { dir: 0, n: 3 }]);
        assert_eq!(m.weight(&l), 7);
        assert_eq!(m.modes()[0], Mode { dir: 0, n: 3 });
    }

    #[test]
    fn canonical_reordering_keeps_weight() {
        let l = diag(&[2, 2]);
        let a = Monomial::new(&[0, 1], vec![Mode { dir: 1, n: 1 }, Mode { dir: 0, n: 2 }]);
        let b = Monomial::new(&[0, 1], vec![Mode { dir: 0, n: 2 }, Mode { dir: 1, n: 1 }]);
        assert_eq!(a, b);
        assert_eq!(a.weight(&l), b.weight(&l));
        assert_eq!(Monomial::exp(&[0, 1]).with_mode(Mode { dir: 1, n: 1 }).with_mode(Mode { dir: 0, n: 2 }), a);
    }

    #[test]
    fn partitions_count() {
        // 2-colored partitions of 3: 10
        assert_eq!(colored_partitions(2, 3).len(), 10);
        assert_eq!(colored_partitions(3, 0), vec![Vec::<Mode>::new()]);
    }
}
