//! Positive-definite even lattices, rational vectors in their ambient space,
//! sublattices, isometries and coset decompositions.
//!
//! Coordinates are always taken in the lattice basis. The engine only accepts
//! lattices whose Gram matrix has even entries everywhere, which makes the
//! trivial 2-cocycle valid for the lattice vertex algebra.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Result, VoaError};
use crate::scalar::{int, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    name: String,
    gram: Vec<Vec<i64>>,
}

impl Lattice {
    pub fn new(name: impl Into<String>, gram: Vec<Vec<i64>>) -> Result<Self> {
        let name = name.into();
        let invalid = |reason: String| VoaError::InvalidLattice { name: name.clone(), reason };
        let d = gram.len();
        if d == 0 {
            return Err(invalid("rank must be positive".into()));
        }
        for (i, row) in gram.iter().enumerate() {
            if row.len() != d {
                return Err(invalid(format!("Gram row {} has {} entries, expected {d}", i + 1, row.len())));
            }
            for j in 0..d {
                if row[j] != gram[j][i] {
                    return Err(invalid("Gram matrix is not symmetric".into()));
                }
                if row[j] % 2 != 0 {
                    return Err(invalid(format!(
                        "inner product <e{},e{}> = {} is odd; only pairwise-even lattices are supported",
                        i + 1,
                        j + 1,
                        row[j]
                    )));
                }
            }
        }
        let q: Vec<Vec<Rational>> = gram.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        for k in 1..=d {
            let minor: Vec<Vec<Rational>> = q[..k].iter().map(|r| r[..k].to_vec()).collect();
            if !determinant(&minor).is_positive() {
                return Err(invalid(format!("leading principal minor of order {k} is not positive")));
            }
        }
        Ok(Lattice { name, gram })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn is_pairwise_even(&self) -> bool {
        self.gram.iter().flatten().all(|x| x % 2 == 0)
    }

    /// True when the Gram matrix is diagonal, i.e. the lattice is an
    /// orthogonal sum of its rank-one basis blocks.
    pub fn is_diagonal(&self) -> bool {
        (0..self.rank()).all(|i| (0..self.rank()).all(|j| i == j || self.gram[i][j] == 0))
    }

    pub fn determinant(&self) -> Rational {
        determinant(&self.gram_q())
    }

    fn gram_q(&self) -> Vec<Vec<Rational>> {
        self.gram.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    pub fn gram_inverse(&self) -> Vec<Vec<Rational>> {
        invert(&self.gram_q()).expect("Gram matrix is positive definite")
    }

    pub fn inner_int(&self, x: &[i64], y: &[i64]) -> i64 {
        let d = self.rank();
        let mut s = 0i64;
        for i in 0..d {
            if x[i] == 0 {
                continue;
            }
            for j in 0..d {
                s += x[i] * self.gram[i][j] * y[j];
            }
        }
        s
    }

    pub fn norm_int(&self, x: &[i64]) -> i64 {
        self.inner_int(x, x)
    }

    pub fn inner_q(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let mut s = Rational::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if self.gram[i][j] != 0 && !yj.is_zero() {
                    s += xi * yj * int(self.gram[i][j]);
                }
            }
        }
        s
    }

    /// Inner product of a rational vector with a lattice point.
    pub fn inner_qi(&self, x: &[Rational], y: &[i64]) -> Rational {
        let mut s = Rational::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let mut t = 0i64;
            for (j, &yj) in y.iter().enumerate() {
                t += self.gram[i][j] * yj;
            }
            if t != 0 {
                s += xi * int(t);
            }
        }
        s
    }

    /// All lattice points of norm at most `bound`, sorted lexicographically.
    pub fn vectors_up_to_norm(&self, bound: i64) -> Vec<Vec<i64>> {
        let identity: Vec<Vec<i64>> = (0..self.rank())
            .map(|i| (0..self.rank()).map(|j| i64::from(i == j)).collect())
            .collect();
        enumerate_short(self, &identity, &self.gram_q(), bound)
    }
}

impl fmt::Display for Lattice {
    /// Lattice-file form: header line plus Gram rows.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lattice {} rank {}", self.name, self.rank())?;
        for row in &self.gram {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// A rational vector in the ambient space of a lattice, in lattice coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QVec {
    lattice: Arc<Lattice>,
    coords: Vec<Rational>,
}

impl QVec {
    pub fn new(lattice: Arc<Lattice>, coords: Vec<Rational>) -> Result<Self> {
        if coords.len() != lattice.rank() {
            return Err(VoaError::Domain(format!(
                "vector of length {} in lattice {} of rank {}",
                coords.len(),
                lattice.name(),
                lattice.rank()
            )));
        }
        Ok(QVec { lattice, coords })
    }

    pub fn from_ints(lattice: Arc<Lattice>, coords: &[i64]) -> Result<Self> {
        Self::new(lattice, coords.iter().map(|&x| int(x)).collect())
    }

    pub fn zero(lattice: Arc<Lattice>) -> Self {
        let d = lattice.rank();
        QVec { lattice, coords: vec![Rational::zero(); d] }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_lattice_point(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    /// Integer coordinates if this is a lattice point.
    pub fn to_point(&self) -> Option<Vec<i64>> {
        self.coords.iter().map(|c| if c.is_integer() { c.to_integer().to_i64() } else { None }).collect()
    }

    fn same_lattice(&self, other: &QVec) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(VoaError::Domain(format!(
                "vectors live in different lattices ({} and {})",
                self.lattice.name(),
                other.lattice.name()
            )));
        }
        Ok(())
    }

    pub fn inner(&self, other: &QVec) -> Result<Rational> {
        self.same_lattice(other)?;
        Ok(self.lattice.inner_q(&self.coords, &other.coords))
    }

    pub fn norm(&self) -> Rational {
        self.lattice.inner_q(&self.coords, &self.coords)
    }

    pub fn add(&self, other: &QVec) -> Result<QVec> {
        self.same_lattice(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Ok(QVec { lattice: self.lattice.clone(), coords })
    }

    pub fn scale(&self, r: &Rational) -> QVec {
        QVec { lattice: self.lattice.clone(), coords: self.coords.iter().map(|a| a * r).collect() }
    }

    pub fn neg(&self) -> QVec {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for QVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", cells.join(","))
    }
}

/// A sublattice of a lattice, stored by its generators together with an
/// integer row-echelon (Hermite) basis computed once at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sublattice {
    name: String,
    parent: Arc<Lattice>,
    generators: Vec<Vec<i64>>,
    basis: Vec<Vec<i64>>,
}

impl Sublattice {
    pub fn new(name: impl Into<String>, parent: Arc<Lattice>, generators: Vec<Vec<i64>>) -> Result<Self> {
        let name = name.into();
        for g in &generators {
            if g.len() != parent.rank() {
                return Err(VoaError::Domain(format!(
                    "generator of {name} has {} coordinates, parent {} has rank {}",
                    g.len(),
                    parent.name(),
                    parent.rank()
                )));
            }
        }
        let basis = hermite_basis(&generators);
        if basis.is_empty() {
            return Err(VoaError::InvalidLattice { name, reason: "sublattice is zero".into() });
        }
        Ok(Sublattice { name, parent, generators, basis })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parent(&self) -> &Arc<Lattice> {
        &self.parent
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    /// Hermite basis in parent coordinates.
    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.parent.rank()
    }

    pub fn gram(&self) -> Vec<Vec<i64>> {
        gram_of(&self.parent, &self.basis)
    }

    pub fn determinant(&self) -> Rational {
        let g = self.gram();
        determinant(&g.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect::<Vec<_>>())
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        reduce_modulo_hermite(&self.basis, x).iter().all(|&c| c == 0)
    }

    /// Structural equality of the generated lattices.
    pub fn same_span(&self, other: &Sublattice) -> bool {
        self.parent == other.parent && self.basis == other.basis
    }

    pub fn vectors_up_to_norm(&self, bound: i64) -> Vec<Vec<i64>> {
        let g = self.gram();
        let gq: Vec<Vec<Rational>> = g.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        enumerate_short(&self.parent, &self.basis, &gq, bound)
    }

    /// Coordinates of an ambient rational vector with respect to the Hermite
    /// basis, or `None` if the vector is not in the rational span.
    pub fn span_coords(&self, x: &[Rational]) -> Option<Vec<Rational>> {
        solve_in_span(&to_q_rows(&self.basis), x)
    }

    /// A basis (rational, ambient coordinates) of the orthogonal complement of
    /// the rational span inside the ambient space.
    pub fn orthogonal_complement(&self) -> Vec<Vec<Rational>> {
        // rows: B * G, kernel of that map
        let d = self.parent.rank();
        let rows: Vec<Vec<Rational>> = self
            .basis
            .iter()
            .map(|b| (0..d).map(|j| int((0..d).map(|i| b[i] * self.parent.gram()[i][j]).sum())).collect())
            .collect();
        rational_kernel(&rows, d)
    }
}

impl fmt::Display for Sublattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sublattice {} of {}", self.name, self.parent.name())?;
        for row in &self.generators {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Either a whole lattice or a sublattice of one.
#[derive(Debug, Clone, PartialEq)]
pub enum LatticeSpan {
    Full(Arc<Lattice>),
    Sub(Arc<Sublattice>),
}

impl LatticeSpan {
    pub fn name(&self) -> &str {
        match self {
            LatticeSpan::Full(l) => l.name(),
            LatticeSpan::Sub(s) => s.name(),
        }
    }

    pub fn ambient(&self) -> &Arc<Lattice> {
        match self {
            LatticeSpan::Full(l) => l,
            LatticeSpan::Sub(s) => s.parent(),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            LatticeSpan::Full(l) => l.rank(),
            LatticeSpan::Sub(s) => s.rank(),
        }
    }

    /// Basis in ambient coordinates.
    pub fn basis(&self) -> Vec<Vec<i64>> {
        match self {
            LatticeSpan::Full(l) => {
                (0..l.rank()).map(|i| (0..l.rank()).map(|j| i64::from(i == j)).collect()).collect()
            }
            LatticeSpan::Sub(s) => s.basis().to_vec(),
        }
    }

    pub fn gram(&self) -> Vec<Vec<i64>> {
        match self {
            LatticeSpan::Full(l) => l.gram().to_vec(),
            LatticeSpan::Sub(s) => s.gram(),
        }
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        match self {
            LatticeSpan::Full(_) => true,
            LatticeSpan::Sub(s) => s.contains(x),
        }
    }

    pub fn vectors_up_to_norm(&self, bound: i64) -> Vec<Vec<i64>> {
        match self {
            LatticeSpan::Full(l) => l.vectors_up_to_norm(bound),
            LatticeSpan::Sub(s) => s.vectors_up_to_norm(bound),
        }
    }

    pub fn span_coords(&self, x: &[Rational]) -> Option<Vec<Rational>> {
        match self {
            LatticeSpan::Full(_) => Some(x.to_vec()),
            LatticeSpan::Sub(s) => s.span_coords(x),
        }
    }
}

/// A lattice isometry between two (sub)lattices.
///
/// Stored as the images of the source Hermite basis, in the target's ambient
/// coordinates. The Gram condition is verified at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    name: String,
    source: LatticeSpan,
    target: LatticeSpan,
    images: Vec<Vec<i64>>,
}

impl Isometry {
    /// Linear extension of `generators[i] -> images[i]`.
    ///
    /// Generators are given in the source ambient coordinates and must be
    /// linearly independent and span the source; images are target ambient
    /// coordinates and must be points of the target.
    pub fn from_images(
        name: impl Into<String>,
        source: LatticeSpan,
        target: LatticeSpan,
        generators: &[Vec<i64>],
        images: &[Vec<i64>],
    ) -> Result<Self> {
        let name = name.into();
        let fail = |why: String| VoaError::NotAnIsometry(format!("{name}: {why}"));
        if generators.len() != images.len() {
            return Err(fail("generator and image counts differ".into()));
        }
        let src_amb = source.ambient().clone();
        let tgt_amb = target.ambient().clone();
        for y in images {
            if y.len() != tgt_amb.rank() {
                return Err(fail(format!("image has {} coordinates, expected {}", y.len(), tgt_amb.rank())));
            }
            if !target.contains(y) {
                return Err(fail(format!("image {y:?} is not in {}", target.name())));
            }
        }
        let gens_q = to_q_rows(generators);
        if rational_rank(&gens_q) != generators.len() || generators.len() != source.rank() {
            return Err(fail("generators must form a basis of the source rational span".into()));
        }
        for g in generators {
            if !source.contains(g) {
                return Err(fail(format!("generator {g:?} is not in {}", source.name())));
            }
        }
        // Gram check on generators
        for i in 0..generators.len() {
            for j in 0..generators.len() {
                let a = src_amb.inner_int(&generators[i], &generators[j]);
                let b = tgt_amb.inner_int(&images[i], &images[j]);
                if a != b {
                    return Err(fail(format!(
                        "<g{},g{}> = {a} but the images have inner product {b}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        // images of the source Hermite basis
        let mut basis_images = Vec::new();
        for b in source.basis() {
            let c = solve_in_span(&gens_q, &b.iter().map(|&x| int(x)).collect::<Vec<_>>())
                .ok_or_else(|| fail("source basis not in the generator span".into()))?;
            let mut y = vec![Rational::zero(); tgt_amb.rank()];
            for (ci, img) in c.iter().zip(images) {
                for (yk, &ik) in y.iter_mut().zip(img) {
                    *yk += ci * int(ik);
                }
            }
            let yi: Option<Vec<i64>> =
                y.iter().map(|v| if v.is_integer() { v.to_integer().to_i64() } else { None }).collect();
            let yi = yi.ok_or_else(|| fail("image of a lattice point is not integral".into()))?;
            if !target.contains(&yi) {
                return Err(fail("image of a lattice point leaves the target".into()));
            }
            basis_images.push(yi);
        }
        if source.rank() != target.rank() {
            return Err(fail("source and target ranks differ".into()));
        }
        Ok(Isometry { name, source, target, images: basis_images })
    }

    /// Isometry of a whole lattice given by the images of its basis vectors.
    pub fn of_lattice(name: impl Into<String>, lattice: Arc<Lattice>, images: &[Vec<i64>]) -> Result<Self> {
        let span = LatticeSpan::Full(lattice);
        let gens = span.basis();
        Self::from_images(name, span.clone(), span, &gens, images)
    }

    /// The permutation of orthogonal basis blocks given by `cycle`
    /// (1-based), e.g. `[1, 2, 3, 4]` maps e1 to e2, e2 to e3, ...
    pub fn block_cycle(name: impl Into<String>, lattice: Arc<Lattice>, cycle: &[usize]) -> Result<Self> {
        let d = lattice.rank();
        let mut perm: Vec<usize> = (0..d).collect();
        for (k, &b) in cycle.iter().enumerate() {
            if b == 0 || b > d {
                return Err(VoaError::Domain(format!("block index {b} out of range 1..={d}")));
            }
            perm[b - 1] = cycle[(k + 1) % cycle.len()] - 1;
        }
        let images: Vec<Vec<i64>> =
            (0..d).map(|i| (0..d).map(|j| i64::from(j == perm[i])).collect()).collect();
        Self::of_lattice(name, lattice, &images)
    }

    pub fn negation(lattice: Arc<Lattice>) -> Self {
        let d = lattice.rank();
        let images: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| -i64::from(i == j)).collect()).collect();
        Self::of_lattice("-1", lattice, &images).expect("-1 is an isometry")
    }

    pub fn identity(lattice: Arc<Lattice>) -> Self {
        let d = lattice.rank();
        let images: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
        Self::of_lattice("id", lattice, &images).expect("identity is an isometry")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &LatticeSpan {
        &self.source
    }

    pub fn target(&self) -> &LatticeSpan {
        &self.target
    }

    /// Images of the source Hermite basis in target ambient coordinates.
    pub fn basis_images(&self) -> &[Vec<i64>] {
        &self.images
    }

    pub fn is_endomorphism_of_lattice(&self) -> bool {
        matches!((&self.source, &self.target), (LatticeSpan::Full(a), LatticeSpan::Full(b)) if a == b)
    }

    /// Apply to a rational vector in the source rational span.
    pub fn apply_q(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        let c = self
            .source
            .span_coords(x)
            .ok_or_else(|| VoaError::Domain(format!("vector is outside the span of {}", self.source.name())))?;
        let mut y = vec![Rational::zero(); self.target.ambient().rank()];
        for (ci, img) in c.iter().zip(&self.images) {
            if ci.is_zero() {
                continue;
            }
            for (yk, &ik) in y.iter_mut().zip(img) {
                *yk += ci * int(ik);
            }
        }
        Ok(y)
    }

    pub fn apply_point(&self, x: &[i64]) -> Result<Vec<i64>> {
        let y = self.apply_q(&x.iter().map(|&v| int(v)).collect::<Vec<_>>())?;
        y.iter()
            .map(|v| if v.is_integer() { v.to_integer().to_i64() } else { None })
            .collect::<Option<Vec<i64>>>()
            .ok_or_else(|| VoaError::Domain("image of a lattice point is not integral".into()))
    }

    pub fn inverse(&self) -> Result<Isometry> {
        let src_basis = self.source.basis();
        Isometry::from_images(
            format!("inv({})", self.name),
            self.target.clone(),
            self.source.clone(),
            &self.images,
            &src_basis,
        )
    }

    pub fn compose(&self, first: &Isometry) -> Result<Isometry> {
        if first.target != self.source {
            return Err(VoaError::Domain("isometries are not composable".into()));
        }
        let gens = first.source.basis();
        let imgs: Vec<Vec<i64>> =
            gens.iter().map(|g| self.apply_point(&first.apply_point(g)?)).collect::<Result<_>>()?;
        Isometry::from_images(
            format!("{}*{}", self.name, first.name),
            first.source.clone(),
            self.target.clone(),
            &gens,
            &imgs,
        )
    }

    /// Least k with g^k = 1, for an isometry of a lattice onto itself.
    pub fn order(&self, bound: u32) -> Result<u32> {
        if self.source != self.target {
            return Err(VoaError::Domain("order is only defined for self-maps".into()));
        }
        let basis = self.source.basis();
        let mut cur: Vec<Vec<i64>> = basis.clone();
        for k in 1..=bound {
            cur = cur.iter().map(|x| self.apply_point(x)).collect::<Result<_>>()?;
            if cur == basis {
                return Ok(k);
            }
        }
        Err(VoaError::OrderExceedsBound { bound })
    }
}

/// Coset representatives of a full-rank sublattice: the box
/// `0 <= x_i < d_i` cut out by the Hermite diagonal, with `0` first.
///
/// The count is checked against `sqrt(det(S)/det(L))`.
pub fn coset_decomposition(lattice: &Lattice, sub: &Sublattice) -> Result<Vec<Vec<i64>>> {
    if sub.parent().as_ref() != lattice {
        return Err(VoaError::Domain(format!("{} is not a sublattice of {}", sub.name(), lattice.name())));
    }
    if !sub.is_full_rank() {
        return Err(VoaError::NotFullRank(format!(
            "{} has rank {} in {} of rank {}",
            sub.name(),
            sub.rank(),
            lattice.name(),
            lattice.rank()
        )));
    }
    let diag: Vec<i64> = sub
        .basis()
        .iter()
        .map(|row| row.iter().copied().find(|&x| x != 0).expect("nonzero Hermite row"))
        .collect();
    let index: i64 = diag.iter().product();
    let ratio = sub.determinant() / lattice.determinant();
    if ratio != int(index * index) {
        return Err(VoaError::Consistency(format!("index {index} squared differs from det ratio {ratio}")));
    }
    let mut reps = vec![vec![0i64; lattice.rank()]];
    for (col, &di) in diag.iter().enumerate() {
        let mut next = Vec::with_capacity(reps.len() * di as usize);
        for t in 0..di {
            for r in &reps {
                let mut x = r.clone();
                x[col] = t;
                next.push(x);
            }
        }
        reps = next;
    }
    reps.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    Ok(reps)
}

/// True when `reps` is a complete, irredundant set of coset representatives.
pub fn is_transversal(lattice: &Lattice, sub: &Sublattice, reps: &[Vec<i64>]) -> Result<bool> {
    let canonical = coset_decomposition(lattice, sub)?;
    if canonical.len() != reps.len() {
        return Ok(false);
    }
    let mut classes: Vec<Vec<i64>> = reps.iter().map(|r| reduce_modulo_hermite(sub.basis(), r)).collect();
    classes.sort();
    classes.dedup();
    Ok(classes.len() == reps.len())
}

pub fn gram_of(parent: &Lattice, basis: &[Vec<i64>]) -> Vec<Vec<i64>> {
    basis.iter().map(|a| basis.iter().map(|b| parent.inner_int(a, b)).collect()).collect()
}

/// Reduces `x` by a row Hermite basis; the result is a canonical
/// representative of `x` modulo the lattice spanned by `basis`.
pub fn reduce_modulo_hermite(basis: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    let mut x = x.to_vec();
    for row in basis {
        let (c, p) = row.iter().enumerate().find(|(_, &v)| v != 0).map(|(c, &v)| (c, v)).expect("nonzero row");
        let q = x[c].div_euclid(p);
        if q != 0 {
            for (xk, rk) in x.iter_mut().zip(row) {
                *xk -= q * rk;
            }
        }
    }
    x
}

/// Integer row-echelon basis with positive pivots and entries above each
/// pivot reduced into `[0, pivot)`.
pub fn hermite_basis(gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let Some(d) = gens.first().map(|g| g.len()) else {
        return Vec::new();
    };
    let mut rows: Vec<Vec<i128>> =
        gens.iter().map(|g| g.iter().map(|&x| x as i128).collect()).filter(|r: &Vec<i128>| r.iter().any(|&x| x != 0)).collect();
    let mut out: Vec<Vec<i128>> = Vec::new();
    for col in 0..d {
        loop {
            let mut nz: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by_key(|&i| rows[i][col].abs());
            let p = nz[0];
            for &i in &nz[1..] {
                let q = rows[i][col].div_euclid(rows[p][col]);
                let prow = rows[p].clone();
                for (a, b) in rows[i].iter_mut().zip(&prow) {
                    *a -= q * b;
                }
            }
        }
        if let Some(i) = (0..rows.len()).find(|&i| rows[i][col] != 0) {
            let mut r = rows.remove(i);
            if r[col] < 0 {
                r.iter_mut().for_each(|x| *x = -*x);
            }
            out.push(r);
        }
        rows.retain(|r| r.iter().any(|&x| x != 0));
    }
    // reduce above pivots
    for k in 0..out.len() {
        let col = out[k].iter().position(|&x| x != 0).unwrap();
        let p = out[k][col];
        for j in 0..k {
            let q = out[j][col].div_euclid(p);
            if q != 0 {
                let prow = out[k].clone();
                for (a, b) in out[j].iter_mut().zip(&prow) {
                    *a -= q * b;
                }
            }
        }
    }
    out.into_iter().map(|r| r.into_iter().map(|x| x as i64).collect()).collect()
}

fn enumerate_short(lattice: &Lattice, basis: &[Vec<i64>], gram: &[Vec<Rational>], bound: i64) -> Vec<Vec<i64>> {
    if bound < 0 {
        return Vec::new();
    }
    let inv = invert(gram).expect("positive definite");
    let r = basis.len();
    let radii: Vec<i64> = (0..r)
        .map(|i| {
            let q = &inv[i][i] * int(bound);
            let fl: BigInt = q.floor().to_integer();
            fl.sqrt().to_i64().unwrap_or(i64::MAX)
        })
        .collect();
    let d = lattice.rank();
    let mut out = Vec::new();
    let mut c: Vec<i64> = radii.iter().map(|&x| -x).collect();
    loop {
        let mut x = vec![0i64; d];
        for (ck, bk) in c.iter().zip(basis) {
            if *ck != 0 {
                for (xi, bi) in x.iter_mut().zip(bk) {
                    *xi += ck * bi;
                }
            }
        }
        if lattice.norm_int(&x) <= bound {
            out.push(x);
        }
        // odometer
        let mut k = 0;
        loop {
            if k == r {
                out.sort();
                return out;
            }
            if c[k] < radii[k] {
                c[k] += 1;
                break;
            }
            c[k] = -radii[k];
            k += 1;
        }
    }
}

pub(crate) fn to_q_rows(rows: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
}

pub fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &a[c][c];
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    det
}

pub fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(p, c);
        let piv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x /= &piv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let prow = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(&prow) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn rational_rank(rows: &[Vec<Rational>]) -> usize {
    let mut a = rows.to_vec();
    let mut rank = 0;
    let cols = a.first().map_or(0, |r| r.len());
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(p, rank);
        for r in rank + 1..a.len() {
            if !a[r][c].is_zero() {
                let f = &a[r][c] / &a[rank][c];
                let prow = a[rank].clone();
                for (x, y) in a[r].iter_mut().zip(&prow) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Solves `x = sum c_i rows[i]` for independent `rows`.
pub(crate) fn solve_in_span(rows: &[Vec<Rational>], x: &[Rational]) -> Option<Vec<Rational>> {
    let k = rows.len();
    let d = x.len();
    // columns are rows[i]; augmented system d x (k+1)
    let mut a: Vec<Vec<Rational>> = (0..d)
        .map(|j| {
            let mut r: Vec<Rational> = rows.iter().map(|row| row[j].clone()).collect();
            r.push(x[j].clone());
            r
        })
        .collect();
    let mut piv_cols = Vec::new();
    let mut rank = 0;
    for c in 0..k {
        let Some(p) = (rank..d).find(|&r| !a[r][c].is_zero()) else {
            return None;
        };
        a.swap(p, rank);
        let pv = a[rank][c].clone();
        for v in a[rank].iter_mut() {
            *v /= &pv;
        }
        for r in 0..d {
            if r != rank && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let prow = a[rank].clone();
                for (v, w) in a[r].iter_mut().zip(&prow) {
                    *v -= &f * w;
                }
            }
        }
        piv_cols.push(c);
        rank += 1;
    }
    if a[rank..].iter().any(|r| !r[k].is_zero()) {
        return None;
    }
    Some((0..k).map(|i| a[i][k].clone()).collect())
}

/// Basis of `{x : rows * x = 0}` over Q.
pub(crate) fn rational_kernel(rows: &[Vec<Rational>], d: usize) -> Vec<Vec<Rational>> {
    let mut a = rows.to_vec();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..d {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(p, rank);
        let pv = a[rank][c].clone();
        for v in a[rank].iter_mut() {
            *v /= &pv;
        }
        for r in 0..a.len() {
            if r != rank && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let prow = a[rank].clone();
                for (v, w) in a[r].iter_mut().zip(&prow) {
                    *v -= &f * w;
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rational::zero(); d];
            x[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -a[i][f].clone();
            }
            x
        })
        .collect()
}

/// Lattice description file: `lattice <name> rank <d>` followed by `d` Gram
/// rows, and `sublattice <name> of <parent>` followed by generator rows.
/// `#` starts a comment.
#[derive(Debug, Clone, Default)]
pub struct LatticeFile {
    pub lattices: Vec<Arc<Lattice>>,
    pub sublattices: Vec<Arc<Sublattice>>,
}

impl LatticeFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = LatticeFile::default();
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let mut k = 0;
        while k < lines.len() {
            let (ln, line) = lines[k];
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["lattice", name, "rank", d] => {
                    let d: usize = d.parse().map_err(|_| VoaError::Parse(format!("line {ln}: bad rank `{d}`")))?;
                    let rows = read_int_rows(&lines, k + 1, Some(d))?;
                    k += 1 + d;
                    out.lattices.push(Arc::new(Lattice::new(*name, rows)?));
                }
                ["sublattice", name, "of", parent] => {
                    let parent = out
                        .lattices
                        .iter()
                        .find(|l| l.name() == *parent)
                        .cloned()
                        .ok_or_else(|| VoaError::UnknownName(parent.to_string()))?;
                    let rows = read_int_rows(&lines, k + 1, None)?;
                    k += 1 + rows.len();
                    out.sublattices.push(Arc::new(Sublattice::new(*name, parent, rows)?));
                }
                _ => return Err(VoaError::Parse(format!("line {ln}: unexpected `{line}`"))),
            }
        }
        Ok(out)
    }
}

/// Reads consecutive integer rows starting at `start` (all numeric lines when
/// `count` is `None`).
pub(crate) fn read_int_rows(lines: &[(usize, &str)], start: usize, count: Option<usize>) -> Result<Vec<Vec<i64>>> {
    let mut rows = Vec::new();
    let mut k = start;
    while k < lines.len() && count.is_none_or(|c| rows.len() < c) {
        let (ln, line) = lines[k];
        let numeric = line.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+');
        if !numeric {
            break;
        }
        let row: Vec<i64> = line
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|_| VoaError::Parse(format!("line {ln}: bad integer `{t}`"))))
            .collect::<Result<_>>()?;
        rows.push(row);
        k += 1;
    }
    if let Some(c) = count {
        if rows.len() != c {
            return Err(VoaError::Parse(format!("expected {c} rows, found {}", rows.len())));
        }
    }
    Ok(rows)
}

/// Parses a whitespace-separated list of rationals.
pub fn parse_rational_row(s: &str) -> Result<Vec<Rational>> {
    s.split_whitespace().map(parse_rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn diag(name: &str, entries: &[i64]) -> Arc<Lattice> {
        let d = entries.len();
        let gram = (0..d).map(|i| (0..d).map(|j| if i == j { entries[i] } else { 0 }).collect()).collect();
        Arc::new(Lattice::new(name, gram).unwrap())
    }

    #[test]
    fn rejects_odd_and_indefinite() {
        assert!(Lattice::new("odd", vec![vec![2, 1], vec![1, 2]]).is_err());
        assert!(Lattice::new("indef", vec![vec![2, 4], vec![4, 2]]).is_err());
        assert!(Lattice::new("asym", vec![vec![2, 0], vec![2, 2]]).is_err());
        assert!(Lattice::new("ok", vec![vec![4, 2], vec![2, 4]]).is_ok());
    }

    #[test]
    fn inner_products() {
        let l = diag("A1^3", &[2, 2, 2]);
        let g1 = QVec::from_ints(l.clone(), &[1, -2, 1]).unwrap();
        let g2 = QVec::from_ints(l.clone(), &[1, 0, -1]).unwrap();
        let g = QVec::from_ints(l.clone(), &[1, 1, 1]).unwrap();
        assert_eq!(g1.inner(&g1).unwrap(), int(12));
        assert_eq!(g2.inner(&g2).unwrap(), int(4));
        assert_eq!(g.inner(&g1).unwrap(), int(0));
        let other = diag("A1", &[2]);
        let a = QVec::from_ints(other, &[1]).unwrap();
        assert!(matches!(a.inner(&g), Err(VoaError::Domain(_))));
    }

    #[test]
    fn short_vectors() {
        let a1 = diag("A1", &[2]);
        assert_eq!(a1.vectors_up_to_norm(2), vec![vec![-1], vec![0], vec![1]]);
        let a14 = diag("A1^4", &[2, 2, 2, 2]);
        assert_eq!(a14.vectors_up_to_norm(2).len(), 9);
        let r = Sublattice::new(
            "sqrt2A3",
            a14.clone(),
            vec![vec![1, -1, 0, 0], vec![0, 1, -1, 0], vec![0, 0, 1, -1]],
        )
        .unwrap();
        assert_eq!(r.vectors_up_to_norm(2), vec![vec![0, 0, 0, 0]]);
        // 12 roots of norm 4, scaled A3
        assert_eq!(r.vectors_up_to_norm(4).len(), 13);
        assert!(a14.vectors_up_to_norm(-2).is_empty());
    }

    #[test]
    fn hermite_and_membership() {
        let l = diag("A1^3", &[2, 2, 2]);
        let p = Sublattice::new("P", l.clone(), vec![vec![1, -2, 1], vec![1, 0, -1], vec![1, 1, 1]]).unwrap();
        assert_eq!(p.basis(), &[vec![1, 0, 5], vec![0, 1, 2], vec![0, 0, 6]]);
        let listed = Sublattice::new("P'", l.clone(), vec![vec![1, 0, -1], vec![0, 1, 2], vec![0, 0, 6]]).unwrap();
        assert!(p.same_span(&listed));
        assert!(p.contains(&[0, 0, 6]));
        assert!(!p.contains(&[0, 0, 3]));
        assert_eq!(p.span_coords(&[int(0), int(0), int(6)]), Some(vec![int(0), int(0), int(1)]));
    }

    #[test]
    fn cosets() {
        let l = diag("A1^3", &[2, 2, 2]);
        let p = Sublattice::new("P", l.clone(), vec![vec![1, -2, 1], vec![1, 0, -1], vec![1, 1, 1]]).unwrap();
        let reps = coset_decomposition(&l, &p).unwrap();
        let expected: Vec<Vec<i64>> = (0..6).map(|i| vec![0, 0, i]).collect();
        assert_eq!(reps, expected);
        let whole = Sublattice::new("L", l.clone(), vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(coset_decomposition(&l, &whole).unwrap(), vec![vec![0, 0, 0]]);
        let line = Sublattice::new("Zg", l.clone(), vec![vec![1, 1, 1]]).unwrap();
        assert!(matches!(coset_decomposition(&l, &line), Err(VoaError::NotFullRank(_))));
    }

    #[test]
    fn isometries() {
        let a14 = diag("A1^4", &[2, 2, 2, 2]);
        let tau = Isometry::block_cycle("tau", a14.clone(), &[1, 2, 3, 4]).unwrap();
        assert_eq!(tau.order(10).unwrap(), 4);
        assert_eq!(tau.apply_point(&[1, 0, 0, 0]).unwrap(), vec![0, 1, 0, 0]);
        let a12 = diag("A1^2", &[2, 2]);
        let bad = Isometry::of_lattice("bad", a12, &[vec![1, 1], vec![0, 1]]);
        assert!(matches!(bad, Err(VoaError::NotAnIsometry(_))));
        let inv = tau.inverse().unwrap();
        assert_eq!(inv.apply_point(&[0, 1, 0, 0]).unwrap(), vec![1, 0, 0, 0]);
        assert_eq!(tau.apply_q(&[rat(1, 4), int(0), int(0), int(0)]).unwrap()[1], rat(1, 4));
    }

    #[test]
    fn lattice_file_round_trip() {
        let text = "# comment\nlattice A1x2 rank 2\n2 0\n0 2\nsublattice D of A1x2\n1 1\n1 -1 # trailing\n";
        let f = LatticeFile::parse(text).unwrap();
        assert_eq!(f.lattices.len(), 1);
        assert_eq!(f.sublattices[0].rank(), 2);
        let printed = format!("{}{}", f.lattices[0], f.sublattices[0]);
        let again = LatticeFile::parse(&printed).unwrap();
        assert_eq!(again.lattices, f.lattices);
        assert_eq!(again.sublattices, f.sublattices);
        assert!(LatticeFile::parse("lattice X rank 2\n2 0\n").is_err());
    }
}
