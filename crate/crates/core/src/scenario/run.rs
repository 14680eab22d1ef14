use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::ast::{CheckKind, Item, Scenario, SeriesExpr, SpaceExpr, StateAtom, StateExpr};
use super::report::{CheckResult, DimTable, Report, Row, Status};
use crate::autos::{transport_state, AutBuilder, AutGroup, Automorphism, DslExpr, VecLit, DEFAULT_GROUP_BOUND};
use crate::commutant::{
    annihilator, charge_subspace, commutant_dims, commutant_in, compare_dims, compare_subspaces, image_subspace,
    orbifold, square_acts_as, sublattice_algebra, verify_nested, verify_orbifold_coset, ComputedSubspace,
};
use crate::error::{Result, VoaError};
use crate::fock::{GradedBasis, StateVector};
use crate::lattice::{coset_decomposition, is_transversal, Isometry, Lattice, LatticeSpan, Sublattice};
use crate::qseries::{burnside_orbifold_dims, twisted_character, voa_character, IntSeries};
use crate::scalar::{int, rat, GaussScalar, Rational};
use crate::vertex::{ModeRequest, VertexEngine};

/// Flags for a scenario run.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub max_weight: u32,
    /// Names of the checks to run; empty means all.
    pub checks: Vec<String>,
    /// Also compare every commutant with the annihilator of its generator
    /// on grades up to 2.
    pub strict_annihilation: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { max_weight: 4, checks: Vec::new(), strict_annihilation: false }
    }
}

struct Outcome {
    ok: bool,
    detail: String,
    rows: Vec<Row>,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Outcome { ok, detail: detail.into(), rows: Vec::new() }
    }

    fn from_rows(rows: Vec<Row>, detail: impl Into<String>) -> Self {
        Outcome { ok: rows.iter().all(|r| r.ok), detail: detail.into(), rows }
    }
}

/// Evaluates a scenario. Definitions are computed on first use and cached.
pub struct Runner<'a> {
    scenario: &'a Scenario,
    opts: RunOptions,
    defs: HashMap<&'a str, &'a Item>,
    lattices: HashMap<String, Arc<Lattice>>,
    subs: HashMap<String, Arc<Sublattice>>,
    vectors: HashMap<String, Vec<(String, Vec<Rational>)>>,
    bases: HashMap<String, Arc<GradedBasis>>,
    engines: HashMap<String, Arc<VertexEngine>>,
    builders: HashMap<String, AutBuilder>,
    isos: HashMap<String, Result<Arc<Isometry>>>,
    states: HashMap<String, Result<StateVector>>,
    autos: HashMap<String, Result<Arc<Automorphism>>>,
    groups: HashMap<String, Result<Arc<AutGroup>>>,
    spaces: HashMap<String, Result<Arc<ComputedSubspace>>>,
    series: HashMap<String, Result<Arc<IntSeries>>>,
}

impl<'a> Runner<'a> {
    /// Builds the lattices, sublattices and vectors; errors here are
    /// validation errors of the scenario.
    pub fn new(scenario: &'a Scenario, opts: RunOptions) -> Result<Self> {
        scenario.validate()?;
        let mut r = Runner {
            scenario,
            opts,
            defs: HashMap::new(),
            lattices: HashMap::new(),
            subs: HashMap::new(),
            vectors: HashMap::new(),
            bases: HashMap::new(),
            engines: HashMap::new(),
            builders: HashMap::new(),
            isos: HashMap::new(),
            states: HashMap::new(),
            autos: HashMap::new(),
            groups: HashMap::new(),
            spaces: HashMap::new(),
            series: HashMap::new(),
        };
        for item in &scenario.items {
            match item {
                Item::Lattice { name, gram } => {
                    r.lattices.insert(name.clone(), Arc::new(Lattice::new(name.clone(), gram.clone()).map_err(invalid)?));
                }
                Item::Sublattice { name, parent, generators } => {
                    let p = r.lattices[parent].clone();
                    r.subs.insert(name.clone(), Arc::new(Sublattice::new(name.clone(), p, generators.clone()).map_err(invalid)?));
                }
                Item::Vector { lattice, name, coords } => {
                    let d = r.lattices[lattice].rank();
                    if coords.len() != d {
                        return Err(VoaError::Parse(format!(
                            "vector {name} has {} coordinates but {lattice} has rank {d}",
                            coords.len()
                        )));
                    }
                    r.vectors.entry(lattice.clone()).or_default().push((name.clone(), coords.clone()));
                    continue;
                }
                _ => {}
            }
            if let Some(n) = item_name(item) {
                r.defs.insert(n, item);
            }
        }
        for name in &r.opts.checks {
            if !scenario.checks().any(|(n, _, _)| n == name) {
                return Err(VoaError::UnknownName(format!("check {name}")));
            }
        }
        Ok(r)
    }

    pub fn max_weight(&self) -> u32 {
        self.opts.max_weight
    }

    /// Runs the selected checks in scenario order.
    pub fn run(&mut self) -> Report {
        let start = Instant::now();
        let scenario = self.scenario;
        let mut checks = Vec::new();
        for (name, optional, kind) in scenario.checks() {
            if !self.opts.checks.is_empty() && !self.opts.checks.iter().any(|c| c == name) {
                continue;
            }
            let t = Instant::now();
            let out = self.check(kind).unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
            checks.push(CheckResult {
                name: name.to_string(),
                kind: kind.keyword().to_string(),
                status: if out.ok { Status::Pass } else { Status::Fail },
                optional,
                detail: out.detail,
                rows: out.rows,
                elapsed: t.elapsed(),
            });
        }
        if self.opts.strict_annihilation {
            checks.extend(self.strict_annihilation());
        }
        let dims = self.dim_tables();
        let passed = checks.iter().filter(|c| c.passed()).count();
        Report {
            engine: "voalab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            scenario_hash: scenario.hash(),
            max_weight: self.opts.max_weight,
            failed: checks.len() - passed,
            passed,
            checks,
            dims,
            elapsed: start.elapsed(),
        }
    }

    fn strict_annihilation(&mut self) -> Vec<CheckResult> {
        let scenario = self.scenario;
        let mut out = Vec::new();
        for item in &scenario.items {
            let Item::Space { lattice, name, expr: SpaceExpr::Commutant(s) } = item else {
                continue;
            };
            if !matches!(self.spaces.get(name), Some(Ok(_))) {
                continue;
            }
            let t = Instant::now();
            let w = self.opts.max_weight.min(2);
            let res = (|| -> Result<Outcome> {
                let space = self.space(name)?;
                let basis = self.basis(lattice)?;
                let e = self.state(s)?;
                let ann = annihilator(&basis, &[e], w)?;
                let rows = compare_subspaces(name, &space.truncate(w), &ann, w).iter().map(Row::from).collect();
                Ok(Outcome::from_rows(rows, format!("commutant of {s} against the annihilator of all its modes")))
            })();
            let o = res.unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
            out.push(CheckResult {
                name: format!("strict_annihilation_{name}"),
                kind: "strict_annihilation".into(),
                status: if o.ok { Status::Pass } else { Status::Fail },
                optional: false,
                detail: o.detail,
                rows: o.rows,
                elapsed: t.elapsed(),
            });
        }
        out
    }

    fn dim_tables(&self) -> Vec<DimTable> {
        let mut out = Vec::new();
        for item in &self.scenario.items {
            match item {
                Item::Space { name, .. } => {
                    if let Some(Ok(s)) = self.spaces.get(name) {
                        out.push(DimTable { name: name.clone(), dims: s.dims() });
                    }
                }
                Item::Series { name, .. } => {
                    if let Some(Ok(s)) = self.series.get(name) {
                        if let Ok(d) = s.integer_dims() {
                            out.push(DimTable { name: name.clone(), dims: d });
                        }
                    }
                }
                _ => {}
            }
        }
        out
    }

    // ---- definitions ----

    pub fn lattice(&self, name: &str) -> Result<Arc<Lattice>> {
        self.lattices.get(name).cloned().ok_or_else(|| VoaError::UnknownName(name.to_string()))
    }

    pub fn span(&self, name: &str) -> Result<LatticeSpan> {
        if let Some(l) = self.lattices.get(name) {
            return Ok(LatticeSpan::Full(l.clone()));
        }
        self.subs.get(name).map(|s| LatticeSpan::Sub(s.clone())).ok_or_else(|| VoaError::UnknownName(name.to_string()))
    }

    fn basis_cutoff(&self) -> u32 {
        (self.opts.max_weight + 1).max(2)
    }

    pub fn basis(&mut self, lat: &str) -> Result<Arc<GradedBasis>> {
        if let Some(b) = self.bases.get(lat) {
            return Ok(b.clone());
        }
        let b = Arc::new(GradedBasis::build(self.lattice(lat)?, self.basis_cutoff()));
        self.bases.insert(lat.to_string(), b.clone());
        Ok(b)
    }

    fn engine(&mut self, lat: &str) -> Result<Arc<VertexEngine>> {
        if let Some(e) = self.engines.get(lat) {
            return Ok(e.clone());
        }
        let e = Arc::new(VertexEngine::new(self.lattice(lat)?, (self.opts.max_weight + 2).max(8)));
        self.engines.insert(lat.to_string(), e.clone());
        Ok(e)
    }

    fn resolve(&self, lat: &str, v: &VecLit) -> Result<Vec<Rational>> {
        let d = self.lattice(lat)?.rank();
        match v {
            VecLit::Coords(c) if c.len() == d => Ok(c.clone()),
            VecLit::Coords(c) => Err(VoaError::Domain(format!("vector has {} coordinates, {lat} has rank {d}", c.len()))),
            VecLit::Combo(terms) => {
                let named = self.vectors.get(lat);
                let mut out = vec![Rational::zero(); d];
                for (r, n) in terms {
                    let x = named
                        .and_then(|vs| vs.iter().find(|(m, _)| m == n))
                        .ok_or_else(|| VoaError::UnknownName(format!("vector {n} on {lat}")))?;
                    for (o, xi) in out.iter_mut().zip(&x.1) {
                        *o += r * xi;
                    }
                }
                Ok(out)
            }
        }
    }

    fn point(&self, lat: &str, v: &VecLit) -> Result<Vec<i64>> {
        let q = self.resolve(lat, v)?;
        q.iter()
            .map(|x| {
                if x.is_integer() {
                    num_traits::ToPrimitive::to_i64(&x.to_integer())
                        .ok_or_else(|| VoaError::Domain("coordinate overflow".into()))
                } else {
                    Err(VoaError::Domain(format!("{v} is not a lattice point")))
                }
            })
            .collect()
    }

    fn item(&self, name: &str) -> Result<&'a Item> {
        self.defs.get(name).copied().ok_or_else(|| VoaError::UnknownName(name.to_string()))
    }

    /// The lattice a state, automorphism, group or space lives on.
    pub fn home(&self, name: &str) -> Result<&'a str> {
        match self.item(name)? {
            Item::State { lattice, .. }
            | Item::Auto { lattice, .. }
            | Item::Group { lattice, .. }
            | Item::Space { lattice, .. } => Ok(lattice),
            _ => Err(VoaError::Domain(format!("{name} does not live on a lattice"))),
        }
    }

    fn on(&self, name: &str, lat: &str) -> Result<()> {
        let h = self.home(name)?;
        if h != lat {
            return Err(VoaError::Domain(format!("{name} lives on {h}, not on {lat}")));
        }
        Ok(())
    }

    pub fn isometry(&mut self, name: &str) -> Result<Arc<Isometry>> {
        if let Some(r) = self.isos.get(name) {
            return r.clone();
        }
        let r = match self.item(name)? {
            Item::Isometry { name, source, target, rows } => {
                let gens: Vec<Vec<i64>> = rows.iter().map(|r| r.0.clone()).collect();
                let imgs: Vec<Vec<i64>> = rows.iter().map(|r| r.1.clone()).collect();
                let src = self.span(source)?;
                let tgt = self.span(target)?;
                Isometry::from_images(name.clone(), src, tgt, &gens, &imgs).map(Arc::new)
            }
            _ => Err(VoaError::Domain(format!("{name} is not an isometry"))),
        };
        self.isos.insert(name.to_string(), r.clone());
        r
    }

    fn builder(&mut self, lat: &str) -> Result<&mut AutBuilder> {
        if !self.builders.contains_key(lat) {
            let mut b = AutBuilder::new(self.basis(lat)?);
            for (n, c) in self.vectors.get(lat).into_iter().flatten() {
                b.add_vector(n, c.clone());
            }
            self.builders.insert(lat.to_string(), b);
        }
        Ok(self.builders.get_mut(lat).expect("inserted"))
    }

    /// Registers the isometries and named automorphisms an expression uses.
    fn prepare(&mut self, lat: &str, e: &DslExpr) -> Result<()> {
        match e {
            DslExpr::Lift(n) => {
                let iso = self.isometry(n)?;
                self.builder(lat)?.add_isometry(iso);
            }
            DslExpr::Named(n) => {
                self.on(n, lat)?;
                if self.builder(lat)?.named(n).is_none() {
                    let a = self.auto(n)?;
                    self.builder(lat)?.add_named(n, (*a).clone());
                }
            }
            DslExpr::Inv(x) => self.prepare(lat, x)?,
            DslExpr::Compose(xs) => {
                for x in xs {
                    self.prepare(lat, x)?;
                }
            }
            DslExpr::Inner(_) | DslExpr::Sigma(_) | DslExpr::Theta | DslExpr::Perm(_) => {}
        }
        Ok(())
    }

    pub fn dsl(&mut self, lat: &str, e: &DslExpr) -> Result<Automorphism> {
        self.prepare(lat, e)?;
        self.builder(lat)?.build(e)
    }

    pub fn auto(&mut self, name: &str) -> Result<Arc<Automorphism>> {
        if let Some(r) = self.autos.get(name) {
            return r.clone();
        }
        let r = match self.item(name)? {
            Item::Auto { lattice, expr, .. } => self.dsl(lattice, expr).map(Arc::new),
            _ => Err(VoaError::Domain(format!("{name} is not an automorphism"))),
        };
        self.autos.insert(name.to_string(), r.clone());
        r
    }

    pub fn group(&mut self, name: &str) -> Result<Arc<AutGroup>> {
        if let Some(r) = self.groups.get(name) {
            return r.clone();
        }
        let r = match self.item(name)? {
            Item::Group { lattice, generators, .. } => (|| {
                let gens = generators.iter().map(|g| self.auto(g).map(|a| (*a).clone())).collect::<Result<Vec<_>>>()?;
                AutGroup::generate(gens, self.basis(lattice)?, DEFAULT_GROUP_BOUND).map(Arc::new)
            })(),
            _ => Err(VoaError::Domain(format!("{name} is not a group"))),
        };
        self.groups.insert(name.to_string(), r.clone());
        r
    }

    pub fn state(&mut self, name: &str) -> Result<StateVector> {
        if let Some(r) = self.states.get(name) {
            return r.clone();
        }
        let r = match self.item(name)? {
            Item::State { lattice, expr, .. } => self.eval_state(lattice, expr),
            _ => Err(VoaError::Domain(format!("{name} is not a state"))),
        };
        self.states.insert(name.to_string(), r.clone());
        r
    }

    pub fn eval_state(&mut self, lat: &str, e: &StateExpr) -> Result<StateVector> {
        let mut out = StateVector::zero();
        for (c, atom) in &e.0 {
            let v = self.eval_atom(lat, atom)?;
            out.add_scaled(&v, c);
        }
        Ok(out)
    }

    fn eval_atom(&mut self, lat: &str, atom: &StateAtom) -> Result<StateVector> {
        let rank = self.lattice(lat)?.rank();
        match atom {
            StateAtom::Vacuum => Ok(StateVector::vacuum(rank)),
            StateAtom::Exp(v) => Ok(StateVector::exp(&self.point(lat, v)?)),
            StateAtom::Heis(v, n) => {
                let beta = self.resolve(lat, v)?;
                Ok(self.engine(lat)?.heis_apply(&beta, *n, &StateVector::vacuum(rank)))
            }
            StateAtom::Virasoro(s) => {
                let span = self.span(s)?;
                if span.ambient().name() != lat {
                    return Err(VoaError::Domain(format!("{s} is not inside {lat}")));
                }
                self.engine(lat)?.lattice_virasoro(&span)
            }
            StateAtom::Sugawara { e, h, f, k } => {
                for x in [e, h, f] {
                    self.on(x, lat)?;
                }
                let (e, h, f) = (self.state(e)?, self.state(h)?, self.state(f)?);
                self.engine(lat)?.sugawara_sl2(&e, &h, &f, *k)
            }
            StateAtom::Transport(iso, inner) => {
                let iso = self.isometry(iso)?;
                let src = iso.source().ambient().name().to_string();
                if iso.target().ambient().name() != lat {
                    return Err(VoaError::Domain(format!("{} does not map into {lat}", iso.name())));
                }
                let v = self.eval_state(&src, inner)?;
                let b = self.basis(&src)?;
                transport_state(&iso, &b, &v)
            }
            StateAtom::Apply(d, s) => {
                let a = self.dsl(lat, d)?;
                let v = self.eval_state(lat, s)?;
                a.apply(&v)
            }
            StateAtom::Mode(u, n, v) => {
                let u = self.eval_state(lat, u)?;
                let v = self.eval_state(lat, v)?;
                self.engine(lat)?.mode_apply(&u, *n, &v)
            }
            StateAtom::Named(n) => {
                self.on(n, lat)?;
                self.state(n)
            }
        }
    }

    pub fn space(&mut self, name: &str) -> Result<Arc<ComputedSubspace>> {
        if let Some(r) = self.spaces.get(name) {
            return r.clone();
        }
        let r = match self.item(name)? {
            Item::Space { lattice, expr, .. } => {
                self.eval_space(lattice, expr).map(|s| Arc::new(s.with_provenance(name.to_string())))
            }
            _ => Err(VoaError::Domain(format!("{name} is not a space"))),
        };
        self.spaces.insert(name.to_string(), r.clone());
        r
    }

    pub fn eval_space(&mut self, lat: &str, e: &SpaceExpr) -> Result<ComputedSubspace> {
        let w = self.opts.max_weight;
        let basis = self.basis(lat)?;
        let spanned = |this: &Self, s: &str| -> Result<LatticeSpan> {
            let span = this.span(s)?;
            if span.ambient().name() != lat {
                return Err(VoaError::Domain(format!("{s} is not inside {lat}")));
            }
            Ok(span)
        };
        match e {
            SpaceExpr::Whole => Ok(ComputedSubspace::whole(basis, w)),
            SpaceExpr::Commutant(s) => {
                self.on(s, lat)?;
                commutant_dims(&basis, &self.state(s)?, w)
            }
            SpaceExpr::CommutantIn(x, s) => {
                self.on(s, lat)?;
                let sub = self.eval_space(lat, x)?;
                commutant_in(&sub, &self.state(s)?, w)
            }
            SpaceExpr::Algebra(s) => sublattice_algebra(&basis, &spanned(self, s)?, w),
            SpaceExpr::Charges(s, shift) => {
                let span = spanned(self, s)?;
                let shift = if shift.is_empty() { vec![0; span.ambient().rank()] } else { shift.clone() };
                if shift.len() != span.ambient().rank() {
                    return Err(VoaError::Domain(format!("shift has {} coordinates, {lat} has rank {}", shift.len(), span.ambient().rank())));
                }
                charge_subspace(&basis, &span, &shift, w)
            }
            SpaceExpr::Fixed(g) => {
                self.on(g, lat)?;
                let g = self.group(g)?;
                orbifold(&ComputedSubspace::whole(basis, w), &g, w)
            }
            SpaceExpr::Orbifold(x, g) => {
                self.on(g, lat)?;
                let sub = self.eval_space(lat, x)?;
                let g = self.group(g)?;
                orbifold(&sub, &g, w)
            }
            SpaceExpr::Image(d, x) => {
                let a = self.dsl(lat, d)?;
                let sub = self.eval_space(lat, x)?;
                Ok(image_subspace(&a, &sub)?.truncate(w))
            }
            SpaceExpr::Intersect(a, b) => {
                let a = self.eval_space(lat, a)?;
                let b = self.eval_space(lat, b)?;
                a.intersect(&b)
            }
            SpaceExpr::Sum(a, b) => {
                let a = self.eval_space(lat, a)?;
                let b = self.eval_space(lat, b)?;
                let w = a.cutoff().min(b.cutoff());
                let grades = (0..=w).map(|n| a.grade(n).sum(b.grade(n))).collect::<Result<Vec<_>>>()?;
                Ok(ComputedSubspace::new(basis, grades, "sum"))
            }
            SpaceExpr::Annihilator(xs) => {
                let states = xs
                    .iter()
                    .map(|x| {
                        self.on(x, lat)?;
                        self.state(x)
                    })
                    .collect::<Result<Vec<_>>>()?;
                annihilator(&basis, &states, w)
            }
            SpaceExpr::Named(n) => {
                self.on(n, lat)?;
                Ok((*self.space(n)?).clone())
            }
        }
    }

    pub fn series(&mut self, name: &str) -> Result<Arc<IntSeries>> {
        if let Some(r) = self.series.get(name) {
            return r.clone();
        }
        let r = match self.item(name)? {
            Item::Series { expr, .. } => self.eval_series(expr).map(Arc::new),
            _ => Err(VoaError::Domain(format!("{name} is not a series"))),
        };
        self.series.insert(name.to_string(), r.clone());
        r
    }

    /// Character of `V_{shift + S}`, the shift in the coordinates of the
    /// Hermite basis of `S`.
    pub fn character(&self, span: &str, shift: Option<&[Rational]>) -> Result<IntSeries> {
        let span = self.span(span)?;
        let d = span.ambient().rank();
        let mut amb = vec![Rational::zero(); d];
        if let Some(s) = shift {
            let b = span.basis();
            if s.len() != b.len() {
                return Err(VoaError::Domain(format!("shift has {} coordinates, {} has rank {}", s.len(), span.name(), b.len())));
            }
            for (si, bi) in s.iter().zip(&b) {
                for (a, &x) in amb.iter_mut().zip(bi) {
                    *a += si * int(x);
                }
            }
        }
        voa_character(&span, &amb, self.opts.max_weight)
    }

    pub fn eval_series(&mut self, e: &SeriesExpr) -> Result<IntSeries> {
        let w = self.opts.max_weight;
        match e {
            SeriesExpr::Character(s, shift) => self.character(s, shift.as_deref()),
            SeriesExpr::Burnside(g) => burnside_orbifold_dims(&*self.group(g)?, w),
            SeriesExpr::Twisted(a) => Ok(twisted_character(&*self.auto(a)?, w)?.series),
            SeriesExpr::Dims(x) => {
                let mut s = IntSeries::zero(w);
                for (n, d) in self.space(x)?.dims().iter().enumerate() {
                    s.add_at(4 * n as i64, &GaussScalar::from_int(*d as i64));
                }
                Ok(s)
            }
            SeriesExpr::Sum(a, b) => Ok(self.eval_series(a)?.add(&self.eval_series(b)?)),
            SeriesExpr::Product(a, b) => Ok(self.eval_series(a)?.mul(&self.eval_series(b)?)),
            SeriesExpr::Named(n) => Ok((*self.series(n)?).clone()),
        }
    }

    /// Graded dimensions of a space or series, grades `0..=W`.
    pub fn dims_of(&mut self, name: &str) -> Result<Vec<usize>> {
        let w = self.opts.max_weight as usize;
        let mut d = match self.item(name)? {
            Item::Space { .. } => self.space(name)?.dims(),
            Item::Series { .. } => self.series(name)?.integer_dims()?,
            _ => return Err(VoaError::Domain(format!("{name} has no dimensions"))),
        };
        d.truncate(w + 1);
        Ok(d)
    }

    // ---- checks ----

    fn check(&mut self, kind: &CheckKind) -> Result<Outcome> {
        let w = self.opts.max_weight;
        use CheckKind as C;
        match kind {
            C::ScalarAxioms { samples, seed } => scalar_axioms(*samples, *seed),
            C::IsometryValid { iso, order } => {
                let iso = self.isometry(iso)?;
                match order {
                    Some(k) => {
                        let o = iso.order(64)?;
                        Ok(Outcome::new(o == *k, format!("order {o}")))
                    }
                    None => Ok(Outcome::new(true, format!("{} -> {}", iso.source().name(), iso.target().name()))),
                }
            }
            C::IsometryRejected { iso } => Ok(match self.isometry(iso) {
                Err(e @ VoaError::NotAnIsometry(_)) => Outcome::new(true, e.to_string()),
                Err(e) => Outcome::new(false, format!("rejected for another reason: {e}")),
                Ok(_) => Outcome::new(false, "accepted"),
            }),
            C::Restricts { big, small } => {
                let big = self.isometry(big)?;
                let small = self.isometry(small)?;
                for x in small.source().basis() {
                    if big.apply_point(&x)? != small.apply_point(&x)? {
                        return Ok(Outcome::new(false, format!("images of {x:?} differ")));
                    }
                }
                Ok(Outcome::new(true, format!("{} extends {}", big.name(), small.name())))
            }
            C::Intertwines { map, a, b } => {
                let map = self.isometry(map)?;
                let a = self.isometry(a)?;
                let b = self.isometry(b)?;
                for x in map.source().basis() {
                    if map.apply_point(&a.apply_point(&x)?)? != b.apply_point(&map.apply_point(&x)?)? {
                        return Ok(Outcome::new(false, format!("fails on {x:?}")));
                    }
                }
                Ok(Outcome::new(true, format!("{} {} = {} {}", map.name(), a.name(), b.name(), map.name())))
            }
            C::CosetCount { lattice, sub, count } => {
                let l = self.lattice(lattice)?;
                let s = self.sub(sub)?;
                let reps = coset_decomposition(&l, &s)?;
                let shown: Vec<String> = reps.iter().map(|r| format!("{r:?}")).collect();
                Ok(Outcome::new(reps.len() == *count, format!("{} cosets: {}", reps.len(), shown.join(" "))))
            }
            C::Transversal { lattice, sub, reps } => {
                let l = self.lattice(lattice)?;
                let s = self.sub(sub)?;
                Ok(Outcome::new(is_transversal(&l, &s, reps)?, format!("{} representatives", reps.len())))
            }
            C::SameSpan { a, b } => {
                let (a, b) = (self.sub(a)?, self.sub(b)?);
                Ok(Outcome::new(a.same_span(&b), format!("{} and {}", a.name(), b.name())))
            }
            C::Inner { lattice, x, y, value } => {
                let l = self.lattice(lattice)?;
                let v = l.inner_q(&self.resolve(lattice, x)?, &self.resolve(lattice, y)?);
                Ok(Outcome::new(&v == value, format!("<{x}, {y}> = {v}")))
            }
            C::VertexAxioms { lattice, pairs, seed } => self.vertex_axioms(lattice, *pairs, *seed),
            C::Conformal { state, c } => {
                let lat = self.home(state)?;
                let e = self.state(state)?;
                let cert = self.engine(lat)?.is_conformal(&e, w.max(2))?;
                let ok = &cert.central_charge == c;
                Ok(Outcome::new(ok, format!("central charge {}", cert.central_charge)))
            }
            C::Commuting { a, b } => {
                let lat = self.home(a)?;
                self.on(b, lat)?;
                let (x, y) = (self.state(a)?, self.state(b)?);
                let ok = self.engine(lat)?.commuting_pair(&x, &y)?;
                Ok(Outcome::new(ok, format!("{a}_(n) {b} = 0 for n >= 0")))
            }
            C::Affine { e, h, f, k } => {
                let lat = self.home(e)?;
                let (x, y, z) = (self.state(e)?, self.state(h)?, self.state(f)?);
                self.engine(lat)?.check_affine_triple(&x, &y, &z, *k)?;
                Ok(Outcome::new(true, format!("level {k}")))
            }
            C::Equal { lattice, pairs } => {
                let mut bad = Vec::new();
                for (l, r) in pairs {
                    if self.eval_state(lattice, l)? != self.eval_state(lattice, r)? {
                        bad.push(format!("{l} != {r}"));
                    }
                }
                let detail =
                    if bad.is_empty() { format!("{} identities", pairs.len()) } else { bad.join("; ") };
                Ok(Outcome::new(bad.is_empty(), detail))
            }
            C::AutosEqual { lattice, a, b } => {
                let x = self.dsl(lattice, a)?;
                let y = self.dsl(lattice, b)?;
                let top = w.min(x.cutoff());
                Ok(Outcome::new(x.equal_on_grades(&y, top)?, format!("grades 0..={top}")))
            }
            C::Identity { lattice, a } => {
                let x = self.dsl(lattice, a)?;
                let top = w.min(x.cutoff());
                Ok(Outcome::new(x.is_identity_up_to(top), format!("grades 0..={top}")))
            }
            C::Order { lattice, a, order } => {
                let x = self.dsl(lattice, a)?;
                // all computed grades: at small W the low grades alone can hide the order
                let o = x.order_of(x.cutoff(), 64)?;
                Ok(Outcome::new(o == *order, format!("order {o}")))
            }
            C::Homomorphism { auto, samples, seed } => {
                self.auto(auto)?.check_homomorphism(*samples, *seed)?;
                Ok(Outcome::new(true, format!("{samples} sampled products")))
            }
            C::GroupOrder { group, order } => {
                let g = self.group(group)?;
                Ok(Outcome::new(g.order() == *order, format!("order {}", g.order())))
            }
            C::SpacesEqual { a, b } => {
                let (x, y) = (self.space(a)?, self.space(b)?);
                let rows = compare_subspaces(a, &x, &y, w).iter().map(Row::from).collect();
                let same = x.basis().lattice() == y.basis().lattice();
                Ok(Outcome::from_rows(rows, if same { "equal subspaces" } else { "equal dimensions" }))
            }
            C::DimsAgree { items } => {
                let first = self.dims_of(&items[0])?;
                let mut rows = Vec::new();
                for other in &items[1..] {
                    let d = self.dims_of(other)?;
                    rows.extend(compare_dims(other, &first, &d).iter().map(Row::from));
                }
                let d: Vec<String> = first.iter().map(|x| x.to_string()).collect();
                Ok(Outcome::from_rows(rows, format!("{}: {}", items.join(" = "), d.join(" "))))
            }
            C::DimsExpected { item, dims } => {
                let d = self.dims_of(item)?;
                let n = dims.len().min(d.len());
                let rows = compare_dims(item, &d[..n], &dims[..n]).iter().map(Row::from).collect();
                Ok(Outcome::from_rows(rows, format!("grades 0..{n}")))
            }
            C::Nested { e1, e2 } => {
                let lat = self.home(e1)?;
                self.on(e2, lat)?;
                let basis = self.basis(lat)?;
                let rows = verify_nested(&basis, &self.state(e1)?, &self.state(e2)?, w)?;
                Ok(Outcome::from_rows(
                    rows.iter().map(Row::from).collect(),
                    format!("Com(Com({e1}) and {e2}) = Com({e1} + {e2})"),
                ))
            }
            C::OrbifoldCoset { e, group } => {
                let lat = self.home(e)?;
                self.on(group, lat)?;
                let basis = self.basis(lat)?;
                let g = self.group(group)?;
                let rows = verify_orbifold_coset(&basis, &self.state(e)?, &g, w)?;
                Ok(Outcome::from_rows(rows.iter().map(Row::from).collect(), format!("Com({e})^{group} = Com_(V^{group})({e})")))
            }
            C::SquareScalar { auto, space, c } => {
                let a = self.auto(auto)?;
                let s = self.space(space)?;
                Ok(match square_acts_as(&a, &s, c)? {
                    None => Outcome::new(true, format!("{auto}^2 = {c} on {space}")),
                    Some(n) => Outcome::new(false, format!("{auto}^2 differs from {c} at grade {n}")),
                })
            }
            C::Restriction { auto, iso, image, space } => self.restriction(auto, iso, image, space),
            C::BasisCharacter { span } => {
                let sp = self.span(span)?;
                let lat = sp.ambient().name().to_string();
                let basis = self.basis(&lat)?;
                let dims = match &sp {
                    LatticeSpan::Full(_) => basis.dims()[..=w as usize].to_vec(),
                    LatticeSpan::Sub(_) => sublattice_algebra(&basis, &sp, w)?.dims(),
                };
                let ch = self.character(span, None)?.integer_dims()?;
                let rows = compare_dims(span, &dims, &ch).iter().map(Row::from).collect();
                Ok(Outcome::from_rows(rows, "Fock basis against theta over eta"))
            }
            C::TwistedClosedForm { group } => {
                let g = self.group(group)?;
                let mut closed = 0;
                for a in g.elements() {
                    if twisted_character(a, w)?.closed_form {
                        closed += 1;
                    }
                }
                let detail = format!("{closed} of {} elements in closed form, all matching traces", g.order());
                Ok(Outcome::new(closed > 0, detail))
            }
            C::BurnsideFixed { group } => {
                let lat = self.home(group)?;
                let g = self.group(group)?;
                let basis = self.basis(lat)?;
                let burn = burnside_orbifold_dims(&g, w)?.integer_dims()?;
                let fixed = orbifold(&ComputedSubspace::whole(basis, w), &g, w)?.dims();
                let rows = compare_dims(group, &fixed, &burn).iter().map(Row::from).collect();
                Ok(Outcome::from_rows(rows, "fixed-space dimensions against Burnside averages"))
            }
        }
    }

    fn sub(&self, name: &str) -> Result<Arc<Sublattice>> {
        self.subs.get(name).cloned().ok_or_else(|| VoaError::UnknownName(name.to_string()))
    }

    /// `iso(a x) = b(iso x)` for every basis vector `x` of `space`.
    fn restriction(&mut self, auto: &str, iso: &str, image: &str, space: &str) -> Result<Outcome> {
        let w = self.opts.max_weight;
        let a = self.auto(auto)?;
        let b = self.auto(image)?;
        let iso = self.isometry(iso)?;
        let x = self.space(space)?;
        let src = x.basis().clone();
        if a.lattice() != src.lattice() || iso.source().ambient() != src.lattice() {
            return Err(VoaError::Domain(format!("{auto}, {} and {space} live on different lattices", iso.name())));
        }
        if iso.target().ambient() != b.lattice() {
            return Err(VoaError::Domain(format!("{image} does not act on the target of {}", iso.name())));
        }
        let mut rows = Vec::new();
        for n in 0..=w.min(x.cutoff()) {
            let mut good = 0;
            let total = x.grade(n).dim();
            for v in x.grade(n).basis() {
                let s = src.state(n, v);
                let lhs = transport_state(&iso, &src, &a.apply(&s)?)?;
                let rhs = b.apply(&transport_state(&iso, &src, &s)?)?;
                if lhs == rhs {
                    good += 1;
                }
            }
            rows.push(Row { grade: n, lhs: total, rhs: good, ok: good == total });
        }
        Ok(Outcome::from_rows(rows, format!("{auto} restricted to {space} is {image} through {}", iso.name())))
    }

    fn vertex_axioms(&mut self, lat: &str, pairs: usize, seed: u64) -> Result<Outcome> {
        let w = self.opts.max_weight;
        let basis = self.basis(lat)?;
        let engine = self.engine(lat)?;
        let l = self.lattice(lat)?;
        let omega = engine.lattice_virasoro(&LatticeSpan::Full(l.clone()))?;
        let vac = StateVector::vacuum(l.rank());
        let mut rng = StdRng::seed_from_u64(seed);
        let pick = |rng: &mut StdRng, n: u32| -> StateVector {
            let g = basis.grade(n);
            StateVector::from_monomial(g[rng.random_range(0..g.len())].clone())
        };
        let grades: Vec<u32> = (0..=w).filter(|&n| basis.dim(n) > 0).collect();
        let low: Vec<u32> = grades.iter().copied().filter(|&n| n <= 2).collect();
        let fail = |what: &str, u: &StateVector, n: i64, v: &StateVector| {
            Ok(Outcome::new(false, format!("{what} fails for u = {u}, n = {n}, v = {v}")))
        };
        for _ in 0..pairs {
            let gu = low[rng.random_range(0..low.len())];
            let gv = grades[rng.random_range(0..grades.len())];
            let u = pick(&mut rng, gu);
            let v = pick(&mut rng, gv);
            // creation
            if engine.mode_apply(&u, -1, &vac)? != u {
                return fail("creation", &u, -1, &vac);
            }
            for n in 0..=gu as i64 {
                if !engine.mode_apply(&u, n, &vac)?.is_zero() {
                    return fail("creation", &u, n, &vac);
                }
            }
            // homogeneity and skew-symmetry on an output of weight <= W
            let top = (gu + gv) as i64 - 1;
            let n = rng.random_range((top - w as i64).max(-2)..=top);
            ModeRequest { u: u.clone(), n, v: v.clone() }.evaluate(&engine)?;
            if !engine.skew_symmetry_holds(&omega, &u, n, &v)? {
                return fail("skew-symmetry", &u, n, &v);
            }
            // commutator [u_m, b_k] on v
            let gb = low[rng.random_range(0..low.len())];
            let b = pick(&mut rng, gb);
            let m = rng.random_range(-1..=gu as i64);
            let k = rng.random_range(-1..=gb as i64);
            if !engine.commutator_holds(&u, m, &b, k, &v)? {
                return fail("commutator", &u, m, &v);
            }
        }
        Ok(Outcome::new(true, format!("{pairs} sampled pairs: creation, homogeneity, skew-symmetry, commutator")))
    }
}

/// A malformed definition is a scenario error, not a failed check.
fn invalid(e: VoaError) -> VoaError {
    VoaError::Parse(e.to_string())
}

fn item_name(item: &Item) -> Option<&str> {
    match item {
        Item::Lattice { name, .. }
        | Item::Sublattice { name, .. }
        | Item::Isometry { name, .. }
        | Item::State { name, .. }
        | Item::Auto { name, .. }
        | Item::Group { name, .. }
        | Item::Space { name, .. }
        | Item::Series { name, .. }
        | Item::Check { name, .. } => Some(name),
        Item::Vector { .. } => None,
    }
}

/// Field axioms, conjugation, printing and the quarter-phase homomorphism on
/// random Gaussian rationals.
fn scalar_axioms(samples: usize, seed: u64) -> Result<Outcome> {
    let mut rng = StdRng::seed_from_u64(seed);
    let r = |rng: &mut StdRng| rat(rng.random_range(-20..=20), rng.random_range(1..=12));
    let sample = |rng: &mut StdRng| GaussScalar::new(r(rng), r(rng));
    let one = GaussScalar::one();
    let zero = GaussScalar::zero();
    for _ in 0..samples {
        let (a, b, c) = (sample(&mut rng), sample(&mut rng), sample(&mut rng));
        let laws = [
            (&a + &b == &b + &a, "additive commutativity"),
            (&(&a + &b) + &c == &a + &(&b + &c), "additive associativity"),
            (&a * &b == &b * &a, "multiplicative commutativity"),
            (&(&a * &b) * &c == &a * &(&b * &c), "multiplicative associativity"),
            (&a * &(&b + &c) == &(&a * &b) + &(&a * &c), "distributivity"),
            (&a + &zero == a && &a * &one == a, "identities"),
            (&a + &(-&a) == zero, "additive inverse"),
            (a.is_zero() || &a * &a.inv()? == one, "multiplicative inverse"),
            (a.conj().conj() == a, "conjugation is an involution"),
            ((&a * &b).conj() == &a.conj() * &b.conj(), "conjugation is multiplicative"),
            (a.to_string().parse::<GaussScalar>()? == a, "printing round trip"),
        ];
        if let Some((_, law)) = laws.iter().find(|(ok, _)| !ok) {
            return Ok(Outcome::new(false, format!("{law} fails for {a}, {b}, {c}")));
        }
    }
    for j in -8..=8 {
        for k in -8..=8 {
            let (x, y) = (rat(j, 4), rat(k, 4));
            if &GaussScalar::phase(&x)? * &GaussScalar::phase(&y)? != GaussScalar::phase(&(&x + &y))? {
                return Ok(Outcome::new(false, format!("phase is not additive at {x}, {y}")));
            }
        }
    }
    if GaussScalar::phase(&rat(1, 4))? != GaussScalar::i() || GaussScalar::phase(&rat(1, 3)).is_ok() {
        return Ok(Outcome::new(false, "phase values are wrong"));
    }
    Ok(Outcome::new(true, format!("{samples} sampled triples and the phase table")))
}
