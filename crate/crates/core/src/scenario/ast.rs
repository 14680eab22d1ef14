use std::collections::{HashMap, HashSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use sha2::{Digest, Sha256};

use crate::autos::{DslExpr, VecLit};
use crate::error::{Result, VoaError};
use crate::scalar::{GaussScalar, Rational};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scenario {
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Lattice { name: String, gram: Vec<Vec<i64>> },
    Sublattice { name: String, parent: String, generators: Vec<Vec<i64>> },
    Vector { lattice: String, name: String, coords: Vec<Rational> },
    Isometry { name: String, source: String, target: String, rows: Vec<(Vec<i64>, Vec<i64>)> },
    State { lattice: String, name: String, expr: StateExpr },
    Auto { lattice: String, name: String, expr: DslExpr },
    Group { lattice: String, name: String, generators: Vec<String> },
    Space { lattice: String, name: String, expr: SpaceExpr },
    Series { name: String, expr: SeriesExpr },
    Check { name: String, optional: bool, kind: CheckKind },
}

/// A linear combination of state atoms with Gaussian-rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct StateExpr(pub Vec<(GaussScalar, StateAtom)>);

#[derive(Debug, Clone, PartialEq)]
pub enum StateAtom {
    Vacuum,
    /// `e^v` for an integral vector.
    Exp(VecLit),
    /// `v(n) 1`; printed `h(v)` for `n = -1`.
    Heis(VecLit, i64),
    Virasoro(String),
    Sugawara { e: String, h: String, f: String, k: i64 },
    Transport(String, Box<StateExpr>),
    Apply(DslExpr, Box<StateExpr>),
    Mode(Box<StateExpr>, i64, Box<StateExpr>),
    Named(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceExpr {
    Whole,
    Commutant(String),
    CommutantIn(Box<SpaceExpr>, String),
    Algebra(String),
    Charges(String, Vec<i64>),
    Fixed(String),
    Orbifold(Box<SpaceExpr>, String),
    Image(DslExpr, Box<SpaceExpr>),
    Intersect(Box<SpaceExpr>, Box<SpaceExpr>),
    Sum(Box<SpaceExpr>, Box<SpaceExpr>),
    Annihilator(Vec<String>),
    Named(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeriesExpr {
    /// Character of `V_{shift + S}`, the shift in the coordinates of a basis of `S`.
    Character(String, Option<Vec<Rational>>),
    Burnside(String),
    Twisted(String),
    Dims(String),
    Sum(Box<SeriesExpr>, Box<SeriesExpr>),
    Product(Box<SeriesExpr>, Box<SeriesExpr>),
    Named(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckKind {
    ScalarAxioms { samples: usize, seed: u64 },
    IsometryValid { iso: String, order: Option<u32> },
    IsometryRejected { iso: String },
    Restricts { big: String, small: String },
    Intertwines { map: String, a: String, b: String },
    CosetCount { lattice: String, sub: String, count: usize },
    Transversal { lattice: String, sub: String, reps: Vec<Vec<i64>> },
    SameSpan { a: String, b: String },
    Inner { lattice: String, x: VecLit, y: VecLit, value: Rational },
    VertexAxioms { lattice: String, pairs: usize, seed: u64 },
    Conformal { state: String, c: Rational },
    Commuting { a: String, b: String },
    Affine { e: String, h: String, f: String, k: i64 },
    Equal { lattice: String, pairs: Vec<(StateExpr, StateExpr)> },
    AutosEqual { lattice: String, a: DslExpr, b: DslExpr },
    Identity { lattice: String, a: DslExpr },
    Order { lattice: String, a: DslExpr, order: u32 },
    Homomorphism { auto: String, samples: usize, seed: u64 },
    GroupOrder { group: String, order: usize },
    SpacesEqual { a: String, b: String },
    DimsAgree { items: Vec<String> },
    DimsExpected { item: String, dims: Vec<usize> },
    Nested { e1: String, e2: String },
    OrbifoldCoset { e: String, group: String },
    SquareScalar { auto: String, space: String, c: GaussScalar },
    Restriction { auto: String, iso: String, image: String, space: String },
    BasisCharacter { span: String },
    TwistedClosedForm { group: String },
    BurnsideFixed { group: String },
}

impl CheckKind {
    pub fn keyword(&self) -> &'static str {
        match self {
            CheckKind::ScalarAxioms { .. } => "scalar_axioms",
            CheckKind::IsometryValid { .. } => "isometry_valid",
            CheckKind::IsometryRejected { .. } => "isometry_rejected",
            CheckKind::Restricts { .. } => "restricts",
            CheckKind::Intertwines { .. } => "intertwines",
            CheckKind::CosetCount { .. } => "coset_count",
            CheckKind::Transversal { .. } => "transversal",
            CheckKind::SameSpan { .. } => "same_span",
            CheckKind::Inner { .. } => "inner",
            CheckKind::VertexAxioms { .. } => "vertex_axioms",
            CheckKind::Conformal { .. } => "conformal",
            CheckKind::Commuting { .. } => "commuting",
            CheckKind::Affine { .. } => "affine",
            CheckKind::Equal { .. } => "equal",
            CheckKind::AutosEqual { .. } => "autos_equal",
            CheckKind::Identity { .. } => "identity",
            CheckKind::Order { .. } => "order",
            CheckKind::Homomorphism { .. } => "homomorphism",
            CheckKind::GroupOrder { .. } => "group_order",
            CheckKind::SpacesEqual { .. } => "spaces_equal",
            CheckKind::DimsAgree { .. } => "dims_agree",
            CheckKind::DimsExpected { .. } => "dims_expected",
            CheckKind::Nested { .. } => "nested",
            CheckKind::OrbifoldCoset { .. } => "orbifold_coset",
            CheckKind::SquareScalar { .. } => "square_scalar",
            CheckKind::Restriction { .. } => "restriction",
            CheckKind::BasisCharacter { .. } => "basis_character",
            CheckKind::TwistedClosedForm { .. } => "twisted_closed_form",
            CheckKind::BurnsideFixed { .. } => "burnside_fixed",
        }
    }
}

fn ints(xs: &[i64]) -> String {
    let s: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    s.join(" ")
}

fn bracket<T: fmt::Display>(xs: &[T]) -> String {
    let s: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("[{}]", s.join(","))
}

impl fmt::Display for StateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, atom)) in self.0.iter().enumerate() {
            // coefficients are real or purely imaginary by construction
            let (neg, mag) = if c.im.is_zero() {
                (c.re.is_negative(), GaussScalar::real(c.re.abs()))
            } else {
                (c.im.is_negative(), GaussScalar::new(Rational::zero(), c.im.abs()))
            };
            if neg {
                write!(f, "{}", if k == 0 { "-" } else { " - " })?;
            } else if k > 0 {
                write!(f, " + ")?;
            }
            if !mag.is_one() {
                if mag.im.is_zero() {
                    write!(f, "{}*", mag.re)?;
                } else if mag.im.is_one() {
                    write!(f, "i*")?;
                } else {
                    write!(f, "{}*i*", mag.im)?;
                }
            }
            write!(f, "{atom}")?;
        }
        Ok(())
    }
}

impl fmt::Display for StateAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateAtom::Vacuum => write!(f, "vac"),
            StateAtom::Exp(v) => write!(f, "e({v})"),
            StateAtom::Heis(v, -1) => write!(f, "h({v})"),
            StateAtom::Heis(v, n) => write!(f, "h({v}, {n})"),
            StateAtom::Virasoro(s) => write!(f, "virasoro({s})"),
            StateAtom::Sugawara { e, h, f: ff, k } => write!(f, "sugawara({e}, {h}, {ff}, {k})"),
            StateAtom::Transport(iso, s) => write!(f, "transport({iso}, {s})"),
            StateAtom::Apply(a, s) => write!(f, "apply({a}, {s})"),
            StateAtom::Mode(u, n, v) => write!(f, "mode({u}, {n}, {v})"),
            StateAtom::Named(n) => write!(f, "{n}"),
        }
    }
}

impl fmt::Display for SpaceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceExpr::Whole => write!(f, "whole"),
            SpaceExpr::Commutant(s) => write!(f, "commutant({s})"),
            SpaceExpr::CommutantIn(x, s) => write!(f, "commutant_in({x}, {s})"),
            SpaceExpr::Algebra(s) => write!(f, "algebra({s})"),
            SpaceExpr::Charges(s, shift) if shift.is_empty() => write!(f, "charges({s})"),
            SpaceExpr::Charges(s, shift) => write!(f, "charges({s}, {})", bracket(shift)),
            SpaceExpr::Fixed(g) => write!(f, "fixed({g})"),
            SpaceExpr::Orbifold(x, g) => write!(f, "orbifold({x}, {g})"),
            SpaceExpr::Image(a, x) => write!(f, "image({a}, {x})"),
            SpaceExpr::Intersect(a, b) => write!(f, "intersect({a}, {b})"),
            SpaceExpr::Sum(a, b) => write!(f, "sum({a}, {b})"),
            SpaceExpr::Annihilator(xs) => write!(f, "annihilator({})", xs.join(", ")),
            SpaceExpr::Named(n) => write!(f, "{n}"),
        }
    }
}

impl fmt::Display for SeriesExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesExpr::Character(s, None) => write!(f, "character({s})"),
            SeriesExpr::Character(s, Some(shift)) => write!(f, "character({s}, {})", bracket(shift)),
            SeriesExpr::Burnside(g) => write!(f, "burnside({g})"),
            SeriesExpr::Twisted(a) => write!(f, "twisted({a})"),
            SeriesExpr::Dims(x) => write!(f, "dims({x})"),
            SeriesExpr::Sum(a, b) => write!(f, "sum({a}, {b})"),
            SeriesExpr::Product(a, b) => write!(f, "product({a}, {b})"),
            SeriesExpr::Named(n) => write!(f, "{n}"),
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.keyword();
        match self {
            CheckKind::ScalarAxioms { samples, seed } => write!(f, "{k}({samples}, {seed})"),
            CheckKind::IsometryValid { iso, order: None } => write!(f, "{k}({iso})"),
            CheckKind::IsometryValid { iso, order: Some(o) } => write!(f, "{k}({iso}, {o})"),
            CheckKind::IsometryRejected { iso } => write!(f, "{k}({iso})"),
            CheckKind::Restricts { big, small } => write!(f, "{k}({big}, {small})"),
            CheckKind::Intertwines { map, a, b } => write!(f, "{k}({map}, {a}, {b})"),
            CheckKind::CosetCount { lattice, sub, count } => write!(f, "{k}({lattice}, {sub}, {count})"),
            CheckKind::Transversal { lattice, sub, reps } => {
                let r: Vec<String> = reps.iter().map(|x| bracket(x)).collect();
                write!(f, "{k}({lattice}, {sub}, {})", r.join("; "))
            }
            CheckKind::SameSpan { a, b } => write!(f, "{k}({a}, {b})"),
            CheckKind::Inner { lattice, x, y, value } => write!(f, "{k}({lattice}, {x}, {y}, {value})"),
            CheckKind::VertexAxioms { lattice, pairs, seed } => write!(f, "{k}({lattice}, {pairs}, {seed})"),
            CheckKind::Conformal { state, c } => write!(f, "{k}({state}, {c})"),
            CheckKind::Commuting { a, b } => write!(f, "{k}({a}, {b})"),
            CheckKind::Affine { e, h, f: ff, k: lvl } => write!(f, "{k}({e}, {h}, {ff}, {lvl})"),
            CheckKind::Equal { lattice, pairs } => {
                let p: Vec<String> = pairs.iter().map(|(a, b)| format!("{a} = {b}")).collect();
                write!(f, "{k}({lattice}, {})", p.join("; "))
            }
            CheckKind::AutosEqual { lattice, a, b } => write!(f, "{k}({lattice}, {a}, {b})"),
            CheckKind::Identity { lattice, a } => write!(f, "{k}({lattice}, {a})"),
            CheckKind::Order { lattice, a, order } => write!(f, "{k}({lattice}, {a}, {order})"),
            CheckKind::Homomorphism { auto, samples, seed } => write!(f, "{k}({auto}, {samples}, {seed})"),
            CheckKind::GroupOrder { group, order } => write!(f, "{k}({group}, {order})"),
            CheckKind::SpacesEqual { a, b } => write!(f, "{k}({a}, {b})"),
            CheckKind::DimsAgree { items } => write!(f, "{k}({})", items.join(", ")),
            CheckKind::DimsExpected { item, dims } => write!(f, "{k}({item}, {})", bracket(dims)),
            CheckKind::Nested { e1, e2 } => write!(f, "{k}({e1}, {e2})"),
            CheckKind::OrbifoldCoset { e, group } => write!(f, "{k}({e}, {group})"),
            CheckKind::SquareScalar { auto, space, c } => write!(f, "{k}({auto}, {space}, {c})"),
            CheckKind::Restriction { auto, iso, image, space } => write!(f, "{k}({auto}, {iso}, {image}, {space})"),
            CheckKind::BasisCharacter { span } => write!(f, "{k}({span})"),
            CheckKind::TwistedClosedForm { group } => write!(f, "{k}({group})"),
            CheckKind::BurnsideFixed { group } => write!(f, "{k}({group})"),
        }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Lattice { name, gram } => {
                write!(f, "lattice {name} rank {}", gram.len())?;
                for row in gram {
                    write!(f, "\n{}", ints(row))?;
                }
                Ok(())
            }
            Item::Sublattice { name, parent, generators } => {
                write!(f, "sublattice {name} of {parent}")?;
                for row in generators {
                    write!(f, "\n{}", ints(row))?;
                }
                Ok(())
            }
            Item::Vector { lattice, name, coords } => {
                let c: Vec<String> = coords.iter().map(|x| x.to_string()).collect();
                write!(f, "vector {lattice} {name} = {}", c.join(" "))
            }
            Item::Isometry { name, source, target, rows } => {
                write!(f, "isometry {name} from {source} to {target}")?;
                for (x, y) in rows {
                    write!(f, "\n{} -> {}", ints(x), ints(y))?;
                }
                Ok(())
            }
            Item::State { lattice, name, expr } => write!(f, "state {lattice} {name} = {expr}"),
            Item::Auto { lattice, name, expr } => write!(f, "auto {lattice} {name} = {expr}"),
            Item::Group { lattice, name, generators } => write!(f, "group {lattice} {name} = {}", generators.join(", ")),
            Item::Space { lattice, name, expr } => write!(f, "space {lattice} {name} = {expr}"),
            Item::Series { name, expr } => write!(f, "series {name} = {expr}"),
            Item::Check { name, optional, kind } => {
                write!(f, "check{} {name} = {kind}", if *optional { "?" } else { "" })
            }
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            writeln!(f, "{item}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kind {
    Lattice,
    Sublattice,
    Isometry,
    State,
    Auto,
    Group,
    Space,
    Series,
    Check,
}

impl Scenario {
    /// Hex SHA-256 of the canonical printed form.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_string().as_bytes()))
    }

    pub fn checks(&self) -> impl Iterator<Item = (&str, bool, &CheckKind)> {
        self.items.iter().filter_map(|it| match it {
            Item::Check { name, optional, kind } => Some((name.as_str(), *optional, kind)),
            _ => None,
        })
    }

    /// Checks that every name is defined before use, with the right kind,
    /// and that no name is defined twice.
    pub fn validate(&self) -> Result<()> {
        let mut names: HashMap<String, (Kind, Option<String>)> = HashMap::new();
        let mut vectors: HashSet<(String, String)> = HashSet::new();
        for item in &self.items {
            let mut v = Validator { names: &names, vectors: &vectors, lattice: None };
            let (name, kind, lat) = match item {
                Item::Lattice { name, .. } => (name, Kind::Lattice, None),
                Item::Sublattice { name, parent, .. } => {
                    v.want(parent, &[Kind::Lattice])?;
                    (name, Kind::Sublattice, Some(parent.clone()))
                }
                Item::Vector { lattice, name, .. } => {
                    v.want(lattice, &[Kind::Lattice])?;
                    if !vectors.insert((lattice.clone(), name.clone())) {
                        return Err(dup(name));
                    }
                    continue;
                }
                Item::Isometry { name, source, target, .. } => {
                    v.want(source, &[Kind::Lattice, Kind::Sublattice])?;
                    v.want(target, &[Kind::Lattice, Kind::Sublattice])?;
                    (name, Kind::Isometry, None)
                }
                Item::State { lattice, name, expr } => {
                    v.lattice(lattice)?;
                    v.state(expr)?;
                    (name, Kind::State, Some(lattice.clone()))
                }
                Item::Auto { lattice, name, expr } => {
                    v.lattice(lattice)?;
                    v.dsl(expr)?;
                    (name, Kind::Auto, Some(lattice.clone()))
                }
                Item::Group { lattice, name, generators } => {
                    v.lattice(lattice)?;
                    for g in generators {
                        v.on_lattice(g, Kind::Auto)?;
                    }
                    (name, Kind::Group, Some(lattice.clone()))
                }
                Item::Space { lattice, name, expr } => {
                    v.lattice(lattice)?;
                    v.space(expr)?;
                    (name, Kind::Space, Some(lattice.clone()))
                }
                Item::Series { name, expr } => {
                    v.series(expr)?;
                    (name, Kind::Series, None)
                }
                Item::Check { name, kind, .. } => {
                    v.check(kind)?;
                    (name, Kind::Check, None)
                }
            };
            if names.insert(name.clone(), (kind, lat)).is_some() {
                return Err(dup(name));
            }
        }
        Ok(())
    }
}

fn dup(name: &str) -> VoaError {
    VoaError::Parse(format!("`{name}` is defined twice"))
}

struct Validator<'a> {
    names: &'a HashMap<String, (Kind, Option<String>)>,
    vectors: &'a HashSet<(String, String)>,
    lattice: Option<String>,
}

impl Validator<'_> {
    fn want(&self, name: &str, kinds: &[Kind]) -> Result<()> {
        match self.names.get(name) {
            Some((k, _)) if kinds.contains(k) => Ok(()),
            Some((k, _)) => Err(VoaError::Parse(format!("`{name}` is a {k:?}, expected one of {kinds:?}"))),
            None => Err(VoaError::UnknownName(name.to_string())),
        }
    }

    fn lattice(&mut self, name: &str) -> Result<()> {
        self.want(name, &[Kind::Lattice])?;
        self.lattice = Some(name.to_string());
        Ok(())
    }

    /// A name of the given kind living on the current lattice.
    fn on_lattice(&self, name: &str, kind: Kind) -> Result<()> {
        self.want(name, &[kind])?;
        let here = self.names.get(name).and_then(|(_, l)| l.clone());
        if here.is_some() && here != self.lattice {
            return Err(VoaError::Parse(format!(
                "`{name}` lives on {}, not on {}",
                here.unwrap_or_default(),
                self.lattice.clone().unwrap_or_default()
            )));
        }
        Ok(())
    }

    fn span(&self, name: &str) -> Result<()> {
        self.want(name, &[Kind::Lattice, Kind::Sublattice])?;
        let (kind, parent) = &self.names[name];
        let amb = if *kind == Kind::Lattice { Some(name.to_string()) } else { parent.clone() };
        if self.lattice.is_some() && amb != self.lattice {
            return Err(VoaError::Parse(format!("`{name}` is not inside {}", self.lattice.clone().unwrap_or_default())));
        }
        Ok(())
    }

    fn vec(&self, v: &VecLit) -> Result<()> {
        if let VecLit::Combo(terms) = v {
            let lat = self.lattice.clone().unwrap_or_default();
            for (_, n) in terms {
                if !self.vectors.contains(&(lat.clone(), n.clone())) {
                    return Err(VoaError::UnknownName(format!("vector {n} on {lat}")));
                }
            }
        }
        Ok(())
    }

    fn dsl(&self, e: &DslExpr) -> Result<()> {
        match e {
            DslExpr::Lift(n) => self.want(n, &[Kind::Isometry]),
            DslExpr::Inner(v) => self.vec(v),
            DslExpr::Sigma(_) | DslExpr::Theta | DslExpr::Perm(_) => Ok(()),
            DslExpr::Inv(x) => self.dsl(x),
            DslExpr::Compose(xs) => xs.iter().try_for_each(|x| self.dsl(x)),
            DslExpr::Named(n) => self.on_lattice(n, Kind::Auto),
        }
    }

    fn state(&self, e: &StateExpr) -> Result<()> {
        for (_, atom) in &e.0 {
            match atom {
                StateAtom::Vacuum => {}
                StateAtom::Exp(v) | StateAtom::Heis(v, _) => self.vec(v)?,
                StateAtom::Virasoro(s) => self.span(s)?,
                StateAtom::Sugawara { e, h, f, .. } => {
                    for x in [e, h, f] {
                        self.on_lattice(x, Kind::State)?;
                    }
                }
                StateAtom::Transport(iso, inner) => {
                    self.want(iso, &[Kind::Isometry])?;
                    // the inner state lives on the isometry's source lattice
                    let v = Validator { names: self.names, vectors: self.vectors, lattice: None };
                    v.state(inner)?;
                }
                StateAtom::Apply(a, s) => {
                    self.dsl(a)?;
                    self.state(s)?;
                }
                StateAtom::Mode(u, _, v) => {
                    self.state(u)?;
                    self.state(v)?;
                }
                StateAtom::Named(n) => {
                    if self.lattice.is_some() {
                        self.on_lattice(n, Kind::State)?
                    } else {
                        self.want(n, &[Kind::State])?
                    }
                }
            }
        }
        Ok(())
    }

    fn space(&self, e: &SpaceExpr) -> Result<()> {
        match e {
            SpaceExpr::Whole => Ok(()),
            SpaceExpr::Commutant(s) => self.on_lattice(s, Kind::State),
            SpaceExpr::CommutantIn(x, s) => {
                self.space(x)?;
                self.on_lattice(s, Kind::State)
            }
            SpaceExpr::Algebra(s) | SpaceExpr::Charges(s, _) => self.span(s),
            SpaceExpr::Fixed(g) => self.on_lattice(g, Kind::Group),
            SpaceExpr::Orbifold(x, g) => {
                self.space(x)?;
                self.on_lattice(g, Kind::Group)
            }
            SpaceExpr::Image(a, x) => {
                self.dsl(a)?;
                self.space(x)
            }
            SpaceExpr::Intersect(a, b) | SpaceExpr::Sum(a, b) => {
                self.space(a)?;
                self.space(b)
            }
            SpaceExpr::Annihilator(xs) => xs.iter().try_for_each(|x| self.on_lattice(x, Kind::State)),
            SpaceExpr::Named(n) => self.on_lattice(n, Kind::Space),
        }
    }

    fn series(&self, e: &SeriesExpr) -> Result<()> {
        match e {
            SeriesExpr::Character(s, _) => self.want(s, &[Kind::Lattice, Kind::Sublattice]),
            SeriesExpr::Burnside(g) => self.want(g, &[Kind::Group]),
            SeriesExpr::Twisted(a) => self.want(a, &[Kind::Auto]),
            SeriesExpr::Dims(x) => self.want(x, &[Kind::Space]),
            SeriesExpr::Sum(a, b) | SeriesExpr::Product(a, b) => {
                self.series(a)?;
                self.series(b)
            }
            SeriesExpr::Named(n) => self.want(n, &[Kind::Series]),
        }
    }

    fn check(&mut self, c: &CheckKind) -> Result<()> {
        use CheckKind as C;
        match c {
            C::ScalarAxioms { .. } => Ok(()),
            C::IsometryValid { iso, .. } | C::IsometryRejected { iso } => self.want(iso, &[Kind::Isometry]),
            C::Restricts { big, small } => {
                self.want(big, &[Kind::Isometry])?;
                self.want(small, &[Kind::Isometry])
            }
            C::Intertwines { map, a, b } => [map, a, b].iter().try_for_each(|x| self.want(x, &[Kind::Isometry])),
            C::CosetCount { lattice, sub, .. } | C::Transversal { lattice, sub, .. } => {
                self.lattice(lattice)?;
                self.want(sub, &[Kind::Sublattice])
            }
            C::SameSpan { a, b } => {
                self.want(a, &[Kind::Sublattice])?;
                self.want(b, &[Kind::Sublattice])
            }
            C::Inner { lattice, x, y, .. } => {
                self.lattice(lattice)?;
                self.vec(x)?;
                self.vec(y)
            }
            C::VertexAxioms { lattice, .. } => self.lattice(lattice),
            C::Conformal { state, .. } => self.want(state, &[Kind::State]),
            C::Commuting { a, b } | C::Nested { e1: a, e2: b } => {
                self.want(a, &[Kind::State])?;
                self.want(b, &[Kind::State])
            }
            C::Affine { e, h, f, .. } => [e, h, f].iter().try_for_each(|x| self.want(x, &[Kind::State])),
            C::Equal { lattice, pairs } => {
                self.lattice(lattice)?;
                pairs.iter().try_for_each(|(a, b)| {
                    self.state(a)?;
                    self.state(b)
                })
            }
            C::AutosEqual { lattice, a, b } => {
                self.lattice(lattice)?;
                self.dsl(a)?;
                self.dsl(b)
            }
            C::Identity { lattice, a } | C::Order { lattice, a, .. } => {
                self.lattice(lattice)?;
                self.dsl(a)
            }
            C::Homomorphism { auto, .. } => self.want(auto, &[Kind::Auto]),
            C::GroupOrder { group, .. } => self.want(group, &[Kind::Group]),
            C::SpacesEqual { a, b } => {
                self.want(a, &[Kind::Space])?;
                self.want(b, &[Kind::Space])
            }
            C::DimsAgree { items } => items.iter().try_for_each(|x| self.want(x, &[Kind::Space, Kind::Series])),
            C::DimsExpected { item, .. } => self.want(item, &[Kind::Space, Kind::Series]),
            C::OrbifoldCoset { e, group } => {
                self.want(e, &[Kind::State])?;
                self.want(group, &[Kind::Group])
            }
            C::SquareScalar { auto, space, .. } => {
                self.want(auto, &[Kind::Auto])?;
                self.want(space, &[Kind::Space])
            }
            C::Restriction { auto, iso, image, space } => {
                self.want(auto, &[Kind::Auto])?;
                self.want(iso, &[Kind::Isometry])?;
                self.want(image, &[Kind::Auto])?;
                self.want(space, &[Kind::Space])
            }
            C::BasisCharacter { span } => self.want(span, &[Kind::Lattice, Kind::Sublattice]),
            C::TwistedClosedForm { group } | C::BurnsideFixed { group } => self.want(group, &[Kind::Group]),
        }
    }
}
