use super::ast::*;
use crate::autos::{is_name, parse_dsl, parse_vec_lit};
use crate::error::{Result, VoaError};
use crate::lattice::{parse_rational_row, read_int_rows};
use crate::scalar::{parse_rational, GaussScalar};

fn perr(ln: usize, msg: impl std::fmt::Display) -> VoaError {
    VoaError::Parse(format!("line {ln}: {msg}"))
}

/// Parses and validates a scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut items = Vec::new();
    let mut k = 0;
    while k < lines.len() {
        let (ln, line) = lines[k];
        k += 1;
        let words: Vec<&str> = line.split_whitespace().collect();
        let item = match words.as_slice() {
            ["lattice", name, "rank", d] => {
                let d: usize = d.parse().map_err(|_| perr(ln, format!("bad rank `{d}`")))?;
                let gram = read_int_rows(&lines, k, Some(d)).map_err(|e| perr(ln, e))?;
                k += d;
                Item::Lattice { name: name_ok(ln, name)?, gram }
            }
            ["sublattice", name, "of", parent] => {
                let generators = read_int_rows(&lines, k, None).map_err(|e| perr(ln, e))?;
                if generators.is_empty() {
                    return Err(perr(ln, "sublattice without generators"));
                }
                k += generators.len();
                Item::Sublattice { name: name_ok(ln, name)?, parent: parent.to_string(), generators }
            }
            ["isometry", name, "from", source, "to", target] => {
                let mut rows = Vec::new();
                while k < lines.len() && lines[k].1.contains("->") {
                    let (rl, row) = lines[k];
                    let (a, b) = row.split_once("->").expect("contains ->");
                    rows.push((int_row(rl, a)?, int_row(rl, b)?));
                    k += 1;
                }
                if rows.is_empty() {
                    return Err(perr(ln, "isometry without `x -> y` rows"));
                }
                Item::Isometry { name: name_ok(ln, name)?, source: source.to_string(), target: target.to_string(), rows }
            }
            _ => parse_assignment(ln, line)?,
        };
        items.push(item);
    }
    let sc = Scenario { items };
    sc.validate()?;
    Ok(sc)
}

fn name_ok(ln: usize, s: &str) -> Result<String> {
    if is_name(s) {
        Ok(s.to_string())
    } else {
        Err(perr(ln, format!("`{s}` is not a valid name")))
    }
}

fn int_row(ln: usize, s: &str) -> Result<Vec<i64>> {
    s.split_whitespace()
        .map(|t| t.parse::<i64>().map_err(|_| perr(ln, format!("bad integer `{t}`"))))
        .collect()
}

/// `keyword [lattice] name = rest` lines.
fn parse_assignment(ln: usize, line: &str) -> Result<Item> {
    let (head, rest) = line.split_once('=').ok_or_else(|| perr(ln, format!("unexpected `{line}`")))?;
    let rest = rest.trim();
    let words: Vec<&str> = head.split_whitespace().collect();
    let ctx = |e: VoaError| perr(ln, e);
    Ok(match words.as_slice() {
        ["vector", lattice, name] => Item::Vector {
            lattice: lattice.to_string(),
            name: name_ok(ln, name)?,
            coords: parse_rational_row(rest).map_err(ctx)?,
        },
        ["state", lattice, name] => {
            Item::State { lattice: lattice.to_string(), name: name_ok(ln, name)?, expr: parse_state(rest).map_err(ctx)? }
        }
        ["auto", lattice, name] => {
            Item::Auto { lattice: lattice.to_string(), name: name_ok(ln, name)?, expr: parse_dsl(rest).map_err(ctx)? }
        }
        ["group", lattice, name] => {
            let generators: Vec<String> =
                split_top(rest, ',').into_iter().filter(|s| !s.is_empty()).map(|s| name_ok(ln, s)).collect::<Result<_>>()?;
            Item::Group { lattice: lattice.to_string(), name: name_ok(ln, name)?, generators }
        }
        ["space", lattice, name] => {
            Item::Space { lattice: lattice.to_string(), name: name_ok(ln, name)?, expr: parse_space(rest).map_err(ctx)? }
        }
        ["series", name] => Item::Series { name: name_ok(ln, name)?, expr: parse_series(rest).map_err(ctx)? },
        ["check", name] => Item::Check { name: name_ok(ln, name)?, optional: false, kind: parse_check(rest).map_err(ctx)? },
        ["check?", name] => Item::Check { name: name_ok(ln, name)?, optional: true, kind: parse_check(rest).map_err(ctx)? },
        _ => return Err(perr(ln, format!("unexpected `{line}`"))),
    })
}

fn err(msg: impl Into<String>) -> VoaError {
    VoaError::Parse(msg.into())
}

/// Splits at `sep` outside parentheses and brackets; pieces are trimmed.
pub(crate) fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ if c == sep && depth == 0 => {
                out.push(s[start..i].trim());
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

/// `name(args)` with the closing parenthesis at the very end.
fn call(s: &str) -> Option<(&str, Vec<&str>)> {
    let s = s.trim();
    let open = s.find('(')?;
    if !s.ends_with(')') {
        return None;
    }
    let name = s[..open].trim();
    let inner = &s[open + 1..s.len() - 1];
    let mut depth = 0i32;
    for c in inner.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return None;
        }
    }
    if depth != 0 || !is_name(name) {
        return None;
    }
    let args = if inner.trim().is_empty() { Vec::new() } else { split_top(inner, ',') };
    Some((name, args))
}

fn arity<'a>(name: &str, args: &'a [&'a str], n: usize) -> Result<&'a [&'a str]> {
    if args.len() != n {
        return Err(err(format!("{name} takes {n} arguments, found {}", args.len())));
    }
    Ok(args)
}

fn word(s: &str) -> Result<String> {
    if is_name(s) {
        Ok(s.to_string())
    } else {
        Err(err(format!("`{s}` is not a valid name")))
    }
}

fn int<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| err(format!("bad integer `{s}`")))
}

fn bracket_list<T>(s: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(|| err(format!("expected `[...]`, found `{s}`")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|t| f(t.trim())).collect()
}

pub fn parse_state(s: &str) -> Result<StateExpr> {
    let s = s.trim();
    if s == "0" {
        return Ok(StateExpr(Vec::new()));
    }
    // split into signed terms at top-level + and -
    let mut terms: Vec<(bool, &str)> = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut neg = false;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            '+' | '-' if depth == 0 => {
                let piece = s[start..i].trim();
                if !piece.is_empty() {
                    terms.push((neg, piece));
                } else if i > 0 && !s[..i].trim().is_empty() {
                    return Err(err(format!("dangling sign in `{s}`")));
                }
                neg = c == '-';
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = s[start..].trim();
    if last.is_empty() {
        return Err(err(format!("empty term in `{s}`")));
    }
    terms.push((neg, last));
    let mut out = Vec::new();
    for (neg, t) in terms {
        let factors = split_top(t, '*');
        let (atom, coefs) = factors.split_last().expect("nonempty");
        let mut c = if neg { -GaussScalar::one() } else { GaussScalar::one() };
        for f in coefs {
            let x = if *f == "i" { GaussScalar::i() } else { GaussScalar::real(parse_rational(f)?) };
            c = &c * &x;
        }
        if *atom == "i" {
            return Err(err("`i` needs a state to multiply"));
        }
        out.push((c, parse_atom(atom)?));
    }
    Ok(StateExpr(out))
}

fn parse_atom(s: &str) -> Result<StateAtom> {
    if s == "vac" {
        return Ok(StateAtom::Vacuum);
    }
    let Some((name, args)) = call(s) else {
        return Ok(StateAtom::Named(word(s)?));
    };
    Ok(match name {
        "e" => StateAtom::Exp(parse_vec_lit(arity(name, &args, 1)?[0])?),
        "h" => match args.len() {
            1 => StateAtom::Heis(parse_vec_lit(args[0])?, -1),
            2 => StateAtom::Heis(parse_vec_lit(args[0])?, int(args[1])?),
            _ => return Err(err("h takes a vector and an optional mode index")),
        },
        "virasoro" => StateAtom::Virasoro(word(arity(name, &args, 1)?[0])?),
        "sugawara" => {
            let a = arity(name, &args, 4)?;
            StateAtom::Sugawara { e: word(a[0])?, h: word(a[1])?, f: word(a[2])?, k: int(a[3])? }
        }
        "transport" => {
            let a = arity(name, &args, 2)?;
            StateAtom::Transport(word(a[0])?, Box::new(parse_state(a[1])?))
        }
        "apply" => {
            let a = arity(name, &args, 2)?;
            StateAtom::Apply(parse_dsl(a[0])?, Box::new(parse_state(a[1])?))
        }
        "mode" => {
            let a = arity(name, &args, 3)?;
            StateAtom::Mode(Box::new(parse_state(a[0])?), int(a[1])?, Box::new(parse_state(a[2])?))
        }
        other => return Err(err(format!("unknown state function `{other}`"))),
    })
}

pub fn parse_space(s: &str) -> Result<SpaceExpr> {
    let s = s.trim();
    if s == "whole" {
        return Ok(SpaceExpr::Whole);
    }
    let Some((name, args)) = call(s) else {
        return Ok(SpaceExpr::Named(word(s)?));
    };
    let b = |x: &str| parse_space(x).map(Box::new);
    Ok(match name {
        "commutant" => SpaceExpr::Commutant(word(arity(name, &args, 1)?[0])?),
        "commutant_in" => {
            let a = arity(name, &args, 2)?;
            SpaceExpr::CommutantIn(b(a[0])?, word(a[1])?)
        }
        "algebra" => SpaceExpr::Algebra(word(arity(name, &args, 1)?[0])?),
        "charges" => match args.len() {
            1 => SpaceExpr::Charges(word(args[0])?, Vec::new()),
            2 => SpaceExpr::Charges(word(args[0])?, bracket_list(args[1], int)?),
            _ => return Err(err("charges takes a lattice and an optional shift")),
        },
        "fixed" => SpaceExpr::Fixed(word(arity(name, &args, 1)?[0])?),
        "orbifold" => {
            let a = arity(name, &args, 2)?;
            SpaceExpr::Orbifold(b(a[0])?, word(a[1])?)
        }
        "image" => {
            let a = arity(name, &args, 2)?;
            SpaceExpr::Image(parse_dsl(a[0])?, b(a[1])?)
        }
        "intersect" => {
            let a = arity(name, &args, 2)?;
            SpaceExpr::Intersect(b(a[0])?, b(a[1])?)
        }
        "sum" => {
            let a = arity(name, &args, 2)?;
            SpaceExpr::Sum(b(a[0])?, b(a[1])?)
        }
        "annihilator" => SpaceExpr::Annihilator(args.iter().map(|x| word(x)).collect::<Result<_>>()?),
        other => return Err(err(format!("unknown space function `{other}`"))),
    })
}

pub fn parse_series(s: &str) -> Result<SeriesExpr> {
    let s = s.trim();
    let Some((name, args)) = call(s) else {
        return Ok(SeriesExpr::Named(word(s)?));
    };
    let b = |x: &str| parse_series(x).map(Box::new);
    Ok(match name {
        "character" => match args.len() {
            1 => SeriesExpr::Character(word(args[0])?, None),
            2 => SeriesExpr::Character(word(args[0])?, Some(bracket_list(args[1], parse_rational)?)),
            _ => return Err(err("character takes a lattice and an optional shift")),
        },
        "burnside" => SeriesExpr::Burnside(word(arity(name, &args, 1)?[0])?),
        "twisted" => SeriesExpr::Twisted(word(arity(name, &args, 1)?[0])?),
        "dims" => SeriesExpr::Dims(word(arity(name, &args, 1)?[0])?),
        "sum" => {
            let a = arity(name, &args, 2)?;
            SeriesExpr::Sum(b(a[0])?, b(a[1])?)
        }
        "product" => {
            let a = arity(name, &args, 2)?;
            SeriesExpr::Product(b(a[0])?, b(a[1])?)
        }
        other => return Err(err(format!("unknown series function `{other}`"))),
    })
}

pub fn parse_check(s: &str) -> Result<CheckKind> {
    let (name, args) = call(s).ok_or_else(|| err(format!("expected `kind(args)`, found `{s}`")))?;
    let a = args.as_slice();
    let w = |i: usize| word(a[i]);
    use CheckKind as C;
    Ok(match name {
        "scalar_axioms" => {
            arity(name, a, 2)?;
            C::ScalarAxioms { samples: int(a[0])?, seed: int(a[1])? }
        }
        "isometry_valid" => match a.len() {
            1 => C::IsometryValid { iso: w(0)?, order: None },
            2 => C::IsometryValid { iso: w(0)?, order: Some(int(a[1])?) },
            _ => return Err(err("isometry_valid takes an isometry and an optional order")),
        },
        "isometry_rejected" => {
            arity(name, a, 1)?;
            C::IsometryRejected { iso: w(0)? }
        }
        "restricts" => {
            arity(name, a, 2)?;
            C::Restricts { big: w(0)?, small: w(1)? }
        }
        "intertwines" => {
            arity(name, a, 3)?;
            C::Intertwines { map: w(0)?, a: w(1)?, b: w(2)? }
        }
        "coset_count" => {
            arity(name, a, 3)?;
            C::CosetCount { lattice: w(0)?, sub: w(1)?, count: int(a[2])? }
        }
        "transversal" => {
            arity(name, a, 3)?;
            let reps = split_top(a[2], ';').into_iter().map(|r| bracket_list(r, int)).collect::<Result<_>>()?;
            C::Transversal { lattice: w(0)?, sub: w(1)?, reps }
        }
        "same_span" => {
            arity(name, a, 2)?;
            C::SameSpan { a: w(0)?, b: w(1)? }
        }
        "inner" => {
            arity(name, a, 4)?;
            C::Inner { lattice: w(0)?, x: parse_vec_lit(a[1])?, y: parse_vec_lit(a[2])?, value: parse_rational(a[3])? }
        }
        "vertex_axioms" => {
            arity(name, a, 3)?;
            C::VertexAxioms { lattice: w(0)?, pairs: int(a[1])?, seed: int(a[2])? }
        }
        "conformal" => {
            arity(name, a, 2)?;
            C::Conformal { state: w(0)?, c: parse_rational(a[1])? }
        }
        "commuting" => {
            arity(name, a, 2)?;
            C::Commuting { a: w(0)?, b: w(1)? }
        }
        "affine" => {
            arity(name, a, 4)?;
            C::Affine { e: w(0)?, h: w(1)?, f: w(2)?, k: int(a[3])? }
        }
        "equal" => {
            arity(name, a, 2)?;
            let pairs = split_top(a[1], ';')
                .into_iter()
                .map(|p| {
                    let sides = split_top(p, '=');
                    if sides.len() != 2 {
                        return Err(err(format!("expected `lhs = rhs`, found `{p}`")));
                    }
                    Ok((parse_state(sides[0])?, parse_state(sides[1])?))
                })
                .collect::<Result<_>>()?;
            C::Equal { lattice: w(0)?, pairs }
        }
        "autos_equal" => {
            arity(name, a, 3)?;
            C::AutosEqual { lattice: w(0)?, a: parse_dsl(a[1])?, b: parse_dsl(a[2])? }
        }
        "identity" => {
            arity(name, a, 2)?;
            C::Identity { lattice: w(0)?, a: parse_dsl(a[1])? }
        }
        "order" => {
            arity(name, a, 3)?;
            C::Order { lattice: w(0)?, a: parse_dsl(a[1])?, order: int(a[2])? }
        }
        "homomorphism" => {
            arity(name, a, 3)?;
            C::Homomorphism { auto: w(0)?, samples: int(a[1])?, seed: int(a[2])? }
        }
        "group_order" => {
            arity(name, a, 2)?;
            C::GroupOrder { group: w(0)?, order: int(a[1])? }
        }
        "spaces_equal" => {
            arity(name, a, 2)?;
            C::SpacesEqual { a: w(0)?, b: w(1)? }
        }
        "dims_agree" => {
            if a.len() < 2 {
                return Err(err("dims_agree needs at least two items"));
            }
            C::DimsAgree { items: a.iter().map(|x| word(x)).collect::<Result<_>>()? }
        }
        "dims_expected" => {
            arity(name, a, 2)?;
            C::DimsExpected { item: w(0)?, dims: bracket_list(a[1], int)? }
        }
        "nested" => {
            arity(name, a, 2)?;
            C::Nested { e1: w(0)?, e2: w(1)? }
        }
        "orbifold_coset" => {
            arity(name, a, 2)?;
            C::OrbifoldCoset { e: w(0)?, group: w(1)? }
        }
        "square_scalar" => {
            arity(name, a, 3)?;
            C::SquareScalar { auto: w(0)?, space: w(1)?, c: a[2].parse()? }
        }
        "restriction" => {
            arity(name, a, 4)?;
            C::Restriction { auto: w(0)?, iso: w(1)?, image: w(2)?, space: w(3)? }
        }
        "basis_character" => {
            arity(name, a, 1)?;
            C::BasisCharacter { span: w(0)? }
        }
        "twisted_closed_form" => {
            arity(name, a, 1)?;
            C::TwistedClosedForm { group: w(0)? }
        }
        "burnside_fixed" => {
            arity(name, a, 1)?;
            C::BurnsideFixed { group: w(0)? }
        }
        other => return Err(err(format!("unknown check `{other}`"))),
    })
}
