//! Text syntax for automorphism expressions.
//!
//! ```text
//! expr := term ('*' term)*
//! term := 'lift' '(' name ')' | 'inner' '(' vec ')' | 'sigma' '(' int ')'
//!       | 'theta' | 'perm' '(' int (',' int)* ')' | 'inv' '(' expr ')' | name
//! vec  := '[' rational (',' rational)* ']' | ['-'] coef (('+'|'-') coef)*
//! coef := rational '*' name | name
//! ```
//!
//! Whitespace is ignored; `a*b` means `a ∘ b`. A bare name refers to an
//! automorphism defined elsewhere.

use std::fmt;

use num_traits::{One, Signed};

use crate::error::{Result, VoaError};
use crate::scalar::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VecLit {
    Coords(Vec<Rational>),
    Combo(Vec<(Rational, String)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DslExpr {
    Lift(String),
    Inner(VecLit),
    Sigma(usize),
    Theta,
    Perm(Vec<usize>),
    Inv(Box<DslExpr>),
    Compose(Vec<DslExpr>),
    Named(String),
}

impl fmt::Display for VecLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VecLit::Coords(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", parts.join(","))
            }
            VecLit::Combo(terms) => {
                for (k, (r, name)) in terms.iter().enumerate() {
                    if k > 0 {
                        write!(f, "{}", if r.is_negative() { "-" } else { "+" })?;
                        write!(f, "{}*{name}", r.abs())?;
                    } else {
                        write!(f, "{r}*{name}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for DslExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DslExpr::Lift(n) => write!(f, "lift({n})"),
            DslExpr::Inner(v) => write!(f, "inner({v})"),
            DslExpr::Sigma(k) => write!(f, "sigma({k})"),
            DslExpr::Theta => write!(f, "theta"),
            DslExpr::Perm(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "perm({})", parts.join(","))
            }
            DslExpr::Inv(x) => write!(f, "inv({x})"),
            DslExpr::Compose(parts) => {
                let s: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "{}", s.join("*"))
            }
            DslExpr::Named(n) => write!(f, "{n}"),
        }
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

fn err(msg: impl Into<String>) -> VoaError {
    VoaError::Parse(msg.into())
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '^'
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(err(format!("expected '{c}' at position {}", self.pos)))
        }
    }

    fn name(&mut self) -> Result<String> {
        let start = self.pos;
        while self.peek().is_some_and(is_name_char) {
            self.pos += 1;
        }
        if start == self.pos || self.chars[start].is_ascii_digit() {
            return Err(err(format!("expected a name at position {start}")));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn number_text(&mut self) -> String {
        let start = self.pos;
        if self.peek() == Some('-') {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '/') {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn rational(&mut self) -> Result<Rational> {
        let t = self.number_text();
        parse_rational(&t)
    }

    fn uint(&mut self) -> Result<usize> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let t: String = self.chars[start..self.pos].iter().collect();
        t.parse().map_err(|_| err(format!("expected an integer at position {start}")))
    }

    fn expr(&mut self) -> Result<DslExpr> {
        let mut parts = vec![self.term()?];
        while self.eat('*') {
            parts.push(self.term()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { DslExpr::Compose(parts) })
    }

    fn term(&mut self) -> Result<DslExpr> {
        let name = self.name()?;
        let has_args = self.peek() == Some('(');
        let out = match (name.as_str(), has_args) {
            ("theta", false) => DslExpr::Theta,
            ("lift", true) => {
                self.expect('(')?;
                let n = self.name()?;
                self.expect(')')?;
                DslExpr::Lift(n)
            }
            ("inner", true) => {
                self.expect('(')?;
                let v = self.vec()?;
                self.expect(')')?;
                DslExpr::Inner(v)
            }
            ("sigma", true) => {
                self.expect('(')?;
                let k = self.uint()?;
                self.expect(')')?;
                DslExpr::Sigma(k)
            }
            ("perm", true) => {
                self.expect('(')?;
                let mut c = vec![self.uint()?];
                while self.eat(',') {
                    c.push(self.uint()?);
                }
                self.expect(')')?;
                DslExpr::Perm(c)
            }
            ("inv", true) => {
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                DslExpr::Inv(Box::new(e))
            }
            (other, false) => DslExpr::Named(other.to_string()),
            (other, true) => return Err(err(format!("unknown function '{other}'"))),
        };
        Ok(out)
    }

    fn vec(&mut self) -> Result<VecLit> {
        if self.eat('[') {
            let mut c = vec![self.rational()?];
            while self.eat(',') {
                c.push(self.rational()?);
            }
            self.expect(']')?;
            return Ok(VecLit::Coords(c));
        }
        let mut terms = Vec::new();
        let mut sign = Rational::one();
        if self.eat('-') {
            sign = -sign;
        }
        loop {
            let coef = if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                let r = self.rational()?;
                self.expect('*')?;
                r
            } else {
                Rational::one()
            };
            let name = self.name()?;
            terms.push((sign * coef, name));
            if self.eat('+') {
                sign = Rational::one();
            } else if self.eat('-') {
                sign = -Rational::one();
            } else {
                break;
            }
        }
        Ok(VecLit::Combo(terms))
    }
}

/// Parses a vector literal: `[r,...]` or a combination of named vectors.
pub fn parse_vec_lit(src: &str) -> Result<VecLit> {
    let chars: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = Parser { chars, pos: 0 };
    let v = p.vec()?;
    if p.pos != p.chars.len() {
        return Err(err(format!("unexpected input at position {} in vector `{src}`", p.pos)));
    }
    Ok(v)
}

pub(crate) fn is_name(s: &str) -> bool {
    !s.is_empty() && !s.starts_with(|c: char| c.is_ascii_digit()) && s.chars().all(is_name_char)
}

pub fn parse_dsl(src: &str) -> Result<DslExpr> {
    let chars: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = Parser { chars, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(err(format!("unexpected input at position {}", p.pos)));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn parses_grammar() {
        let e = parse_dsl("sigma(1) * theta * sigma(1)").unwrap();
        assert_eq!(e, DslExpr::Compose(vec![DslExpr::Sigma(1), DslExpr::Theta, DslExpr::Sigma(1)]));
        let e = parse_dsl("inner(1/4*a)").unwrap();
        assert_eq!(e, DslExpr::Inner(VecLit::Combo(vec![(rat(1, 4), "a".into())])));
        let e = parse_dsl("inv(lift(t13)*perm(1,2,3))*rho").unwrap();
        assert_eq!(
            e,
            DslExpr::Compose(vec![
                DslExpr::Inv(Box::new(DslExpr::Compose(vec![DslExpr::Lift("t13".into()), DslExpr::Perm(vec![1, 2, 3])]))),
                DslExpr::Named("rho".into())
            ])
        );
        let e = parse_dsl("inner([0, 1/4, -1/4])").unwrap();
        assert_eq!(e, DslExpr::Inner(VecLit::Coords(vec![rat(0, 1), rat(1, 4), rat(-1, 4)])));
        let e = parse_dsl("inner(-1/8*a + b - 3*c)").unwrap();
        assert_eq!(
            e,
            DslExpr::Inner(VecLit::Combo(vec![(rat(-1, 8), "a".into()), (rat(1, 1), "b".into()), (rat(-3, 1), "c".into())]))
        );
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "sigma()", "frob(1)", "theta*", "inner(1/4)", "lift(a", "sigma(1))"] {
            assert!(parse_dsl(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn print_parse_round_trip() {
        for src in [
            "sigma(1)*theta*sigma(1)",
            "inner(-1/8*a+1/2*b)*inner([1/4,0])*theta",
            "inv(perm(1,3)*lift(tau))",
            "g*theta",
        ] {
            let e = parse_dsl(src).unwrap();
            assert_eq!(parse_dsl(&e.to_string()).unwrap(), e);
        }
    }
}
