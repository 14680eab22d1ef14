//! Exact arithmetic in the Gaussian rationals Q(i).

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Result, VoaError};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p`, `-p`, or `p/q` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || VoaError::Parse(format!("bad rational literal `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(VoaError::DivisionByZero);
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// An element `re + im*i` of Q(i).
///
/// Both parts are `BigRational`, which is always reduced with a positive
/// denominator, so derived equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussScalar {
    pub re: Rational,
    pub im: Rational,
}

impl GaussScalar {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussScalar { re, im }
    }

    pub fn zero() -> Self {
        GaussScalar { re: Rational::zero(), im: Rational::zero() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        GaussScalar { re: Rational::zero(), im: Rational::one() }
    }

    pub fn from_int(n: i64) -> Self {
        GaussScalar { re: int(n), im: Rational::zero() }
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        GaussScalar { re: rat(n, d), im: Rational::zero() }
    }

    pub fn real(r: Rational) -> Self {
        GaussScalar { re: r, im: Rational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.im.is_zero() && self.re.is_one()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussScalar { re: self.re.clone(), im: -&self.im }
    }

    /// |z|^2 as a rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(VoaError::DivisionByZero);
        }
        if self.im.is_zero() {
            return Ok(GaussScalar::real(self.re.recip()));
        }
        let n = self.norm_sqr();
        Ok(GaussScalar { re: &self.re / &n, im: -&self.im / &n })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        GaussScalar { re: &self.re * r, im: &self.im * r }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = GaussScalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// `e^(2 pi i r)` for `r` with denominator dividing 4.
    pub fn phase(r: &Rational) -> Result<Self> {
        let four = BigInt::from(4);
        if !four.is_multiple_of(r.denom()) {
            return Err(VoaError::UnrepresentablePhase(r.to_string()));
        }
        let quarter_turns = (r * Rational::from_integer(four.clone())).to_integer();
        let k = quarter_turns.mod_floor(&four);
        Ok(match k.to_string().as_str() {
            "0" => GaussScalar::one(),
            "1" => GaussScalar::i(),
            "2" => GaussScalar::from_int(-1),
            _ => -GaussScalar::i(),
        })
    }
}

impl fmt::Debug for GaussScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GaussScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}*i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{}-{}*i", self.re, -&self.im)
                } else {
                    write!(f, "{}+{}*i", self.re, self.im)
                }
            }
        }
    }
}

impl FromStr for GaussScalar {
    type Err = VoaError;

    /// Accepts `a/b`, `c/d*i`, `a/b+c/d*i`, `a/b-c/d*i`, `i`, `-i`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(VoaError::Parse("empty scalar".into()));
        }
        // split at a sign that is not the leading one
        let split = s
            .char_indices()
            .skip(1)
            .find(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i);
        let (a, b) = match split {
            Some(i) => (&s[..i], Some(&s[i..])),
            None => (s.as_str(), None),
        };
        let imag_part = |t: &str| -> Result<Rational> {
            let t = t.strip_suffix('i').unwrap_or(t);
            let t = t.strip_suffix('*').unwrap_or(t);
            match t {
                "" | "+" => Ok(Rational::one()),
                "-" => Ok(-Rational::one()),
                _ => parse_rational(t.strip_prefix('+').unwrap_or(t)),
            }
        };
        match b {
            None if a.ends_with('i') => Ok(GaussScalar::new(Rational::zero(), imag_part(a)?)),
            None => Ok(GaussScalar::real(parse_rational(a)?)),
            Some(b) if b.ends_with('i') => Ok(GaussScalar::new(parse_rational(a)?, imag_part(b)?)),
            Some(_) => Err(VoaError::Parse(format!("bad scalar `{s}`"))),
        }
    }
}

// Integer fast paths: `BigRational` reduces by a gcd after every operation,
// which dominates when most coefficients are integers.
fn radd(a: &Rational, b: &Rational) -> Rational {
    if a.is_integer() && b.is_integer() {
        Rational::from_integer(a.numer() + b.numer())
    } else {
        a + b
    }
}

fn rsub(a: &Rational, b: &Rational) -> Rational {
    if a.is_integer() && b.is_integer() {
        Rational::from_integer(a.numer() - b.numer())
    } else {
        a - b
    }
}

fn rmul(a: &Rational, b: &Rational) -> Rational {
    if a.is_integer() && b.is_integer() {
        Rational::from_integer(a.numer() * b.numer())
    } else {
        a * b
    }
}

impl<'a> Add<&'a GaussScalar> for &'a GaussScalar {
    type Output = GaussScalar;
    fn add(self, o: &GaussScalar) -> GaussScalar {
        GaussScalar { re: radd(&self.re, &o.re), im: radd(&self.im, &o.im) }
    }
}

impl Add for GaussScalar {
    type Output = GaussScalar;
    fn add(self, o: GaussScalar) -> GaussScalar {
        &self + &o
    }
}

impl<'a> Sub<&'a GaussScalar> for &'a GaussScalar {
    type Output = GaussScalar;
    fn sub(self, o: &GaussScalar) -> GaussScalar {
        GaussScalar { re: rsub(&self.re, &o.re), im: rsub(&self.im, &o.im) }
    }
}

impl Sub for GaussScalar {
    type Output = GaussScalar;
    fn sub(self, o: GaussScalar) -> GaussScalar {
        &self - &o
    }
}

impl<'a> Mul<&'a GaussScalar> for &'a GaussScalar {
    type Output = GaussScalar;
    fn mul(self, o: &GaussScalar) -> GaussScalar {
        match (self.im.is_zero(), o.im.is_zero()) {
            (true, true) => GaussScalar::real(rmul(&self.re, &o.re)),
            (true, false) => GaussScalar { re: rmul(&self.re, &o.re), im: rmul(&self.re, &o.im) },
            (false, true) => GaussScalar { re: rmul(&self.re, &o.re), im: rmul(&self.im, &o.re) },
            (false, false) => GaussScalar {
                re: rsub(&rmul(&self.re, &o.re), &rmul(&self.im, &o.im)),
                im: radd(&rmul(&self.re, &o.im), &rmul(&self.im, &o.re)),
            },
        }
    }
}

impl Mul for GaussScalar {
    type Output = GaussScalar;
    fn mul(self, o: GaussScalar) -> GaussScalar {
        &self * &o
    }
}

impl Neg for GaussScalar {
    type Output = GaussScalar;
    fn neg(self) -> GaussScalar {
        GaussScalar { re: -self.re, im: -self.im }
    }
}

impl Neg for &GaussScalar {
    type Output = GaussScalar;
    fn neg(self) -> GaussScalar {
        GaussScalar { re: -&self.re, im: -&self.im }
    }
}

impl AddAssign<&GaussScalar> for GaussScalar {
    fn add_assign(&mut self, o: &GaussScalar) {
        self.re = radd(&self.re, &o.re);
        if !o.im.is_zero() {
            self.im = radd(&self.im, &o.im);
        }
    }
}

impl SubAssign<&GaussScalar> for GaussScalar {
    fn sub_assign(&mut self, o: &GaussScalar) {
        self.re = rsub(&self.re, &o.re);
        if !o.im.is_zero() {
            self.im = rsub(&self.im, &o.im);
        }
    }
}

impl MulAssign<&GaussScalar> for GaussScalar {
    fn mul_assign(&mut self, o: &GaussScalar) {
        *self = &*self * o;
    }
}

impl From<Rational> for GaussScalar {
    fn from(r: Rational) -> Self {
        GaussScalar::real(r)
    }
}

impl From<i64> for GaussScalar {
    fn from(n: i64) -> Self {
        GaussScalar::from_int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gs(s: &str) -> GaussScalar {
        s.parse().unwrap()
    }

    #[test]
    fn phases_of_quarter_turns() {
        assert_eq!(GaussScalar::phase(&int(0)).unwrap(), GaussScalar::one());
        assert_eq!(GaussScalar::phase(&rat(1, 2)).unwrap(), GaussScalar::from_int(-1));
        assert_eq!(GaussScalar::phase(&rat(1, 4)).unwrap(), GaussScalar::i());
        assert_eq!(GaussScalar::phase(&rat(3, 4)).unwrap(), -GaussScalar::i());
        assert_eq!(GaussScalar::phase(&rat(-1, 4)).unwrap(), -GaussScalar::i());
        assert!(matches!(
            GaussScalar::phase(&rat(1, 3)),
            Err(VoaError::UnrepresentablePhase(_))
        ));
    }

    #[test]
    fn field_examples() {
        assert_eq!(&gs("1+i") * &gs("1-i"), GaussScalar::from_int(2));
        assert_eq!(GaussScalar::i().inv().unwrap(), gs("-i"));
        assert_eq!(gs("3/2-5*i").conj(), gs("3/2+5*i"));
        assert_eq!(GaussScalar::zero().inv(), Err(VoaError::DivisionByZero));
    }

    #[test]
    fn text_form() {
        assert_eq!(gs("6/4").to_string(), "3/2");
        assert_eq!(gs("1/2-1/3*i").to_string(), "1/2-1/3*i");
        assert_eq!(gs("-2/4*i").to_string(), "-1/2*i");
        assert_eq!(gs("i"), GaussScalar::i());
        assert!("1/2+".parse::<GaussScalar>().is_err());
        assert!("1/0".parse::<GaussScalar>().is_err());
    }

    fn arb_scalar() -> impl Strategy<Value = GaussScalar> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20)
            .prop_map(|(a, b, c, d)| GaussScalar::new(rat(a, b), rat(c, d)))
    }

    proptest! {
        #[test]
        fn phase_is_a_homomorphism(a in -12i64..12, b in -12i64..12) {
            let (r, s) = (rat(a, 4), rat(b, 4));
            let lhs = &GaussScalar::phase(&r).unwrap() * &GaussScalar::phase(&s).unwrap();
            prop_assert_eq!(lhs, GaussScalar::phase(&(&r + &s)).unwrap());
            prop_assert_eq!(GaussScalar::phase(&(&r + int(1))).unwrap(), GaussScalar::phase(&r).unwrap());
            let p = GaussScalar::phase(&r).unwrap();
            prop_assert!((&p * &p.conj()).is_one());
        }

        #[test]
        fn field_axioms(x in arb_scalar(), y in arb_scalar(), z in arb_scalar()) {
            prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&(&x - &y) + &y, x.clone());
            if !x.is_zero() {
                prop_assert!((&x * &x.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn print_parse_round_trip(x in arb_scalar()) {
            prop_assert_eq!(x.to_string().parse::<GaussScalar>().unwrap(), x);
        }
    }
}
