//! Truncated q-series on the exponent grid `(1/4)Z`: theta series of shifted
//! lattices, Euler-product denominators, twisted traces and Burnside
//! averages.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Roots;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::autos::{AutGroup, Automorphism};
use crate::error::{Result, VoaError};
use crate::lattice::{Lattice, LatticeSpan};
use crate::scalar::{int, rat, GaussScalar, Rational};

/// `sum c_k q^(k/4)` for `k/4 <= cutoff`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSeries {
    cutoff: u32,
    coeffs: BTreeMap<i64, GaussScalar>,
}

impl IntSeries {
    pub fn zero(cutoff: u32) -> Self {
        IntSeries { cutoff, coeffs: BTreeMap::new() }
    }

    pub fn one(cutoff: u32) -> Self {
        let mut s = Self::zero(cutoff);
        s.add_at(0, &GaussScalar::one());
        s
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    fn top(&self) -> i64 {
        4 * self.cutoff as i64
    }

    /// Adds `c q^(quarter/4)`; terms beyond the cutoff are dropped.
    pub fn add_at(&mut self, quarter: i64, c: &GaussScalar) {
        if quarter > self.top() || c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(quarter).or_insert_with(GaussScalar::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&quarter);
        }
    }

    /// Coefficient of `q^(quarter/4)`.
    pub fn coeff_quarter(&self, quarter: i64) -> GaussScalar {
        self.coeffs.get(&quarter).cloned().unwrap_or_else(GaussScalar::zero)
    }

    /// Coefficient of `q^n` for integer `n`.
    pub fn coeff(&self, n: u32) -> GaussScalar {
        self.coeff_quarter(4 * n as i64)
    }

    /// Coefficients at `q^0, ..., q^cutoff` as integers; errors if any is not
    /// a nonnegative integer.
    pub fn integer_dims(&self) -> Result<Vec<usize>> {
        (0..=self.cutoff)
            .map(|n| {
                let c = self.coeff(n);
                if !c.is_real() || !c.re.is_integer() || c.re.is_negative() {
                    return Err(VoaError::Consistency(format!("coefficient {c} of q^{n} is not a dimension")));
                }
                Ok(c.re.to_integer().to_usize().expect("small dimension"))
            })
            .collect()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &GaussScalar)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn add(&self, other: &IntSeries) -> IntSeries {
        let mut out = IntSeries::zero(self.cutoff.min(other.cutoff));
        for (k, c) in self.terms().chain(other.terms()) {
            out.add_at(k, c);
        }
        out
    }

    pub fn scale(&self, c: &GaussScalar) -> IntSeries {
        let mut out = IntSeries::zero(self.cutoff);
        for (k, x) in self.terms() {
            out.add_at(k, &(x * c));
        }
        out
    }

    pub fn mul(&self, other: &IntSeries) -> IntSeries {
        let mut out = IntSeries::zero(self.cutoff.min(other.cutoff));
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                out.add_at(a + b, &(x * y));
            }
        }
        out
    }

    /// `prod_{n >= 1} (1 - s q^n)^(-rank)` for `s = +1` or `-1`.
    pub fn euler_inverse(cutoff: u32, rank: usize, s: i64) -> IntSeries {
        // 1/(1 - s q^n) = sum_k s^k q^{nk}
        let mut out = IntSeries::one(cutoff);
        for n in 1..=cutoff as i64 {
            let mut factor = IntSeries::zero(cutoff);
            let mut k = 0;
            while n * k <= cutoff as i64 {
                factor.add_at(4 * n * k, &GaussScalar::from_int(s.pow(k as u32)));
                k += 1;
            }
            for _ in 0..rank {
                out = out.mul(&factor);
            }
        }
        out
    }
}

impl fmt::Display for IntSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.terms() {
            writeln!(f, "q^({k}/4): {c}")?;
        }
        Ok(())
    }
}

/// `sum_{lambda in shift + S} q^(<lambda,lambda>/2)` up to `q^cutoff`.
/// `shift` is in ambient coordinates and must lie in the rational span of
/// `S`.
pub fn theta(span: &LatticeSpan, shift: &[Rational], cutoff: u32) -> Result<IntSeries> {
    let s = span
        .span_coords(shift)
        .ok_or_else(|| VoaError::Domain(format!("shift is outside the span of {}", span.name())))?;
    let basis = span.basis();
    let gram = span.gram();
    let r = basis.len();
    let gq: Vec<Vec<Rational>> = gram.iter().map(|row| row.iter().map(|&x| int(x)).collect()).collect();
    let ginv = crate::lattice::invert(&gq).expect("positive definite");
    let bound = 2 * cutoff as i64;
    // |x_a| <= sqrt(bound * ginv_aa)
    let ranges: Vec<(i64, i64)> = (0..r)
        .map(|a| {
            let lim = (&ginv[a][a] * int(bound)).ceil().to_integer().to_i64().unwrap();
            let rad = lim.sqrt() + 1;
            let centre = s[a].floor().to_integer().to_i64().unwrap();
            (-centre - rad - 1, -centre + rad + 1)
        })
        .collect();
    let mut out = IntSeries::zero(cutoff);
    let mut c: Vec<i64> = ranges.iter().map(|x| x.0).collect();
    if r == 0 {
        out.add_at(0, &GaussScalar::one());
        return Ok(out);
    }
    loop {
        let x: Vec<Rational> = (0..r).map(|a| &s[a] + int(c[a])).collect();
        let mut norm = Rational::zero();
        for a in 0..r {
            for b in 0..r {
                norm += &x[a] * &x[b] * int(gram[a][b]);
            }
        }
        if norm <= int(bound) {
            let q4 = &norm * int(2);
            if !q4.is_integer() {
                return Err(VoaError::Domain("theta exponent is off the quarter grid".into()));
            }
            out.add_at(q4.to_integer().to_i64().unwrap(), &GaussScalar::one());
        }
        let mut a = 0;
        loop {
            if a == r {
                return Ok(out);
            }
            c[a] += 1;
            if c[a] > ranges[a].1 {
                c[a] = ranges[a].0;
                a += 1;
            } else {
                break;
            }
        }
    }
}

/// Character of `V_{shift + S}`: theta over the rank-power Euler product.
pub fn voa_character(span: &LatticeSpan, shift: &[Rational], cutoff: u32) -> Result<IntSeries> {
    let th = theta(span, shift, cutoff)?;
    Ok(th.mul(&IntSeries::euler_inverse(cutoff, span.rank(), 1)))
}

/// A twisted character with the route used to obtain it.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistedCharacter {
    pub series: IntSeries,
    pub closed_form: bool,
}

/// Closed form of `sum_n tr(inn_h lift(D) | V_n) q^n` on a diagonal lattice,
/// computed block by block.
pub fn diagonal_twisted_character(lattice: &Lattice, h: &[Rational], signs: &[i8], cutoff: u32) -> Result<IntSeries> {
    if !lattice.is_diagonal() {
        return Err(VoaError::Unsupported("closed-form twisted characters need a diagonal lattice".into()));
    }
    let mut out = IntSeries::one(cutoff);
    for (i, (hi, &si)) in h.iter().zip(signs).enumerate() {
        let g = lattice.gram()[i][i];
        let block = if si == 1 {
            let mut th = IntSeries::zero(cutoff);
            let mut m: i64 = 0;
            while g * m * m <= 2 * cutoff as i64 {
                for mm in if m == 0 { vec![0] } else { vec![m, -m] } {
                    let ph = GaussScalar::phase(&(hi * int(g * mm)))?;
                    th.add_at(2 * g * mm * mm, &ph);
                }
                m += 1;
            }
            th.mul(&IntSeries::euler_inverse(cutoff, 1, 1))
        } else {
            IntSeries::euler_inverse(cutoff, 1, -1)
        };
        out = out.mul(&block);
    }
    Ok(out)
}

/// `sum_n tr(a | V_n) q^n` up to `cutoff`. Uses the closed form when the
/// automorphism normalizes to `inn_h lift(D)` on a diagonal lattice (and
/// checks it against matrix traces), otherwise the matrix traces.
pub fn twisted_character(a: &Automorphism, cutoff: u32) -> Result<TwistedCharacter> {
    let l = a.lattice();
    let w = cutoff.min(a.cutoff());
    let traces = |w: u32| -> Result<IntSeries> {
        let mut s = IntSeries::zero(w);
        for n in 0..=w {
            s.add_at(4 * n as i64, &a.trace_on_grade(n)?);
        }
        Ok(s)
    };
    if l.is_diagonal() {
        if let Some(form) = a.expr().diagonal_form(l) {
            let series = diagonal_twisted_character(l, &form.h, &form.signs, cutoff)?;
            for n in 0..=w {
                if series.coeff(n) != a.trace_on_grade(n)? {
                    return Err(VoaError::Consistency(format!(
                        "closed-form trace of {} at grade {n} is {} but the matrix trace is {}",
                        a.expr(),
                        series.coeff(n),
                        a.trace_on_grade(n)?
                    )));
                }
            }
            return Ok(TwistedCharacter { series, closed_form: true });
        }
    }
    Ok(TwistedCharacter { series: traces(w)?, closed_form: false })
}

/// `(1/|G|) sum_g twisted_character(g)`; all coefficients must be
/// nonnegative integers.
pub fn burnside_orbifold_dims(group: &AutGroup, cutoff: u32) -> Result<IntSeries> {
    let mut total: Option<IntSeries> = None;
    for g in group.elements() {
        let s = twisted_character(g, cutoff)?.series;
        total = Some(match total {
            None => s,
            Some(t) => t.add(&s),
        });
    }
    let total = total.expect("group has the identity");
    let avg = total.scale(&GaussScalar::real(rat(1, group.order() as i64)));
    for (k, c) in avg.terms() {
        if !c.is_real() || !c.re.is_integer() || c.re.is_negative() {
            return Err(VoaError::Consistency(format!("Burnside coefficient {c} at q^({k}/4) is not a dimension")));
        }
    }
    Ok(avg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autos::{AutBuilder, DEFAULT_GROUP_BOUND};
    use crate::fock::GradedBasis;
    use std::sync::Arc;

    fn lat(name: &str, diag: &[i64]) -> Arc<Lattice> {
        let d = diag.len();
        let gram = (0..d).map(|i| (0..d).map(|j| if i == j { diag[i] } else { 0 }).collect()).collect();
        Arc::new(Lattice::new(name, gram).unwrap())
    }

    /// Independent count: number of integers m with g (m + s)^2 / 2 = k/4.
    fn rank_one_theta(g: i64, s: Rational, w: u32) -> BTreeMap<i64, i64> {
        let mut out = BTreeMap::new();
        for m in -50i64..=50 {
            let x = &s + int(m);
            let q4 = &x * &x * int(2 * g);
            if q4 <= int(4 * w as i64) {
                *out.entry(q4.to_integer().to_i64().unwrap()).or_insert(0) += 1;
            }
        }
        out
    }

    #[test]
    fn rank_one_thetas() {
        let a1 = lat("A1", &[2]);
        let t = theta(&LatticeSpan::Full(a1), &[int(0)], 4).unwrap();
        assert_eq!(t.coeff(0), GaussScalar::one());
        assert_eq!(t.coeff(1), GaussScalar::from_int(2));
        assert_eq!(t.coeff(4), GaussScalar::from_int(2));
        assert_eq!(t.coeff(2), GaussScalar::zero());
        let z2 = lat("Zg2", &[4]);
        let t = theta(&LatticeSpan::Full(z2), &[rat(1, 2)], 6).unwrap();
        let expected = rank_one_theta(4, rat(1, 2), 6);
        let got: BTreeMap<i64, i64> = t.terms().map(|(k, c)| (k, c.re.to_integer().to_i64().unwrap())).collect();
        assert_eq!(got, expected);
        assert_eq!(t.coeff_quarter(2), GaussScalar::from_int(2));
        let t0 = theta(&LatticeSpan::Full(lat("A1", &[2])), &[int(0)], 0).unwrap();
        assert_eq!(t0.terms().count(), 1);
    }

    #[test]
    fn characters_match_basis_dimensions() {
        for (l, w) in [(lat("A1", &[2]), 6u32), (lat("A1^3", &[2, 2, 2]), 4), (lat("D", &[12, 4]), 5)] {
            let ch = voa_character(&LatticeSpan::Full(l.clone()), &vec![int(0); l.rank()], w).unwrap();
            let b = GradedBasis::build(l, w);
            assert_eq!(ch.integer_dims().unwrap(), b.dims());
        }
    }

    #[test]
    fn characters_multiply() {
        let a = voa_character(&LatticeSpan::Full(lat("A1", &[2])), &[int(0)], 5).unwrap();
        let aa = voa_character(&LatticeSpan::Full(lat("A1^2", &[2, 2])), &[int(0), int(0)], 5).unwrap();
        assert_eq!(a.mul(&a), aa);
    }

    #[test]
    fn twisted_characters_agree_with_traces() {
        let l = lat("D", &[12, 4]);
        let b = Arc::new(GradedBasis::build(l.clone(), 4));
        let mut builder = AutBuilder::new(b.clone());
        for src in ["theta", "inner([1/24,0])", "inner([1/24,1/8])*theta", "inv(inner([1/48,1/16]))*theta*inner([1/48,1/16])"] {
            let a = builder.build_str(src).unwrap();
            let tc = twisted_character(&a, 4).unwrap();
            assert!(tc.closed_form, "{src}");
        }
        let a1 = Arc::new(GradedBasis::build(lat("A1", &[2]), 4));
        let mut b1 = AutBuilder::new(a1);
        let th = b1.build_str("theta").unwrap();
        let tc = twisted_character(&th, 4).unwrap();
        assert_eq!(tc.series.coeff(1), GaussScalar::from_int(-1));
        let s = b1.build_str("sigma(1)").unwrap();
        assert!(!twisted_character(&s, 4).unwrap().closed_form);
    }

    #[test]
    fn burnside_for_theta_on_a1() {
        let b = Arc::new(GradedBasis::build(lat("A1", &[2]), 4));
        let mut builder = AutBuilder::new(b.clone());
        let g = AutGroup::generate(vec![builder.build_str("theta").unwrap()], b, DEFAULT_GROUP_BOUND).unwrap();
        let s = burnside_orbifold_dims(&g, 4).unwrap();
        assert_eq!(s.coeff(1), GaussScalar::one());
        let direct: Vec<usize> = (0..=4).map(|n| g.fixed_space(n).unwrap().dim()).collect();
        assert_eq!(s.integer_dims().unwrap(), direct);
    }

    #[test]
    fn display_uses_quarter_grid() {
        let t = theta(&LatticeSpan::Full(lat("Zg2", &[4])), &[rat(1, 2)], 1).unwrap();
        assert_eq!(t.to_string(), "q^(2/4): 2\n");
    }
}
