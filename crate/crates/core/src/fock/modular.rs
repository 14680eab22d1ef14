//! Kernels over Q(i) by elimination modulo primes, certified exactly.
//!
//! For a prime `p = 1 mod 4` and a square root `r` of -1 mod `p`, the map
//! `a + bi -> a + br` is a ring homomorphism to F_p. The canonical kernel is
//! computed mod several primes, lifted by Chinese remaindering and rational
//! reconstruction, and accepted only after the exact check `A x = 0`. The rank
//! mod `p` never exceeds the rank over Q(i), so a verified lift with as many
//! vectors as the kernel mod `p` spans the kernel; having 1 at its own free
//! index and 0 at the others, it is the canonical basis.

use std::collections::BinaryHeap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::linalg::SVec;
use crate::scalar::GaussScalar;

/// Primes below 2^31 tried before giving up.
const MAX_PRIMES: usize = 48;

fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let is_prime = |n: u64| (3..).step_by(2).take_while(|d| d * d <= n).all(|d| n % d != 0);
        let mut out = Vec::new();
        let mut n = (1u64 << 31) - 1;
        while out.len() < MAX_PRIMES {
            if n % 4 == 1 && is_prime(n) {
                out.push(n);
            }
            n -= 2;
        }
        out
    })
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn sqrt_minus_one(p: u64) -> u64 {
    (2..p)
        .map(|a| pow_mod(a, (p - 1) / 4, p))
        .find(|c| c * c % p == p - 1)
        .expect("p = 1 mod 4 has a square root of -1")
}

fn big_mod(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

fn rat_mod(q: &BigRational, p: u64) -> Option<u64> {
    let d = big_mod(q.denom(), p);
    (d != 0).then(|| big_mod(q.numer(), p) * inv_mod(d, p) % p)
}

fn scalar_mod(c: &GaussScalar, p: u64, root: u64) -> Option<u64> {
    Some((rat_mod(&c.re, p)? + rat_mod(&c.im, p)? * root) % p)
}

/// Canonical kernel mod `p`: the free indices and, for each, the dense
/// kernel vector with 1 there and 0 at the other free indices.
struct ModKernel {
    free: Vec<u32>,
    vectors: Vec<Vec<u64>>,
}

fn kernel_mod_p(rows: &[SVec], n: usize, p: u64, root: u64) -> Option<ModKernel> {
    let mut ech: Vec<Option<Vec<(u32, u64)>>> = vec![None; n];
    let mut rank = 0;
    let mut scratch = vec![0u64; n];
    let mut heap = BinaryHeap::new();
    for row in rows {
        for (i, c) in row {
            let v = scalar_mod(c, p, root)?;
            let s = &mut scratch[*i as usize];
            *s = (*s + v) % p;
            heap.push(*i);
        }
        // reduce from the top index down; each pivot row only reaches below its pivot
        let mut rest: Vec<(u32, u64)> = Vec::new();
        let mut last = None;
        while let Some(i) = heap.pop() {
            if last == Some(i) {
                continue;
            }
            last = Some(i);
            let c = std::mem::take(&mut scratch[i as usize]);
            if c == 0 {
                continue;
            }
            match &ech[i as usize] {
                Some(prow) => {
                    for &(j, x) in &prow[..prow.len() - 1] {
                        let s = &mut scratch[j as usize];
                        *s = (*s + p - x * c % p) % p;
                        heap.push(j);
                    }
                }
                None => rest.push((i, c)),
            }
        }
        if let Some(&(piv, lead)) = rest.first() {
            rest.reverse();
            let inv = inv_mod(lead, p);
            for e in rest.iter_mut() {
                e.1 = e.1 * inv % p;
            }
            ech[piv as usize] = Some(rest);
            rank += 1;
            if rank == n {
                break;
            }
        }
    }
    let pivots: Vec<u32> = (0..n as u32).filter(|&i| ech[i as usize].is_some()).collect();
    let free: Vec<u32> = (0..n as u32).filter(|&i| ech[i as usize].is_none()).collect();
    let mut vectors = Vec::with_capacity(free.len());
    for &f in &free {
        let mut x = vec![0u64; n];
        x[f as usize] = 1;
        for &q in pivots.iter().filter(|&&q| q > f) {
            let prow = ech[q as usize].as_ref().expect("pivot row");
            let mut s = 0u64;
            for &(j, c) in &prow[..prow.len() - 1] {
                let xj = x[j as usize];
                if xj != 0 {
                    s = (s + c * xj) % p;
                }
            }
            x[q as usize] = (p - s) % p;
        }
        vectors.push(x);
    }
    Some(ModKernel { free, vectors })
}

/// Residues of the real and imaginary parts of every kernel entry modulo the
/// product of the primes used so far.
struct Lift {
    free: Vec<u32>,
    modulus: BigInt,
    re: Vec<Vec<BigInt>>,
    im: Vec<Vec<BigInt>>,
    primes_used: usize,
}

impl Lift {
    fn start(free: Vec<u32>, p: u64, re: Vec<Vec<u64>>, im: Vec<Vec<u64>>) -> Self {
        let conv = |m: Vec<Vec<u64>>| m.into_iter().map(|v| v.into_iter().map(BigInt::from).collect()).collect();
        Lift { free, modulus: BigInt::from(p), re: conv(re), im: conv(im), primes_used: 1 }
    }

    fn add(&mut self, p: u64, re: &[Vec<u64>], im: &[Vec<u64>]) {
        let bp = BigInt::from(p);
        let minv = BigInt::from(inv_mod(big_mod(&self.modulus, p), p));
        let m = self.modulus.clone();
        let crt = |acc: &mut BigInt, b: u64| {
            let a = big_mod(acc, p);
            if a != b {
                let t = ((BigInt::from(b) - BigInt::from(a)) * &minv).mod_floor(&bp);
                *acc += &m * t;
            }
        };
        for (accs, vals) in self.re.iter_mut().zip(re) {
            for (acc, &b) in accs.iter_mut().zip(vals) {
                crt(acc, b);
            }
        }
        for (accs, vals) in self.im.iter_mut().zip(im) {
            for (acc, &b) in accs.iter_mut().zip(vals) {
                crt(acc, b);
            }
        }
        self.modulus *= &bp;
        self.primes_used += 1;
    }

    fn reconstruct(&self) -> Option<Vec<SVec>> {
        let bound = (&self.modulus / BigInt::from(2)).sqrt();
        let mut out = Vec::with_capacity(self.free.len());
        for (res, ims) in self.re.iter().zip(&self.im) {
            let mut v: SVec = Vec::new();
            for (j, (a, b)) in res.iter().zip(ims).enumerate() {
                let re = rational_reconstruction(a, &self.modulus, &bound)?;
                let im = rational_reconstruction(b, &self.modulus, &bound)?;
                let c = GaussScalar::new(re, im);
                if !c.is_zero() {
                    v.push((j as u32, c));
                }
            }
            out.push(v);
        }
        Some(out)
    }
}

/// The fraction `n/d` with `|n|, d <= bound` congruent to `u` mod `m`.
fn rational_reconstruction(u: &BigInt, m: &BigInt, bound: &BigInt) -> Option<BigRational> {
    if u.is_zero() {
        return Some(BigRational::zero());
    }
    let (mut r0, mut r1) = (m.clone(), u.clone());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        (r0, r1, t0, t1) = (r1, r2, t1, t2);
    }
    if t1.is_zero() || &t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

fn annihilates(rows: &[SVec], x: &SVec, n: usize) -> bool {
    let mut dense: Vec<Option<&GaussScalar>> = vec![None; n];
    for (j, c) in x {
        dense[*j as usize] = Some(c);
    }
    rows.iter().all(|row| {
        let mut s = GaussScalar::zero();
        for (j, c) in row {
            if let Some(xj) = dense[*j as usize] {
                s += &(c * xj);
            }
        }
        s.is_zero()
    })
}

/// Canonical kernel of the system `rows . x = 0` in `n` unknowns, or `None`
/// when no certified lift was found within the prime budget.
pub(crate) fn kernel_modular(rows: &[SVec], n: usize) -> Option<Vec<SVec>> {
    let complex = rows.iter().flatten().any(|(_, c)| !c.im.is_zero());
    let mut lift: Option<Lift> = None;
    for &p in primes() {
        let r = sqrt_minus_one(p);
        let Some(k1) = kernel_mod_p(rows, n, p, r) else { continue };
        let (re, im) = if complex {
            let Some(k2) = kernel_mod_p(rows, n, p, p - r) else { continue };
            if k2.free != k1.free {
                continue;
            }
            // a + b r = x1 and a - b r = x2
            let (half, inv2r) = (inv_mod(2, p), inv_mod(2 * r % p, p));
            let re: Vec<Vec<u64>> = k1
                .vectors
                .iter()
                .zip(&k2.vectors)
                .map(|(u, v)| u.iter().zip(v).map(|(&a, &b)| (a + b) % p * half % p).collect())
                .collect();
            let im: Vec<Vec<u64>> = k1
                .vectors
                .iter()
                .zip(&k2.vectors)
                .map(|(u, v)| u.iter().zip(v).map(|(&a, &b)| (a + p - b) % p * inv2r % p).collect())
                .collect();
            (re, im)
        } else {
            let zeros = vec![vec![0u64; n]; k1.vectors.len()];
            (k1.vectors, zeros)
        };
        match &mut lift {
            // a larger kernel means this prime is unlucky
            Some(l) if k1.free.len() > l.free.len() => continue,
            Some(l) if k1.free == l.free => l.add(p, &re, &im),
            _ => lift = Some(Lift::start(k1.free, p, re, im)),
        }
        let l = lift.as_ref().expect("set above");
        if !l.primes_used.is_power_of_two() {
            continue;
        }
        if let Some(vecs) = l.reconstruct() {
            if vecs.iter().all(|x| annihilates(rows, x, n)) {
                return Some(vecs);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::linalg::kernel_exact;
    use crate::scalar::rat;
    use proptest::prelude::*;

    fn arb_entry() -> impl Strategy<Value = GaussScalar> {
        (-9i64..=9, 1i64..=3, -2i64..=2, any::<bool>()).prop_map(|(a, d, b, complex)| {
            GaussScalar::new(rat(a, d), if complex { rat(b, 1) } else { rat(0, 1) })
        })
    }

    fn arb_rows(n: u32) -> impl Strategy<Value = Vec<SVec>> {
        prop::collection::vec(prop::collection::btree_map(0..n, arb_entry(), 1..6), 1..(n as usize + 4)).prop_map(|rows| {
            rows.into_iter().map(|r| r.into_iter().filter(|(_, c)| !c.is_zero()).collect()).collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn modular_kernel_equals_exact(rows in arb_rows(30)) {
            prop_assert_eq!(kernel_modular(&rows, 30), Some(kernel_exact(&rows, 30)));
        }
    }

    #[test]
    fn reconstruction_inverts_reduction() {
        let p = primes()[0];
        let bound = BigInt::from(p / 2).sqrt();
        for (n, d) in [(3, 7), (-22, 9), (1, 1), (0, 1), (-1, 12345)] {
            let q = rat(n, d);
            let u = BigInt::from(rat_mod(&q, p).unwrap());
            assert_eq!(rational_reconstruction(&u, &BigInt::from(p), &bound), Some(q));
        }
    }

    #[test]
    fn gaussian_kernel_matches_exact() {
        // x0 + i x1 = 0, x2 - x3/2 = 0
        let g = |re: i64, im: i64| GaussScalar::new(rat(re, 1), rat(im, 1));
        let rows = vec![vec![(0, g(1, 0)), (1, g(0, 1))], vec![(2, g(1, 0)), (3, GaussScalar::from_ratio(-1, 2))]];
        let k = kernel_modular(&rows, 4).unwrap();
        assert_eq!(k, vec![vec![(0, g(1, 0)), (1, g(0, 1))], vec![(2, g(1, 0)), (3, g(2, 0))]]);
    }
}
