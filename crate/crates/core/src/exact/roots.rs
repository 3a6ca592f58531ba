//! Real root isolation for integer polynomials whose roots are all real
//! and simple.
//!
//! Roots are separated with Sturm sequences evaluated exactly at dyadic
//! points `m / 2^e`, then each isolating interval is shrunk by sign-change
//! bisection. No floating point enters until the final midpoint is reported.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Polynomial with integer coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly::new(vec![BigInt::zero()]);
        }
        IntPoly::new(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect(),
        )
    }

    /// Divide out the (positive) content.
    fn primitive(mut self) -> IntPoly {
        let g = self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if !g.is_zero() && !g.is_one() {
            for c in &mut self.coeffs {
                *c /= &g;
            }
        }
        self
    }

    /// Sign of `p(m / 2^e)`.
    pub fn sign_at(&self, m: &BigInt, e: u32) -> i8 {
        // Horner on p(x) 2^{e d} = sum a_i m^i 2^{e (d - i)}
        let d = self.degree();
        let mut acc = self.coeffs[d].clone();
        for i in (0..d).rev() {
            acc = acc * m + (&self.coeffs[i] << (e as usize * (d - i)));
        }
        sign(&acc)
    }

    /// Cauchy bound `1 + max |a_i / a_d|`, rounded up to a power of two.
    fn cauchy_exponent(&self) -> u32 {
        let d = self.degree();
        let lead = self.coeffs[d].abs();
        let max_ratio = self.coeffs[..d]
            .iter()
            .map(|c| BigRational::new(c.abs(), lead.clone()))
            .max()
            .unwrap_or_else(BigRational::zero);
        let bound = (max_ratio + BigRational::one()).ceil().to_integer();
        let bits = bound.bits() as u32;
        bits + 1
    }
}

fn sign(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn to_rational(p: &IntPoly) -> Vec<BigRational> {
    p.coeffs.iter().cloned().map(BigRational::from_integer).collect()
}

/// Remainder of rational polynomial division `a mod b`.
fn rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() > db && !r.is_empty() {
        let top = r.len() - 1;
        let q = &r[top] / lead;
        let shift = top - db;
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &q * bc;
        }
        r.pop();
        while r.len() > 1 && r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
        if r.len() == 1 && r[0].is_zero() {
            break;
        }
    }
    r
}

/// Scale a rational polynomial by a positive factor to a primitive integer one.
fn to_primitive_int(p: &[BigRational]) -> IntPoly {
    let l = p.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints = p.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
    IntPoly::new(ints).primitive()
}

fn sturm_sequence(p: &IntPoly) -> Vec<IntPoly> {
    let mut seq = vec![p.clone().primitive()];
    let d = p.derivative().primitive();
    if d.is_zero() {
        return seq;
    }
    seq.push(d);
    loop {
        let n = seq.len();
        let r = rem(&to_rational(&seq[n - 2]), &to_rational(&seq[n - 1]));
        if r.iter().all(Zero::is_zero) {
            break;
        }
        let neg: Vec<BigRational> = r.into_iter().map(|c| -c).collect();
        seq.push(to_primitive_int(&neg));
        if seq.last().is_some_and(|q| q.degree() == 0) {
            break;
        }
    }
    seq
}

fn variations(seq: &[IntPoly], m: &BigInt, e: u32) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for s in seq.iter().map(|q| q.sign_at(m, e)) {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Dyadic interval `(lo / 2^e, hi / 2^e]`.
#[derive(Debug, Clone)]
struct Interval {
    lo: BigInt,
    hi: BigInt,
    e: u32,
}

impl Interval {
    fn refine(&self) -> (BigInt, u32) {
        (&self.lo + &self.hi, self.e + 1)
    }
}

fn dyadic_to_f64(m: &BigInt, e: u32) -> f64 {
    BigRational::new(m.clone(), BigInt::one() << e as usize).to_f64().unwrap_or(f64::NAN)
}

/// All real roots of `p` in `(-2^k, 0]` where `2^k` exceeds the Cauchy bound,
/// ascending. Each root is located to an interval of width at most `tol`.
///
/// Fails unless the number of distinct roots found equals the degree.
pub fn nonpositive_roots(p: &IntPoly, tol: f64) -> Result<Vec<f64>> {
    let d = p.degree();
    if d == 0 {
        return Ok(Vec::new());
    }
    let seq = sturm_sequence(p);
    let k = p.cauchy_exponent();
    let start = Interval { lo: -(BigInt::one() << k as usize), hi: BigInt::zero(), e: 0 };
    let v_lo = variations(&seq, &start.lo, 0);
    let v_hi = variations(&seq, &start.hi, 0);
    // Sturm counts distinct roots in (lo, 0], so a root at zero is included.
    let total = v_lo.saturating_sub(v_hi);
    if total != d {
        return Err(Error::Numeric(format!("expected {d} distinct nonpositive roots, Sturm count found {total}")));
    }

    let mut roots = Vec::with_capacity(d);
    let mut stack = vec![(start, v_lo, v_hi)];
    let mut guard = 0usize;
    while let Some((iv, va, vb)) = stack.pop() {
        guard += 1;
        if guard > 1_000_000 {
            return Err(Error::Numeric("root isolation did not terminate".into()));
        }
        match va - vb {
            0 => {}
            1 => roots.push(bisect_single(p, iv, tol)?),
            _ => {
                let (mut mid, mut e) = iv.refine();
                // Nudge the split point off an exact root so Sturm counts stay
                // valid; the cumulative nudge stays below half the interval.
                while p.sign_at(&mid, e) == 0 {
                    mid = (mid << 1usize) + BigInt::one();
                    e += 1;
                }
                let shift = (e - iv.e) as usize;
                let lo = &iv.lo << shift;
                let hi = &iv.hi << shift;
                let vm = variations(&seq, &mid, e);
                stack.push((Interval { lo, hi: mid.clone(), e }, va, vm));
                stack.push((Interval { lo: mid, hi, e }, vm, vb));
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    Ok(roots)
}

/// Shrink an interval holding exactly one simple root by sign bisection.
fn bisect_single(p: &IntPoly, iv: Interval, tol: f64) -> Result<f64> {
    let Interval { mut lo, mut hi, mut e } = iv;
    if p.sign_at(&hi, e) == 0 {
        return Ok(dyadic_to_f64(&hi, e));
    }
    let s_hi = p.sign_at(&hi, e);
    for _ in 0..4096 {
        let width = dyadic_to_f64(&(&hi - &lo), e);
        if width <= tol {
            return Ok(dyadic_to_f64(&(&lo + &hi), e + 1));
        }
        let mid = &lo + &hi;
        lo <<= 1usize;
        hi <<= 1usize;
        e += 1;
        match p.sign_at(&mid, e) {
            0 => return Ok(dyadic_to_f64(&mid, e)),
            s if s == s_hi => hi = mid,
            _ => lo = mid,
        }
    }
    Err(Error::Numeric("bisection did not reach the requested width".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPoly {
        IntPoly::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn quadratic_with_irrational_roots() {
        // z^2 + 4z + 1 has roots -2 +- sqrt(3)
        let r = nonpositive_roots(&poly(&[1, 4, 1]), 1e-14).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] - (-2.0 - 3f64.sqrt())).abs() < 1e-13);
        assert!((r[1] - (-2.0 + 3f64.sqrt())).abs() < 1e-13);
    }

    #[test]
    fn dyadic_roots_found_exactly() {
        // (z + 1)(z + 2)(z + 1/2) * 2 = 2z^3 + 7z^2 + 7z + 2
        let r = nonpositive_roots(&poly(&[2, 7, 7, 2]), 1e-14).unwrap();
        for (got, want) in r.iter().zip([-2.0, -1.0, -0.5]) {
            assert!((got - want).abs() <= 1e-14, "{got} vs {want}");
        }
    }

    #[test]
    fn clustered_roots_are_separated() {
        // (1000 z + 1)(1001 z + 1)
        let r = nonpositive_roots(&poly(&[1, 2001, 1001000]), 1e-14).unwrap();
        assert!((r[0] + 1.0 / 1000.0).abs() < 1e-14);
        assert!((r[1] + 1.0 / 1001.0).abs() < 1e-14);
    }

    #[test]
    fn root_at_zero() {
        let r = nonpositive_roots(&poly(&[0, 3, 1]), 1e-14).unwrap();
        assert_eq!(r, vec![-3.0, 0.0]);
    }

    #[test]
    fn positive_root_is_rejected() {
        assert!(nonpositive_roots(&poly(&[-1, 1]), 1e-14).is_err());
    }
}
