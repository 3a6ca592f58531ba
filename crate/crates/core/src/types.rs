//! Shared domain vocabulary: hypergeometric parameters, finite populations,
//! standardized deviations, bound values and exact probabilities.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A hypergeometric sampling scenario: `n` draws without replacement from a
/// population of `N` items of which `D` are successes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HGParams {
    n: u64,
    d: u64,
    pop: u64,
}

impl HGParams {
    pub fn new(n: u64, d: u64, pop: u64) -> Result<Self> {
        if pop == 0 {
            return Err(Error::domain("population size N must be at least 1"));
        }
        if n == 0 || n > pop {
            return Err(Error::domain(format!("sample size n = {n} must satisfy 1 <= n <= N = {pop}")));
        }
        if d > pop {
            return Err(Error::domain(format!("success count D = {d} exceeds N = {pop}")));
        }
        Ok(HGParams { n, d, pop })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of successes `D` in the population.
    pub fn d(&self) -> u64 {
        self.d
    }

    /// Population size `N`.
    pub fn big_n(&self) -> u64 {
        self.pop
    }

    /// Success proportion `D/N`.
    pub fn mu(&self) -> f64 {
        self.d as f64 / self.pop as f64
    }

    /// `(n-1)/(N-1)`; zero when `N = 1`.
    pub fn f_n(&self) -> f64 {
        if self.pop < 2 {
            0.0
        } else {
            (self.n - 1) as f64 / (self.pop - 1) as f64
        }
    }

    /// `(n-1)/N`.
    pub fn f_star(&self) -> f64 {
        (self.n - 1) as f64 / self.pop as f64
    }

    /// Sampling fraction `n/N`.
    pub fn fraction(&self) -> f64 {
        self.n as f64 / self.pop as f64
    }

    /// Bernoulli variance `mu (1 - mu)` of a single draw.
    pub fn sigma2(&self) -> f64 {
        let mu = self.mu();
        mu * (1.0 - mu)
    }

    /// `n D / N` as an exact rational.
    pub fn mean_exact(&self) -> BigRational {
        BigRational::new(BigInt::from(self.n * self.d), BigInt::from(self.pop))
    }

    /// Inclusive support `[max(0, n-(N-D)), min(D, n)]`.
    pub fn support(&self) -> (u64, u64) {
        let lo = (self.n + self.d).saturating_sub(self.pop);
        (lo, self.d.min(self.n))
    }

    pub fn in_support(&self, k: i64) -> bool {
        let (lo, hi) = self.support();
        k >= lo as i64 && k <= hi as i64
    }

    /// Swap the roles of `n` and `D`; the pmf is symmetric under this map.
    pub fn transposed(&self) -> Result<Self> {
        HGParams::new(self.d, self.n, self.pop)
    }
}

impl fmt::Display for HGParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "hg(n={},D={},N={})", self.n, self.d, self.pop)
    }
}

/// Deviation on the standardized scale of the event `sqrt(n) (mean - mu) >= lambda`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Deviation {
    pub lambda: f64,
}

impl Deviation {
    pub fn new(lambda: f64) -> Self {
        Deviation { lambda }
    }

    /// Deviation of the sum, `t = sqrt(n) lambda`.
    pub fn sum_scale(&self, n: u64) -> f64 {
        (n as f64).sqrt() * self.lambda
    }

    /// Smallest integer `k0 >= n mu + sqrt(n) lambda`.
    ///
    /// Values within `1e-9` (relative) of an integer snap to that integer so that
    /// `threshold(standardize(k)) == k` survives floating rounding. Snapping can
    /// only lower `k0`, which enlarges the tail it selects.
    pub fn threshold(&self, params: &HGParams) -> i64 {
        let x = params.n as f64 * params.mu() + self.sum_scale(params.n);
        snap_ceil(x)
    }

    /// Largest integer `k <= n mu - sqrt(n) lambda`, with the mirror snapping rule.
    pub fn lower_threshold(&self, params: &HGParams) -> i64 {
        let x = params.n as f64 * params.mu() - self.sum_scale(params.n);
        -snap_ceil(-x)
    }
}

pub(crate) fn snap_ceil(x: f64) -> i64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r as i64
    } else {
        x.ceil() as i64
    }
}

/// Convert an in-support count `k` to its standardized deviation
/// `lambda = (k - n mu) / sqrt(n)`.
pub fn standardize(params: &HGParams, k: i64) -> Result<Deviation> {
    if !params.in_support(k) {
        let (lo, hi) = params.support();
        return Err(Error::Support { k, lo, hi });
    }
    // (k N - n D) / N is exact in integers before the single division.
    let numer = k as f64 * params.pop as f64 - (params.n * params.d) as f64;
    let lambda = numer / params.pop as f64 / (params.n as f64).sqrt();
    Ok(Deviation { lambda })
}

/// A finite population of reals with cached summary statistics.
///
/// When built from rationals the exact values are retained so that
/// majorization and enumeration can run without rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    values: Vec<f64>,
    exact: Option<Vec<BigRational>>,
    min: f64,
    max: f64,
    mean: f64,
    variance: f64,
    sup_dev: f64,
}

impl Population {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("population must contain at least one element"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("population element {v} is not finite")));
        }
        Ok(Self::with_cache(values, None))
    }

    pub fn from_rationals(values: Vec<BigRational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("population must contain at least one element"));
        }
        let floats = values.iter().map(rational_to_f64).collect();
        Ok(Self::with_cache(floats, Some(values)))
    }

    /// `ones` copies of 1 followed by `zeros` copies of 0.
    pub fn binary(ones: u64, zeros: u64) -> Result<Self> {
        let one = BigRational::from_integer(1.into());
        let zero = BigRational::zero();
        let mut v = Vec::with_capacity((ones + zeros) as usize);
        v.extend(std::iter::repeat_n(one, ones as usize));
        v.extend(std::iter::repeat_n(zero, zeros as usize));
        Self::from_rationals(v)
    }

    /// The population underlying a hypergeometric scenario.
    pub fn from_hg(params: &HGParams) -> Self {
        Self::binary(params.d(), params.big_n() - params.d()).expect("N >= 1")
    }

    fn with_cache(values: Vec<f64>, exact: Option<Vec<BigRational>>) -> Self {
        let len = values.len() as f64;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for &v in &values {
            min = min.min(v);
            max = max.max(v);
            sum += v;
        }
        let mean = (sum / len).clamp(min, max);
        let mut ss = 0.0;
        let mut sup_dev: f64 = 0.0;
        for &v in &values {
            let d = v - mean;
            ss += d * d;
            sup_dev = sup_dev.max(d.abs());
        }
        Population { values, exact, min, max, mean, variance: ss / len, sup_dev }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Exact values, when the population was built from rationals.
    pub fn exact(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    /// Exact values, converting floats exactly when no rationals were given.
    pub fn to_rationals(&self) -> Vec<BigRational> {
        match &self.exact {
            Some(v) => v.clone(),
            None => self
                .values
                .iter()
                .map(|&x| BigRational::from_float(x).expect("finite by construction"))
                .collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    /// `b - a`.
    pub fn range(&self) -> f64 {
        self.max - self.min
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Population variance with divisor `N`.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// `max_j |c_j - mean|`.
    pub fn sup_dev(&self) -> f64 {
        self.sup_dev
    }

    pub fn exact_mean(&self) -> BigRational {
        let v = self.to_rationals();
        let sum: BigRational = v.iter().sum();
        sum / BigInt::from(v.len())
    }

    /// The population mapped affinely onto `[0, 1]`: `(c - a) / (b - a)`.
    pub fn shifted_scaled(&self) -> Result<Population> {
        if self.max <= self.min {
            return Err(Error::domain("degenerate population (b = a) cannot be rescaled to [0,1]"));
        }
        match &self.exact {
            Some(ex) => {
                let a = ex.iter().min().cloned().expect("non-empty");
                let b = ex.iter().max().cloned().expect("non-empty");
                let w = &b - &a;
                Population::from_rationals(ex.iter().map(|c| (c - &a) / &w).collect())
            }
            None => {
                let (a, w) = (self.min, self.range());
                let v = self.values.iter().map(|&c| ((c - a) / w).clamp(0.0, 1.0)).collect();
                Population::new(v)
            }
        }
    }

    pub fn within_unit_interval(&self) -> bool {
        self.min >= 0.0 && self.max <= 1.0
    }
}

/// Result of evaluating a bound: raw formula value, clamped value and the
/// verdict of the theorem's hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundValue {
    pub raw: f64,
    pub clamped: f64,
    pub domain_ok: bool,
    pub domain_msg: String,
}

impl BoundValue {
    pub fn new(raw: f64, violations: Vec<String>) -> Self {
        let domain_ok = violations.is_empty();
        let clamped = if raw.is_nan() { raw } else { raw.min(1.0) };
        BoundValue { raw, clamped, domain_ok, domain_msg: violations.join("; ") }
    }

    pub fn valid(raw: f64) -> Self {
        Self::new(raw, Vec::new())
    }
}

/// An exact probability with a floating-point shadow.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactProb {
    value: BigRational,
    float_shadow: f64,
}

impl ExactProb {
    pub fn new(value: BigRational) -> Self {
        debug_assert!(!value.is_negative());
        let float_shadow = rational_to_f64(&value);
        ExactProb { value, float_shadow }
    }

    pub fn from_parts(num: BigUint, den: BigUint) -> Self {
        Self::new(BigRational::new(num.into(), den.into()))
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::new(BigRational::from_integer(1.into()))
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn num(&self) -> &BigInt {
        self.value.numer()
    }

    pub fn den(&self) -> &BigInt {
        self.value.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.float_shadow
    }
}

impl fmt::Display for ExactProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.value.numer(), self.value.denom())
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn params_reject_bad_shapes() {
        assert!(HGParams::new(0, 1, 5).is_err());
        assert!(HGParams::new(6, 1, 5).is_err());
        assert!(HGParams::new(2, 6, 5).is_err());
        assert!(HGParams::new(1, 0, 1).is_ok());
    }

    #[test]
    fn derived_quantities() {
        let p = HGParams::new(100, 200, 2001).unwrap();
        assert_eq!(p.support(), (0, 100));
        assert!((p.f_star() - 99.0 / 2001.0).abs() < 1e-16);
        assert!((p.f_n() - 99.0 / 2000.0).abs() < 1e-16);
        let p = HGParams::new(8, 7, 10).unwrap();
        assert_eq!(p.support(), (5, 7));
    }

    #[test]
    fn standardize_examples() {
        let p = HGParams::new(100, 200, 2001).unwrap();
        // (10 - 20000/2001)/10 = 1/2001 / ... computed as an exact rational
        let exact = |k: i64| {
            let r = (rat(k, 1) - rat(20000, 2001)) / rat(10, 1);
            rational_to_f64(&r)
        };
        let l10 = standardize(&p, 10).unwrap().lambda;
        assert!((l10 - exact(10)).abs() < 1e-15);
        assert!((l10 - 0.0005).abs() < 1e-6);
        let l20 = standardize(&p, 20).unwrap().lambda;
        assert!((l20 - exact(20)).abs() < 1e-14);
        assert!((l20 - 1.0005).abs() < 1e-4);

        let q = HGParams::new(4, 2, 4).unwrap();
        assert_eq!(standardize(&q, 2).unwrap().lambda, 0.0);
        assert!(matches!(standardize(&q, 3), Err(Error::Support { .. })));
    }

    #[test]
    fn standardize_round_trip_exhaustive() {
        for big_n in 1..=60u64 {
            for n in 1..=big_n {
                for d in 0..=big_n {
                    let p = HGParams::new(n, d, big_n).unwrap();
                    let (lo, hi) = p.support();
                    for k in lo..=hi {
                        if (k * big_n) < n * d {
                            continue;
                        }
                        let dev = standardize(&p, k as i64).unwrap();
                        assert_eq!(dev.threshold(&p), k as i64, "{p} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn population_statistics() {
        let pop = Population::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(pop.mean(), 1.5);
        assert_eq!(pop.variance(), 1.25);
        assert_eq!(pop.sup_dev(), 1.5);
        assert_eq!(pop.range(), 3.0);
        let degenerate = Population::new(vec![2.0; 5]).unwrap();
        assert_eq!(degenerate.variance(), 0.0);
        assert!(degenerate.shifted_scaled().is_err());
        assert!(Population::new(vec![]).is_err());
        assert!(Population::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn exact_population_rescaling_stays_exact() {
        let pop = Population::from_rationals((1..=5).map(|i| rat(i, 1)).collect()).unwrap();
        let d = pop.shifted_scaled().unwrap();
        let ex = d.exact().unwrap();
        assert_eq!(ex[0], BigRational::zero());
        assert_eq!(ex[1], rat(1, 4));
        assert_eq!(ex[4], BigRational::one());
    }

    #[test]
    fn bound_value_clamps() {
        let v = BoundValue::new(2.5, vec!["x".into()]);
        assert_eq!(v.clamped, 1.0);
        assert!(!v.domain_ok);
        assert_eq!(v.domain_msg, "x");
        let v = BoundValue::valid(0.25);
        assert_eq!(v.clamped, 0.25);
        assert!(v.domain_ok);
    }

    #[test]
    fn exact_prob_shadow_is_tight() {
        let p = ExactProb::new(rat(1, 3));
        assert_eq!(p.to_string(), "1/3");
        assert!((p.to_f64() - 1.0 / 3.0).abs() <= f64::EPSILON);
        let tiny = ExactProb::new(BigRational::new(
            BigInt::one(),
            num_traits::pow(BigInt::from(10), 300),
        ));
        assert!((tiny.to_f64() / 1e-300 - 1.0).abs() < 2f64.powi(-48));
    }
}
