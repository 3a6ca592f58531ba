//! Majorization of populations on `[0, 1]` by hypergeometric populations.
//!
//! Kemperman's single left-to-right pass turns any population on `[0, 1]`
//! into one of 0s, 1s and at most one exceptional element that majorizes it;
//! rounding that element up gives a 0/1 population that sub-majorizes it.
//! Convex-order consequences are checked by exact subset enumeration, and the
//! Cramér–Chernoff bound for general populations is exposed with both the
//! optimal and the simplified exponent choice.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::binomial;
use crate::kernels::psi;
use crate::par::Execution;
use crate::types::{rational_to_f64, BoundValue, Population};

/// Absolute tolerance for float populations, where exact identities only
/// hold up to accumulated rounding.
pub const FLOAT_TOL: f64 = 1e-9;

/// Largest population accepted by the enumeration verifier.
pub const MAX_ENUMERATION_N: usize = 15;

/// `N` times the mean of a population on `[0, 1]`, with its integer rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitMass {
    /// `sum_i d_i` as a double.
    pub total: f64,
    /// The exact sum when the population carries rationals.
    pub exact: Option<BigRational>,
    /// `floor(N mean)`.
    pub floor: u64,
    /// `ceil(N mean)`.
    pub ceil: u64,
    /// Whether `N mean` is an integer (exactly, or within [`FLOAT_TOL`] for floats).
    pub integral: bool,
}

pub fn unit_mass(d: &Population) -> UnitMass {
    match d.exact() {
        Some(ex) => mass_from_rational(ex.iter().sum()),
        None => mass_from_float(d.values().iter().sum()),
    }
}

/// [`unit_mass`] of the population rescaled to `[0, 1]`, without
/// materializing the rescaled values: `sum_i (c_i - a) / (b - a)`.
pub(crate) fn scaled_unit_mass(pop: &Population) -> Result<UnitMass> {
    if pop.range() <= 0.0 {
        return Err(Error::domain("degenerate population (b = a) cannot be rescaled to [0,1]"));
    }
    Ok(match pop.exact() {
        Some(ex) => {
            let a = ex.iter().min().expect("non-empty");
            let w = ex.iter().max().expect("non-empty") - a;
            let sum: BigRational = ex.iter().sum();
            mass_from_rational((sum - a * BigRational::from_integer(BigInt::from(ex.len()))) / w)
        }
        None => mass_from_float(pop.len() as f64 * (pop.mean() - pop.min()) / pop.range()),
    })
}

fn mass_from_rational(sum: BigRational) -> UnitMass {
    let floor = sum.floor().to_integer().to_u64().unwrap_or(0);
    let ceil = sum.ceil().to_integer().to_u64().unwrap_or(0);
    UnitMass { total: rational_to_f64(&sum), integral: sum.is_integer(), exact: Some(sum), floor, ceil }
}

fn mass_from_float(total: f64) -> UnitMass {
    let r = total.round();
    if (total - r).abs() <= FLOAT_TOL * r.abs().max(1.0) {
        UnitMass { total, exact: None, floor: r as u64, ceil: r as u64, integral: true }
    } else {
        UnitMass { total, exact: None, floor: total.floor() as u64, ceil: total.ceil() as u64, integral: false }
    }
}

/// Output of Kemperman's pass.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorizationResult {
    /// The transformed population, in the input's index order.
    pub output: Population,
    pub ones: usize,
    pub zeros: usize,
    /// Value and index of the single element strictly between 0 and 1.
    pub exceptional: Option<(f64, usize)>,
    /// Exact value of the exceptional element for rational inputs.
    pub exceptional_exact: Option<BigRational>,
    /// `floor(N mean)`.
    pub d_major: u64,
    /// `N mean - d_major`.
    pub alpha: f64,
}

/// Output of sub-majorization: a 0/1 population.
#[derive(Debug, Clone, PartialEq)]
pub struct SubMajorization {
    pub output: Population,
    pub ones: usize,
    pub zeros: usize,
}

/// Arithmetic needed by the pairwise pass.
trait Mass: Clone {
    fn mass_zero() -> Self;
    fn mass_one() -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus_one(&self) -> Self;
    fn exceeds_one(&self) -> bool;
}

impl Mass for f64 {
    fn mass_zero() -> Self {
        0.0
    }
    fn mass_one() -> Self {
        1.0
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus_one(&self) -> Self {
        self - 1.0
    }
    fn exceeds_one(&self) -> bool {
        *self > 1.0
    }
}

impl Mass for BigRational {
    fn mass_zero() -> Self {
        Zero::zero()
    }
    fn mass_one() -> Self {
        One::one()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus_one(&self) -> Self {
        self - BigRational::one()
    }
    fn exceeds_one(&self) -> bool {
        *self > BigRational::one()
    }
}

/// One left-to-right pass over adjacent pairs in stored order: the pair
/// `(m_i, m_{i+1})` becomes `(1, csum - 1)` if `csum > 1`, else `(0, csum)`.
fn kemperman_pass<T: Mass>(mut m: Vec<T>) -> Vec<T> {
    for i in 0..m.len().saturating_sub(1) {
        let csum = m[i].plus(&m[i + 1]);
        if csum.exceeds_one() {
            m[i] = T::mass_one();
            m[i + 1] = csum.minus_one();
        } else {
            m[i] = T::mass_zero();
            m[i + 1] = csum;
        }
    }
    m
}

fn check_unit(x: &Population) -> Result<()> {
    let bad = match x.exact() {
        Some(ex) => ex.iter().any(|v| v.is_negative() || *v > BigRational::one()),
        None => !x.within_unit_interval(),
    };
    if bad {
        return Err(Error::domain("majorization needs every element in [0, 1]"));
    }
    Ok(())
}

/// Kemperman's majorization: 0s, 1s and at most one exceptional element
/// (always the last position), majorizing `x`.
///
/// Float inputs snap a final element within [`FLOAT_TOL`] of 0 or 1 to it.
pub fn kemperman_majorize(x: &Population) -> Result<MajorizationResult> {
    check_unit(x)?;
    let last = x.len() - 1;
    let mass = unit_mass(x);
    let (output, exceptional_exact) = match x.exact() {
        Some(ex) => {
            let m = kemperman_pass(ex.to_vec());
            let tail = m[last].clone();
            let exc = (!tail.is_zero() && !tail.is_one()).then_some(tail);
            (Population::from_rationals(m)?, exc)
        }
        None => {
            let mut m = kemperman_pass(x.values().to_vec());
            if m[last] <= FLOAT_TOL {
                m[last] = 0.0;
            } else if m[last] >= 1.0 - FLOAT_TOL {
                m[last] = 1.0;
            }
            (Population::new(m)?, None)
        }
    };
    let tail = output.values()[last];
    let exceptional = (tail > 0.0 && tail < 1.0).then_some((tail, last));
    let ones = output.values().iter().filter(|&&v| v == 1.0).count();
    let zeros = output.values().iter().filter(|&&v| v == 0.0).count();
    let alpha = match &mass.exact {
        Some(s) => rational_to_f64(&(s - BigRational::from_integer(BigInt::from(mass.floor)))),
        None if mass.integral => 0.0,
        None => mass.total - mass.floor as f64,
    };
    Ok(MajorizationResult { output, ones, zeros, exceptional, exceptional_exact, d_major: mass.floor, alpha })
}

/// Kemperman's majorization with the exceptional element rounded up to 1.
pub fn sub_majorize(x: &Population) -> Result<SubMajorization> {
    let maj = kemperman_majorize(x)?;
    let bits: Vec<bool> = maj.output.values().iter().map(|&v| v > 0.0).collect();
    let ones = bits.iter().filter(|&&b| b).count();
    let values = bits.iter().map(|&b| if b { BigRational::one() } else { BigRational::zero() }).collect();
    Ok(SubMajorization { output: Population::from_rationals(values)?, ones, zeros: x.len() - ones })
}

fn sorted_desc_exact(p: &Population) -> Vec<BigRational> {
    let mut v = p.to_rationals();
    v.sort_by(|a, b| b.cmp(a));
    v
}

fn sorted_desc_f64(p: &Population) -> Vec<f64> {
    let mut v = p.values().to_vec();
    v.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    v
}

/// Sign pattern of prefix-sum differences `sum y - sum x` over descending sorts.
/// Returns (all proper prefixes dominate, totals equal, total dominates).
fn prefix_compare(x: &Population, y: &Population) -> Result<(bool, bool, bool)> {
    if x.len() != y.len() {
        return Err(Error::usage(format!("order comparison needs equal lengths; got {} and {}", x.len(), y.len())));
    }
    let n = x.len();
    if x.exact().is_some() && y.exact().is_some() {
        let (xs, ys) = (sorted_desc_exact(x), sorted_desc_exact(y));
        let mut diff = BigRational::zero();
        let mut prefixes = true;
        for i in 0..n {
            diff += &ys[i] - &xs[i];
            if i + 1 < n && diff.is_negative() {
                prefixes = false;
            }
        }
        Ok((prefixes, diff.is_zero(), !diff.is_negative()))
    } else {
        let (xs, ys) = (sorted_desc_f64(x), sorted_desc_f64(y));
        let scale = xs.iter().chain(&ys).fold(1.0f64, |m, v| m.max(v.abs())) * n as f64;
        let tol = FLOAT_TOL * scale;
        let mut diff = 0.0;
        let mut prefixes = true;
        for i in 0..n {
            diff += ys[i] - xs[i];
            if i + 1 < n && diff < -tol {
                prefixes = false;
            }
        }
        Ok((prefixes, diff.abs() <= tol, diff >= -tol))
    }
}

/// `x ≺ y`: every proper prefix of `y`'s descending sort dominates `x`'s,
/// and the totals agree. Exact when both populations carry rationals.
pub fn prec(x: &Population, y: &Population) -> Result<bool> {
    let (prefixes, equal, _) = prefix_compare(x, y)?;
    Ok(prefixes && equal)
}

/// `x ≺_w y`: every prefix, including the full sum, dominates.
pub fn prec_w(x: &Population, y: &Population) -> Result<bool> {
    let (prefixes, _, total) = prefix_compare(x, y)?;
    Ok(prefixes && total)
}

/// Convex test functions applied to the sample sum `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phi {
    /// `exp(r s)`.
    Exp(f64),
    /// `max(s - c_j, 0)` with `c_j = n lo + (j/8) n (hi - lo)` over the
    /// pooled range `[lo, hi]` of both populations.
    Hinge(u8),
    /// `s^2`.
    Square,
}

impl fmt::Display for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phi::Exp(r) => write!(f, "exp({r}s)"),
            Phi::Hinge(j) => write!(f, "hinge(j={j})"),
            Phi::Square => write!(f, "s^2"),
        }
    }
}

/// Which test functions to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConvexFamily {
    /// Exponentials and hinges: convex and increasing everywhere.
    Increasing,
    /// Exponentials, hinges and the square.
    #[default]
    Full,
}

pub const EXP_RATES: [f64; 4] = [0.25, 0.5, 1.0, 2.0];

/// Relative slack allowed when comparing floating exponential moments.
pub const EXP_REL_TOL: f64 = 1e-12;

impl ConvexFamily {
    pub fn members(self) -> Vec<Phi> {
        let mut v: Vec<Phi> = EXP_RATES.iter().map(|&r| Phi::Exp(r)).collect();
        v.extend((0..=8).map(Phi::Hinge));
        if self == ConvexFamily::Full {
            v.push(Phi::Square);
        }
        v
    }
}

/// One failed inequality `E phi(sum X) <= E phi(sum Y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexViolation {
    pub n: usize,
    pub phi: Phi,
    pub lhs: f64,
    pub rhs: f64,
}

impl fmt::Display for ConvexViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} phi={}: E phi(X) = {} > E phi(Y) = {}", self.n, self.phi, self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvexOrderReport {
    /// Number of (n, phi) inequalities checked.
    pub checked: usize,
    pub violations: Vec<ConvexViolation>,
}

impl ConvexOrderReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Subset sums of a population scaled to integers, indexed by bitmask.
fn subset_sums(vals: &[BigInt]) -> Vec<BigInt> {
    let mut sums = vec![BigInt::zero(); 1 << vals.len()];
    for mask in 1usize..sums.len() {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = &sums[mask & (mask - 1)] + &vals[low];
    }
    sums
}

/// Check `E phi(sum X) <= E phi(sum Y)` for samples of size `n` drawn without
/// replacement from `x` and `y`, by enumerating every subset. Passing `None`
/// checks every `n` from 1 to `N`.
pub fn verify_convex_order(
    x: &Population,
    y: &Population,
    n: Option<usize>,
    family: ConvexFamily,
) -> Result<ConvexOrderReport> {
    let big_n = x.len();
    if y.len() != big_n {
        return Err(Error::usage(format!("convex order needs equal lengths; got {} and {}", big_n, y.len())));
    }
    if big_n > MAX_ENUMERATION_N {
        return Err(Error::usage(format!("enumeration limited to N <= {MAX_ENUMERATION_N}; got {big_n}")));
    }
    let sizes: Vec<usize> = match n {
        Some(k) if k == 0 || k > big_n => {
            return Err(Error::usage(format!("sample size must satisfy 1 <= n <= N = {big_n}; got {k}")))
        }
        Some(k) => vec![k],
        None => (1..=big_n).collect(),
    };

    // Scale both populations to integers over a common denominator.
    let (xr, yr) = (x.to_rationals(), y.to_rationals());
    let denom = xr.iter().chain(&yr).fold(BigInt::one(), |l, v| l.lcm(v.denom()));
    let scale = |v: &BigRational| (v * BigRational::from_integer(denom.clone())).to_integer();
    let xi: Vec<BigInt> = xr.iter().map(scale).collect();
    let yi: Vec<BigInt> = yr.iter().map(scale).collect();
    let lo = xi.iter().chain(&yi).min().cloned().expect("non-empty");
    let hi = xi.iter().chain(&yi).max().cloned().expect("non-empty");
    let (xs, ys) = (subset_sums(&xi), subset_sums(&yi));
    let to_float = |s: &[BigInt]| -> Vec<f64> { s.iter().map(|v| rational_to_f64(&BigRational::new(v.clone(), denom.clone()))).collect() };
    let (xf, yf) = (to_float(&xs), to_float(&ys));

    let mut report = ConvexOrderReport::default();
    for &k in &sizes {
        let masks: Vec<usize> = (0..xs.len()).filter(|m| m.count_ones() as usize == k).collect();
        let count = binomial(big_n as u64, k as u64);
        let count_f = count.to_f64().unwrap_or(f64::INFINITY);
        let kk = BigInt::from(k);
        for phi in family.members() {
            report.checked += 1;
            let violation = match phi {
                Phi::Exp(r) => {
                    let mean = |s: &[f64]| masks.iter().map(|&m| (r * s[m]).exp()).sum::<f64>() / count_f;
                    let (l, rr) = (mean(&xf), mean(&yf));
                    (l > rr * (1.0 + EXP_REL_TOL)).then_some((l, rr))
                }
                Phi::Hinge(j) => {
                    // 8 s - 8 c_j = 8 s - 8 n lo - j n (hi - lo), all integers after scaling.
                    let c8 = BigInt::from(8) * &kk * &lo + BigInt::from(j) * &kk * (&hi - &lo);
                    let total = |s: &[BigInt]| {
                        masks.iter().fold(BigInt::zero(), |acc, &m| {
                            let v = BigInt::from(8) * &s[m] - &c8;
                            if v.is_positive() {
                                acc + v
                            } else {
                                acc
                            }
                        })
                    };
                    let (l, rr) = (total(&xs), total(&ys));
                    let to_mean = |t: &BigInt| rational_to_f64(&BigRational::new(t.clone(), BigInt::from(8) * &denom)) / count_f;
                    (l > rr).then(|| (to_mean(&l), to_mean(&rr)))
                }
                Phi::Square => {
                    let total = |s: &[BigInt]| masks.iter().fold(BigInt::zero(), |acc, &m| acc + &s[m] * &s[m]);
                    let (l, rr) = (total(&xs), total(&ys));
                    let to_mean = |t: &BigInt| rational_to_f64(&BigRational::new(t.clone(), &denom * &denom)) / count_f;
                    (l > rr).then(|| (to_mean(&l), to_mean(&rr)))
                }
            };
            if let Some((lhs, rhs)) = violation {
                report.violations.push(ConvexViolation { n: k, phi, lhs, rhs });
            }
        }
    }
    Ok(report)
}

/// Run [`verify_convex_order`] over many pairs, optionally in parallel.
pub fn verify_convex_order_batch(
    pairs: Vec<(Population, Population)>,
    family: ConvexFamily,
    exec: Execution,
) -> Vec<Result<ConvexOrderReport>> {
    exec.map(pairs, |(x, y)| verify_convex_order(&x, &y, None, family))
}

/// Exponent choice in the Cramér–Chernoff bound for general populations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RChoice {
    /// `r* = log(1 + (N t - n)/(n N gamma^2))`, clipped at 0.
    Optimal,
    /// `r2 = log(1 + t/(n gamma^2))`, which reproduces the closed-form
    /// sub-majorization bound.
    R2,
}

/// Sub-majorization setup shared with the bound registry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SubMajorSetup {
    pub big_n: u64,
    pub d_sub: u64,
    pub range: f64,
    /// `sigma^2 (1 - f_n)` of the sub-majorizing 0/1 population.
    pub gamma2: f64,
}

/// Hypotheses of the sub-majorization route: `mean(d) + 1/N <= 1/2` and
/// `n <= min(D, N - D)` with `D = ceil(N mean(d))`.
pub(crate) fn submajor_setup(pop: &Population, n: u64, violations: &mut Vec<String>) -> Result<SubMajorSetup> {
    let big_n = pop.len() as u64;
    let mass = scaled_unit_mass(pop)?;
    let mean_ok = match &mass.exact {
        Some(s) => BigRational::from_integer(BigInt::from(2)) * (s + BigRational::one()) <= BigRational::from_integer(BigInt::from(big_n)),
        None => 2.0 * (mass.total + 1.0) <= big_n as f64 + FLOAT_TOL,
    };
    if !mean_ok {
        violations.push(format!("sub-majorization needs mean(d) + 1/N <= 1/2; N mean(d) = {}", mass.total));
    }
    let d_sub = mass.ceil;
    if n == 0 || n > d_sub.min(big_n - d_sub) {
        violations.push(format!("needs 1 <= n <= min(D, N-D) with D = {d_sub}, N = {big_n}; got n = {n}"));
    }
    let mu = d_sub as f64 / big_n as f64;
    let f_n = if big_n < 2 { 0.0 } else { (n as f64 - 1.0) / (big_n as f64 - 1.0) };
    Ok(SubMajorSetup {
        big_n,
        d_sub,
        range: pop.range(),
        gamma2: mu * (1.0 - mu) * (1.0 - f_n),
    })
}

/// `(1 + v)^{n/N} exp(-(lambda^2 / (2 (b-a)^2 gamma^2)) psi(v))` with
/// `v = lambda / (sqrt(n) (b-a) gamma^2)`.
pub(crate) fn submajor_closed_form(s: &SubMajorSetup, n: u64, lambda: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(1.0);
    }
    if s.gamma2 <= 0.0 {
        return Err(Error::domain("sub-majorizing population has zero variance"));
    }
    let w = s.range;
    let v = lambda / ((n as f64).sqrt() * w * s.gamma2);
    let lead = (1.0 + v).powf(n as f64 / s.big_n as f64);
    Ok(lead * (-(lambda * lambda) / (2.0 * w * w * s.gamma2) * psi(v)).exp())
}

/// Cramér–Chernoff bound `exp(r n/N - r t + n gamma^2 (e^r - 1 - r))` for
/// sampling from a general population via its sub-majorizing 0/1 population,
/// with `t = sqrt(n) lambda / (b - a)` and `gamma^2 = sigma_N^2 (1 - f_n)`.
pub fn chernoff_submajor(pop: &Population, n: u64, lambda: f64, choice: RChoice) -> Result<BoundValue> {
    if !lambda.is_finite() {
        return Err(Error::usage(format!("lambda must be finite; got {lambda}")));
    }
    if lambda < 0.0 {
        return Err(Error::domain(format!("lambda must be >= 0; got {lambda}")));
    }
    if n == 0 || n as usize > pop.len() {
        return Err(Error::domain(format!("sample size n = {n} must satisfy 1 <= n <= N = {}", pop.len())));
    }
    let mut violations = Vec::new();
    let s = submajor_setup(pop, n, &mut violations)?;
    if s.gamma2 <= 0.0 {
        if lambda == 0.0 {
            return Ok(BoundValue::new(1.0, violations));
        }
        return Err(Error::domain("sub-majorizing population has zero variance"));
    }
    let nf = n as f64;
    let t = nf.sqrt() * lambda / s.range;
    let ng = nf * s.gamma2;
    let big_n = s.big_n as f64;
    let r = match choice {
        RChoice::Optimal => (1.0 + (big_n * t - nf) / (nf * big_n * s.gamma2)).ln().max(0.0),
        RChoice::R2 => (t / ng).ln_1p(),
    };
    let raw = (r * nf / big_n - r * t + ng * (r.exp_m1() - r)).exp();
    Ok(BoundValue::new(raw, violations))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn rats(v: &[(i64, i64)]) -> Population {
        Population::from_rationals(v.iter().map(|&(a, b)| q(a, b)).collect()).unwrap()
    }

    fn figure_population() -> Population {
        Population::from_rationals((0..=14).map(|i| q(i, 14)).collect()).unwrap()
    }

    #[test]
    fn prec_examples() {
        let x = rats(&[(1, 2), (1, 2)]);
        assert!(prec(&x, &x).unwrap());
        assert!(prec(&x, &rats(&[(1, 1), (0, 1)])).unwrap());
        let y = rats(&[(1, 1), (1, 1)]);
        assert!(!prec(&x, &y).unwrap());
        assert!(prec_w(&x, &y).unwrap());
        assert!(!prec_w(&y, &x).unwrap());
        assert!(matches!(prec(&x, &rats(&[(1, 1)])), Err(Error::Usage(_))));
        // float path
        let xf = Population::new(vec![0.5, 0.5]).unwrap();
        assert!(prec(&xf, &Population::new(vec![0.0, 1.0]).unwrap()).unwrap());
    }

    #[test]
    fn figure_population_fixture() {
        let r = kemperman_majorize(&figure_population()).unwrap();
        assert_eq!((r.ones, r.zeros), (7, 7));
        assert_eq!(r.exceptional_exact, Some(q(1, 2)));
        assert_eq!(r.exceptional, Some((0.5, 14)));
        assert_eq!(r.d_major, 7);
        assert_eq!(r.alpha, 0.5);
        let s = sub_majorize(&figure_population()).unwrap();
        assert_eq!((s.ones, s.zeros), (8, 7));
    }

    #[test]
    fn csum_of_exactly_one_takes_the_else_branch() {
        let r = kemperman_majorize(&rats(&[(1, 2), (1, 2)])).unwrap();
        assert_eq!(r.output.exact().unwrap(), &[q(0, 1), q(1, 1)]);
        assert_eq!(r.exceptional, None);
        assert_eq!((r.ones, r.zeros), (1, 1));
    }

    #[test]
    fn binary_populations_are_fixed_up_to_order() {
        let x = rats(&[(1, 1), (0, 1), (1, 1), (1, 1), (0, 1)]);
        let r = kemperman_majorize(&x).unwrap();
        assert_eq!((r.ones, r.zeros, r.exceptional), (3, 2, None));
        let s = sub_majorize(&x).unwrap();
        assert_eq!((s.ones, s.zeros), (3, 2));
    }

    #[test]
    fn out_of_range_elements_are_rejected() {
        assert!(matches!(kemperman_majorize(&Population::new(vec![0.5, 1.5]).unwrap()), Err(Error::Domain(_))));
        assert!(matches!(sub_majorize(&rats(&[(-1, 3), (1, 3)])), Err(Error::Domain(_))));
    }

    #[test]
    fn convex_order_identity_and_figure() {
        let x = figure_population();
        let rep = verify_convex_order(&x, &x, None, ConvexFamily::Full).unwrap();
        assert!(rep.passed());
        let maj = kemperman_majorize(&x).unwrap().output;
        let sub = sub_majorize(&x).unwrap().output;
        assert!(verify_convex_order(&x, &maj, None, ConvexFamily::Full).unwrap().passed());
        assert!(verify_convex_order(&x, &sub, None, ConvexFamily::Full).unwrap().passed());
        // The reverse direction must fail somewhere.
        assert!(!verify_convex_order(&sub, &x, Some(3), ConvexFamily::Full).unwrap().passed());
        let too_big = Population::new(vec![0.5; 16]).unwrap();
        assert!(matches!(verify_convex_order(&too_big, &too_big, None, ConvexFamily::Full), Err(Error::Usage(_))));
        assert!(matches!(verify_convex_order(&x, &x, Some(0), ConvexFamily::Full), Err(Error::Usage(_))));
    }

    #[test]
    fn square_separates_majorization_from_sub_majorization() {
        // On negative values s^2 is decreasing, so raising an element (which
        // preserves weak sub-majorization) can lower E s^2.
        let x = rats(&[(-1, 4), (-1, 4), (1, 4)]);
        let y = rats(&[(-1, 2), (0, 1), (1, 4)]);
        assert!(prec(&x, &y).unwrap());
        assert!(verify_convex_order(&x, &y, None, ConvexFamily::Full).unwrap().passed());
        let x = rats(&[(-1, 2), (-1, 2)]);
        let z = rats(&[(0, 1), (-1, 2)]);
        assert!(prec_w(&x, &z).unwrap());
        let rep = verify_convex_order(&x, &z, None, ConvexFamily::Full).unwrap();
        assert!(rep.violations.iter().any(|v| v.phi == Phi::Square));
        assert!(verify_convex_order(&x, &z, None, ConvexFamily::Increasing).unwrap().passed());
    }

    #[test]
    fn chernoff_choices() {
        let pop = Population::new((0..40).map(|i| (i as f64 / 39.0).powi(3)).collect()).unwrap();
        let n = 3;
        let zero = chernoff_submajor(&pop, n, 0.0, RChoice::R2).unwrap();
        assert_eq!(zero.raw, 1.0);
        for lambda in [0.1, 0.5, 1.0] {
            let opt = chernoff_submajor(&pop, n, lambda, RChoice::Optimal).unwrap();
            let r2 = chernoff_submajor(&pop, n, lambda, RChoice::R2).unwrap();
            assert!(opt.raw <= r2.raw * (1.0 + 1e-14));
            let mut v = Vec::new();
            let s = submajor_setup(&pop, n, &mut v).unwrap();
            let closed = submajor_closed_form(&s, n, lambda).unwrap();
            assert!((closed - r2.raw).abs() <= 1e-12 * closed, "{closed} vs {}", r2.raw);
        }
    }
}
