//! Exact probabilities: hypergeometric and binomial pmfs and tails as
//! rationals, the total-variation gap between them, and the decomposition of
//! the hypergeometric count into independent Bernoulli draws.
//!
//! Everything here runs on arbitrary-precision integers so that dominance
//! checks downstream compare against values free of rounding doubt.

pub mod roots;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::types::{rational_to_f64, ExactProb, HGParams};

pub use roots::{nonpositive_roots, IntPoly};

/// Largest sample size accepted by [`bernoulli_decomposition`].
pub const MAX_DECOMPOSITION_N: u64 = 30;

/// Width to which each pgf root is isolated.
const ROOT_TOL: f64 = 1e-14;

/// Exact binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Pascal's triangle up to a fixed row, for sweeps that need many
/// coefficients with small arguments.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    rows: Vec<Vec<BigUint>>,
}

impl BinomialTable {
    pub fn new(max_n: u64) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max_n as usize + 1);
        rows.push(vec![BigUint::one()]);
        for n in 1..=max_n as usize {
            let prev = &rows[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            row.push(BigUint::one());
            for k in 1..n {
                row.push(&prev[k - 1] + &prev[k]);
            }
            row.push(BigUint::one());
            rows.push(row);
        }
        BinomialTable { rows }
    }

    pub fn max_n(&self) -> u64 {
        self.rows.len() as u64 - 1
    }

    /// `C(n, k)`; falls back to direct computation beyond the table.
    pub fn get(&self, n: u64, k: u64) -> BigUint {
        if k > n {
            BigUint::zero()
        } else if n <= self.max_n() {
            self.rows[n as usize][k as usize].clone()
        } else {
            binomial(n, k)
        }
    }
}

/// `num / den` rounded to the nearest double (up to one ulp), without
/// building a reduced rational. Handles results far below `f64::MIN_POSITIVE`
/// by flushing through subnormals.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    // Scale so the integer quotient carries 64 significant bits.
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let q = if shift >= 0 { (num << shift as usize) / den } else { num / (den << (-shift) as usize) };
    ldexp(q.to_f64().unwrap_or(f64::INFINITY), -shift)
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// The full hypergeometric law of one scenario, stored as integer
/// numerators over the common denominator `C(N, n)`.
#[derive(Debug, Clone)]
pub struct HgDistribution {
    params: HGParams,
    lo: u64,
    /// `C(D, k) C(N-D, n-k)` for `k` in `lo..=hi`.
    numerators: Vec<BigUint>,
    /// `suffix[i] = sum_{j >= i} numerators[j]`, with a trailing zero.
    suffix: Vec<BigUint>,
    denom: BigUint,
}

impl HgDistribution {
    pub fn new(params: HGParams) -> Self {
        Self::build(params, binomial)
    }

    /// Same as [`HgDistribution::new`] but reading coefficients from a table.
    pub fn with_table(params: HGParams, table: &BinomialTable) -> Self {
        Self::build(params, |n, k| table.get(n, k))
    }

    fn build(params: HGParams, choose: impl Fn(u64, u64) -> BigUint) -> Self {
        let (n, d, pop) = (params.n(), params.d(), params.big_n());
        let (lo, hi) = params.support();
        let numerators: Vec<BigUint> = (lo..=hi).map(|k| choose(d, k) * choose(pop - d, n - k)).collect();
        let mut suffix = vec![BigUint::zero(); numerators.len() + 1];
        for i in (0..numerators.len()).rev() {
            suffix[i] = &suffix[i + 1] + &numerators[i];
        }
        let denom = choose(pop, n);
        debug_assert_eq!(suffix[0], denom, "Vandermonde identity");
        HgDistribution { params, lo, numerators, suffix, denom }
    }

    pub fn params(&self) -> &HGParams {
        &self.params
    }

    /// Inclusive support bounds.
    pub fn support(&self) -> (u64, u64) {
        (self.lo, self.lo + self.numerators.len() as u64 - 1)
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denom
    }

    fn index(&self, k: i64) -> Option<usize> {
        let (lo, hi) = self.support();
        (k >= lo as i64 && k <= hi as i64).then(|| (k - lo as i64) as usize)
    }

    /// Integer numerator of `P(S = k)` over [`Self::denominator`].
    pub fn pmf_numerator(&self, k: i64) -> BigUint {
        self.index(k).map_or_else(BigUint::zero, |i| self.numerators[i].clone())
    }

    /// Integer numerator of `P(S >= k)` over [`Self::denominator`].
    pub fn tail_numerator(&self, k: i64) -> BigUint {
        let (lo, hi) = self.support();
        if k <= lo as i64 {
            self.denom.clone()
        } else if k > hi as i64 {
            BigUint::zero()
        } else {
            self.suffix[(k - lo as i64) as usize].clone()
        }
    }

    pub fn pmf(&self, k: i64) -> ExactProb {
        ExactProb::from_parts(self.pmf_numerator(k), self.denom.clone())
    }

    pub fn tail(&self, k: i64) -> ExactProb {
        ExactProb::from_parts(self.tail_numerator(k), self.denom.clone())
    }

    pub fn pmf_f64(&self, k: i64) -> f64 {
        ratio_to_f64(&self.pmf_numerator(k), &self.denom)
    }

    pub fn tail_f64(&self, k: i64) -> f64 {
        ratio_to_f64(&self.tail_numerator(k), &self.denom)
    }

    /// `P(S <= k)` as a double.
    pub fn lower_tail_f64(&self, k: i64) -> f64 {
        let num = &self.denom - self.tail_numerator(k + 1);
        ratio_to_f64(&num, &self.denom)
    }

    /// `P(S >= k_hi or S <= k_lo)` as a double, with `k_lo < k_hi`.
    pub fn two_sided_f64(&self, k_lo: i64, k_hi: i64) -> f64 {
        let upper = self.tail_numerator(k_hi);
        let lower = &self.denom - self.tail_numerator(k_lo + 1);
        ratio_to_f64(&(upper + lower), &self.denom)
    }

    /// Exact probabilities for every `k` from 0 to `n`, as rationals.
    pub fn pmf_vector(&self) -> Vec<BigRational> {
        (0..=self.params.n() as i64).map(|k| self.pmf(k).value().clone()).collect()
    }
}

/// `P(S = k)`; zero outside the support.
pub fn hg_pmf(params: &HGParams, k: i64) -> ExactProb {
    HgDistribution::new(*params).pmf(k)
}

/// `P(S >= k)`; one at or below the support minimum.
pub fn hg_tail(params: &HGParams, k: i64) -> ExactProb {
    HgDistribution::new(*params).tail(k)
}

fn check_probability(p: &BigRational) -> Result<()> {
    if p.is_negative() || p > &BigRational::one() {
        return Err(Error::domain(format!("success probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Exact `C(n, k) p^k (1-p)^(n-k)` as integer numerator over `den^n`.
fn binom_terms(n: u64, p: &BigRational) -> (Vec<BigUint>, BigUint) {
    let pn = p.numer().to_biguint().expect("nonnegative");
    let pd = p.denom().to_biguint().expect("positive");
    let qn = &pd - &pn;
    let n = n as usize;
    // q_pows[j] = qn^j; walk k upward carrying C(n, k) pn^k.
    let mut q_pows = Vec::with_capacity(n + 1);
    q_pows.push(BigUint::one());
    for j in 0..n {
        let next = &q_pows[j] * &qn;
        q_pows.push(next);
    }
    let mut lead = BigUint::one();
    let mut nums = Vec::with_capacity(n + 1);
    for k in 0..=n {
        nums.push(&lead * &q_pows[n - k]);
        lead = lead * &pn * (n - k) / (k + 1);
    }
    (nums, num_traits::pow(pd, n))
}

/// Binomial pmf with an exact rational success probability.
pub fn binom_pmf(n: u64, p: &BigRational, k: i64) -> Result<ExactProb> {
    check_probability(p)?;
    if k < 0 || k > n as i64 {
        return Ok(ExactProb::zero());
    }
    let (nums, den) = binom_terms(n, p);
    Ok(ExactProb::from_parts(nums[k as usize].clone(), den))
}

/// Binomial upper tail `P(B >= k)`.
pub fn binom_tail(n: u64, p: &BigRational, k: i64) -> Result<ExactProb> {
    check_probability(p)?;
    let (nums, den) = binom_terms(n, p);
    let start = k.clamp(0, n as i64 + 1) as usize;
    let num: BigUint = nums[start.min(nums.len())..].iter().sum();
    Ok(ExactProb::from_parts(num, den))
}

/// Binomial law with all upper tails precomputed, for repeated queries.
#[derive(Debug, Clone)]
pub struct BinomialDistribution {
    n: u64,
    suffix: Vec<BigUint>,
    den: BigUint,
}

impl BinomialDistribution {
    pub fn new(n: u64, p: &BigRational) -> Result<Self> {
        check_probability(p)?;
        let (nums, den) = binom_terms(n, p);
        let mut suffix = vec![BigUint::zero(); nums.len() + 1];
        for i in (0..nums.len()).rev() {
            suffix[i] = &suffix[i + 1] + &nums[i];
        }
        Ok(BinomialDistribution { n, suffix, den })
    }

    pub fn tail_f64(&self, k: i64) -> f64 {
        let idx = k.clamp(0, self.n as i64 + 1) as usize;
        ratio_to_f64(&self.suffix[idx], &self.den)
    }

    pub fn pmf_f64(&self, k: i64) -> f64 {
        if k < 0 || k > self.n as i64 {
            return 0.0;
        }
        let k = k as usize;
        ratio_to_f64(&(&self.suffix[k] - &self.suffix[k + 1]), &self.den)
    }
}

/// Exact total-variation distance between the hypergeometric law and the
/// binomial law with the same success proportion `D/N`.
pub fn tv_distance(params: &HGParams) -> Result<ExactProb> {
    if params.big_n() < 2 {
        return Err(Error::domain("total variation comparison needs N >= 2"));
    }
    let p = BigRational::new(BigInt::from(params.d()), BigInt::from(params.big_n()));
    let hg = HgDistribution::new(*params);
    let (bin_nums, bin_den) = binom_terms(params.n(), &p);
    let bin_den = BigInt::from(bin_den);
    let hg_den = BigInt::from(hg.denominator().clone());
    let total: BigRational = (0..=params.n())
        .map(|k| {
            let a = BigRational::new(BigInt::from(hg.pmf_numerator(k as i64)), hg_den.clone());
            let b = BigRational::new(BigInt::from(bin_nums[k as usize].clone()), bin_den.clone());
            (a - b).abs()
        })
        .sum();
    Ok(ExactProb::new(total / BigRational::from_integer(BigInt::from(2))))
}

/// Ehm's upper bound on [`tv_distance`]:
/// `(n/(n+1)) (1 - mu^(n+1) - (1-mu)^(n+1)) (n-1)/(N-1)`.
pub fn ehm_tv_bound(params: &HGParams) -> Result<f64> {
    if params.big_n() < 2 {
        return Err(Error::domain("total variation comparison needs N >= 2"));
    }
    let n = params.n() as f64;
    let mu = params.mu();
    let e = params.n() as i32 + 1;
    Ok(n / (n + 1.0) * (1.0 - mu.powi(e) - (1.0 - mu).powi(e)) * params.f_n())
}

/// Probability generating function `sum_k P(S = k) z^k` of a hypergeometric count.
#[derive(Debug, Clone, PartialEq)]
pub struct PgfPolynomial {
    coeffs: Vec<BigRational>,
}

impl PgfPolynomial {
    pub fn from_hg(params: &HGParams) -> Self {
        PgfPolynomial { coeffs: HgDistribution::new(*params).pmf_vector() }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    /// Exact sum of the coefficients; equals one for a probability law.
    pub fn total(&self) -> BigRational {
        self.coeffs.iter().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    /// The same polynomial scaled to integer coefficients.
    pub fn to_int_poly(&self) -> IntPoly {
        let lcm = self.coeffs.iter().fold(BigInt::one(), |l, c| num_integer::Integer::lcm(&l, c.denom()));
        let scale = BigRational::from_integer(lcm);
        IntPoly::new(self.coeffs.iter().map(|c| (c * &scale).to_integer()).collect())
    }

    /// Real roots, ascending; all lie in `(-inf, 0]` for a hypergeometric pgf.
    pub fn roots(&self) -> Result<Vec<f64>> {
        nonpositive_roots(&self.to_int_poly(), ROOT_TOL)
    }

    pub fn eval_f64(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z + rational_to_f64(c))
    }
}

/// Success probabilities `pi_i` of independent Bernoulli draws whose sum has
/// the same law as the hypergeometric count, sorted descending.
///
/// They come from the pgf factorisation `prod (1 - pi_i + pi_i z)`: each
/// root `z_i <= 0` gives `pi_i = 1 / (1 - z_i)`.
pub fn bernoulli_decomposition(params: &HGParams) -> Result<Vec<f64>> {
    let (n, d, pop) = (params.n(), params.d(), params.big_n());
    if n > d.min(pop - d) {
        return Err(Error::domain(format!("decomposition needs n <= min(D, N-D); got n={n}, D={d}, N={pop}")));
    }
    if n > MAX_DECOMPOSITION_N {
        return Err(Error::domain(format!("decomposition limited to n <= {MAX_DECOMPOSITION_N}; got n={n}")));
    }
    let roots = PgfPolynomial::from_hg(params).roots()?;
    if roots.len() != n as usize {
        return Err(Error::Numeric(format!("isolated {} roots for a degree-{n} pgf", roots.len())));
    }
    let mut pis: Vec<f64> = roots.iter().map(|z| 1.0 / (1.0 - z)).collect();
    pis.sort_by(|a, b| b.partial_cmp(a).expect("finite probabilities"));
    Ok(pis)
}
