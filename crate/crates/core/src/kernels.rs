//! Building blocks of the hypergeometric tail proofs, each exposed so its
//! inequality can be checked numerically: Robbins' Stirling envelope,
//! Bennett's `h`/`psi`, the binomial rate function `Psi`, the pmf deviate
//! bound, the tail-ratio bound, the technical lemma, and the explicit
//! constants behind the Talagrand-type bounds.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};
use crate::exact::HgDistribution;
use crate::types::HGParams;

/// Robbins' bracket `sqrt(2 pi n) (n/e)^n e^{1/(12n+1)} <= n! <= sqrt(2 pi n) (n/e)^n e^{1/(12n)}`.
pub fn stirling_envelope(n: u64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::domain("Stirling envelope needs n >= 1"));
    }
    let x = n as f64;
    let core = (2.0 * PI * x).sqrt() * (x / E).powf(x);
    Ok((core * (1.0 / (12.0 * x + 1.0)).exp(), core * (1.0 / (12.0 * x)).exp()))
}

/// Bennett's `h(x) = x (ln x - 1) + 1` for `x >= 0`, with `h(0) = 1`.
pub fn h_bennett(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("h needs a nonnegative argument, got {x}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    Ok(x * (x.ln() - 1.0) + 1.0)
}

/// Bennett's `psi(v) = 2 h(1+v) / v^2` for `v >= 0`, with `psi(0) = 1`.
pub fn psi_bennett(v: f64) -> Result<f64> {
    if v.is_nan() || v < 0.0 {
        return Err(Error::domain(format!("psi needs a nonnegative argument, got {v}")));
    }
    Ok(psi(v))
}

/// Unchecked `psi` for callers that have already validated `v >= 0`.
pub(crate) fn psi(v: f64) -> f64 {
    if v == 0.0 {
        return 1.0;
    }
    if v.is_infinite() {
        return 0.0;
    }
    if v < 0.1 {
        // psi(v) = 2 sum_{k>=2} (-v)^(k-2) / (k (k-1)); avoids the cancellation in h(1+v).
        let mut sum = 0.0;
        let mut pow = 1.0;
        for k in 2..30u32 {
            let kf = k as f64;
            sum += pow / (kf * (kf - 1.0));
            pow *= -v;
        }
        return 2.0 * sum;
    }
    let h = (1.0 + v) * v.ln_1p() - v;
    2.0 * h / (v * v)
}

/// Binomial large-deviation rate
/// `Psi(u, mu) = (u+mu) ln((u+mu)/mu) + (1-u-mu) ln((1-u-mu)/(1-mu))`.
pub fn big_psi(u: f64, mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::domain(format!("Psi needs 0 < mu < 1, got mu = {mu}")));
    }
    if !(u >= 0.0 && u < 1.0 - mu) {
        return Err(Error::domain(format!("Psi needs 0 <= u < 1 - mu, got u = {u}, mu = {mu}")));
    }
    let x = u + mu;
    let rest = 1.0 - x;
    Ok(x * (x / mu).ln() + rest * (rest / (1.0 - mu)).ln())
}

/// Closed-form `d^2/du^2 Psi(u, mu) = 1 / ((u+mu)(1-u-mu))`.
pub fn big_psi_second_derivative(u: f64, mu: f64) -> Result<f64> {
    big_psi(u, mu)?;
    Ok(1.0 / ((u + mu) * (1.0 - u - mu)))
}

/// Upper bound on `P(S = k)` from the Stirling analysis, for
/// `1 <= n < D <= floor(N/2)`, `1 <= k <= n-1` and `k >= n D / N`:
///
/// `A exp(-(2nN/(N-n)) u^2) exp(-(n/3)(1 + n^3/(N-n)^3) u^4)` with `u = k/n - D/N`
/// and `A = sqrt(D (N-D) n (N-n) / (k (D-k) (n-k) (N-D-n+k) N)) / sqrt(2 pi)`.
pub fn pmf_deviate_bound(params: &HGParams, k: i64) -> Result<f64> {
    let (n, d, pop) = (params.n(), params.d(), params.big_n());
    if !(n < d && d <= pop / 2) {
        return Err(Error::domain(format!("deviate bound needs 1 <= n < D <= floor(N/2); got {params}")));
    }
    if k < 1 || k > n as i64 - 1 {
        return Err(Error::domain(format!("deviate bound needs 1 <= k <= n-1; got k = {k}")));
    }
    let k = k as u64;
    if (k as u128) * (pop as u128) < (n as u128) * (d as u128) {
        return Err(Error::domain(format!("deviate bound needs k >= nD/N; got k = {k} for {params}")));
    }
    let (nf, df, pf, kf) = (n as f64, d as f64, pop as f64, k as f64);
    let num = df * (pf - df) * nf * (pf - nf);
    let den = kf * (df - kf) * (nf - kf) * (pf - df - nf + kf) * pf;
    let prefactor = (num / den).sqrt() / (2.0 * PI).sqrt();
    let u = kf / nf - df / pf;
    let ratio = nf / (pf - nf);
    let quad = -2.0 * nf * pf / (pf - nf) * u * u;
    let quartic = -(nf / 3.0) * (1.0 + ratio.powi(3)) * u.powi(4);
    Ok(prefactor * quad.exp() * quartic.exp())
}

/// `P(S = k) k (N-D-n+k) / (N k - n D)`, an upper bound on `P(S >= k)` for
/// `k > n D / N` in the support (`N > 4`, `D <= N-1`).
pub fn tail_ratio_bound(params: &HGParams, k: i64) -> Result<f64> {
    tail_ratio_bound_with(&HgDistribution::new(*params), k)
}

/// [`tail_ratio_bound`] reusing a precomputed distribution.
pub fn tail_ratio_bound_with(dist: &HgDistribution, k: i64) -> Result<f64> {
    let params = dist.params();
    let (n, d, pop) = (params.n() as i128, params.d() as i128, params.big_n() as i128);
    if pop <= 4 || d > pop - 1 {
        return Err(Error::domain(format!("tail-ratio bound needs N > 4 and D <= N-1; got {params}")));
    }
    let k128 = k as i128;
    if pop * k128 - n * d <= 0 {
        return Err(Error::domain(format!("tail-ratio bound needs k > nD/N; got k = {k} for {params}")));
    }
    if !params.in_support(k) {
        let (lo, hi) = params.support();
        return Err(Error::Support { k, lo, hi });
    }
    let multiplier = (k128 * (pop - d - n + k128)) as f64 / (pop * k128 - n * d) as f64;
    Ok(dist.pmf_f64(k) * multiplier)
}

fn lemma_side(mu: f64, u: f64, gamma: f64) -> f64 {
    mu * (1.0 - mu) * (u + mu) * (gamma * (1.0 - mu) + u) / ((1.0 - u - mu) * (gamma * mu - u))
}

/// Gap `R - L` of the technical lemma, where
/// `L = mu (1-mu) (u+mu) (gamma (1-mu) + u) / ((1-u-mu) (gamma mu - u))`
/// and `R` is the same expression at `mu = 1/2`. Nonnegative on the lemma's box.
///
/// At `u = 1/2` the right side has a pole and the gap is `+inf`.
pub fn technical_lemma_gap(mu: f64, u: f64, gamma: f64, n: u64, pop: u64) -> Result<f64> {
    if pop <= 4 || n == 0 || 2 * n >= pop {
        return Err(Error::domain(format!("technical lemma needs N > 4 and 1 <= n < N/2; got n = {n}, N = {pop}")));
    }
    let mu_lo = (n + 1) as f64 / pop as f64;
    if !(mu >= mu_lo && mu <= 0.5) {
        return Err(Error::domain(format!("technical lemma needs mu in [{mu_lo}, 1/2]; got {mu}")));
    }
    if !(u > 0.0 && u <= 0.5) {
        return Err(Error::domain(format!("technical lemma needs u in (0, 1/2]; got {u}")));
    }
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(Error::domain(format!("technical lemma needs gamma > 1; got {gamma}")));
    }
    if mu == 0.5 {
        return Ok(0.0);
    }
    if u == 0.5 {
        return Ok(f64::INFINITY);
    }
    Ok(lemma_side(0.5, u, gamma) - lemma_side(mu, u, gamma))
}

/// Explicit constants of the Talagrand-type hypergeometric bounds, for
/// truncation parameters `mu0` (success proportion) and `psi0` (sampling
/// fraction), both in `(0, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TalagrandConstants {
    pub mu0: f64,
    pub psi0: f64,
    pub k_c1: f64,
    pub k_c2: f64,
    pub k_c3: f64,
    /// `max(k_c1, k_c2, k_c3)`.
    pub k1: f64,
    /// Upper bound on the exponent slope, `4/psi0 + (4/3)(1-psi0)^2/psi0^3`.
    pub v0: f64,
    /// `v0 / (1 - e^{-v0})`.
    pub k_ab: f64,
    /// `k1 k_ab / 2`.
    pub k2: f64,
}

pub fn talagrand_constants(mu0: f64, psi0: f64) -> Result<TalagrandConstants> {
    if !(mu0 > 0.0 && mu0 <= 0.5) || !(psi0 > 0.0 && psi0 <= 0.5) {
        return Err(Error::domain(format!("truncation parameters must lie in (0, 1/2]; got mu0 = {mu0}, psi0 = {psi0}")));
    }
    let k_c1 = (1.0 - psi0).sqrt() / (psi0 * (2.0 * PI * mu0.powi(4)).sqrt());
    let k_c2 = (0.25 * (1.0 - psi0) / (2.0 * PI * psi0 * psi0 * (1.0 - mu0 / 2.0).powi(2))).sqrt()
        * (192.0 / (mu0.powi(4) * E));
    let k_c3 = ((1.0 - mu0) * (1.0 - psi0) / psi0).sqrt() * (5.0 / (mu0.powi(5) * E));
    let k1 = k_c1.max(k_c2).max(k_c3);
    let v0 = 4.0 / psi0 + (4.0 / 3.0) * (1.0 - psi0).powi(2) / psi0.powi(3);
    let k_ab = v0 / (1.0 - (-v0).exp());
    Ok(TalagrandConstants { mu0, psi0, k_c1, k_c2, k_c3, k1, v0, k_ab, k2: k1 * k_ab / 2.0 })
}
