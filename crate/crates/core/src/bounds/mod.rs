//! Registry of closed-form exponential tail bounds.
//!
//! Every bound is evaluated on the standardized scale
//! `P(sqrt(n) (mean - mu) >= lambda)` and reports its raw value, the value
//! clamped to `[0, 1]`, and whether the hypotheses of the underlying theorem
//! hold. A failed hypothesis never substitutes another bound: the formula is
//! still evaluated where it is finite and the failure is described in
//! [`BoundValue::domain_msg`].

mod matrix;

use std::fmt;
use std::str::FromStr;

pub use matrix::{sigma_a2, sup_dev_matrix, ScoreMatrix};

use crate::error::{Error, Result};
use crate::kernels::{psi, talagrand_constants};
use crate::majorization::{scaled_unit_mass, submajor_closed_form, submajor_setup};
use crate::types::{BoundValue, HGParams, Population};

/// Default additive slack `delta` of the variance-adaptive martingale bound.
pub const DEFAULT_DELTA: f64 = 1e-7;
/// Default distance between the evaluated deviation and the auxiliary
/// deviation of the Talagrand-type bound (ii).
pub const DEFAULT_TALAGRAND_GAP: f64 = 0.1;

macro_rules! bound_ids {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// Identifier of a registered bound.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum BoundId {
            $($variant),*
        }

        impl BoundId {
            /// Every registered bound, in registry order.
            pub const ALL: &'static [BoundId] = &[$(BoundId::$variant),*];

            /// Stable snake-case name used on the command line and in CSV files.
            pub fn name(self) -> &'static str {
                match self {
                    $(BoundId::$variant => $name),*
                }
            }
        }
    };
}

bound_ids! {
    SerflingGeneral => "serfling_general",
    SerflingHg => "serfling_hg",
    HushScovel => "hush_scovel",
    BmHg => "bm_hg",
    BmGeneral => "bm_general",
    LeonPerronBin => "leon_perron_bin",
    TalagrandBinIii => "talagrand_bin_iii",
    BennettBin => "bennett_bin",
    LpHyper => "lp_hyper",
    TalagrandHyperI => "talagrand_hyper_i",
    TalagrandHyperIi => "talagrand_hyper_ii",
    TalagrandHyperIii => "talagrand_hyper_iii",
    BennettHyper => "bennett_hyper",
    BernsteinHyper => "bernstein_hyper",
    ChatterjeeGeneral => "chatterjee_general",
    GiMatrix => "gi_matrix",
    GiSwor => "gi_swor",
    GiHyper => "gi_hyper",
    KempermanMajor => "kemperman_major",
    KempermanSubmajor => "kemperman_submajor",
}

/// Which input a bound consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    Hg,
    Bin,
    Pop,
    Matrix,
}

/// The event a bound controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sidedness {
    /// `P(sqrt(n)(mean - mu) >= lambda)`.
    OneSided,
    /// `P(sqrt(n)|mean - mu| >= lambda)`; the value carries the factor 2.
    TwoSided,
    /// `P(sqrt(n)(mean - mu) = lambda)`.
    PointMass,
}

impl BoundId {
    pub fn input_kind(self) -> InputKind {
        use BoundId::*;
        match self {
            SerflingHg | HushScovel | BmHg | LpHyper | TalagrandHyperI | TalagrandHyperIi | TalagrandHyperIii
            | BennettHyper | BernsteinHyper | GiHyper => InputKind::Hg,
            LeonPerronBin | TalagrandBinIii | BennettBin => InputKind::Bin,
            SerflingGeneral | BmGeneral | ChatterjeeGeneral | GiSwor | KempermanMajor | KempermanSubmajor => {
                InputKind::Pop
            }
            GiMatrix => InputKind::Matrix,
        }
    }

    pub fn sidedness(self) -> Sidedness {
        match self {
            BoundId::GiMatrix | BoundId::GiSwor => Sidedness::TwoSided,
            BoundId::TalagrandHyperI => Sidedness::PointMass,
            _ => Sidedness::OneSided,
        }
    }

    /// Whether the bound is a proven probability bound with known constants.
    /// The binomial Talagrand bound only asserts that some constant exists.
    pub fn guaranteed(self) -> bool {
        self != BoundId::TalagrandBinIii
    }

    /// Bounds with a pole at `lambda = sqrt(n)/2`.
    pub fn pole_bearing(self) -> bool {
        matches!(self, BoundId::LeonPerronBin | BoundId::LpHyper)
    }

    /// Bounds with a `1/lambda` prefactor, which need `lambda > 0`.
    pub fn inverse_lambda(self) -> bool {
        matches!(
            self,
            BoundId::LeonPerronBin
                | BoundId::TalagrandBinIii
                | BoundId::LpHyper
                | BoundId::TalagrandHyperIi
                | BoundId::TalagrandHyperIii
        )
    }

    /// Bounds whose hypotheses exclude `lambda = 0`.
    pub fn needs_positive_lambda(self) -> bool {
        self.inverse_lambda() || self == BoundId::TalagrandHyperI
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundId::ALL
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown bound id `{s}`")))
    }
}

/// A plotted curve: a registered bound or the conjectured Serfling
/// improvement, which is a reference only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveId {
    Bound(BoundId),
    Conjecture,
}

impl CurveId {
    pub fn name(self) -> &'static str {
        match self {
            CurveId::Bound(id) => id.name(),
            CurveId::Conjecture => "serfling_conjecture",
        }
    }
}

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CurveId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "serfling_conjecture" {
            Ok(CurveId::Conjecture)
        } else {
            s.parse().map(CurveId::Bound)
        }
    }
}

/// Input to a bound, tagged by kind.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundInput {
    Hg(HGParams),
    Bin { n: u64, p: f64 },
    Pop { pop: Population, n: u64, delta: Option<f64> },
    Matrix(ScoreMatrix),
}

impl BoundInput {
    pub fn kind(&self) -> InputKind {
        match self {
            BoundInput::Hg(_) => InputKind::Hg,
            BoundInput::Bin { .. } => InputKind::Bin,
            BoundInput::Pop { .. } => InputKind::Pop,
            BoundInput::Matrix(_) => InputKind::Matrix,
        }
    }

    /// The input of the requested kind describing the hypergeometric
    /// scenario `params`: its 0/1 population, its binomial counterpart with
    /// `p = D/N`, or the Serfling score matrix of that population.
    pub fn from_hg(kind: InputKind, params: &HGParams) -> Result<Self> {
        Ok(match kind {
            InputKind::Hg => BoundInput::Hg(*params),
            InputKind::Bin => BoundInput::Bin { n: params.n(), p: params.mu() },
            InputKind::Pop => BoundInput::Pop { pop: Population::from_hg(params), n: params.n(), delta: None },
            InputKind::Matrix => BoundInput::Matrix(ScoreMatrix::serfling(&Population::from_hg(params), params.n())?),
        })
    }

    /// Compact descriptor used in CSV output.
    pub fn describe(&self) -> String {
        match self {
            BoundInput::Hg(p) => format!("hg(n={};D={};N={})", p.n(), p.d(), p.big_n()),
            BoundInput::Bin { n, p } => format!("bin(n={n};p={p})"),
            BoundInput::Pop { pop, n, delta } => match delta {
                Some(d) => format!("pop(N={};n={n};delta={d})", pop.len()),
                None => format!("pop(N={};n={n})", pop.len()),
            },
            BoundInput::Matrix(m) => format!("matrix(N={};scale={})", m.size(), m.scale()),
        }
    }
}

/// Tunable constants of the registry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConfig {
    /// `delta` of the variance-adaptive martingale bound when the input has none.
    pub delta: f64,
    /// The unspecified constant `K2` of the binomial Talagrand bound.
    pub k2_binomial: f64,
    /// Truncation parameters of the hypergeometric Talagrand bounds; `None`
    /// picks `min(mu, 1-mu)` and `min(n/N, 1-n/N)`.
    pub talagrand_mu0: Option<f64>,
    pub talagrand_psi0: Option<f64>,
    /// Auxiliary deviation of bound (ii) is `lambda + talagrand_gap`.
    pub talagrand_gap: f64,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            delta: DEFAULT_DELTA,
            k2_binomial: 1.0,
            talagrand_mu0: None,
            talagrand_psi0: None,
            talagrand_gap: DEFAULT_TALAGRAND_GAP,
        }
    }
}

/// Evaluate a bound with the default configuration.
pub fn evaluate(id: BoundId, input: &BoundInput, lambda: f64) -> Result<BoundValue> {
    evaluate_with(id, input, lambda, &BoundConfig::default())
}

/// Evaluate a bound.
///
/// Errors: a non-finite `lambda` or an input of the wrong kind is a usage
/// error; a negative `lambda`, or a degenerate input where the formula
/// would divide by zero, is a domain error.
pub fn evaluate_with(id: BoundId, input: &BoundInput, lambda: f64, cfg: &BoundConfig) -> Result<BoundValue> {
    if !lambda.is_finite() {
        return Err(Error::usage(format!("lambda must be finite; got {lambda}")));
    }
    if input.kind() != id.input_kind() {
        return Err(Error::usage(format!("{id} takes {:?} input, got {:?}", id.input_kind(), input.kind())));
    }
    if lambda < 0.0 {
        return Err(Error::domain(format!("lambda must be >= 0; got {lambda}")));
    }
    let mut v = Vec::new();
    if lambda == 0.0 && id.needs_positive_lambda() {
        v.push("lambda must be > 0".to_string());
    }
    let raw = match input {
        BoundInput::Hg(p) => eval_hg(id, p, lambda, cfg, &mut v)?,
        BoundInput::Bin { n, p } => eval_bin(id, *n, *p, lambda, cfg, &mut v)?,
        BoundInput::Pop { pop, n, delta } => eval_pop(id, pop, *n, delta.unwrap_or(cfg.delta), lambda, &mut v)?,
        BoundInput::Matrix(m) => gi_matrix(m, lambda)?,
    };
    Ok(BoundValue::new(raw, v))
}

fn require(v: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok {
        v.push(msg());
    }
}

/// `exp(-lambda^2 / (2 s) psi(lambda / (sqrt(n) s)))`, the Bennett form with
/// variance proxy `s`.
fn bennett_form(lambda: f64, n: u64, s: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(1.0);
    }
    if s <= 0.0 {
        return Err(Error::domain("zero variance proxy in the Bennett-type exponent"));
    }
    let v = lambda / ((n as f64).sqrt() * s);
    Ok((-(lambda * lambda) / (2.0 * s) * psi(v)).exp())
}

/// `exp(-(lambda^2/2) / denom)` with the `lambda = 0` limit.
fn bernstein_form(lambda: f64, denom: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(1.0);
    }
    if denom <= 0.0 {
        return Err(Error::domain("zero denominator in the Bernstein-type exponent"));
    }
    Ok((-(lambda * lambda) / 2.0 / denom).exp())
}

/// `exp(-2 lambda^2 / denom)` with the `lambda = 0` limit.
fn gaussian_form(lambda: f64, denom: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(1.0);
    }
    if denom <= 0.0 {
        return Err(Error::domain("zero denominator in the exponent"));
    }
    Ok((-2.0 * lambda * lambda / denom).exp())
}

fn eval_hg(id: BoundId, p: &HGParams, lambda: f64, cfg: &BoundConfig, v: &mut Vec<String>) -> Result<f64> {
    let (n, d, big_n) = (p.n(), p.d(), p.big_n());
    let (nf, big_nf) = (n as f64, big_n as f64);
    let mu = p.mu();
    let frac = p.fraction();
    match id {
        BoundId::SerflingHg => gaussian_form(lambda, 1.0 - p.f_star()),
        BoundId::HushScovel => {
            let alpha = (1.0 / (nf + 1.0) + 1.0 / (big_nf - nf + 1.0))
                .max(1.0 / (d as f64 + 1.0) + 1.0 / (big_nf - d as f64 + 1.0));
            let t = nf.sqrt() * lambda;
            Ok((-2.0 * alpha * (t * t - 1.0)).exp())
        }
        BoundId::BmHg => {
            require(v, n < big_n, || format!("needs n < N; got n = {n}, N = {big_n}"));
            gaussian_form(lambda, (1.0 - frac) * (1.0 + 1.0 / nf))
        }
        BoundId::LpHyper => {
            require(v, big_n > 4, || format!("needs N > 4; got N = {big_n}"));
            require(v, 2 <= n && n < d && 2 * d <= big_n, || {
                format!("needs 2 <= n < D <= N/2; got n = {n}, D = {d}, N = {big_n}")
            });
            let rn = nf.sqrt();
            require(v, lambda < rn / 2.0, || format!("needs lambda < sqrt(n)/2 = {}", rn / 2.0));
            let m = big_nf - nf;
            let under = (m / big_nf)
                * ((rn + 2.0 * lambda) / (rn - 2.0 * lambda))
                * ((m + 2.0 * rn * lambda) / (m - 2.0 * rn * lambda));
            let pre = (1.0 / (2.0 * std::f64::consts::PI * lambda * lambda)).sqrt() * 0.5 * under.sqrt();
            let quartic = (1.0 + (nf / m).powi(3)) / 3.0;
            Ok(pre * (-2.0 * lambda * lambda / (1.0 - frac)).exp() * (-quartic * lambda.powi(4) / nf).exp())
        }
        BoundId::TalagrandHyperI | BoundId::TalagrandHyperIi | BoundId::TalagrandHyperIii => {
            talagrand_hyper(id, p, lambda, cfg, v)
        }
        BoundId::BennettHyper | BoundId::BernsteinHyper => {
            require(v, n <= d.min(big_n - d), || format!("needs 1 <= n <= min(D, N-D); got n = {n}, D = {d}, N = {big_n}"));
            let s = p.sigma2() * (1.0 - p.f_n());
            if id == BoundId::BennettHyper {
                bennett_form(lambda, n, s)
            } else {
                bernstein_form(lambda, s + lambda / (3.0 * nf.sqrt()))
            }
        }
        BoundId::GiHyper => {
            require(v, n < big_n, || format!("needs n < N; got n = {n}, N = {big_n}"));
            let s = p.sigma2() * (1.0 - p.f_n());
            bernstein_form(lambda, s + 8.0 * mu.max(1.0 - mu) * lambda / nf.sqrt())
        }
        _ => unreachable!("input kind checked by caller"),
    }
}

fn talagrand_hyper(id: BoundId, p: &HGParams, lambda: f64, cfg: &BoundConfig, v: &mut Vec<String>) -> Result<f64> {
    let (n, d, big_n) = (p.n(), p.d(), p.big_n());
    require(v, n < d && d < big_n, || format!("needs n < D < N; got n = {n}, D = {d}, N = {big_n}"));
    if n >= big_n {
        return Err(Error::domain("the Talagrand-type bounds need n < N"));
    }
    let (nf, m) = (n as f64, (big_n - n) as f64);
    let (mu, frac) = (p.mu(), p.fraction());
    let mu0 = cfg.talagrand_mu0.unwrap_or(mu.min(1.0 - mu));
    let psi0 = cfg.talagrand_psi0.unwrap_or(frac.min(1.0 - frac));
    require(v, mu0 <= mu && mu <= 1.0 - mu0, || format!("needs mu0 <= D/N <= 1 - mu0; got mu0 = {mu0}, D/N = {mu}"));
    require(v, psi0 <= frac && frac <= 1.0 - psi0, || format!("needs psi0 <= n/N <= 1 - psi0; got psi0 = {psi0}, n/N = {frac}"));
    let k = match talagrand_constants(mu0, psi0) {
        Ok(k) => k,
        Err(e) => {
            v.push(e.to_string());
            return Ok(f64::NAN);
        }
    };
    let quartic = 0.25 + (nf / m).powi(3) / 3.0;
    let base = |l: f64| (-2.0 * l * l / (1.0 - frac)).exp() * (-quartic * l.powi(4) / nf).exp();
    Ok(match id {
        BoundId::TalagrandHyperI => k.k1 / nf.sqrt() * base(lambda),
        BoundId::TalagrandHyperIii => k.k2 / lambda * base(lambda),
        _ => {
            let aux = lambda + cfg.talagrand_gap;
            let slope = 4.0 / (1.0 - frac) + 1.0 + 4.0 * nf.powi(3) / (3.0 * m.powi(3));
            k.k2 / aux * base(aux) * (aux * (aux - lambda) * slope).exp()
        }
    })
}

fn eval_bin(id: BoundId, n: u64, p: f64, lambda: f64, cfg: &BoundConfig, v: &mut Vec<String>) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("binomial bounds need n >= 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("success probability must lie in [0, 1]; got {p}")));
    }
    let nf = n as f64;
    match id {
        BoundId::LeonPerronBin => {
            require(v, p > 0.0 && p < 1.0, || format!("needs 0 < p < 1; got {p}"));
            let rn = nf.sqrt();
            require(v, lambda < rn / 2.0, || format!("needs lambda < sqrt(n)/2 = {}", rn / 2.0));
            let pre = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * lambda)
                * 0.5
                * ((rn + 2.0 * lambda) / (rn - 2.0 * lambda)).sqrt();
            Ok(pre * (-2.0 * lambda * lambda).exp())
        }
        BoundId::TalagrandBinIii => {
            require(v, p > 0.0 && p < 1.0, || format!("needs 0 < p < 1; got {p}"));
            Ok(cfg.k2_binomial / lambda * (-(2.0 * lambda * lambda + lambda.powi(4) / (4.0 * nf))).exp())
        }
        BoundId::BennettBin => {
            require(v, p > 0.0 && p <= 0.5, || format!("needs 0 < p <= 1/2; got {p}"));
            bennett_form(lambda, n, p * (1.0 - p))
        }
        _ => unreachable!("input kind checked by caller"),
    }
}

/// `c_n(delta) = sigma (b - a) sqrt(2 ln(1/delta) / n)`.
pub fn bm_c_n(sigma: f64, b_minus_a: f64, n: u64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::domain(format!("delta must lie in (0, 1]; got {delta}")));
    }
    if n == 0 {
        return Err(Error::domain("c_n needs n >= 1"));
    }
    Ok(sigma * b_minus_a * (2.0 * (1.0 / delta).ln() / n as f64).sqrt())
}

fn eval_pop(id: BoundId, pop: &Population, n: u64, delta: f64, lambda: f64, v: &mut Vec<String>) -> Result<f64> {
    let big_n = pop.len() as u64;
    if n == 0 || n > big_n {
        return Err(Error::domain(format!("sample size n = {n} must satisfy 1 <= n <= N = {big_n}")));
    }
    let (nf, big_nf) = (n as f64, big_n as f64);
    let w = pop.range();
    let f_star = (nf - 1.0) / big_nf;
    let f_n = if big_n < 2 { 0.0 } else { (nf - 1.0) / (big_nf - 1.0) };
    match id {
        BoundId::SerflingGeneral => {
            if w <= 0.0 {
                return Err(Error::domain("degenerate population (b = a)"));
            }
            gaussian_form(lambda, (1.0 - f_star) * w * w)
        }
        BoundId::BmGeneral => {
            require(v, n < big_n, || format!("needs n < N; got n = {n}, N = {big_n}"));
            if !(0.0..=1.0).contains(&delta) {
                return Err(Error::domain(format!("delta must lie in [0, 1]; got {delta}")));
            }
            let sigma = pop.variance().sqrt();
            let correction = if n == 1 || sigma == 0.0 || w == 0.0 {
                0.0
            } else if delta == 0.0 {
                f64::INFINITY
            } else {
                f_star * bm_c_n(sigma, w, n - 1, delta)?
            };
            let gamma2 = (1.0 - f_star) * pop.variance() + correction;
            if lambda == 0.0 {
                return Ok(1.0 + delta);
            }
            let denom = 2.0 * (gamma2 + (2.0 / 3.0) * w * lambda / nf.sqrt());
            if denom <= 0.0 {
                return Err(Error::domain("degenerate population (b = a)"));
            }
            Ok((-(lambda * lambda) / denom).exp() + delta)
        }
        BoundId::ChatterjeeGeneral => {
            require(v, pop.min() >= 0.0 && pop.max() <= 1.0, || "needs every element in [0, 1]".to_string());
            require(v, n < big_n, || format!("needs n < N; got n = {n}, N = {big_n}"));
            if lambda == 0.0 {
                return Ok(1.0);
            }
            Ok((-(lambda * lambda) / (4.0 * pop.mean() + 2.0 * lambda / nf.sqrt())).exp())
        }
        BoundId::GiSwor => {
            require(v, n < big_n, || format!("needs n < N; got n = {n}, N = {big_n}"));
            Ok(2.0 * bernstein_form(lambda, pop.variance() * (1.0 - f_n) + 8.0 * pop.sup_dev() * lambda / nf.sqrt())?)
        }
        BoundId::KempermanMajor => {
            let mass = scaled_unit_mass(pop)?;
            require(v, mass.integral, || {
                format!("N mean(d) = {} is not an integer, so no hypergeometric population majorizes d", mass.total)
            });
            let dd = mass.floor;
            require(v, 2 * dd <= big_n, || format!("needs D/N <= 1/2; got D = {dd}, N = {big_n}"));
            require(v, n <= dd.min(big_n - dd), || format!("needs n <= min(D, N-D); got n = {n}, D = {dd}, N = {big_n}"));
            let mu = dd as f64 / big_nf;
            let s = mu * (1.0 - mu) * (1.0 - f_n);
            if lambda == 0.0 {
                return Ok(1.0);
            }
            if s <= 0.0 {
                return Err(Error::domain("majorizing population has zero variance"));
            }
            let v_arg = lambda / (nf.sqrt() * w * s);
            Ok((-(lambda * lambda) / (2.0 * w * w * s) * psi(v_arg)).exp())
        }
        BoundId::KempermanSubmajor => {
            let s = submajor_setup(pop, n, v)?;
            submajor_closed_form(&s, n, lambda)
        }
        _ => unreachable!("input kind checked by caller"),
    }
}

fn gi_matrix(m: &ScoreMatrix, lambda: f64) -> Result<f64> {
    let t = (m.scale() as f64).sqrt() * lambda;
    if lambda == 0.0 {
        return Ok(2.0);
    }
    let denom = 2.0 * (sigma_a2(m) + 8.0 * sup_dev_matrix(m) * t);
    if denom <= 0.0 {
        return Err(Error::domain("constant score matrix: the exponent divides by zero"));
    }
    Ok(2.0 * (-(t * t) / denom).exp())
}

/// The conjectured improvement of Serfling's bound,
/// `exp(-2 lambda^2 / ((1 - f_n) (b - a)^2))`. Not a proven bound.
pub fn conjecture_curve(pop: &Population, n: u64, lambda: f64) -> Result<f64> {
    let big_n = pop.len() as u64;
    if n == 0 || n > big_n {
        return Err(Error::domain(format!("sample size n = {n} must satisfy 1 <= n <= N = {big_n}")));
    }
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::domain(format!("lambda must be finite and >= 0; got {lambda}")));
    }
    let w = pop.range();
    if w <= 0.0 {
        return Err(Error::domain("degenerate population (b = a)"));
    }
    let f_n = if big_n < 2 { 0.0 } else { (n - 1) as f64 / (big_n - 1) as f64 };
    if f_n >= 1.0 {
        return Err(Error::domain("the conjectured bound needs n < N"));
    }
    gaussian_form(lambda, (1.0 - f_n) * w * w)
}
