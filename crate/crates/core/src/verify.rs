//! Property suites that check the library's inequalities mechanically:
//!
//! * **dominance** — every guaranteed bound against the exact tail it
//!   controls, over all `(n, D)` for a ladder of population sizes;
//! * **kernels** — the proof building blocks (pmf deviate bound, tail-ratio
//!   bound, technical lemma, Stirling envelope, `psi`, `Psi''`);
//! * **orders** — majorization, sub-majorization and the convex order of
//!   sampling sums, on a fixed corpus and on seeded random populations.
//!
//! Every check records how many cases it examined, its worst margin and a
//! witness for that margin, so a report doubles as a diagnostic.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{evaluate, BoundId, BoundInput, InputKind, ScoreMatrix, Sidedness};
use crate::exact::{BinomialDistribution, BinomialTable, HgDistribution};
use crate::kernels::{
    big_psi, big_psi_second_derivative, psi_bennett, pmf_deviate_bound, stirling_envelope, tail_ratio_bound_with,
    technical_lemma_gap,
};
use crate::majorization::{
    kemperman_majorize, prec, prec_w, sub_majorize, unit_mass, verify_convex_order, ConvexFamily, MAX_ENUMERATION_N,
};
use crate::par::Execution;
use crate::types::{Deviation, HGParams, Population};

/// Population sizes of the dominance suite.
pub const DOMINANCE_SIZES: [u64; 5] = [10, 25, 50, 100, 200];
/// A bound passes when `raw >= exact - DOMINANCE_TOL` (absolute).
pub const DOMINANCE_TOL: f64 = 1e-12;
/// Evenly spaced deviations per bound and scenario, on top of the lattice.
pub const DOMINANCE_GRID: usize = 50;
/// Largest population of the exhaustive kernel checks.
pub const KERNEL_MAX_N: u64 = 120;
/// Kernel bounds pass when `bound >= exact (1 - KERNEL_REL_TOL)`.
pub const KERNEL_REL_TOL: f64 = 1e-9;
/// The technical lemma passes when every grid gap is `>= -LEMMA_TOL`.
pub const LEMMA_TOL: f64 = 1e-12;
/// `(n, N)` pairs of the technical-lemma grid.
pub const LEMMA_CASES: [(u64, u64); 3] = [(5, 20), (10, 50), (49, 100)];
/// Points per axis of the technical-lemma grid.
pub const LEMMA_GRID: usize = 50;
/// The grid spans `gamma` in `[gamma0, LEMMA_GAMMA_SPAN * gamma0]`, `gamma0 = (N-n)/n`.
pub const LEMMA_GAMMA_SPAN: f64 = 10.0;
/// Finite-difference step and relative tolerance of the `Psi''` check.
pub const FD_STEP: f64 = 1e-5;
pub const FD_REL_TOL: f64 = 1e-4;
/// Random populations checked for the convex order.
pub const CONVEX_CORPUS: usize = 1000;
/// Largest population in the convex-order corpus.
pub const CONVEX_MAX_N: usize = 12;
/// Random populations checked for the majorization predicates.
pub const ORDER_CORPUS: usize = 10_000;
/// Largest population in the majorization corpus.
pub const ORDER_MAX_N: usize = 20;
const CONVEX_SEED: u64 = 0x5EED_0001;
const ORDER_SEED: u64 = 0x5EED_0002;

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    /// Number of cases examined.
    pub checked: u64,
    /// Smallest margin seen; the check passes when it is `>= -tolerance`.
    /// `+inf` when nothing was checked.
    pub worst_margin: f64,
    pub tolerance: f64,
    /// Description of the case attaining the worst margin.
    pub witness: Option<String>,
    pub passed: bool,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: checked {}, worst margin {:e} (tolerance {:e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.checked,
            self.worst_margin,
            self.tolerance
        )?;
        if let Some(w) = &self.witness {
            write!(f, ", witness {w}")?;
        }
        Ok(())
    }
}

/// A named group of checks.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {}: {}", self.name, if self.passed() { "PASS" } else { "FAIL" })?;
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}

/// Running minimum of margins with a lazily formatted witness.
#[derive(Debug, Clone)]
struct Tally {
    checked: u64,
    worst: f64,
    witness: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { checked: 0, worst: f64::INFINITY, witness: None }
    }

    fn record(&mut self, margin: f64, witness: impl FnOnce() -> String) {
        self.checked += 1;
        // NaN margins are failures and must surface as the witness.
        if margin < self.worst || (margin.is_nan() && !self.worst.is_nan()) {
            self.worst = margin;
            self.witness = Some(witness());
        }
    }

    fn merge(&mut self, other: Tally) {
        self.checked += other.checked;
        if other.worst < self.worst || (other.worst.is_nan() && !self.worst.is_nan()) {
            self.worst = other.worst;
            self.witness = other.witness;
        }
    }

    fn finish(self, name: impl Into<String>, tolerance: f64) -> CheckResult {
        CheckResult {
            name: name.into(),
            checked: self.checked,
            passed: self.worst >= -tolerance,
            worst_margin: self.worst,
            tolerance,
            witness: self.witness,
        }
    }
}

fn merge_all(tallies: impl IntoIterator<Item = Tally>) -> Tally {
    tallies.into_iter().fold(Tally::new(), |mut acc, t| {
        acc.merge(t);
        acc
    })
}

// ---------------------------------------------------------------------------
// Dominance

/// The bounds exercised by the dominance suite: every guaranteed bound.
pub fn dominance_bounds() -> Vec<BoundId> {
    BoundId::ALL.iter().copied().filter(|id| id.guaranteed()).collect()
}

/// Exact upper and lower tails of one hypergeometric or binomial law,
/// converted to doubles once.
struct Tails {
    /// `upper[k] = P(S >= k)` for `k` in `0..=n+1`.
    upper: Vec<f64>,
    /// `lower[k] = P(S <= k)` for `k` in `0..=n`.
    lower: Vec<f64>,
    /// `pmf[k]` for `k` in `0..=n`.
    pmf: Vec<f64>,
}

impl Tails {
    fn hypergeometric(dist: &HgDistribution, n: u64) -> Self {
        let n = n as i64;
        let upper: Vec<f64> = (0..=n + 1).map(|k| dist.tail_f64(k)).collect();
        let lower = (0..=n).map(|k| dist.lower_tail_f64(k)).collect();
        let pmf = (0..=n).map(|k| dist.pmf_f64(k)).collect();
        Tails { upper, lower, pmf }
    }

    fn binomial(dist: &BinomialDistribution, n: u64) -> Self {
        let n = n as i64;
        let upper: Vec<f64> = (0..=n + 1).map(|k| dist.tail_f64(k)).collect();
        let pmf: Vec<f64> = (0..=n).map(|k| dist.pmf_f64(k)).collect();
        let lower = (0..=n)
            .map(|k| (0..=k).map(|j| pmf[j as usize]).sum::<f64>().min(1.0))
            .collect();
        Tails { upper, lower, pmf }
    }

    fn upper(&self, k: i64) -> f64 {
        if k <= 0 {
            1.0
        } else {
            self.upper.get(k as usize).copied().unwrap_or(0.0)
        }
    }

    fn lower(&self, k: i64) -> f64 {
        if k < 0 {
            0.0
        } else {
            self.lower.get(k as usize).copied().unwrap_or(1.0)
        }
    }

    fn pmf(&self, k: i64) -> f64 {
        if k < 0 {
            0.0
        } else {
            self.pmf.get(k as usize).copied().unwrap_or(0.0)
        }
    }
}

/// Whether `n mu + sqrt(n) lambda` lands on an integer (up to the same
/// snapping used by [`Deviation::threshold`]).
fn on_lattice(params: &HGParams, lambda: f64) -> bool {
    let x = params.n() as f64 * params.mu() + Deviation::new(lambda).sum_scale(params.n());
    let r = x.round();
    (x - r).abs() <= 1e-9 * r.abs().max(1.0)
}

/// The exact probability of the event a bound controls at `lambda`.
fn exact_target(sidedness: Sidedness, params: &HGParams, tails: &Tails, lambda: f64) -> f64 {
    let dev = Deviation::new(lambda);
    let k0 = dev.threshold(params);
    match sidedness {
        Sidedness::OneSided => tails.upper(k0),
        Sidedness::TwoSided => tails.upper(k0) + tails.lower(dev.lower_threshold(params)),
        Sidedness::PointMass => {
            if on_lattice(params, lambda) {
                tails.pmf(k0)
            } else {
                0.0
            }
        }
    }
}

/// Deviation grid of one bound on one scenario: [`DOMINANCE_GRID`] evenly
/// spaced points over `(0, top]` plus every positive lattice deviation.
///
/// `top` is the largest deviation with positive probability (both sides for
/// two-sided bounds). Pole-bearing bounds use `(0, min(top, sqrt(n)/2))`,
/// stopping one step short of the pole.
fn lambda_grid(id: BoundId, params: &HGParams, max_count: u64) -> Vec<f64> {
    let (n, big_n, d) = (params.n(), params.big_n(), params.d());
    let rn = (n as f64).sqrt();
    let mean = (n * d) as f64 / big_n as f64;
    let (lo, _) = params.support();
    let up_top = (max_count as f64 - mean) / rn;
    let low_top = (mean - lo as f64) / rn;
    let mut top = match id.sidedness() {
        Sidedness::TwoSided => up_top.max(low_top),
        _ => up_top,
    };
    let mut pts = Vec::new();
    if id.pole_bearing() {
        top = top.min(rn / 2.0);
        if top > 0.0 {
            let steps = DOMINANCE_GRID + 1;
            pts.extend((1..steps).map(|j| top * j as f64 / steps as f64));
        }
    } else if top > 0.0 {
        pts.extend((1..=DOMINANCE_GRID).map(|j| top * j as f64 / DOMINANCE_GRID as f64));
    }
    for k in 0..=max_count {
        let lam = (k as f64 * big_n as f64 - (n * d) as f64) / big_n as f64 / rn;
        if lam > 0.0 {
            pts.push(lam);
        }
        if id.sidedness() == Sidedness::TwoSided && lam < 0.0 && k >= lo {
            pts.push(-lam);
        }
    }
    pts
}

/// One `(n, D, N)` scenario: every bound's margin over its grid.
fn dominance_scenario(params: &HGParams, table: &BinomialTable, bounds: &[BoundId]) -> Vec<Tally> {
    let (n, d, big_n) = (params.n(), params.d(), params.big_n());
    let hg = Tails::hypergeometric(&HgDistribution::with_table(*params, table), n);
    let needs_bin = bounds.iter().any(|id| id.input_kind() == InputKind::Bin);
    let bin = needs_bin.then(|| {
        let p = BigRational::new(BigInt::from(d), BigInt::from(big_n));
        Tails::binomial(&BinomialDistribution::new(n, &p).expect("D/N is a probability"), n)
    });
    // 0/1 population as doubles: the population bounds only use its summary
    // statistics, and the float path keeps the sweep fast.
    let pop = Population::new((0..big_n).map(|i| if i < d { 1.0 } else { 0.0 }).collect()).expect("N >= 1");
    let inputs = |kind: InputKind| -> Option<BoundInput> {
        Some(match kind {
            InputKind::Hg => BoundInput::Hg(*params),
            InputKind::Bin => BoundInput::Bin { n, p: params.mu() },
            InputKind::Pop => BoundInput::Pop { pop: pop.clone(), n, delta: None },
            InputKind::Matrix => BoundInput::Matrix(ScoreMatrix::serfling(&pop, n).ok()?),
        })
    };
    let mut out = Vec::new();
    for &id in bounds {
        let mut tally = Tally::new();
        let Some(input) = inputs(id.input_kind()) else {
            out.push(tally);
            continue;
        };
        // The binomial bounds are checked against the binomial law they
        // state; Bennett's binomial bound also covers the hypergeometric law.
        let mut laws: Vec<(&Tails, &str, u64)> = Vec::new();
        match id.input_kind() {
            InputKind::Bin => {
                laws.push((bin.as_ref().expect("built above"), "bin", n));
                if id == BoundId::BennettBin {
                    laws.push((&hg, "hg", d.min(n)));
                }
            }
            _ => laws.push((&hg, "hg", d.min(n))),
        }
        for (tails, law, max_count) in laws {
            for lambda in lambda_grid(id, params, max_count) {
                let Ok(value) = evaluate(id, &input, lambda) else { continue };
                if !value.domain_ok {
                    continue;
                }
                let exact = exact_target(id.sidedness(), params, tails, lambda);
                tally.record(value.raw - exact, || {
                    format!("{id} vs {law} at (n={n}, D={d}, N={big_n}), lambda={lambda}: raw {} < exact {exact}", value.raw)
                });
            }
        }
        out.push(tally);
    }
    out
}

/// Dominance of every guaranteed bound over the exact tails, for every
/// `(n, D)` at each population size in `sizes`.
pub fn dominance_suite_with(sizes: &[u64], exec: Execution) -> SuiteReport {
    let bounds = dominance_bounds();
    let mut totals: Vec<Tally> = vec![Tally::new(); bounds.len()];
    for &big_n in sizes {
        let table = BinomialTable::new(big_n);
        let scenarios: Vec<HGParams> = (1..=big_n)
            .flat_map(|n| (0..=big_n).map(move |d| HGParams::new(n, d, big_n).expect("valid by construction")))
            .collect();
        let results = exec.map(scenarios, |p| dominance_scenario(&p, &table, &bounds));
        for scenario in results {
            for (total, t) in totals.iter_mut().zip(scenario) {
                total.merge(t);
            }
        }
    }
    SuiteReport {
        name: "dominance".into(),
        checks: bounds.iter().zip(totals).map(|(id, t)| t.finish(id.name(), DOMINANCE_TOL)).collect(),
    }
}

/// [`dominance_suite_with`] at [`DOMINANCE_SIZES`].
pub fn dominance_suite(exec: Execution) -> SuiteReport {
    dominance_suite_with(&DOMINANCE_SIZES, exec)
}

// ---------------------------------------------------------------------------
// Kernels

fn relative_margin(bound: f64, exact: f64) -> f64 {
    if exact == 0.0 {
        if bound >= 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    } else {
        bound / exact - 1.0
    }
}

fn kernel_scenarios(max_n: u64) -> Vec<HGParams> {
    (1..=max_n)
        .flat_map(|big_n| {
            (1..=big_n).flat_map(move |n| (0..=big_n).map(move |d| HGParams::new(n, d, big_n).expect("valid")))
        })
        .collect()
}

/// `pmf_deviate_bound` and `tail_ratio_bound` against the exact pmf and
/// tail, at every `(n, D, N, k)` meeting their hypotheses with `N <= max_n`.
pub fn deviate_and_ratio_checks(max_n: u64, exec: Execution) -> [CheckResult; 2] {
    let table = BinomialTable::new(max_n);
    let results = exec.map(kernel_scenarios(max_n), |p| {
        let (n, d, big_n) = (p.n(), p.d(), p.big_n());
        let mut dev = Tally::new();
        let mut ratio = Tally::new();
        let deviate_ok = n < d && d <= big_n / 2;
        let ratio_ok = big_n > 4 && d < big_n;
        if !deviate_ok && !ratio_ok {
            return (dev, ratio);
        }
        let dist = HgDistribution::with_table(p, &table);
        let (lo, hi) = p.support();
        for k in lo as i64..=hi as i64 {
            let above_mean = (k as u128) * (big_n as u128) > (n as u128) * (d as u128);
            if deviate_ok && k >= 1 && k < n as i64 && (k as u128) * (big_n as u128) >= (n as u128) * (d as u128) {
                if let Ok(b) = pmf_deviate_bound(&p, k) {
                    let exact = dist.pmf_f64(k);
                    dev.record(relative_margin(b, exact), || format!("(n={n}, D={d}, N={big_n}, k={k}): {b} vs {exact}"));
                }
            }
            if ratio_ok && above_mean {
                if let Ok(b) = tail_ratio_bound_with(&dist, k) {
                    let exact = dist.tail_f64(k);
                    ratio.record(relative_margin(b, exact), || format!("(n={n}, D={d}, N={big_n}, k={k}): {b} vs {exact}"));
                }
            }
        }
        (dev, ratio)
    });
    let (devs, ratios): (Vec<Tally>, Vec<Tally>) = results.into_iter().unzip();
    [
        merge_all(devs).finish(format!("pmf_deviate_bound >= pmf (N <= {max_n})"), KERNEL_REL_TOL),
        merge_all(ratios).finish(format!("tail_ratio_bound >= tail (N <= {max_n})"), KERNEL_REL_TOL),
    ]
}

/// Minimum technical-lemma gap over a `LEMMA_GRID^3` grid of
/// `mu in [(n+1)/N, 1/2]`, `u in (0, 1/2)` and `gamma in [gamma0, LEMMA_GAMMA_SPAN gamma0]`.
pub fn technical_lemma_check(n: u64, big_n: u64) -> CheckResult {
    let mut tally = Tally::new();
    let mu_lo = (n + 1) as f64 / big_n as f64;
    let gamma0 = (big_n - n) as f64 / n as f64;
    let last = (LEMMA_GRID - 1) as f64;
    for i in 0..LEMMA_GRID {
        let mu = mu_lo + (0.5 - mu_lo) * i as f64 / last;
        // u = 1/2 is a pole of the right side (gap +inf); stop one step short.
        for j in 1..=LEMMA_GRID {
            let u = 0.5 * j as f64 / (LEMMA_GRID + 1) as f64;
            for l in 0..LEMMA_GRID {
                let gamma = gamma0 * (1.0 + (LEMMA_GAMMA_SPAN - 1.0) * l as f64 / last);
                match technical_lemma_gap(mu, u, gamma, n, big_n) {
                    Ok(gap) => tally.record(gap, || format!("(mu={mu}, u={u}, gamma={gamma})")),
                    Err(e) => tally.record(f64::NAN, || format!("(mu={mu}, u={u}, gamma={gamma}): {e}")),
                }
            }
        }
    }
    tally.finish(format!("technical lemma gap (n={n}, N={big_n})"), LEMMA_TOL)
}

/// Robbins' envelope brackets `n!` for `1 <= n <= max_n`.
pub fn stirling_check(max_n: u64) -> CheckResult {
    let mut tally = Tally::new();
    let mut fact = BigUint::one();
    for n in 1..=max_n {
        fact *= n;
        let exact = fact.to_f64().unwrap_or(f64::INFINITY);
        match stirling_envelope(n) {
            Ok((lo, hi)) => {
                let margin = (exact / lo - 1.0).min(hi / exact - 1.0);
                tally.record(margin, || format!("n={n}: [{lo}, {hi}] vs {exact}"));
            }
            Err(e) => tally.record(f64::NAN, || format!("n={n}: {e}")),
        }
    }
    tally.finish(format!("Stirling envelope brackets n! (n <= {max_n})"), 0.0)
}

/// `psi(v) >= 1/(1 + v/3)` on 1000 log-spaced points of `[1e-4, 1e4]`.
pub fn psi_bernstein_check() -> CheckResult {
    let mut tally = Tally::new();
    let count = 1000;
    for i in 0..count {
        let v = 10f64.powf(-4.0 + 8.0 * i as f64 / (count - 1) as f64);
        let p = psi_bennett(v).unwrap_or(f64::NAN);
        let floor = 1.0 / (1.0 + v / 3.0);
        tally.record(p - floor, || format!("v={v}: psi {p} vs {floor}"));
    }
    tally.finish("psi(v) >= 1/(1+v/3)", 0.0)
}

/// `Psi''` by central differences agrees with its closed form, and the
/// closed form dominates `4 (1 + 4 (u - (1/2 - mu))^2)`.
pub fn big_psi_checks() -> [CheckResult; 2] {
    let mut fd = Tally::new();
    let mut lower = Tally::new();
    for i in 1..=20 {
        let mu = 0.5 * i as f64 / 20.0 - 0.01;
        let span = 1.0 - mu;
        for j in 1..40 {
            let u = span * j as f64 / 40.0;
            let h = FD_STEP;
            let (Ok(a), Ok(b), Ok(c), Ok(closed)) =
                (big_psi(u - h, mu), big_psi(u, mu), big_psi(u + h, mu), big_psi_second_derivative(u, mu))
            else {
                continue;
            };
            let numeric = (a - 2.0 * b + c) / (h * h);
            let rel = ((numeric - closed) / closed).abs();
            fd.record(FD_REL_TOL - rel, || format!("(u={u}, mu={mu}): {numeric} vs {closed}"));
            let z = u - (0.5 - mu);
            let floor = 4.0 * (1.0 + 4.0 * z * z);
            lower.record(closed - floor, || format!("(u={u}, mu={mu}): {closed} vs {floor}"));
        }
    }
    [fd.finish("Psi'' central difference matches closed form", 0.0), lower.finish("Psi'' >= 4(1 + 4(u - (1/2 - mu))^2)", 0.0)]
}

/// All kernel checks.
pub fn kernels_suite_with(max_n: u64, exec: Execution) -> SuiteReport {
    let mut checks: Vec<CheckResult> = deviate_and_ratio_checks(max_n, exec).into();
    checks.extend(LEMMA_CASES.iter().map(|&(n, big_n)| technical_lemma_check(n, big_n)));
    checks.push(stirling_check(25));
    checks.push(psi_bernstein_check());
    checks.extend(big_psi_checks());
    SuiteReport { name: "kernels".into(), checks }
}

/// [`kernels_suite_with`] at [`KERNEL_MAX_N`].
pub fn kernels_suite(exec: Execution) -> SuiteReport {
    kernels_suite_with(KERNEL_MAX_N, exec)
}

// ---------------------------------------------------------------------------
// Orders

/// `{0, 1/(N-1), ..., 1}` with `N = 15`.
pub fn fifteen_point_population() -> Population {
    let big_n = 15i64;
    Population::from_rationals((0..big_n).map(|i| BigRational::new(i.into(), (big_n - 1).into())).collect())
        .expect("non-empty")
}

/// Seeded random rational populations on `[0, 1]`: sizes in `1..=max_n`,
/// values `p/q` with `1 <= q <= 12`.
pub fn random_unit_populations(count: usize, max_n: usize, seed: u64) -> Vec<Population> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.random_range(1..=max_n);
            let values = (0..len)
                .map(|_| {
                    let q: i64 = rng.random_range(1..=12);
                    let p: i64 = rng.random_range(0..=q);
                    BigRational::new(p.into(), q.into())
                })
                .collect();
            Population::from_rationals(values).expect("non-empty")
        })
        .collect()
}

fn pass_fail(name: &str, checked: u64, failures: Vec<String>) -> CheckResult {
    let mut tally = Tally::new();
    tally.checked = checked;
    tally.worst = if failures.is_empty() { 0.0 } else { -1.0 };
    tally.witness = failures.into_iter().next();
    tally.finish(name, 0.0)
}

fn describe(pop: &Population) -> String {
    let v: Vec<String> = pop.to_rationals().iter().map(|r| r.to_string()).collect();
    format!("[{}]", v.join(", "))
}

/// Counts of the Kemperman and sub-majorizing outputs for the 15-point grid.
pub fn fifteen_point_check() -> CheckResult {
    let x = fifteen_point_population();
    let mut failures = Vec::new();
    match (kemperman_majorize(&x), sub_majorize(&x)) {
        (Ok(maj), Ok(sub)) => {
            let half = BigRational::new(1.into(), 2.into());
            if maj.ones != 7 || maj.zeros != 7 || maj.exceptional_exact.as_ref() != Some(&half) {
                failures.push(format!("majorization: {} ones, {} zeros, exceptional {:?}", maj.ones, maj.zeros, maj.exceptional_exact));
            }
            if sub.ones != 8 || sub.zeros != 7 {
                failures.push(format!("sub-majorization: {} ones, {} zeros", sub.ones, sub.zeros));
            }
            for k in 1..=x.len() {
                for (y, family, label) in
                    [(&maj.output, ConvexFamily::Full, "majorization"), (&sub.output, ConvexFamily::Increasing, "sub-majorization")]
                {
                    match verify_convex_order(&x, y, Some(k), family) {
                        Ok(r) if r.passed() => {}
                        Ok(r) => failures.push(format!("{label}, n={k}: {:?}", r.violations[0])),
                        Err(e) => failures.push(format!("{label}, n={k}: {e}")),
                    }
                }
            }
        }
        (Err(e), _) | (_, Err(e)) => failures.push(e.to_string()),
    }
    pass_fail("15-point grid: counts and convex order", 1, failures)
}

/// Exhaustive convex-order checks on a seeded random corpus: the full convex
/// family against the Kemperman output, the increasing family against the
/// sub-majorizing output.
pub fn convex_order_checks(count: usize, exec: Execution) -> [CheckResult; 2] {
    let corpus = random_unit_populations(count, CONVEX_MAX_N.min(MAX_ENUMERATION_N), CONVEX_SEED);
    let results = exec.map(corpus, |x| {
        let check = |y: std::result::Result<Population, String>, family| -> Option<String> {
            let y = match y {
                Ok(y) => y,
                Err(e) => return Some(format!("{}: {e}", describe(&x))),
            };
            match verify_convex_order(&x, &y, None, family) {
                Ok(r) if r.passed() => None,
                Ok(r) => Some(format!("{} vs {}: {:?}", describe(&x), describe(&y), r.violations[0])),
                Err(e) => Some(format!("{}: {e}", describe(&x))),
            }
        };
        let maj = kemperman_majorize(&x).map(|m| m.output).map_err(|e| e.to_string());
        let sub = sub_majorize(&x).map(|s| s.output).map_err(|e| e.to_string());
        (check(maj, ConvexFamily::Full), check(sub, ConvexFamily::Increasing))
    });
    let (maj, sub): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    [
        pass_fail(
            "convex order, Kemperman majorization, full family",
            count as u64,
            maj.into_iter().flatten().collect(),
        ),
        pass_fail(
            "convex order, sub-majorization, increasing family",
            count as u64,
            sub.into_iter().flatten().collect(),
        ),
    ]
}

/// Majorization predicates and the counting identities
/// `D = floor(N mean)`, `alpha = N mean - D`, `D_sub = ceil(N mean)` on a
/// seeded random corpus, in exact arithmetic.
pub fn majorization_predicate_checks(count: usize, exec: Execution) -> [CheckResult; 3] {
    let corpus = random_unit_populations(count, ORDER_MAX_N, ORDER_SEED);
    let results = exec.map(corpus, |x| {
        let mut out: [Option<String>; 3] = [None, None, None];
        let (maj, sub) = match (kemperman_majorize(&x), sub_majorize(&x)) {
            (Ok(m), Ok(s)) => (m, s),
            (Err(e), _) | (_, Err(e)) => {
                let msg = format!("{}: {e}", describe(&x));
                return [Some(msg.clone()), Some(msg.clone()), Some(msg)];
            }
        };
        if !prec(&x, &maj.output).unwrap_or(false) {
            out[0] = Some(format!("{} not majorized by {}", describe(&x), describe(&maj.output)));
        }
        if !prec_w(&x, &sub.output).unwrap_or(false) {
            out[1] = Some(format!("{} not sub-majorized by {}", describe(&x), describe(&sub.output)));
        }
        let total = unit_mass(&x).exact.expect("rational corpus");
        let floor = total.floor();
        let alpha = &total - &floor;
        let ceil = total.ceil();
        let exc = maj.exceptional_exact.clone().unwrap_or_else(BigRational::zero);
        let counts_ok = BigRational::from_integer(maj.d_major.into()) == floor
            && exc == alpha
            && maj.ones as u64 == maj.d_major
            && BigRational::from_integer((sub.ones as u64).into()) == ceil;
        if !counts_ok {
            out[2] = Some(format!(
                "{}: D = {}, ones = {}, exceptional = {exc}, sub ones = {}, N mean = {total}",
                describe(&x),
                maj.d_major,
                maj.ones,
                sub.ones
            ));
        }
        out
    });
    let mut failures: [Vec<String>; 3] = Default::default();
    for r in results {
        for (f, o) in failures.iter_mut().zip(r) {
            f.extend(o);
        }
    }
    let [a, b, c] = failures;
    [
        pass_fail("x majorized by its Kemperman output", count as u64, a),
        pass_fail("x weakly sub-majorized by its 0/1 rounding", count as u64, b),
        pass_fail("D = floor(N mean), alpha = N mean - D, D_sub = ceil(N mean)", count as u64, c),
    ]
}

/// All order checks.
pub fn orders_suite_with(convex_count: usize, order_count: usize, exec: Execution) -> SuiteReport {
    let mut checks = vec![fifteen_point_check()];
    checks.extend(convex_order_checks(convex_count, exec));
    checks.extend(majorization_predicate_checks(order_count, exec));
    SuiteReport { name: "orders".into(), checks }
}

/// [`orders_suite_with`] at the documented corpus sizes.
pub fn orders_suite(exec: Execution) -> SuiteReport {
    orders_suite_with(CONVEX_CORPUS, ORDER_CORPUS, exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::standardize;

    fn lattice_lambda(params: &HGParams, k: i64) -> Option<f64> {
        standardize(params, k).ok().map(|d| d.lambda)
    }

    #[test]
    fn tally_keeps_worst_and_nan() {
        let mut t = Tally::new();
        t.record(0.5, || "a".into());
        t.record(-0.1, || "b".into());
        t.record(0.2, || "c".into());
        assert_eq!(t.checked, 3);
        assert_eq!(t.witness.as_deref(), Some("b"));
        let mut u = Tally::new();
        u.record(f64::NAN, || "nan".into());
        t.merge(u);
        let r = t.finish("x", 1.0);
        assert!(!r.passed, "NaN margins fail");
        assert_eq!(r.witness.as_deref(), Some("nan"));
    }

    #[test]
    fn lattice_grid_includes_every_positive_deviation() {
        let p = HGParams::new(4, 5, 12).unwrap();
        let grid = lambda_grid(BoundId::SerflingHg, &p, 4);
        for k in 2..=4 {
            let lam = lattice_lambda(&p, k).unwrap();
            assert!(grid.iter().any(|&g| (g - lam).abs() < 1e-15), "missing k = {k}");
        }
        assert!(grid.iter().all(|&g| g > 0.0));
        let pole = lambda_grid(BoundId::LpHyper, &p, 4);
        assert!(pole.iter().take(DOMINANCE_GRID).all(|&g| g < 1.0));
    }

    #[test]
    fn exact_targets_by_event() {
        let p = HGParams::new(4, 5, 12).unwrap();
        let dist = HgDistribution::new(p);
        let tails = Tails::hypergeometric(&dist, 4);
        let lam = lattice_lambda(&p, 3).unwrap();
        assert_eq!(exact_target(Sidedness::OneSided, &p, &tails, lam), dist.tail_f64(3));
        assert_eq!(exact_target(Sidedness::PointMass, &p, &tails, lam), dist.pmf_f64(3));
        assert_eq!(exact_target(Sidedness::PointMass, &p, &tails, lam + 0.01), 0.0);
        let two = exact_target(Sidedness::TwoSided, &p, &tails, lam);
        assert!((two - dist.two_sided_f64(Deviation::new(lam).lower_threshold(&p), 3)).abs() < 1e-15);
    }

    #[test]
    fn small_dominance_suite_passes() {
        let report = dominance_suite_with(&[10], Execution::Parallel);
        assert!(report.passed(), "{report}");
        assert!(report.checks.iter().all(|c| c.checked > 0), "{report}");
    }

    #[test]
    fn small_kernel_suite_passes() {
        let report = kernels_suite_with(30, Execution::Parallel);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn small_orders_suite_passes() {
        let report = orders_suite_with(20, 200, Execution::Parallel);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn corpus_is_seeded() {
        let a = random_unit_populations(5, 6, 7);
        let b = random_unit_populations(5, 6, 7);
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p.within_unit_interval() && p.len() <= 6));
    }
}
