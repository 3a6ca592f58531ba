//! Bound comparisons: lambda sweeps, crossover search, the frozen figure
//! grids, and deterministic CSV output.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::bounds::{conjecture_curve, evaluate, BoundId, BoundInput, CurveId, InputKind};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::rank::{build_setup, rank_test_curves, RankKind, KLOTZ_PARITY_RANGE};
use crate::types::{BoundValue, HGParams, Population};

/// Number of points in the default figure grids.
pub const FIGURE_STEPS: usize = 400;
/// Points in the crossover scan.
pub const CROSSOVER_SCAN: usize = 200;
/// Bisection tolerance on lambda.
pub const CROSSOVER_TOL: f64 = 1e-9;

/// One evaluated point of a plotted curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub figure: String,
    pub curve: String,
    pub lambda: f64,
    pub value: BoundValue,
}

/// One evaluated point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub curve: CurveId,
    pub input: String,
    pub lambda: f64,
    pub value: BoundValue,
}

/// Turn a domain failure into a row marked invalid with a NaN value, so a
/// grid keeps its shape; other errors propagate.
pub fn value_or_domain_failure(r: Result<BoundValue>) -> Result<BoundValue> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::Domain(msg)) => {
            Ok(BoundValue { raw: f64::NAN, clamped: f64::NAN, domain_ok: false, domain_msg: msg })
        }
        Err(e) => Err(e),
    }
}

/// What a comparison is evaluated on: a hypergeometric scenario, from which
/// every bound derives its own input, or one explicit input.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    Hg(HGParams),
    Explicit(BoundInput),
}

impl Scenario {
    pub fn input_for(&self, id: BoundId) -> Result<BoundInput> {
        match self {
            Scenario::Hg(p) => BoundInput::from_hg(id.input_kind(), p),
            Scenario::Explicit(inp) => {
                if inp.kind() != id.input_kind() {
                    return Err(Error::usage(format!(
                        "{id} takes {:?} input, but the scenario provides {:?}",
                        id.input_kind(),
                        inp.kind()
                    )));
                }
                Ok(inp.clone())
            }
        }
    }

    fn conjecture_population(&self) -> Result<(Population, u64)> {
        match self {
            Scenario::Hg(p) => Ok((Population::from_hg(p), p.n())),
            Scenario::Explicit(BoundInput::Pop { pop, n, .. }) => Ok((pop.clone(), *n)),
            Scenario::Explicit(BoundInput::Hg(p)) => Ok((Population::from_hg(p), p.n())),
            Scenario::Explicit(other) => {
                Err(Error::usage(format!("serfling_conjecture needs a population or hypergeometric input, got {:?}", other.kind())))
            }
        }
    }

    pub fn describe_for(&self, curve: CurveId) -> Result<String> {
        Ok(match curve {
            CurveId::Bound(id) => self.input_for(id)?.describe(),
            CurveId::Conjecture => match self {
                Scenario::Hg(p) => BoundInput::Hg(*p).describe(),
                Scenario::Explicit(inp) => inp.describe(),
            },
        })
    }

    /// Evaluate a curve at `lambda`.
    pub fn evaluate(&self, curve: CurveId, lambda: f64) -> Result<BoundValue> {
        match curve {
            CurveId::Bound(id) => evaluate(id, &self.input_for(id)?, lambda),
            CurveId::Conjecture => {
                let (pop, n) = self.conjecture_population()?;
                let raw = conjecture_curve(&pop, n, lambda)?;
                Ok(BoundValue::new(raw, vec!["conjectured, not a proven bound".to_string()]))
            }
        }
    }
}

/// A lambda grid of `count` equally spaced points from `start` to `stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl LambdaGrid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::usage(format!("a lambda grid needs at least 2 points; got {count}")));
        }
        if !(start.is_finite() && stop.is_finite() && start < stop) {
            return Err(Error::usage(format!("a lambda grid needs finite start < stop; got [{start}, {stop}]")));
        }
        if start < 0.0 {
            return Err(Error::usage(format!("lambda grid must start at >= 0; got {start}")));
        }
        Ok(LambdaGrid { start, stop, count })
    }

    /// `count` points over the half-open interval `(0, stop]`.
    pub fn half_open(stop: f64, count: usize) -> Vec<f64> {
        (1..=count).map(|i| stop * i as f64 / count as f64).collect()
    }

    pub fn points(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.stop } else { self.start + span * i as f64 / last })
            .collect()
    }
}

/// Curves, scenario and grid of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub curves: Vec<CurveId>,
    pub scenario: Scenario,
    pub grid: LambdaGrid,
}

pub fn sweep(spec: &SweepSpec, exec: Execution) -> Result<Vec<SweepRow>> {
    let mut jobs = Vec::new();
    for &curve in &spec.curves {
        let input = spec.scenario.describe_for(curve)?;
        for lambda in spec.grid.points() {
            jobs.push((curve, input.clone(), lambda));
        }
    }
    exec.map(jobs, |(curve, input, lambda)| {
        let value = value_or_domain_failure(spec.scenario.evaluate(curve, lambda))?;
        Ok(SweepRow { curve, input, lambda, value })
    })
    .into_iter()
    .collect()
}

/// All strict sign changes of `raw(a) - raw(b)` on a uniform scan of
/// `[lo, hi]`, each refined by bisection to [`CROSSOVER_TOL`].
pub fn crossover(a: BoundId, b: BoundId, scenario: &Scenario, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi && lo >= 0.0) {
        return Err(Error::usage(format!("crossover bracket must satisfy 0 <= lo < hi; got [{lo}, {hi}]")));
    }
    let (ia, ib) = (scenario.input_for(a)?, scenario.input_for(b)?);
    let diff = |l: f64| -> Result<f64> { Ok(evaluate(a, &ia, l)?.raw - evaluate(b, &ib, l)?.raw) };
    let scan: Vec<f64> = (0..CROSSOVER_SCAN)
        .map(|i| lo + (hi - lo) * i as f64 / (CROSSOVER_SCAN - 1) as f64)
        .collect();
    let values = scan.iter().map(|&l| diff(l)).collect::<Result<Vec<_>>>()?;
    let mut roots = Vec::new();
    for i in 0..scan.len() - 1 {
        let (fa, fb) = (values[i], values[i + 1]);
        if !(fa.is_finite() && fb.is_finite()) || fa * fb >= 0.0 {
            continue;
        }
        let (mut l, mut r, mut fl) = (scan[i], scan[i + 1], fa);
        while r - l > CROSSOVER_TOL {
            let m = 0.5 * (l + r);
            let fm = diff(m)?;
            if fm == 0.0 {
                l = m;
                r = m;
                break;
            }
            if (fm < 0.0) == (fl < 0.0) {
                l = m;
                fl = fm;
            } else {
                r = m;
            }
        }
        roots.push(0.5 * (l + r));
    }
    Ok(roots)
}

/// The frozen figure parameter blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Binomial vs hypergeometric pole-bearing bounds, `N = 2001`, `n in {250, 1000}`.
    Fig1,
    /// Their difference at four deviations for `n = 10..1000`.
    Fig1b,
    /// Hypergeometric bounds at `N = 2001`, `n = 100`, `D in {200, 500}`.
    Fig2,
    /// Permutation-statistic and martingale bounds at `n = 100`, `N = 2001`, `D in {101, 200}`.
    Fig3,
    /// Rank-test populations: Wilcoxon `(250, 250)` and Klotz `(60, 440)`.
    Fig5,
}

impl FigureId {
    pub const ALL: [FigureId; 5] = [FigureId::Fig1, FigureId::Fig1b, FigureId::Fig2, FigureId::Fig3, FigureId::Fig5];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig1b => "fig1b",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig5 => "fig5",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown figure `{s}` (expected fig1, fig1b, fig2, fig3 or fig5)")))
    }
}

/// Options of figure generation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FigureOptions {
    /// Replaces every curve's default grid.
    pub grid: Option<LambdaGrid>,
    /// Use the rounded `b - a = 8.29` for the Klotz curves.
    pub caption_parity: bool,
}

pub const FIG_POPULATION: u64 = 2001;
pub const FIG1_SAMPLES: [u64; 2] = [250, 1000];
pub const FIG1_SUCCESSES: u64 = 1000;
pub const FIG1B_LAMBDAS: [f64; 4] = [0.25, 1.0 / 3.0, 0.5, 1.0];
pub const FIG2_SUCCESSES: [u64; 2] = [200, 500];
pub const FIG3_SUCCESSES: [u64; 2] = [101, 200];
pub const FIG23_SAMPLE: u64 = 100;
pub const FIG2_BOUNDS: [BoundId; 6] = [
    BoundId::LpHyper,
    BoundId::BennettHyper,
    BoundId::BernsteinHyper,
    BoundId::SerflingHg,
    BoundId::HushScovel,
    BoundId::BmHg,
];
pub const FIG3_BOUNDS: [BoundId; 5] = [
    BoundId::SerflingHg,
    BoundId::ChatterjeeGeneral,
    BoundId::GiHyper,
    BoundId::BmGeneral,
    BoundId::BennettHyper,
];

/// Default upper end of a curve's grid: `0.45 sqrt(n)` below the pole of
/// pole-bearing bounds, 3 otherwise.
pub fn default_lambda_max(id: BoundId, n: u64) -> f64 {
    if id.pole_bearing() {
        0.45 * (n as f64).sqrt()
    } else {
        3.0
    }
}

fn grid_for(opts: &FigureOptions, lambda_max: f64) -> Vec<f64> {
    match opts.grid {
        Some(g) => g.points(),
        None => LambdaGrid::half_open(lambda_max, FIGURE_STEPS),
    }
}

fn hg_curves(
    figure: FigureId,
    params: &HGParams,
    ids: &[BoundId],
    label: &str,
    opts: &FigureOptions,
    exec: Execution,
) -> Result<Vec<CurveRow>> {
    let scenario = Scenario::Hg(*params);
    let mut jobs = Vec::new();
    for &id in ids {
        let input = scenario.input_for(id)?;
        for lambda in grid_for(opts, default_lambda_max(id, params.n())) {
            jobs.push((id, input.clone(), lambda));
        }
    }
    exec.map(jobs, |(id, input, lambda)| {
        Ok(CurveRow {
            figure: figure.name().to_string(),
            curve: format!("{id}:{label}"),
            lambda,
            value: value_or_domain_failure(evaluate(id, &input, lambda))?,
        })
    })
    .into_iter()
    .collect()
}

/// `leon_perron_bin - lp_hyper` at `(n, D = 1000, N = 2001)`.
fn fig1b_rows(opts: &FigureOptions, exec: Execution) -> Result<Vec<CurveRow>> {
    let lambdas: Vec<f64> = match opts.grid {
        Some(g) => g.points(),
        None => FIG1B_LAMBDAS.to_vec(),
    };
    let mut jobs = Vec::new();
    for n in (10..=1000u64).step_by(10) {
        for &lambda in &lambdas {
            jobs.push((n, lambda));
        }
    }
    exec.map(jobs, |(n, lambda)| {
        let params = HGParams::new(n, FIG1_SUCCESSES, FIG_POPULATION)?;
        let bin = value_or_domain_failure(evaluate(
            BoundId::LeonPerronBin,
            &BoundInput::from_hg(InputKind::Bin, &params)?,
            lambda,
        ))?;
        let hg = value_or_domain_failure(evaluate(BoundId::LpHyper, &BoundInput::Hg(params), lambda))?;
        let mut msgs: Vec<String> = Vec::new();
        for (name, v) in [("leon_perron_bin", &bin), ("lp_hyper", &hg)] {
            if !v.domain_ok {
                msgs.push(format!("{name}: {}", v.domain_msg));
            }
        }
        Ok(CurveRow {
            figure: FigureId::Fig1b.name().to_string(),
            curve: format!("bin_minus_hg:n={n}"),
            lambda,
            value: BoundValue {
                raw: bin.raw - hg.raw,
                clamped: bin.clamped - hg.clamped,
                domain_ok: msgs.is_empty(),
                domain_msg: msgs.join("; "),
            },
        })
    })
    .into_iter()
    .collect()
}

/// Generate a figure's curves on its frozen parameter block.
pub fn figure(id: FigureId, opts: &FigureOptions, exec: Execution) -> Result<Vec<CurveRow>> {
    let mut rows = Vec::new();
    match id {
        FigureId::Fig1 => {
            for n in FIG1_SAMPLES {
                let p = HGParams::new(n, FIG1_SUCCESSES, FIG_POPULATION)?;
                let label = format!("n={n}");
                rows.extend(hg_curves(id, &p, &[BoundId::LeonPerronBin, BoundId::LpHyper], &label, opts, exec)?);
            }
        }
        FigureId::Fig1b => rows = fig1b_rows(opts, exec)?,
        FigureId::Fig2 | FigureId::Fig3 => {
            let (ds, ids): (&[u64], &[BoundId]) =
                if id == FigureId::Fig2 { (&FIG2_SUCCESSES, &FIG2_BOUNDS) } else { (&FIG3_SUCCESSES, &FIG3_BOUNDS) };
            for &d in ds {
                let p = HGParams::new(FIG23_SAMPLE, d, FIG_POPULATION)?;
                rows.extend(hg_curves(id, &p, ids, &format!("D={d}"), opts, exec)?);
            }
        }
        FigureId::Fig5 => {
            for (kind, n, m) in [(RankKind::Wilcoxon, 250, 250), (RankKind::Klotz, 60, 440)] {
                let setup = build_setup(kind, n, m)?;
                let parity = (opts.caption_parity && kind == RankKind::Klotz).then_some(KLOTZ_PARITY_RANGE);
                let range = parity.unwrap_or(setup.population.range());
                let lambdas = grid_for(opts, 3.0 * range);
                rows.extend(rank_test_curves(&setup, &lambdas, parity)?);
            }
        }
    }
    Ok(rows)
}

fn csv_bytes<I, R>(header: [&str; 6], records: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(to_io)?;
    for r in records {
        w.write_record(r).map_err(to_io)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

fn value_fields(v: &BoundValue) -> [String; 3] {
    [v.raw.to_string(), v.clamped.to_string(), v.domain_ok.to_string()]
}

/// CSV text of figure rows: `figure,curve,lambda,raw,clamped,domain_ok`.
pub fn curve_csv(rows: &[CurveRow]) -> Result<Vec<u8>> {
    csv_bytes(
        ["figure", "curve", "lambda", "raw", "clamped", "domain_ok"],
        rows.iter().map(|r| {
            let [raw, clamped, ok] = value_fields(&r.value);
            [r.figure.clone(), r.curve.clone(), r.lambda.to_string(), raw, clamped, ok]
        }),
    )
}

/// CSV text of sweep rows: `bound_id,input,lambda,raw,clamped,domain_ok`.
pub fn sweep_csv(rows: &[SweepRow]) -> Result<Vec<u8>> {
    csv_bytes(
        ["bound_id", "input", "lambda", "raw", "clamped", "domain_ok"],
        rows.iter().map(|r| {
            let [raw, clamped, ok] = value_fields(&r.value);
            [r.curve.to_string(), r.input.clone(), r.lambda.to_string(), raw, clamped, ok]
        }),
    )
}

/// Write `bytes` to `path` through a temporary file in the same directory
/// that is renamed into place only after a successful write.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = LambdaGrid::new(0.0, 1.0, 5).unwrap();
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(matches!(LambdaGrid::new(0.0, 1.0, 1), Err(Error::Usage(_))));
        assert!(matches!(LambdaGrid::new(1.0, 1.0, 3), Err(Error::Usage(_))));
        let h = LambdaGrid::half_open(3.0, 400);
        assert_eq!((h.len(), h[399]), (400, 3.0));
        assert!(h[0] > 0.0);
    }

    #[test]
    fn crossover_examples() {
        let s = Scenario::Hg(HGParams::new(100, 200, 2001).unwrap());
        let x = crossover(BoundId::ChatterjeeGeneral, BoundId::SerflingHg, &s, 0.0, 3.0).unwrap();
        assert_eq!(x.len(), 1);
        assert!((x[0] - 0.377).abs() < 0.01, "{x:?}");
        assert!(crossover(BoundId::SerflingHg, BoundId::SerflingHg, &s, 0.0, 3.0).unwrap().is_empty());
        assert!(crossover(BoundId::BernsteinHyper, BoundId::BennettHyper, &s, 0.0, 3.0).unwrap().is_empty());
    }

    #[test]
    fn sweep_marks_domain_failures() {
        let spec = SweepSpec {
            curves: vec![CurveId::Bound(BoundId::LpHyper), CurveId::Conjecture],
            scenario: Scenario::Hg(HGParams::new(100, 50, 2001).unwrap()),
            grid: LambdaGrid::new(0.5, 1.0, 3).unwrap(),
        };
        let rows = sweep(&spec, Execution::Sequential).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows[..3].iter().all(|r| !r.value.domain_ok));
        let text = String::from_utf8(sweep_csv(&rows).unwrap()).unwrap();
        assert!(text.starts_with("bound_id,input,lambda,raw,clamped,domain_ok\n"));
        assert!(text.contains("serfling_conjecture,hg(n=100;D=50;N=2001),0.5,"));
    }

    #[test]
    fn figures_are_deterministic_and_parallel_agrees() {
        for id in [FigureId::Fig1, FigureId::Fig2, FigureId::Fig3] {
            let a = curve_csv(&figure(id, &FigureOptions::default(), Execution::Parallel).unwrap()).unwrap();
            let b = curve_csv(&figure(id, &FigureOptions::default(), Execution::Sequential).unwrap()).unwrap();
            assert_eq!(a, b);
        }
        let rows = figure(FigureId::Fig3, &FigureOptions::default(), Execution::Sequential).unwrap();
        assert_eq!(rows.len(), 2 * 5 * FIGURE_STEPS);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, b"a\n").unwrap();
        write_atomic(&path, b"b\n").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"b\n");
        assert!(write_atomic(&dir.path().join("missing/x.csv"), b"c").is_err());
    }
}
