//! `swor-bounds`: evaluate, sweep, compare and verify tail bounds for
//! sampling without replacement.
//!
//! Exit codes: 0 success, 1 a verification found a violation, 2 a domain
//! error (a hypothesis of the requested bound or oracle fails), 3 a usage or
//! parse error, 4 an I/O error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use swor_bounds::bounds::{evaluate, BoundId, BoundInput, CurveId};
use swor_bounds::compare::{
    crossover, curve_csv, figure, sweep, sweep_csv, write_atomic, FigureId, FigureOptions, LambdaGrid, Scenario,
    SweepSpec,
};
use swor_bounds::error::Error;
use swor_bounds::exact::{bernoulli_decomposition, ehm_tv_bound, tv_distance, HgDistribution};
use swor_bounds::input::{parse_matrix, parse_number, parse_population};
use swor_bounds::majorization::{kemperman_majorize, sub_majorize, verify_convex_order, ConvexFamily};
use swor_bounds::par::{init_threads, Execution};
use swor_bounds::rank::{build_setup, rank_test_curves, RankKind, KLOTZ_PARITY_RANGE};
use swor_bounds::types::{rational_to_f64, HGParams, Population};
use swor_bounds::verify::{dominance_suite, kernels_suite, orders_suite, SuiteReport};

const THREADS_ENV: &str = "SWOR_BOUNDS_THREADS";

/// `println!` that treats a closed stdout (e.g. piping into `head`) as a
/// normal end of output instead of a panic.
macro_rules! outln {
    ($($arg:tt)*) => {
        write_stdout(format!($($arg)*) + "\n")
    };
}

fn write_stdout(text: String) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: i/o error: {e}");
        std::process::exit(4);
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Parser)]
#[command(name = "swor-bounds", version, about = "Tail bounds for sampling without replacement")]
struct Cli {
    /// Run sweeps and suites on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one bound at one deviation; prints `bound_id raw clamped domain_ok`.
    Eval(EvalArgs),
    /// Evaluate curves over a lambda grid and emit CSV.
    Sweep(SweepArgs),
    /// Emit the CSV of one of the frozen comparison figures.
    Figure(FigureArgs),
    /// Find the deviations where two bounds cross.
    Crossover(CrossoverArgs),
    /// Exact hypergeometric quantities.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Kemperman majorization of a population file.
    #[command(subcommand)]
    Major(MajorCommand),
    /// Rank-test populations (Wilcoxon, Klotz) and their bounds.
    Ranktest(RankArgs),
    /// Run property suites; exits 1 on any violation.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
}

/// Where a bound's input comes from: a hypergeometric scenario
/// (`--n --D --N`), a population file (`--input` with `--n`), a binomial
/// (`--n --p`) or a score matrix (`--matrix`).
#[derive(Args, Debug, Clone, Default)]
struct InputArgs {
    /// Sample size.
    #[arg(long)]
    n: Option<u64>,
    /// Number of successes in the population.
    #[arg(long = "D")]
    d: Option<u64>,
    /// Population size.
    #[arg(long = "N")]
    big_n: Option<u64>,
    /// Binomial success probability (decimal or p/q).
    #[arg(long)]
    p: Option<String>,
    /// Population file: one value per line, `#` comments, `p/q` allowed.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Score-matrix file: one row per line.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Sample-size scale of a score matrix.
    #[arg(long)]
    scale: Option<u64>,
    /// Slack of the variance-adaptive martingale bound for population inputs.
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Args)]
struct EvalArgs {
    bound: String,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, allow_negative_numbers = true)]
    lambda: f64,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long = "lambda-min", allow_negative_numbers = true)]
    lambda_min: Option<f64>,
    #[arg(long = "lambda-max")]
    lambda_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated curve ids (bound ids or `serfling_conjecture`).
    #[arg(long, value_delimiter = ',', required = true)]
    bounds: Vec<String>,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FigureArgs {
    /// fig1, fig1b, fig2, fig3 or fig5.
    id: String,
    #[command(flatten)]
    grid: GridArgs,
    /// Use the rounded range 8.29 for the Klotz curves.
    #[arg(long = "caption-parity")]
    caption_parity: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CrossoverArgs {
    a: String,
    b: String,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0.0)]
    lo: f64,
    #[arg(long, default_value_t = 3.0)]
    hi: f64,
}

#[derive(Args)]
struct HgArgs {
    #[arg(long)]
    n: u64,
    #[arg(long = "D")]
    d: u64,
    #[arg(long = "N")]
    big_n: u64,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Exact `P(S = k)`.
    Pmf {
        #[command(flatten)]
        hg: HgArgs,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
    },
    /// Exact `P(S >= k)`.
    Tail {
        #[command(flatten)]
        hg: HgArgs,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
    },
    /// Total variation distance to the binomial, with Ehm's bound.
    Tv {
        #[command(flatten)]
        hg: HgArgs,
    },
    /// Success probabilities of the independent-Bernoulli representation.
    Decompose {
        #[command(flatten)]
        hg: HgArgs,
    },
}

#[derive(Subcommand)]
enum MajorCommand {
    /// Print the Kemperman (or rounded-up 0/1) majorization of a population on [0, 1].
    Run {
        #[arg(long)]
        input: PathBuf,
        /// Round the exceptional element up to 1.
        #[arg(long)]
        sub: bool,
    },
    /// Check the convex order of sample sums against the majorization, by enumeration.
    VerifyOrder {
        #[arg(long)]
        input: PathBuf,
        /// Sample size; every size when absent.
        #[arg(long)]
        n: Option<usize>,
        /// Compare against the rounded-up 0/1 population instead.
        #[arg(long)]
        sub: bool,
        #[arg(long, value_enum)]
        family: Option<Family>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Increasing,
    Full,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    kind: String,
    /// Size of the sampled group.
    #[arg(long)]
    n: u64,
    /// Size of the other group.
    #[arg(long)]
    m: u64,
    /// Deviations at which to print the comparison curves.
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<f64>,
    #[arg(long = "caption-parity")]
    caption_parity: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Kernels,
    Dominance,
    Orders,
    All,
}

/// Why a command stopped.
enum Failure {
    Lib(Error),
    /// A verification found violations (already reported).
    Violations,
    /// The evaluated bound's hypotheses fail (value already printed).
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<(), Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::Support { .. } | Error::Numeric(_) => 2,
        Error::Usage(_) | Error::Parse(_) => 3,
        Error::Io(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(exit_code(&e));
    }
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match run(cli.command, exec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violations) => ExitCode::from(1),
        Err(Failure::Domain(msg)) => {
            eprintln!("domain error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return Ok(()) };
    match raw.trim().parse::<usize>() {
        Ok(t) if t > 0 => {
            init_threads(t);
            Ok(())
        }
        _ => Err(Error::Parse(format!("{THREADS_ENV} must be a positive integer; got `{raw}`"))),
    }
}

fn run(command: Command, exec: Execution) -> CmdResult {
    match command {
        Command::Eval(a) => cmd_eval(a),
        Command::Sweep(a) => cmd_sweep(a, exec),
        Command::Figure(a) => cmd_figure(a, exec),
        Command::Crossover(a) => cmd_crossover(a),
        Command::Oracle(o) => cmd_oracle(o),
        Command::Major(m) => cmd_major(m),
        Command::Ranktest(a) => cmd_ranktest(a),
        Command::Verify { suite } => cmd_verify(suite, exec),
    }
}

fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_population(path: &Path) -> Result<Population, Error> {
    parse_population(&read_text(path)?)
}

fn hg_params(n: u64, d: u64, big_n: u64) -> Result<HGParams, Error> {
    HGParams::new(n, d, big_n)
}

fn scenario(a: &InputArgs) -> Result<Scenario, Error> {
    let sources = [a.d.is_some() || a.big_n.is_some(), a.input.is_some(), a.p.is_some(), a.matrix.is_some()];
    if sources.iter().filter(|&&s| s).count() > 1 {
        return Err(Error::Usage("give exactly one input: --D/--N, --input, --p or --matrix".into()));
    }
    let need_n = || a.n.ok_or_else(|| Error::Usage("--n is required for this input".into()));
    if a.d.is_some() || a.big_n.is_some() {
        let (Some(d), Some(big_n)) = (a.d, a.big_n) else {
            return Err(Error::Usage("a hypergeometric input needs --n, --D and --N".into()));
        };
        return Ok(Scenario::Hg(hg_params(need_n()?, d, big_n)?));
    }
    if let Some(path) = &a.input {
        let pop = read_population(path)?;
        return Ok(Scenario::Explicit(BoundInput::Pop { pop, n: need_n()?, delta: a.delta }));
    }
    if let Some(p) = &a.p {
        let p = rational_to_f64(&parse_number(p)?);
        return Ok(Scenario::Explicit(BoundInput::Bin { n: need_n()?, p }));
    }
    if let Some(path) = &a.matrix {
        let m = parse_matrix(&read_text(path)?)?;
        let m = match a.scale {
            Some(s) => m.with_scale(s),
            None => m,
        };
        return Ok(Scenario::Explicit(BoundInput::Matrix(m)));
    }
    Err(Error::Usage("no input given: use --n --D --N, --input with --n, --n --p, or --matrix".into()))
}

fn grid(g: &GridArgs, default_max: f64, default_steps: usize) -> Result<LambdaGrid, Error> {
    LambdaGrid::new(g.lambda_min.unwrap_or(0.0), g.lambda_max.unwrap_or(default_max), g.steps.unwrap_or(default_steps))
}

fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => write_atomic(path, bytes),
        None => {
            write_stdout(String::from_utf8_lossy(bytes).into_owned());
            Ok(())
        }
    }
}

fn cmd_eval(a: EvalArgs) -> CmdResult {
    let id: BoundId = a.bound.parse()?;
    let input = scenario(&a.input)?.input_for(id)?;
    let v = evaluate(id, &input, a.lambda)?;
    outln!("{id} {} {} {}", v.raw, v.clamped, v.domain_ok);
    if v.domain_ok {
        Ok(())
    } else {
        Err(Failure::Domain(v.domain_msg))
    }
}

fn cmd_sweep(a: SweepArgs, exec: Execution) -> CmdResult {
    let curves = a.bounds.iter().map(|s| s.parse::<CurveId>()).collect::<Result<Vec<_>, _>>()?;
    let spec = SweepSpec { curves, scenario: scenario(&a.input)?, grid: grid(&a.grid, 3.0, 400)? };
    let rows = sweep(&spec, exec)?;
    emit(&sweep_csv(&rows)?, a.out.as_deref())?;
    Ok(())
}

fn cmd_figure(a: FigureArgs, exec: Execution) -> CmdResult {
    let id: FigureId = a.id.parse()?;
    let overridden = a.grid.lambda_min.is_some() || a.grid.lambda_max.is_some() || a.grid.steps.is_some();
    let opts = FigureOptions {
        grid: if overridden { Some(grid(&a.grid, 3.0, 400)?) } else { None },
        caption_parity: a.caption_parity,
    };
    let rows = figure(id, &opts, exec)?;
    emit(&curve_csv(&rows)?, a.out.as_deref())?;
    Ok(())
}

fn cmd_crossover(a: CrossoverArgs) -> CmdResult {
    let (ia, ib): (BoundId, BoundId) = (a.a.parse()?, a.b.parse()?);
    let roots = crossover(ia, ib, &scenario(&a.input)?, a.lo, a.hi)?;
    if roots.is_empty() {
        outln!("none");
    }
    for r in roots {
        outln!("{r}");
    }
    Ok(())
}

fn cmd_oracle(o: OracleCommand) -> CmdResult {
    match o {
        OracleCommand::Pmf { hg, k } => {
            let dist = HgDistribution::new(hg_params(hg.n, hg.d, hg.big_n)?);
            let p = dist.pmf(k);
            outln!("{p} {}", p.to_f64());
        }
        OracleCommand::Tail { hg, k } => {
            let dist = HgDistribution::new(hg_params(hg.n, hg.d, hg.big_n)?);
            let p = dist.tail(k);
            outln!("{p} {}", p.to_f64());
        }
        OracleCommand::Tv { hg } => {
            let params = hg_params(hg.n, hg.d, hg.big_n)?;
            let tv = tv_distance(&params)?;
            outln!("tv {tv} {}", tv.to_f64());
            outln!("ehm_bound {}", ehm_tv_bound(&params)?);
        }
        OracleCommand::Decompose { hg } => {
            for p in bernoulli_decomposition(&hg_params(hg.n, hg.d, hg.big_n)?)? {
                outln!("{p}");
            }
        }
    }
    Ok(())
}

fn print_population(pop: &Population) {
    match pop.exact() {
        Some(ex) => ex.iter().for_each(|v| outln!("{v}")),
        None => pop.values().iter().for_each(|v| outln!("{v}")),
    }
}

fn cmd_major(m: MajorCommand) -> CmdResult {
    match m {
        MajorCommand::Run { input, sub } => {
            let x = read_population(&input)?;
            if sub {
                let s = sub_majorize(&x)?;
                outln!("# ones={} zeros={}", s.ones, s.zeros);
                print_population(&s.output);
            } else {
                let r = kemperman_majorize(&x)?;
                let exceptional = match (&r.exceptional_exact, r.exceptional) {
                    (Some(e), Some((_, i))) => format!("{e} at index {i}"),
                    (None, Some((e, i))) => format!("{e} at index {i}"),
                    _ => "none".into(),
                };
                outln!("# ones={} zeros={} exceptional={exceptional} D={} alpha={}", r.ones, r.zeros, r.d_major, r.alpha);
                print_population(&r.output);
            }
            Ok(())
        }
        MajorCommand::VerifyOrder { input, n, sub, family } => {
            let x = read_population(&input)?;
            let (y, default_family) = if sub {
                (sub_majorize(&x)?.output, ConvexFamily::Increasing)
            } else {
                (kemperman_majorize(&x)?.output, ConvexFamily::Full)
            };
            let family = match family {
                Some(Family::Increasing) => ConvexFamily::Increasing,
                Some(Family::Full) => ConvexFamily::Full,
                None => default_family,
            };
            let report = verify_convex_order(&x, &y, n, family)?;
            outln!("checked {} comparisons, {} violations", report.checked, report.violations.len());
            for v in &report.violations {
                outln!("violation n={} phi={:?} lhs={} rhs={}", v.n, v.phi, v.lhs, v.rhs);
            }
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Violations)
            }
        }
    }
}

fn cmd_ranktest(a: RankArgs) -> CmdResult {
    let kind: RankKind = a.kind.parse()?;
    let setup = build_setup(kind, a.n, a.m)?;
    let pop = &setup.population;
    outln!("test {kind} n={} m={} N={}", a.n, a.m, setup.big_n());
    outln!("scores a={} b={} range={}", pop.min(), pop.max(), pop.range());
    outln!("null mean={} var={}", setup.null_mean, setup.null_var);
    let scaled = pop.shifted_scaled()?;
    let maj = kemperman_majorize(&scaled)?;
    let exceptional = maj.exceptional.map_or("none".to_string(), |(e, _)| e.to_string());
    outln!("majorization ones={} zeros={} exceptional={exceptional}", maj.ones, maj.zeros);
    let sub = sub_majorize(&scaled)?;
    let g = gcd(sub.ones as u64, setup.big_n()).max(1);
    outln!("sub-majorization ones={} zeros={} mean={}/{}", sub.ones, sub.zeros, sub.ones as u64 / g, setup.big_n() / g);
    if !a.lambda.is_empty() {
        let parity = (a.caption_parity && kind == RankKind::Klotz).then_some(KLOTZ_PARITY_RANGE);
        for row in rank_test_curves(&setup, &a.lambda, parity)? {
            outln!("{} {} {} {} {}", row.curve, row.lambda, row.value.raw, row.value.clamped, row.value.domain_ok);
        }
    }
    Ok(())
}

fn cmd_verify(suite: Suite, exec: Execution) -> CmdResult {
    let runs: Vec<fn(Execution) -> SuiteReport> = match suite {
        Suite::Kernels => vec![kernels_suite],
        Suite::Dominance => vec![dominance_suite],
        Suite::Orders => vec![orders_suite],
        Suite::All => vec![kernels_suite, orders_suite, dominance_suite],
    };
    let mut ok = true;
    for run in runs {
        let report = run(exec);
        print!("{report}");
        ok &= report.passed();
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Violations)
    }
}
