//! End-to-end checks of the command-line surface and its exit codes.

use std::fs;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_swor-bounds"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn fields(o: &Output) -> Vec<String> {
    stdout(o).split_whitespace().map(str::to_string).collect()
}

#[test]
fn eval_at_zero_is_one() {
    let o = run(&["eval", "serfling_hg", "--n", "100", "--D", "200", "--N", "2001", "--lambda", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fields(&o), ["serfling_hg", "1", "1", "true"]);
}

#[test]
fn eval_hypothesis_failure_exits_two() {
    let o = run(&["eval", "lp_hyper", "--n", "100", "--D", "50", "--N", "2001", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(fields(&o)[3], "false");
    assert!(String::from_utf8_lossy(&o.stderr).contains("n < D"));
}

#[test]
fn bennett_beats_serfling_in_the_figure_regime() {
    let value = |id: &str| {
        let o = run(&["eval", id, "--n", "100", "--D", "200", "--N", "2001", "--lambda", "1"]);
        assert_eq!(o.status.code(), Some(0));
        fields(&o)[1].parse::<f64>().unwrap()
    };
    let (bennett, serfling) = (value("bennett_hyper"), value("serfling_hg"));
    assert!(bennett.is_finite() && bennett < serfling, "{bennett} vs {serfling}");
}

#[test]
fn usage_and_parse_errors_exit_three() {
    assert_eq!(run(&["eval", "no_such_bound", "--n", "2", "--D", "1", "--N", "4", "--lambda", "1"]).status.code(), Some(3));
    assert_eq!(run(&["eval", "serfling_hg", "--lambda", "1"]).status.code(), Some(3));
    assert_eq!(run(&["eval", "serfling_hg", "--n", "2", "--D", "1", "--N", "4", "--lambda", "x"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    // A binomial bound fed a population file is a usage error.
    let dir = tempfile::tempdir().unwrap();
    let pop = dir.path().join("pop.txt");
    fs::write(&pop, "0\n1\n").unwrap();
    let o = run(&["eval", "bennett_bin", "--input", pop.to_str().unwrap(), "--n", "1", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verify"));
}

#[test]
fn thread_cap_is_validated() {
    let ok = bin().env("SWOR_BOUNDS_THREADS", "2").args(["oracle", "tail", "--n", "4", "--D", "5", "--N", "12", "--k", "3"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = bin().env("SWOR_BOUNDS_THREADS", "zero").args(["oracle", "tail", "--n", "4", "--D", "5", "--N", "12", "--k", "3"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn oracle_outputs_exact_rationals() {
    let o = run(&["oracle", "pmf", "--n", "4", "--D", "5", "--N", "12", "--k", "3"]);
    assert_eq!(fields(&o)[0], "14/99");
    let o = run(&["oracle", "tail", "--n", "4", "--D", "5", "--N", "12", "--k", "0"]);
    assert_eq!(fields(&o)[0], "1/1");
    let o = run(&["oracle", "decompose", "--n", "4", "--D", "5", "--N", "12"]);
    let pis: Vec<f64> = stdout(&o).lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(pis.len(), 4);
    assert!((pis.iter().sum::<f64>() - 20.0 / 12.0).abs() < 1e-10);
    let o = run(&["oracle", "tv", "--n", "4", "--D", "5", "--N", "12"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("tv "));
    assert_eq!(run(&["oracle", "pmf", "--n", "13", "--D", "5", "--N", "12", "--k", "3"]).status.code(), Some(2));
}

#[test]
fn crossover_reports_roots_or_none() {
    let o = run(&["crossover", "chatterjee_general", "serfling_hg", "--n", "100", "--D", "200", "--N", "2001"]);
    let roots: Vec<f64> = stdout(&o).lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(roots.len(), 1);
    assert!((0.22..=0.52).contains(&roots[0]));
    let o = run(&["crossover", "serfling_hg", "serfling_hg", "--n", "100", "--D", "200", "--N", "2001"]);
    assert_eq!(stdout(&o).trim(), "none");
    let o = run(&["crossover", "bernstein_hyper", "bennett_hyper", "--n", "100", "--D", "200", "--N", "2001"]);
    assert_eq!(stdout(&o).trim(), "none");
}

fn fifteen_point_file(dir: &std::path::Path) -> std::path::PathBuf {
    let path = dir.join("grid15.txt");
    let mut text = String::from("# 15-point grid\n");
    for i in 0..15 {
        text.push_str(&format!("{i}/14\n"));
    }
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn major_run_and_verify_order() {
    let dir = tempfile::tempdir().unwrap();
    let pop = fifteen_point_file(dir.path());
    let p = pop.to_str().unwrap();
    let o = run(&["major", "run", "--input", p]);
    let out = stdout(&o);
    assert!(out.starts_with("# ones=7 zeros=7 exceptional=1/2"), "{out}");
    assert_eq!(out.lines().filter(|l| *l == "1").count(), 7);
    let o = run(&["major", "run", "--input", p, "--sub"]);
    assert!(stdout(&o).starts_with("# ones=8 zeros=7"));
    let o = run(&["major", "verify-order", "--input", p, "--n", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["major", "verify-order", "--input", p, "--sub"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    // Out of [0, 1]: domain error. Malformed line: parse error.
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "0\n2\n").unwrap();
    assert_eq!(run(&["major", "run", "--input", bad.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&bad, "0\nhalf\n").unwrap();
    assert_eq!(run(&["major", "run", "--input", bad.to_str().unwrap()]).status.code(), Some(3));
    let missing = dir.path().join("missing.txt");
    assert_eq!(run(&["major", "run", "--input", missing.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn figure_csv_is_deterministic_and_atomic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let o = run(&["figure", "fig2", "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("figure,curve,lambda,raw,clamped,domain_ok\n"));
    // 6 bounds x 2 scenarios x 400 points.
    assert_eq!(text.lines().count(), 1 + 6 * 2 * 400);
    let seq = dir.path().join("seq.csv");
    run(&["--sequential", "figure", "fig2", "--out", seq.to_str().unwrap()]);
    assert_eq!(fs::read(&seq).unwrap(), fs::read(&a).unwrap());

    let o = run(&["figure", "fig2", "--out", dir.path().join("no/such/dir.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 3, "no stray temporary files");
    assert_eq!(run(&["figure", "fig9"]).status.code(), Some(3));
}

#[test]
fn sweep_writes_rows_per_curve_and_lambda() {
    let o = run(&[
        "sweep", "--bounds", "serfling_hg,serfling_conjecture,lp_hyper", "--n", "100", "--D", "200", "--N", "2001",
        "--lambda-max", "1", "--steps", "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "bound_id,input,lambda,raw,clamped,domain_ok");
    assert_eq!(lines.len(), 1 + 3 * 5);
    assert!(lines.iter().any(|l| l.starts_with("serfling_conjecture,") && l.ends_with(",false")));
    assert_eq!(run(&["sweep", "--bounds", "serfling_hg", "--n", "1", "--D", "1", "--N", "4", "--steps", "1"]).status.code(), Some(3));
}

#[test]
fn ranktest_reports_klotz_structure() {
    let o = run(&["ranktest", "--kind", "klotz", "--n", "60", "--m", "440", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("majorization ones=59 zeros=440"), "{out}");
    assert!(out.contains("sub-majorization ones=60 zeros=440 mean=3/25"), "{out}");
    assert!(out.contains("klotz:kemperman_submajor 1 "), "{out}");
    assert_eq!(run(&["ranktest", "--kind", "median", "--n", "1", "--m", "1"]).status.code(), Some(3));
}

#[test]
fn matrix_input_evaluates_gi_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.txt");
    fs::write(&m, "1 0\n0 1\n").unwrap();
    let o = run(&["eval", "gi_matrix", "--matrix", m.to_str().unwrap(), "--lambda", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fields(&o)[0], "gi_matrix");
}
