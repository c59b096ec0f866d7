use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_padic-rmt"));
    c.env_remove("PADIC_RMT_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// The numbers inside `lyapunov = (...)` on the first summary line.
fn lyapunov(out: &str) -> Vec<f64> {
    let start = out.find("lyapunov = (").unwrap() + "lyapunov = (".len();
    let end = start + out[start..].find(')').unwrap();
    out[start..end]
        .split(", ")
        .map(|x| x.parse().unwrap())
        .collect()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let o = run(&["simulate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage:"), "{}", stderr(&o));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(
        run(&["corner-dist", "--signature", "0,1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["simulate", "--config", "/nonexistent/spec.json"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.json");
    std::fs::write(&path, r#"{"p":4,"n":2,"kind":"HaarEntries"}"#).unwrap();
    let o = run(&[
        "simulate",
        "--config",
        path.to_str().unwrap(),
        "--kmax",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn corner_dist_tables() {
    let o = run(&[
        "corner-dist",
        "--signature",
        "1,0",
        "--p",
        "2",
        "--level",
        "2",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("(1)\t1/3"), "{text}");
    assert!(text.contains("(0)\t2/3"), "{text}");
    let o = run(&["corner-dist", "--signature", "3,3", "--p", "5"]);
    assert!(stdout(&o).contains("(3)\t1\t"), "{}", stdout(&o));
}

#[test]
fn corner_dist_monte_carlo_json() {
    let o = run(&[
        "corner-dist",
        "--signature",
        "1,0",
        "--monte-carlo",
        "100000",
        "--seed",
        "1",
        "--json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["tv_distance"].as_f64().unwrap() <= 0.02);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn counterexample_preset_reproduces_closed_forms() {
    let o = run(&[
        "simulate",
        "--preset",
        "paper-counterexample",
        "--kmax",
        "20",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(
        text.contains("lambda = (699050,349525), v = [0, 1048575]"),
        "{text}"
    );
}

#[test]
fn counterexample_preset_under_bounded_diff_reports_non_split() {
    let o = run(&["bounded-diff", "--preset", "paper-counterexample"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("grew"), "{}", stdout(&o));
}

#[test]
fn fixed_preset_lyapunov_column() {
    let o = run(&[
        "simulate", "--preset", "fixed-10", "--p", "2", "--kmax", "5000", "--seed", "5",
    ]);
    assert!(o.status.success());
    let est = lyapunov(&stdout(&o));
    assert!((est[0] - 2.0 / 3.0).abs() <= 0.02, "{est:?}");
    assert!((est[1] - 1.0 / 3.0).abs() <= 0.02, "{est:?}");
}

#[test]
fn mixture_preset_bounded_difference() {
    let o = run(&[
        "bounded-diff",
        "--preset",
        "mixture-10",
        "--kmax",
        "400",
        "--trials",
        "10",
        "--seed",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn corner_haar_preset_lln_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lln.json");
    std::fs::write(
        &cfg,
        r#"{"spec":{"p":2,"n":2,"kind":{"CornerOfHaar":3}},"k_max":800,"trials":12,"master_seed":4,"tolerances":{"lln_abs":0.05}}"#,
    )
    .unwrap();
    let report = dir.path().join("report.json");
    let o = run(&[
        "lln",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["schema"], "experiment-report/v1");
    assert_eq!(v["prediction"][1], "4/21");
    let o = run(&["simulate", "--preset", "corner-haar-3", "--kmax", "50"]);
    assert!(o.status.success());
}

#[test]
fn failed_criterion_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lln.json");
    std::fs::write(
        &cfg,
        r#"{"spec":{"p":2,"n":2,"kind":{"FixedSN":[1,0]}},"k_max":20,"trials":3,"master_seed":1,"tolerances":{"lln_abs":1e-9}}"#,
    )
    .unwrap();
    let o = run(&["lln", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    assert!(stdout(&o).contains("[FAIL] lln"));
}

#[test]
fn gsp4_demo_preset_stays_balanced() {
    let o = run(&["gsp-simulate", "--kmax", "120", "--trials", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("balanced pairs held at every step"));
    let o = run(&["simulate", "--preset", "gsp4-demo", "--kmax", "30"]);
    assert!(o.status.success());
    let o = run(&["gsp-simulate", "--signature", "2,1,0,0", "--kmax", "5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn scalar_preset_clt_is_degenerate() {
    let o = run(&[
        "clt", "--preset", "scalar", "--kmax", "40", "--trials", "30",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(
        stdout(&o).contains("DegenerateCovariance"),
        "{}",
        stdout(&o)
    );
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn simulate_output_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = [
        "simulate",
        "--preset",
        "mixture-10",
        "--kmax",
        "60",
        "--trials",
        "2",
        "--with-interpolation",
    ];
    let o1 = bin()
        .args(args)
        .args(["--seed", "9", "--out"])
        .arg(a.path())
        .output()
        .unwrap();
    let o2 = bin()
        .args(args)
        .arg("--out")
        .arg(b.path())
        .env("PADIC_RMT_SEED", "9")
        .output()
        .unwrap();
    assert!(o1.status.success() && o2.status.success());
    let (fa, fb) = (files(a.path()), files(b.path()));
    assert_eq!(fa.len(), 3);
    assert_eq!(fa, fb);
    let csv = String::from_utf8(fa[1].1.clone()).unwrap();
    assert!(csv.starts_with("# schema=trajectory/v1\n"));
}

#[test]
fn selftest_passes_and_filters() {
    let o = run(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["selftest", "--filter", "hl"]);
    let text = stdout(&o);
    assert!(
        text.lines()
            .filter(|l| l.starts_with('['))
            .all(|l| l.contains("hl/")),
        "{text}"
    );
    assert!(!text.contains("snf/"));
}

#[test]
fn selftest_names_a_corrupted_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("golden.json");
    let good = include_str!("../../core/testdata/hl/corner_gaps_210_p2.json");
    std::fs::write(&path, good.replacen("\"3/2\"", "\"5/3\"", 1)).unwrap();
    let o = run(&[
        "selftest",
        "--filter",
        "golden",
        "--golden",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stdout(&o).contains("[FAIL] hl/golden-corner-gaps"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn hl_eval_values() {
    let o = run(&["hl-eval", "--signature", "1,0", "--points", "1,1"]);
    assert!(stdout(&o).starts_with("2\n"), "{}", stdout(&o));
    let o = run(&[
        "hl-eval",
        "--signature",
        "1,0",
        "--mu",
        "1",
        "--points",
        "3",
        "--t",
        "1/3",
    ]);
    assert!(o.status.success());
    let o = run(&["hl-eval", "--signature", "-1,-2", "--principal", "1/2"]);
    assert!(o.status.success(), "{}", stderr(&o));
}
