use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use glitch_cli::config::RunConfig;

fn glitchlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glitchlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut full: Vec<&str> = args.to_vec();
    let out = dir.to_str().unwrap();
    full.extend(["--out", out]);
    glitchlab(&full)
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let mut rows = vec![reader.headers().unwrap().iter().map(String::from).collect()];
    for rec in reader.records() {
        rows.push(rec.unwrap().iter().map(String::from).collect());
    }
    rows
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn metrics_rows_match_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["metrics"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(&dir.path().join("metrics.csv"));
    assert_eq!(rows[0], ["case", "n", "r", "expected", "actual", "abs_error"]);
    let tents: Vec<_> = rows.iter().filter(|r| r[0] == "tent").collect();
    assert_eq!(tents.len(), 20);
    for r in tents {
        assert_eq!(&r[2..], ["1", "1.0", "1.0", "0.0"]);
    }
    let row = rows.iter().find(|r| r[..3] == ["exp", "5", "2"]).unwrap();
    let actual: f64 = row[4].parse().unwrap();
    assert!((actual - (-3.0f64).exp()).abs() <= 1e-9);
    assert!((actual - 0.0497871).abs() < 1e-7);

    let axioms = read_csv(&dir.path().join("axioms.csv"));
    assert_eq!(axioms.len(), 1 + 100 * 4);
    for r in &axioms[1..] {
        assert_eq!(r[5], "0.0");
        assert!(r[6].parse::<f64>().unwrap() <= 1e-12);
    }
}

#[test]
fn empty_ranges_give_header_only_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["metrics", "--set", "metrics_n_min=5", "--set", "metrics_n_max=4", "--set", "axiom_triples=0"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        fs::read_to_string(dir.path().join("metrics.csv")).unwrap(),
        "case,n,r,expected,actual,abs_error\n"
    );
    assert_eq!(read_csv(&dir.path().join("axioms.csv")).len(), 1);
}

#[test]
fn identical_seed_gives_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    assert_eq!(code(&run_in(a.path(), &["metrics", "--seed", "11"])), 0);
    assert_eq!(code(&run_in(b.path(), &["metrics", "--seed", "11"])), 0);
    assert_eq!(code(&run_in(c.path(), &["metrics", "--seed", "12"])), 0);
    for file in ["metrics.csv", "axioms.csv"] {
        let x = fs::read(a.path().join(file)).unwrap();
        let y = fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file}");
    }
    assert_ne!(
        fs::read(a.path().join("axioms.csv")).unwrap(),
        fs::read(c.path().join("axioms.csv")).unwrap()
    );
}

#[test]
fn sweep_has_undecided_zero_and_unit_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["sweep"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(&dir.path().join("sweep.csv"));
    assert_eq!(rows[0], ["skew", "sign", "decision_time", "decided"]);
    assert_eq!(rows.len(), 1 + 61);
    let zero = rows.iter().find(|r| r[0] == "0.0").unwrap();
    assert_eq!(zero[1..], ["0", "", "false"]);

    let mut decided: Vec<(f64, f64)> = rows[1..]
        .iter()
        .filter(|r| r[3] == "true" && r[0].starts_with(|c: char| c.is_ascii_digit()))
        .map(|r| (r[0].parse().unwrap(), r[2].parse().unwrap()))
        .collect();
    decided.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    assert!(decided.windows(2).all(|w| w[1].1 <= w[0].1));

    let fit = read_csv(&dir.path().join("sweep_fit.csv"));
    assert_eq!(fit[0], ["points", "slope", "intercept", "tau", "relative_error", "monotone"]);
    let slope: f64 = fit[1][1].parse().unwrap();
    assert!((slope - 1.0).abs() <= 0.1, "{slope}");
    assert_eq!(fit[1][5], "true");
}

#[test]
fn search_reaches_target_and_trivial_target_takes_one_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["search", "10"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(&dir.path().join("search.csv"));
    assert_eq!(rows[0], ["iteration", "lo", "hi", "skew", "sign", "decision_time", "achieved_time"]);
    let last = rows.last().unwrap();
    assert!(last[6].parse::<f64>().unwrap() >= 10.0);
    assert!(rows.len() - 1 <= 40);

    let out = run_in(dir.path(), &["search", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(read_csv(&dir.path().join("search.csv")).len(), 2);
}

#[test]
fn search_outside_horizon_is_a_validation_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["search", "100"]);
    assert_eq!(code(&out), 1);
    assert!(!dir.path().join("search.csv").exists());
}

#[test]
fn malformed_config_exits_one_without_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    let out_dir = dir.path().join("out");
    for text in ["tau = 1\nthis line has no equals sign\n", "colour = blue\n", "theta = 2\n"] {
        fs::write(&cfg, text).unwrap();
        let out = run_in(&out_dir, &["search", "10", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code(&out), 1, "{text}");
        assert!(!out_dir.exists());
    }
}

#[test]
fn io_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.cfg");
    let out = run_in(dir.path(), &["metrics", "--config", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    let blocker = dir.path().join("file");
    fs::write(&blocker, "not a directory").unwrap();
    let out = run_in(&blocker.join("sub"), &["metrics", "--set", "axiom_triples=0"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&glitchlab(&["bogus"])), 1);
    assert_eq!(code(&glitchlab(&["search"])), 1);
    assert_eq!(code(&glitchlab(&["search", "soon"])), 1);
    assert_eq!(code(&glitchlab(&["--help"])), 0);
}

#[test]
fn config_round_trips_and_flags_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let text = "# custom run\ntau = 1.0\nseed = 3 # from file\nmetrics_n_max = 3\naxiom_triples = 2\n";
    fs::write(&cfg, text).unwrap();
    let out_dir = dir.path().join("out");
    let out = run_in(&out_dir, &["metrics", "--config", cfg.to_str().unwrap(), "--seed", "9"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let written = fs::read_to_string(out_dir.join("config.txt")).unwrap();
    let effective = RunConfig::parse(&written).unwrap();
    assert_eq!(effective.seed, 9);
    assert_eq!(effective.metrics_n_max, 3);
    assert_eq!(effective.out, out_dir);
    assert_eq!(effective.to_text(), written);

    let from_file = RunConfig::parse(text).unwrap();
    assert_eq!(RunConfig::parse(&from_file.to_text()).unwrap(), from_file);
}

#[test]
fn connectivity_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["connectivity"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(&dir.path().join("connectivity.csv"));
    assert_eq!(rows[0], ["experiment", "delta", "components", "min_cross_distance"]);
    let components: Vec<(&str, &str)> = rows[1..].iter().map(|r| (r[0].as_str(), r[2].as_str())).collect();
    assert_eq!(components, [("U_r", "2"), ("U_infty", "1"), ("image_chain", "1")]);
    let chain = &rows[3];
    let delta: f64 = chain[1].parse().unwrap();
    let separation: f64 = chain[3].parse().unwrap();
    assert!(separation > delta);
}

#[test]
fn convergence_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["convergence"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(&dir.path().join("convergence.csv"));
    let exp: Vec<_> = rows.iter().filter(|r| r[0] == "exp").collect();
    assert_eq!(exp.len(), 11);
    assert!(exp.iter().all(|r| r[4] == "true"));
    assert!(rows.iter().filter(|r| r[0] == "tent").all(|r| r[4] == "false"));
}
