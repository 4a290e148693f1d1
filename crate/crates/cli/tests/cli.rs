use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn selrisk(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_selrisk"));
    cmd.args(args).env_remove("SELRISK_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_scenario(dir: &TempDir, name: &str, json: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, json).unwrap();
    p.to_str().unwrap().to_string()
}

fn rows(csv: &str) -> Vec<(f64, f64)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let (x, y) = l.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

fn out_path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn compute_writes_csv_and_svg() {
    let dir = TempDir::new().unwrap();
    let (csv, svg) = (out_path(&dir, "b.csv"), out_path(&dir, "b.svg"));
    let sc = fixture("essinf_fixed_points.json");
    let o = selrisk(&["compute", "--scenario", sc.to_str().unwrap(), "--out", &csv, "--svg", &svg], &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x,y\n"));
    let r = rows(&text);
    assert!(r.windows(2).all(|w| w[0].0 < w[1].0 && w[1].1 <= w[0].1));
    // negated fixed points: generators (2, -1) and (-1, 2)
    assert_eq!(r.first(), Some(&(-1.0, 2.0)));
    assert_eq!(r.last(), Some(&(3.0, -1.0)));
    let svg = fs::read_to_string(&svg).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 1);
    assert!(svg.contains("<svg"));
}

#[test]
fn envelope_vertical_segment_reaches_one_third() {
    let dir = TempDir::new().unwrap();
    let sc = write_scenario(
        &dir,
        "env.json",
        r#"{"space": [1], "dimension": 2,
            "risk": [{"kind": "avar", "alpha": 0.75}, {"kind": "avar", "alpha": 0.75}],
            "portfolio": {"kind": "fixed_cost", "kappa": 1},
            "engine": {"grid_step": 0.0001, "window": [[-0.001, 0.001], [-3, 3]]}}"#,
    );
    let csv = out_path(&dir, "c.csv");
    let o = selrisk(&["compute", "--scenario", &sc, "--out", &csv, "--closed-form", "ikappa_avar"], &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = rows(&fs::read_to_string(&csv).unwrap());
    let at = |x: f64| r.iter().find(|p| (p.0 - x).abs() < 1e-12).unwrap().1;
    assert_eq!(at(0.0), 0.0);
    assert!((at(-0.0001) - 1.0 / 3.0).abs() < 0.05, "{}", at(-0.0001));
}

#[test]
fn malformed_probabilities_exit_1() {
    let dir = TempDir::new().unwrap();
    let sc = write_scenario(
        &dir,
        "bad.json",
        r#"{"space": [0.5, 0.6], "dimension": 2,
            "risk": [{"kind": "essinf"}, {"kind": "essinf"}],
            "portfolio": {"kind": "fixed_cost", "kappa": 1},
            "engine": {"grid_step": 0.5, "window": [[-1, 1], [-1, 1]]}}"#,
    );
    let o = selrisk(&["compute", "--scenario", &sc, "--out", &out_path(&dir, "o.csv")], &[]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("space"), "{}", stderr(&o));
}

#[test]
fn unknown_key_exit_1_names_key() {
    let dir = TempDir::new().unwrap();
    let sc = write_scenario(
        &dir,
        "bad.json",
        r#"{"space": [1], "dimension": 2,
            "risk": [{"kind": "essinf"}, {"kind": "essinf"}],
            "portfolio": {"kind": "fixed_cost", "kappa": 1, "gamma": 2},
            "engine": {"grid_step": 0.5, "window": [[-1, 1], [-1, 1]]}}"#,
    );
    let o = selrisk(&["compute", "--scenario", &sc, "--out", &out_path(&dir, "o.csv")], &[]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("gamma"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&selrisk(&["compute"], &[])), 1);
    assert_eq!(code(&selrisk(&["props", "--suite", "nope", "--cases", "1"], &[])), 1);
    assert_eq!(code(&selrisk(&["--help"], &[])), 0);
}

#[test]
fn budget_exit_2_reports_count() {
    let dir = TempDir::new().unwrap();
    let sc = write_scenario(
        &dir,
        "big.json",
        r#"{"space": [0.25, 0.75], "dimension": 2,
            "risk": [{"kind": "scenario_max", "scenarios": [{"density": [2, 0.6666666666666666]}]},
                     {"kind": "neg_expectation"}],
            "portfolio": {"kind": "fixed_cost", "kappa": 1},
            "engine": {"grid_step": 0.1, "window": [[-2, 2], [-2, 2]], "selection_cap": 100}}"#,
    );
    let o = selrisk(&["compute", "--scenario", &sc, "--out", &out_path(&dir, "o.csv")], &[]);
    assert_eq!(code(&o), 2);
    let msg = stderr(&o);
    assert!(msg.contains("selections required"), "{msg}");
    assert!(!Path::new(&out_path(&dir, "o.csv")).exists());
}

#[test]
fn precondition_exit_3() {
    let dir = TempDir::new().unwrap();
    let sc = fixture("essinf_fixed_points.json");
    let sc = sc.to_str().unwrap();
    let o = selrisk(&["compute", "--scenario", sc, "--out", &out_path(&dir, "o.csv"), "--closed-form", "ikappa_avar"], &[]);
    assert_eq!(code(&o), 3);
    let o = selrisk(
        &["compare", "--scenario", sc, "--closed-form", "two_point", "--tol", "0.1", "--report", &out_path(&dir, "r.csv")],
        &[],
    );
    assert_eq!(code(&o), 3);
}

#[test]
fn compare_halfspace_identical_exit_0() {
    let dir = TempDir::new().unwrap();
    let report = out_path(&dir, "r.csv");
    let sc = fixture("halfspace_transfer.json");
    let o = selrisk(
        &["compare", "--scenario", sc.to_str().unwrap(), "--closed-form", "ht_identical", "--tol", "0.1", "--report", &report],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&report).unwrap();
    assert!(text.starts_with("x,oracle_y,closed_y,gap\n"));
    for l in text.lines().skip(1) {
        let gap: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
        assert!(gap <= 0.1, "{l}");
    }
}

#[test]
fn compare_low_alpha_matches_negated_ikappa() {
    let dir = TempDir::new().unwrap();
    let sc = fixture("envelope_avar_04.json");
    let o = selrisk(
        &["compare", "--scenario", sc.to_str().unwrap(), "--closed-form", "ikappa_avar", "--tol", "0.05", "--report", &out_path(&dir, "r.csv")],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn coarse_grid_exit_4_with_report() {
    let dir = TempDir::new().unwrap();
    let sc = write_scenario(
        &dir,
        "coarse.json",
        r#"{"space": [0.25, 0.25, 0.25, 0.25], "dimension": 2,
            "risk": [{"kind": "avar", "alpha": 0.75}, {"kind": "avar", "alpha": 0.75}],
            "portfolio": {"kind": "fixed_cost", "kappa": 1},
            "engine": {"grid_step": 0.5, "window": [[-3, 1], [-3, 3]], "mode": "partition"}}"#,
    );
    let report = out_path(&dir, "r.csv");
    let o = selrisk(&["compare", "--scenario", &sc, "--closed-form", "ikappa_avar", "--tol", "0.01", "--report", &report], &[]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(fs::read_to_string(&report).unwrap().lines().count() > 1);
}

#[test]
fn props_exit_0() {
    let o = selrisk(&["props", "--seed", "42", "--cases", "10"], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let out = String::from_utf8_lossy(&o.stdout);
    assert_eq!(out.lines().filter(|l| l.contains(": ok (10 cases)")).count(), 9);
    let o = selrisk(&["props", "--cases", "20", "--suite", "law_invariance"], &[]);
    assert_eq!(code(&o), 0);
}

#[test]
fn output_is_identical_across_runs_and_threads() {
    let dir = TempDir::new().unwrap();
    let sc = fixture("envelope_avar_075.json");
    let mut outs = Vec::new();
    for (i, threads) in ["1", "4", "4"].iter().enumerate() {
        let csv = out_path(&dir, &format!("o{i}.csv"));
        let o = selrisk(&["compute", "--scenario", sc.to_str().unwrap(), "--out", &csv], &[("SELRISK_THREADS", threads)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        outs.push(fs::read(&csv).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
    assert_eq!(outs[1], outs[2]);
}

#[test]
fn bad_thread_count_exit_1() {
    let dir = TempDir::new().unwrap();
    let sc = fixture("essinf_fixed_points.json");
    let o = selrisk(
        &["compute", "--scenario", sc.to_str().unwrap(), "--out", &out_path(&dir, "o.csv")],
        &[("SELRISK_THREADS", "0")],
    );
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("SELRISK_THREADS"));
}

#[test]
fn every_fixture_computes() {
    let dir = TempDir::new().unwrap();
    let mut n = 0;
    for entry in fs::read_dir(fixture("")).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let o = selrisk(&["compute", "--scenario", p.to_str().unwrap(), "--out", &out_path(&dir, "o.csv")], &[]);
        assert_eq!(code(&o), 0, "{}: {}", p.display(), stderr(&o));
        n += 1;
    }
    assert!(n >= 8);
}
