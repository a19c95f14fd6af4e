use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hinf::manifest::write_system;
use hinf::report::NormReport;
use hinf_core::{CscMatrix, Domain, StateSpaceSystem, C64};

fn hinf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hinf")).args(args).output().expect("binary runs")
}

fn scalar(dir: &Path, domain: Domain, a: f64) -> PathBuf {
    let sys = StateSpaceSystem::from_real(&[&[a]], &[&[1.0]], &[&[1.0]], &[&[0.0]], domain).unwrap();
    write_system(dir, &format!("scalar_{a}"), &sys).unwrap()
}

/// Sparse 1-D diffusion chain driven at one end and observed at the other.
fn chain(dir: &Path, n: usize) -> PathBuf {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, C64::new(-2.0, 0.0)));
        if i + 1 < n {
            t.push((i, i + 1, C64::new(1.0, 0.0)));
            t.push((i + 1, i, C64::new(1.0, 0.0)));
        }
    }
    let a = CscMatrix::from_triplets(n, n, &t);
    let b = hinf_core::CMat::from_fn(n, 1, |i, _| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0));
    let c = hinf_core::CMat::from_fn(1, n, |_, j| C64::new(if j == n - 1 { 1.0 } else { 0.0 }, 0.0));
    let d = hinf_core::CMat::zeros(1, 1);
    let sys = StateSpaceSystem::new_sparse(a, b, c, d, None, Domain::Continuous).unwrap();
    write_system(dir, "chain", &sys).unwrap()
}

fn report(out: &Output) -> NormReport {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn norm_of_the_scalar_example() {
    let dir = tempfile::tempdir().unwrap();
    let m = scalar(dir.path(), Domain::Continuous, -1.0);
    let out = hinf(&["norm", path(&m), "--variant", "hybrid-newton-interp"]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let r = report(&out);
    assert_eq!(r.gamma, 1.0);
    assert_eq!(r.frequency, Some(0.0));
    assert!(r.certified_global && !r.at_infinity);
    assert_eq!(r.schema_version, 1);
    assert_eq!(r.variant, "hybrid-newton-interp");
    for key in ["schema_version", "gamma", "frequency", "at_infinity", "certified_global", "iterations", "pencil_eig_count", "gain_eval_count", "variant", "history"] {
        assert!(text.contains(&format!("\"{key}\"")), "{key} missing from {text}");
    }

    let bbbs = report(&hinf(&["norm", path(&m), "--variant", "bbbs", "--tol-band", "1e-8"]));
    assert!((bbbs.gamma - r.gamma).abs() <= 1e-13 * r.gamma);
}

#[test]
fn norm_writes_the_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let m = scalar(dir.path(), Domain::Discrete, 0.5);
    let out_path = dir.path().join("r.json");
    let out = hinf(&["norm", path(&m), "--output", path(&out_path)]);
    assert!(out.status.success());
    let r: NormReport = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!((r.gamma - 2.0).abs() < 1e-12);
}

#[test]
fn missing_matrix_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let m = scalar(dir.path(), Domain::Continuous, -1.0);
    std::fs::remove_file(dir.path().join("scalar_-1_B.mtx")).unwrap();
    let out = hinf(&["norm", path(&m)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn bad_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let m = scalar(dir.path(), Domain::Continuous, -1.0);
    assert_eq!(hinf(&["norm", path(&m), "--variant", "nope"]).status.code(), Some(2));
    assert_eq!(hinf(&["norm", path(&m), "--phi", "0"]).status.code(), Some(3));
    assert_eq!(hinf(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn approx_matches_norm_on_a_sparse_chain() {
    let dir = tempfile::tempdir().unwrap();
    let m = chain(dir.path(), 30);
    let seeds = dir.path().join("seeds.txt");
    std::fs::write(&seeds, "0\n").unwrap();
    let approx = report(&hinf(&["approx", path(&m), "--seeds", path(&seeds)]));
    assert!(!approx.certified_global);
    assert_eq!(approx.variant, "local-only");
    let exact = report(&hinf(&["norm", path(&m)]));
    assert!(exact.certified_global);
    assert!((approx.gamma - exact.gamma).abs() <= 1e-10 * exact.gamma, "{} vs {}", approx.gamma, exact.gamma);
}

#[test]
fn approx_without_seeds_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let m = scalar(dir.path(), Domain::Continuous, -1.0);
    let seeds = dir.path().join("empty.txt");
    std::fs::write(&seeds, "").unwrap();
    let out = hinf(&["approx", path(&m), "--seeds", path(&seeds), "--no-spectrum-seeds"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no starting frequencies"));
}

#[test]
fn approx_clamps_phi_to_the_seed_count() {
    let dir = tempfile::tempdir().unwrap();
    let m = scalar(dir.path(), Domain::Continuous, -1.0);
    let seeds = dir.path().join("three.txt");
    std::fs::write(&seeds, "# three seeds\n-2\n0.5\n4\n").unwrap();
    let r = report(&hinf(&["approx", path(&m), "--seeds", path(&seeds), "--no-spectrum-seeds", "--phi", "5"]));
    assert!((r.gamma - 1.0).abs() < 1e-14);
    // three seed gains plus at least one step of each of the three runs
    assert!(r.gain_eval_count >= 6, "{}", r.gain_eval_count);
}

#[test]
fn bad_seed_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let m = scalar(dir.path(), Domain::Continuous, -1.0);
    let seeds = dir.path().join("bad.txt");
    std::fs::write(&seeds, "0.1\nabc\n").unwrap();
    assert_eq!(hinf(&["approx", path(&m), "--seeds", path(&seeds)]).status.code(), Some(2));
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

#[test]
fn bench_random_suite() {
    let out = hinf(&["bench", "--random", "5x(n=20,m=4,p=4,seed=11)", "--variants", "all", "--threads", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(hinf::cli::BENCH_HEADER));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 30);
    let mut counts: std::collections::HashMap<String, Vec<f64>> = Default::default();
    for problem in rows.chunks(6) {
        let g: Vec<f64> = problem.iter().map(|r| r[2].parse().unwrap()).collect();
        for x in &g {
            assert!((x - g[0]).abs() <= 1e-11 * g[0], "{g:?}");
        }
        for r in problem {
            assert_eq!(r[0], problem[0][0]);
            assert_eq!(r[5], "true");
            counts.entry(r[1].clone()).or_default().push(r[6].parse().unwrap());
        }
    }
    let (h, c, b) = (median(counts["hybrid-newton-interp"].clone()), median(counts["cubic"].clone()), median(counts["bbbs"].clone()));
    assert!(h <= c && c <= b, "{h} {c} {b}");

    // same seed, same CSV apart from the wall time column
    let again = hinf(&["bench", "--random", "5x(n=20,m=4,p=4,seed=11)", "--variants", "all"]);
    let strip = |s: &str| s.lines().map(|l| l.split(',').enumerate().filter(|(k, _)| *k != 8).map(|x| x.1).collect::<Vec<_>>().join(",")).collect::<Vec<_>>();
    assert_eq!(strip(&text), strip(&String::from_utf8(again.stdout).unwrap()));
}

#[test]
fn bench_manifests_and_bad_variant_lists() {
    let dir = tempfile::tempdir().unwrap();
    let m = scalar(dir.path(), Domain::Continuous, -1.0);
    let out = hinf(&["bench", "--manifest", path(&m), "--variants", "bbbs,hybrid-secant-mp"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.contains("scalar_-1,bbbs,1.0000000000000000e0"));
    assert_eq!(hinf(&["bench", "--manifest", path(&m), "--variants", ""]).status.code(), Some(2));
    assert_eq!(hinf(&["bench", "--variants", "bbbs"]).status.code(), Some(2));
}

fn curve(out: &Output) -> Vec<(f64, Option<f64>)> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("frequency,gain"));
    lines
        .map(|l| {
            let (w, g) = l.split_once(',').unwrap();
            (w.parse().unwrap(), (!g.is_empty()).then(|| g.parse().unwrap()))
        })
        .collect()
}

#[test]
fn gain_curves() {
    let dir = tempfile::tempdir().unwrap();
    let m = scalar(dir.path(), Domain::Continuous, -1.0);
    let c = curve(&hinf(&["gain-curve", path(&m), "--range", "-3,3", "--samples", "7"]));
    let want = [0.1f64.sqrt(), 0.2f64.sqrt(), 0.5f64.sqrt(), 1.0, 0.5f64.sqrt(), 0.2f64.sqrt(), 0.1f64.sqrt()];
    for ((w, g), (k, x)) in c.iter().zip(want.iter().enumerate()) {
        assert_eq!(*w, k as f64 - 3.0);
        assert!((g.unwrap() - x).abs() < 1e-15);
    }

    let d = scalar(dir.path(), Domain::Discrete, 0.5);
    let c = curve(&hinf(&["gain-curve", path(&d), "--range", "0,2pi", "--samples", "4"]));
    let want = [2.0, 1.0 / 1.25f64.sqrt(), 2.0 / 3.0, 1.0 / 1.25f64.sqrt()];
    assert_eq!(c.len(), 4);
    for ((_, g), x) in c.iter().zip(want) {
        assert!((g.unwrap() - x).abs() < 1e-15, "{g:?} {x}");
    }

    // an undamped mode puts a pole at ω = 1
    let osc = StateSpaceSystem::from_real(&[&[0.0, 1.0], &[-1.0, 0.0]], &[&[0.0], &[1.0]], &[&[1.0, 0.0]], &[&[0.0]], Domain::Continuous).unwrap();
    let p = write_system(dir.path(), "osc", &osc).unwrap();
    let c = curve(&hinf(&["gain-curve", path(&p), "--range", "0,2", "--samples", "3"]));
    assert!(c[0].1.is_some() && c[1].1.is_none() && c[2].1.is_some());
}

#[test]
fn gain_curve_argument_errors() {
    let dir = tempfile::tempdir().unwrap();
    let m = scalar(dir.path(), Domain::Continuous, -1.0);
    assert_eq!(hinf(&["gain-curve", path(&m), "--range", "-3,3", "--samples", "1"]).status.code(), Some(2));
    assert_eq!(hinf(&["gain-curve", path(&m), "--range", "3,-3", "--samples", "5"]).status.code(), Some(2));
    assert_eq!(hinf(&["gain-curve", path(&m), "--range", "0,inf", "--samples", "5"]).status.code(), Some(2));
    assert_eq!(hinf(&["gain-curve", path(&m), "--range", "zero", "--samples", "5"]).status.code(), Some(2));
}
