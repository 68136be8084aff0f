use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn xili(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xili")).args(args).output().unwrap()
}

fn xili_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xili")).current_dir(dir).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(d: &Path, name: &str) -> String {
    d.join(name).to_str().unwrap().to_string()
}

/// ξ_r (R = 120) and a_n (N = 60) at 30 digits in a fresh directory, with
/// relative paths so the recorded configuration does not depend on it.
fn pipeline() -> TempDir {
    let d = TempDir::new().unwrap();
    let o = xili_in(d.path(), &["xi", "--digits", "30", "--terms", "120"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = xili_in(d.path(), &["li", "--digits", "30", "--xi", "xi_r.txt", "--nmax", "60", "--oracle-limit", "20"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    d
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (pipeline(), pipeline());
    for name in ["xi_r.txt", "a_n.txt", "Sigma_p.txt", "li_report.json"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert!(x == y, "{name} differs between runs");
    }
}

#[test]
fn li_report_and_lambda_outputs() {
    let d = pipeline();
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("li_report.json")).unwrap()).unwrap();
    assert_eq!(report["generator"].as_str().unwrap().split(' ').next(), Some("xili"));
    let an = fs::read_to_string(d.path().join("a_n.txt")).unwrap();
    assert!(an.contains("\n1\t2.30957089661210338143102479065e-2\n"));

    let out = d.path().to_str().unwrap();
    let a = path(d.path(), "a_n.txt");
    let o = xili(&["lambda", "--digits", "30", "--a", &a, "--nmax", "40", "--out", out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["lambda_n.txt", "lambda_n_keiper.txt", "A_j.txt", "b_n.txt", "R_n.txt"] {
        assert!(d.path().join(name).exists(), "{name}");
    }
    let lam = fs::read_to_string(d.path().join("lambda_n.txt")).unwrap();
    assert!(lam.contains("\n3\t2.07638920554324803791"));

    let files: Vec<String> = ["a_n.txt", "lambda_n.txt", "A_j.txt", "xi_r.txt"].iter().map(|n| path(d.path(), n)).collect();
    let mut args = vec!["verify"];
    args.extend(files.iter().map(String::as_str));
    assert_eq!(code(&xili(&args)), 0);
}

#[test]
fn zero_terms_gives_a_single_row() {
    let d = TempDir::new().unwrap();
    let o = xili(&["xi", "--terms", "0", "--out", d.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let body: Vec<String> = fs::read_to_string(d.path().join("xi_r.txt"))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(String::from)
        .collect();
    assert_eq!(body.len(), 1);
    assert!(body[0].starts_with("0\t4.97120778188314109912"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&xili(&["--no-such-flag"])), 1);
    assert_eq!(code(&xili(&["xi", "--digits", "many"])), 1);
    assert_eq!(code(&xili(&["verify", "/nonexistent/a_n.txt"])), 1);
    assert_eq!(code(&xili(&["--help"])), 0);
}

#[test]
fn refusals_exit_2() {
    let d = pipeline();
    let out = d.path().to_str().unwrap();
    assert_eq!(code(&xili(&["xi", "--digits", "10", "--out", out])), 2);
    let xi = path(d.path(), "xi_r.txt");
    let o = xili(&["li", "--digits", "30", "--xi", &xi, "--nmax", "2000", "--out", out]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn corrupted_cache_exits_3() {
    let d = pipeline();
    let a = d.path().join("a_n.txt");
    let text = fs::read_to_string(&a).unwrap();
    let line = text.lines().find(|l| l.starts_with("3\t")).unwrap().to_string();
    let bad = line.replace("3\t", "3\t-");
    fs::write(&a, text.replace(&line, &bad)).unwrap();
    let o = xili(&["verify", a.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stdout).contains("not positive"));
}

#[test]
fn scan_writes_loci_and_finds_the_first_zero() {
    let d = TempDir::new().unwrap();
    let out = d.path().to_str().unwrap();
    assert_eq!(code(&xili(&["xi", "--digits", "30", "--terms", "120", "--out", out])), 0);
    let xi = path(d.path(), "xi_r.txt");
    let o = xili(&[
        "scan", "--digits", "30", "--tail-tol", "20", "--xi", &xi, "--range", "1:3", "--step", "0.5", "--t-range", "10:22",
        "--steps", "600", "--format", "json", "--out", out,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("scan_summary.json")).unwrap()).unwrap();
    let t = summary["result"]["first_xi_dip_t"].as_f64().unwrap();
    assert!((t - 14.134725).abs() < 1e-5, "{t}");
    assert!(d.path().join("circle.json").exists() && d.path().join("sandwich.json").exists());

    // |w_M| = 3 is the vertical line Re u = −1/3
    let locus = fs::read_to_string(d.path().join("locus_w_m_3.csv")).unwrap();
    let xs: Vec<f64> = locus
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('x'))
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(!xs.is_empty() && xs.iter().all(|x| (x + 1.0 / 3.0).abs() < 1e-12));
}
