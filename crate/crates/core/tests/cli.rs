use std::path::Path;

use atiyah::cli::main_with_args;
use atiyah::sympoly::{expand_re_det_m, EdgePoly};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with_args(std::iter::once("atiyah").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn field(json: &str, key: &str) -> f64 {
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    v[key].as_f64().unwrap()
}

#[test]
fn compute_examples() {
    let dir = tempfile::tempdir().unwrap();
    let h = 3f64.sqrt() / 2.0;
    let top = [(2.0f64 / 3.0).sqrt(), 0.5, h / 3.0];
    let regular = write(
        dir.path(),
        "regular.json",
        &format!(r#"{{"points": [[0,0,0],[0,1,0],[0,0.5,{h}],[{},{},{}]]}}"#, top[0], top[1], top[2]),
    );
    let (code, out, _) = run(&["compute", "--in", &regular]);
    assert_eq!(code, 0);
    assert!((field(&out, "det_m_re") - 100.0).abs() < 1e-12);
    assert!(field(&out, "det_m_im").abs() < 1e-12);
    assert!((field(&out, "d_re") - 1.5625).abs() < 1e-14);
    assert!(field(&out, "closed_form_residual") < 1e-12);

    let collinear = write(dir.path(), "line.json", r#"{"points": [[0,0,0],[0,1,0],[0,2,0],[0,4,0]]}"#);
    let (code, out, _) = run(&["compute", "--in", &collinear]);
    assert_eq!(code, 0);
    assert!((field(&out, "abs_d") - 1.0).abs() < 1e-14);

    let pair = write(dir.path(), "pair.json", r#"{"points": [[0,0,0],[0,3,4]]}"#);
    let (_, out, _) = run(&["compute", "--in", &pair, "--format", "csv"]);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert!((row[1].parse::<f64>().unwrap() - 10.0).abs() < 1e-13);
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("same.json", r#"{"points": [[0,0,0],[0,0,0]]}"#),
        ("nan.json", r#"{"points": [[0,0,0],[NaN,0,0]]}"#),
        ("huge.json", r#"{"points": [[0,0,0],[1e999,0,0]]}"#),
        ("one.json", r#"{"points": [[0,0,0]]}"#),
        ("garbage.json", "points"),
    ] {
        let path = write(dir.path(), name, text);
        let (code, _, err) = run(&["compute", "--in", &path]);
        assert_eq!(code, 2, "{name}");
        assert!(err.starts_with("error:"), "{name}: {err}");
    }
    assert_eq!(run(&["compute", "--in", "/nonexistent/file.json"]).0, 2);
    assert_eq!(run(&["compute"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["search", "--objective", "gap7"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn expand_writes_a_parsable_polynomial() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("re.txt");
    let (code, out, _) = run(&["expand", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), format!("terms: {}", expand_re_det_m().len()));
    let p = EdgePoly::from_text(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(p, expand_re_det_m());
    assert_eq!(p.eval_f64(&[1.0; 6]), 100.0);
}

#[test]
fn verify_and_scan_are_green_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let (code, _, _) = run(&["verify", "--seed", "7", "--trials", "1000", "--out", a.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, _, _) =
        run(&["verify", "--seed", "7", "--trials", "1000", "--workers", "2", "--out", b.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let (code, out, err) = run(&["scan", "--trials", "20000", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 20001);
    assert!(err.contains("min gap2"));
}

#[test]
fn failing_checks_exit_with_one() {
    let (code, out, _) = run(&["verify", "--trials", "20", "--tol", "0"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(!v[1]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn search_reports_and_archives() {
    let dir = tempfile::tempdir().unwrap();
    let archive = dir.path().join("runs.ndjson");
    let args = ["search", "--objective", "abs-D", "--n", "4", "--trials", "10", "--archive", archive.to_str().unwrap()];
    let (code, out, _) = run(&args);
    assert_eq!(code, 0);
    let best = field(&out, "best_value");
    assert!((1.0 - 1e-6..=1.0 + 1e-3).contains(&best), "{best}");
    run(&args);
    let lines: Vec<String> = std::fs::read_to_string(&archive).unwrap().lines().map(String::from).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], lines[1]);
    let record: serde_json::Value = serde_json::from_str(&lines[0]).unwrap();
    assert_eq!(record["seed"], 42);
}

#[test]
fn interpolate_re_det_recovers_the_expansion() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fit.txt");
    let (code, out, _) = run(&["interpolate", "--target", "re-det", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(field(&out, "terms"), 248.0);
    let p = EdgePoly::from_text(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(p, expand_re_det_m());
    assert_eq!(run(&["interpolate", "--precision", "64"]).0, 2);
}
