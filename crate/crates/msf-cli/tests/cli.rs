use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn msf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msf")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn factor_converges_and_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let (trace, out) = (dir.path().join("t.csv"), dir.path().join("r.json"));
    let o = msf(&["factor", "--example", "1", "--trace", p(&trace), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let mut rdr = csv::Reader::from_path(&trace).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["n", "eps_P", "eps_H", "step_norm"]);
    let mut last_n = None;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let n: usize = rec[0].parse().unwrap();
        assert!(last_n.map_or(true, |l| n > l));
        last_n = Some(n);
        for field in [&rec[1], &rec[2], &rec[3]] {
            assert!(field.parse::<f64>().unwrap().is_finite());
        }
    }
    assert!(last_n.unwrap() <= 6);

    let report = json_file(&out);
    assert_eq!(report["status"], "Converged");
    assert!(report["final_eps_p"].as_f64().unwrap() <= 1e-14);
    assert!(report["final_eps_h"].as_f64().unwrap() <= 1e-13);
    assert_eq!(report["factors"].as_array().unwrap().len(), 3);
    let h00 = report["factors"][0][0][0].as_f64().unwrap();
    assert!((h00 - 0.6860).abs() < 1e-4);
}

#[test]
fn report_round_trips_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    assert_eq!(code(&msf(&["factor", "--example", "3", "--method", "fpi", "--max-iter", "30", "--out", p(&out)])), 2);
    let text = std::fs::read_to_string(&out).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["status"], "MaxIterations");
    assert_eq!(v["iterations"], 30);
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(v, again);
}

#[test]
fn factor_reads_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("scalar.json");
    std::fs::write(&input, r#"{"r":1,"m":1,"coeffs":{"0":[[2.5]],"1":[[1.0]]},"mirror":true}"#).unwrap();
    let o = msf(&["factor", "--input", p(&input), "--method", "newton"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    // x = 2 solves x = 5/2 − 1/x
    assert!((v["x"][0][0].as_f64().unwrap() - 2.0).abs() < 1e-13);
    assert!(v["final_eps_h"].is_null());
}

#[test]
fn analyze_finds_reciprocal_zeros() {
    let o = msf(&["analyze", "--example", "1"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let mut re: Vec<f64> = v["zeros"]["zeros"].as_array().unwrap().iter().map(|z| z["location"][0].as_f64().unwrap()).collect();
    re.sort_by(f64::total_cmp);
    assert_eq!(re.len(), 2);
    assert!((re[0] - 0.5).abs() < 1e-9 && (re[1] - 2.0).abs() < 1e-9);
    assert_eq!(v["singular"], false);
    assert_eq!(v["psd"]["ok"], true);
}

#[test]
fn analyze_flags_singular_example() {
    let v: Value = serde_json::from_slice(&msf(&["analyze", "--example", "2"]).stdout).unwrap();
    assert_eq!(v["singular"], true);
}

#[test]
fn verify_accepts_corpus_and_rejects_tampering() {
    for id in 1..=7 {
        assert_eq!(code(&msf(&["verify", "--example", &id.to_string()])), 0, "example {id}");
    }
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let bad = dir.path().join("bad.json");
    std::fs::write(&good, r#"{"r":1,"m":1,"coeffs":{"0":["5/4"],"1":["1/2"]},"mirror":true,"x":["1"],"h":[["1"],["1/2"]]}"#)
        .unwrap();
    std::fs::write(&bad, r#"{"r":1,"m":1,"coeffs":{"0":["5/4"],"1":["1/2"]},"mirror":true,"x":["1"],"h":[["1"],["1/3"]]}"#)
        .unwrap();
    assert_eq!(code(&msf(&["verify", "--input", p(&good)])), 0);
    let o = msf(&["verify", "--input", p(&bad)]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["failures"], serde_json::json!(["product", "cross"]));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cross"));
}

#[test]
fn verify_solves_scalar_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let ok = dir.path().join("ok.json");
    let nested = dir.path().join("nested.json");
    std::fs::write(&ok, r#"{"r":1,"m":1,"coeffs":{"0":["3"],"1":["1"]},"mirror":true}"#).unwrap();
    std::fs::write(&nested, r#"{"r":1,"m":1,"coeffs":{"0":["s2"],"1":["1/2"]},"mirror":true}"#).unwrap();
    let o = msf(&["verify", "--input", p(&ok)]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["scalar_solution"]["x"], "3/2 + 1/2*s5");
    assert_eq!(code(&msf(&["verify", "--input", p(&nested)])), 4);
}

#[test]
fn rates_classify_regular_and_singular() {
    let quad: Value =
        serde_json::from_slice(&msf(&["rates", "--example", "1", "--iters", "20", "--burn-in", "0", "--precision", "dd"]).stdout)
            .unwrap();
    assert_eq!(quad["rate"]["class"]["kind"], "quadratic");

    let sub: Value =
        serde_json::from_slice(&msf(&["rates", "--example", "2", "--method", "fpi", "--iters", "3000"]).stdout).unwrap();
    assert_eq!(sub["rate"]["class"]["kind"], "sublinear");
    assert!((sub["rate"]["class"]["power"].as_f64().unwrap() - 1.0).abs() < 0.05);

    let lin: Value = serde_json::from_slice(&msf(&["rates", "--example", "6"]).stdout).unwrap();
    let (got, want) = (lin["measured_factor"].as_f64().unwrap(), lin["expected_factor"].as_f64().unwrap());
    assert!((want - 0.5f64.sqrt()).abs() < 1e-12);
    assert!((got - want).abs() < 0.05, "{got} vs {want}");
}

#[test]
fn pencil_reports_mixed_pattern_for_clustered_root() {
    let v: Value = serde_json::from_slice(&msf(&["pencil", "--example", "7"]).stdout).unwrap();
    assert_eq!(v["pattern"], "mixed");
    assert_eq!(v["m"].as_array().unwrap().len(), 15);
    let v: Value = serde_json::from_slice(&msf(&["pencil", "--example", "1"]).stdout).unwrap();
    assert_eq!(v["pattern"], "inside");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&msf(&["factor"])), 1);
    assert_eq!(code(&msf(&["factor", "--example", "9"])), 1);
    assert_eq!(code(&msf(&["factor", "--input", "/nonexistent/p.json"])), 1);
    assert_eq!(code(&msf(&["--help"])), 0);
}
