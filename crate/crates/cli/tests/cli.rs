use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn hiacc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hiacc")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hiacc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn hilbert_determinant() {
    let m = temp_file("h4.json", r#"{"kind": "hilbert", "n": 4}"#);
    let out = hiacc(&["det", "--matrix", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["det"], "1/6048000");
    let csv = hiacc(&["det", "--matrix", m.to_str().unwrap(), "--format", "csv"]);
    assert!(String::from_utf8(csv.stdout).unwrap().starts_with("det,approx\n1/6048000,"));
}

#[test]
fn minor_and_ldu() {
    let m = temp_file("v.json", r#"{"kind": "vandermonde", "nodes": ["1", "2", "3"]}"#);
    let p = m.to_str().unwrap();
    let out = hiacc(&["minor", "--matrix", p, "--rows", "0,2", "--cols", "0,1"]);
    assert_eq!(out.status.code(), Some(0));
    // rows (1, 1), (1, 3) of [1, x]
    assert_eq!(json(&out)["minor"], "2");
    let out = hiacc(&["ldu", "--matrix", p, "--precision", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["d"].as_array().unwrap().len(), 3);
    assert_eq!(hiacc(&["ldu", "--matrix", p, "--format", "csv"]).status.code(), Some(1));
}

#[test]
fn singular_values() {
    let m = temp_file("h3.json", r#"{"kind": "hilbert", "n": 3}"#);
    let out = hiacc(&["svd", "--matrix", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let s: Vec<f64> = json(&out)["sigma"].as_array().unwrap().iter().map(|x| x.as_str().unwrap().parse().unwrap()).collect();
    // eigenvalues of the 3x3 Hilbert matrix
    let want = [1.4083189271236539, 0.12232706585390584, 0.0026873403557735292];
    for (a, b) in s.iter().zip(&want) {
        assert!(((a - b) / b).abs() < 1e-14, "{a} vs {b}");
    }
}

#[test]
fn decide_exit_codes() {
    let yes = hiacc(&["decide", "--poly", "(x1-x2)*(x1-x3)*(x2-x3)"]);
    assert_eq!(yes.status.code(), Some(0));
    let v = json(&yes);
    assert_eq!(v["answer"], "EvaluableComplex");
    assert_eq!(v["nic"]["is_nic"], true);

    let no = hiacc(&["decide", "--poly", "x1+x2+x3"]);
    assert_eq!(no.status.code(), Some(2));
    assert_eq!(json(&no)["answer"], "NotEvaluableComplex");

    let real = hiacc(&["decide", "--poly", "x1+x2+x3", "--field", "real"]);
    assert_eq!(real.status.code(), Some(0));
    assert_eq!(json(&real)["answer"], "Unknown");

    let bad = hiacc(&["decide", "--poly", "x1+"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8(bad.stderr).unwrap().starts_with("error:"));
}

#[test]
fn decide_with_boxes_and_component() {
    let b = temp_file("boxes.json", r#"[{"name": "fma", "poly": "x1 + x2*x3"}]"#);
    let out = hiacc(&["decide", "--poly", "x1 + x2*x3", "--boxes", b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["answer"], "EvaluableWithBlackBoxes");

    let out = hiacc(&["decide", "--poly", "x1^2*x2^2*(x1^2+x2^2-3*x3^2)+x3^6", "--component", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
    let facets = json(&out)["dominant_terms"]["facets"].as_array().unwrap().len();
    assert!(facets >= 1);
}

#[test]
fn experiments() {
    let out = hiacc(&["exp", "hilbert", "--n", "5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "index,sigma_oracle,sigma_conventional,sigma_accurate,rel_err_conv,rel_err_acc");
    assert_eq!(rows.len(), 6);

    let out = hiacc(&["exp", "schur", "--n", "8", "--k", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["rows"].as_array().unwrap().len() == 4);

    let out = hiacc(&["exp", "impossibility", "--eps", "2^-24"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for o in v["orderings"].as_array().unwrap() {
        assert!(o["witness_rel_error"].as_f64().unwrap() > 1e6);
    }

    let dir = std::env::temp_dir().join(format!("hiacc-cli-{}", std::process::id()));
    let path = dir.join("motzkin.csv");
    let out = hiacc(&["exp", "motzkin", "--count", "50", "--near", "10", "--seed", "3", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 51);
    let again = hiacc(&["exp", "motzkin", "--count", "50", "--near", "10", "--seed", "3", "--format", "csv"]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);

    assert_eq!(hiacc(&["exp", "schur", "--n", "3", "--k", "5"]).status.code(), Some(1));
    assert_eq!(hiacc(&["exp", "motzkin", "--count", "5", "--near", "9"]).status.code(), Some(1));
}

#[test]
fn bad_matrix_file() {
    let m = temp_file("bad.json", r#"{"kind": "hilbert", "n": 3, "extra": 1}"#);
    let out = hiacc(&["det", "--matrix", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let out = hiacc(&["det", "--matrix", "/nonexistent/matrix.json"]);
    assert_eq!(out.status.code(), Some(1));
}
