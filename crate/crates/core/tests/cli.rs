use std::path::PathBuf;
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use sopq_flags::flag::ThetaSet;
use sopq_flags::io::{CoordsJson, MatrixJson};
use sopq_flags::linalg::Matrix;
use sopq_flags::quadratic::Signature;
use sopq_flags::unipotent::{psi_chart, Chart, UnipotentCoords};

fn sopq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sopq")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sopq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn theta(p: usize, q: usize, t: &str) -> ThetaSet {
    ThetaSet::parse(Signature::new(p, q).unwrap(), t).unwrap()
}

#[test]
fn count_prints_count_and_positive() {
    let out = sopq(&["count", "--p", "5", "--q", "3", "--theta", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out), serde_json::json!({"count": 11, "positive": 4}));
}

#[test]
fn count_without_positivity_notion_reports_null() {
    let out = sopq(&["count", "--p", "6", "--q", "4", "--theta", "1,3"]);
    assert_eq!(json(&out), serde_json::json!({"count": 4, "positive": null}));
}

#[test]
fn identity_matrix_is_not_transverse() {
    let th = theta(5, 3, "1,2");
    let path = temp_file("identity.json", &serde_json::to_string(&MatrixJson::from_matrix(&th, &Matrix::identity(8))).unwrap());
    let out = sopq(&["classify", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["error"], "not_transverse");
    assert_eq!(v["levels"], serde_json::json!(["1", "2"]));
}

#[test]
fn classify_agrees_for_coordinates_and_matrix() {
    let th = theta(5, 3, "1,2");
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let c = UnipotentCoords::random(&Chart::new(&th), &mut rng, 6);
    let coords = temp_file("coords.json", &serde_json::to_string(&CoordsJson::from_coords(&c)).unwrap());
    let matrix = temp_file("matrix.json", &serde_json::to_string(&MatrixJson::from_matrix(&th, &psi_chart(&c))).unwrap());
    let a = sopq(&["classify", "--input", coords.to_str().unwrap()]);
    let b = sopq(&["classify", "--input", matrix.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(json(&a), json(&b));
}

#[test]
fn positivity_of_sign_matrix_text() {
    let striped = temp_file("striped.txt", "* + / *");
    let v = json(&sopq(&["positivity", "--input", striped.to_str().unwrap()]));
    assert_eq!(v["positive"], false);
}

#[test]
fn non_self_opposite_set_exits_2() {
    let out = sopq(&["count", "--p", "3", "--q", "3", "--theta", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_input_exits_1() {
    let path = temp_file("bad.json", "{not json");
    assert_eq!(sopq(&["classify", "--input", path.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(sopq(&["count", "--p", "5"]).status.code(), Some(1));
}

#[test]
fn oracle_matches_exact_count() {
    let v = json(&sopq(&["oracle", "--p", "3", "--q", "2", "--theta", "1", "--samples", "60"]));
    assert_eq!(v["count"], v["exact"]);
    assert_eq!(v["conflicts"], 0);
}

#[test]
fn csv_tables_have_header() {
    let out = sopq(&["tables", "--theorem", "C", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("p,q,theta,count,positive,stable,swapped,unknown\n"), "{text}");
}
