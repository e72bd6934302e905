//! End-to-end runs of the command-line front end.

use std::path::Path;

use otclass::cli::{exit_code, run, EXIT_CLASS_INFEASIBLE, EXIT_INPUT, EXIT_OK, EXIT_SOLVER, EXIT_VIOLATION};
use otclass::Error;
use serde_json::{json, Value};
use tempfile::TempDir;

fn exec(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("otclass").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json_of(args: &[&str]) -> Value {
    let (code, out, err) = exec(args);
    assert_eq!(code, EXIT_OK, "stderr: {err}");
    serde_json::from_str(&out).unwrap()
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_string_lossy().into_owned()
}

fn measure(atoms: &[i64], weights: &[&str]) -> Value {
    json!({"dim": 1, "mode": "rational", "atoms": atoms.iter().map(|a| vec![a.to_string()]).collect::<Vec<_>>(), "weights": weights})
}

#[test]
fn demo_reports_three_classes_and_writes_figures() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    let v = json_of(&["demo", "--dot-dir", d]);
    assert_eq!(v["classes"], json!([["f", "g"], ["h"], ["k"]]));
    assert_eq!(v["checks"]["second_marginals_equal_nu"], json!(true));
    // W1 on the line is ∫|F − G| = 1/6 + 1/3.
    assert_eq!(v["mk_value"], json!("1/2"));
    // Mass 1/3 at ½δ₀ + ½δ₁ must move distance 1/2 to a Dirac atom.
    assert_eq!(v["dirac_class"]["meta_distance_to_f"], json!("1/6"));
    assert_eq!(v["dirac_class"]["same_barycenter"], json!(true));
    assert_eq!(v["plans"]["f"]["cost"], json!("1/2"));
    assert_eq!(v["plans"]["h"]["cost"], json!("19/30"));
    for (f, label) in [("split_mass_same_class.dot", "1/6"), ("split_mass_two_splits.dot", "1/10")] {
        let dot = std::fs::read_to_string(dir.path().join(f)).unwrap();
        assert!(dot.starts_with("digraph") && dot.contains("penwidth"));
        assert!(dot.contains(&format!("label=\"{label}\"")), "{f}");
    }
}

#[test]
fn every_command_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    for args in [
        vec!["demo", "--dot-dir", d, "--format", "table"],
        vec!["check", "duality", "--seed", "9", "--trials", "5"],
        vec!["check", "push-lemma", "--trials", "5", "--format", "csv"],
    ] {
        assert_eq!(exec(&args), exec(&args));
    }
}

#[test]
fn solve_reports_exact_value_plan_and_duals() {
    let dir = TempDir::new().unwrap();
    let mu = write(dir.path(), "mu.json", &measure(&[0, 2], &["1/2", "1/2"]));
    let nu = write(dir.path(), "nu.json", &measure(&[1], &["1"]));
    let v = json_of(&["solve", "--mode", "rational", "--cost", "sqeuclidean", "--mu", &mu, "--nu", &nu]);
    assert_eq!(v["value"], json!("1"));
    assert_eq!(v["duality_gap"], json!("0"));
    assert_eq!(v["plan"].as_array().unwrap().len(), 2);

    let (code, csv, _) = exec(&["solve", "--mode", "rational", "--cost", "sqeuclidean", "--mu", &mu, "--nu", &nu, "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(csv, "i,j,mass,cost\n0,0,1/2,1\n1,0,1/2,1\n");

    let out = dir.path().join("report.json");
    let (code, stdout, _) = exec(&["solve", "--mode", "rational", "--mu", &mu, "--nu", &nu, "--out", out.to_str().unwrap()]);
    assert_eq!((code, stdout.as_str()), (EXIT_OK, ""));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(saved["value"], json!("1"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let mu = write(dir.path(), "mu.json", &measure(&[0, 2], &["1/2", "1/2"]));
    let bad = write(dir.path(), "bad.json", &measure(&[0, 2], &["1/2", "1/3"]));
    let missing = dir.path().join("nope.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["solve", "--mu", &mu, "--nu", missing.to_str().unwrap()],
        vec!["solve", "--mode", "rational", "--mu", &mu, "--nu", &bad],
        vec!["solve", "--mode", "float", "--mu", &mu, "--nu", &mu],
        vec!["solve", "--mu", &mu, "--nu", &mu, "--eps-dual", "0"],
        vec!["check", "duality", "--trials", "0"],
        vec!["check", "twist", "--cost", "nope.json"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let (code, _, err) = exec(&args);
        assert_eq!(code, EXIT_INPUT, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
    assert_eq!(exec(&["--help"]).0, EXIT_OK);
}

#[test]
fn solver_failures_map_to_three() {
    assert_eq!(exit_code(&Error::Unbounded), EXIT_SOLVER);
    assert_eq!(exit_code(&Error::Infeasible("x".into())), EXIT_SOLVER);
    assert_eq!(exit_code(&Error::EmptyMeasure), EXIT_INPUT);
}

#[test]
fn classify_groups_plans_by_class() {
    let dir = TempDir::new().unwrap();
    let base = measure(&[0, 1, 2], &["1/3", "1/3", "1/3"]);
    let split = measure(&[0, 1], &["1/2", "1/2"]);
    let stay = measure(&[1], &["1"]);
    let mixed = measure(&[0, 1], &["3/10", "7/10"]);
    let mixed2 = measure(&[0, 1], &["1/5", "4/5"]);
    let f = write(dir.path(), "f.json", &json!({"base": base, "conditionals": [split, stay, stay]}));
    let g = write(dir.path(), "g.json", &json!({"base": base, "conditionals": [stay, split, stay]}));
    let h = write(dir.path(), "h.json", &json!({"base": base, "conditionals": [mixed, mixed2, stay]}));
    let v = json_of(&["classify", "--mode", "rational", "--plan", &f, "--plan", &g, "--plan", &h]);
    assert_eq!(v["classes"], json!([["f", "g"], ["h"]]));
    // f and h differ by ½ − 3/10 and 1/5 − 0 on the split masses.
    assert_eq!(v["meta_distances"][0][2], json!("2/15"));
}

#[test]
fn class_solve_reports_infeasibility_with_four() {
    let dir = TempDir::new().unwrap();
    let mu = write(dir.path(), "mu.json", &measure(&[0, 1, 2], &["1/3", "1/3", "1/3"]));
    let lambda = json!({"atoms": [measure(&[0], &["1"]), measure(&[2], &["1"])], "weights": ["1/2", "1/2"]});
    let lam = write(dir.path(), "lambda.json", &lambda);
    let (code, out, _) = exec(&["class-solve", "--mode", "rational", "--cost", "sqeuclidean", "--mu", &mu, "--lambda", &lam]);
    assert_eq!(code, EXIT_CLASS_INFEASIBLE);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["feasible_maps_exist"], json!(false));
    assert_eq!(v["map_value"], json!("inf"));
}

#[test]
fn class_solve_flags_equal_barycenters_under_inner_product() {
    let dir = TempDir::new().unwrap();
    let mu = write(dir.path(), "mu.json", &measure(&[0, 1, 2, 3], &["1/4", "1/4", "1/4", "1/4"]));
    let lambda = json!({"atoms": [measure(&[-1, 1], &["1/2", "1/2"]), measure(&[0], &["1"])], "weights": ["1/2", "1/2"]});
    let lam = write(dir.path(), "lambda.json", &lambda);
    let v = json_of(&["class-solve", "--mode", "rational", "--cost", "inner", "--mu", &mu, "--lambda", &lam]);
    assert_eq!(v["discriminants"][0]["degenerate"], json!(true));
    assert_eq!(v["tie_degenerate"], json!(true));
    assert_eq!(v["map_value"], json!("0"));
}

#[test]
fn check_suites_pass_on_default_seed() {
    for suite in ["duality", "monotonicity", "barycenter-lipschitz", "twist", "push-lemma"] {
        let v = json_of(&["check", suite, "--trials", "10"]);
        assert_eq!(v["pass"], json!(true), "{suite}");
        assert_eq!(v["trials"], json!(10));
    }
}

#[test]
fn twist_check_exits_one_on_a_flat_separable_cost() {
    let dir = TempDir::new().unwrap();
    let cost = write(dir.path(), "cost.json", &json!({"cost": "separable", "a": [1, 1, 1, 1], "b": [0, 1, 2]}));
    let (code, out, _) = exec(&["check", "twist", "--cost", &cost, "--trials", "1"]);
    assert_eq!(code, EXIT_VIOLATION);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pass"], json!(false));
    assert!(v.get("witness").is_some());
}
