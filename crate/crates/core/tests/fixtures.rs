//! Golden records written by `examples/derive_fixtures.rs` from the
//! brute-force oracle; the library must reproduce each exactly.

use std::path::PathBuf;

use otclass::io::{cost_from_json, measure_from_json, read_json, scalar_from_json};
use otclass::kantorovich::{check_cyclical_monotonicity, solve_monge_maps};
use otclass::matrix::Matrix;
use otclass::scalar::Rational;
use otclass::solver::{solve_transportation, TransportationInstance};
use serde_json::Value;

fn records(prefix: &str) -> Vec<(String, Value)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut out: Vec<(String, Value)> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with(prefix))
        .map(|p| {
            let v = read_json(&p).unwrap();
            (v["derived_example_id"].as_str().unwrap().to_string(), v)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    assert!(!out.is_empty(), "no fixtures named {prefix}*");
    out
}

fn scalars(v: &Value) -> Vec<Rational> {
    v.as_array().unwrap().iter().map(|x| scalar_from_json(x, "fixture").unwrap()).collect()
}

fn points(v: &Value) -> Vec<Vec<Rational>> {
    v.as_array().unwrap().iter().map(scalars).collect()
}

#[test]
fn transport_optimum_matches_vertex_enumeration() {
    for (id, rec) in records("transport_vertex_min") {
        let inst = &rec["instance"];
        let cost = Matrix::from_rows(points(&inst["cost"])).unwrap();
        let inst = TransportationInstance::new(scalars(&inst["supply"]), scalars(&inst["demand"]), cost).unwrap();
        let expected: Rational = scalar_from_json(&rec["oracle_result"]["value"], "value").unwrap();
        assert_eq!(solve_transportation(&inst).unwrap().objective, expected, "{id}");
    }
}

#[test]
fn monge_value_matches_map_enumeration() {
    for (id, rec) in records("monge_map_enumeration") {
        let inst = &rec["instance"];
        let mu = measure_from_json::<Rational>(&inst["mu"], "mu").unwrap();
        let nu = measure_from_json::<Rational>(&inst["nu"], "nu").unwrap();
        let c = cost_from_json::<Rational>(&inst["cost"], "cost").unwrap();
        let res = solve_monge_maps(&c, &mu, &nu).unwrap();
        let expected = &rec["oracle_result"]["best_map_value"];
        let expected = (!expected.is_null()).then(|| scalar_from_json::<Rational>(expected, "best").unwrap());
        assert_eq!(res.value, expected, "{id}");
    }
}

#[test]
fn cycle_check_agrees_with_exhaustive_search() {
    for (id, rec) in records("cyclical_monotonicity_search") {
        let inst = &rec["instance"];
        let c = cost_from_json::<Rational>(&inst["cost"], "cost").unwrap();
        let pairs: Vec<(usize, usize)> = inst["pairs"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| (p[0].as_u64().unwrap() as usize, p[1].as_u64().unwrap() as usize))
            .collect();
        let k = inst["max_cycle"].as_u64().unwrap() as usize;
        let report = check_cyclical_monotonicity(&c, &points(&inst["xs"]), &points(&inst["ys"]), &pairs, k).unwrap();
        let witnesses = rec["oracle_result"]["violating_cycles"].as_u64().unwrap();
        assert_eq!(report.monotone, witnesses == 0, "{id}");
        if let Some(w) = report.violating_cycle {
            let best: Rational = scalar_from_json(&rec["oracle_result"]["max_improvement"], "max").unwrap();
            assert!(w.improvement > Rational::from_integer(0.into()) && w.improvement <= best, "{id}");
        }
    }
}
