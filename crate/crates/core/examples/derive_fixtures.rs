//! Regenerates the golden fixtures under `tests/fixtures/` from the
//! brute-force oracle.
//!
//! ```text
//! cargo run --example derive_fixtures --features oracle [-- OUT_DIR]
//! ```

use std::path::PathBuf;

use otclass::cost::CostSpec;
use otclass::io::{cost_to_json, matrix_to_json, measure_to_json, scalar_to_json};
use otclass::matrix::Matrix;
use otclass::measure::DiscreteMeasure;
use otclass::oracle::{enumerate_basic_feasible, enumerate_feasible_maps, exhaustive_cycle_search, min_objective, EnumerationBudget};
use otclass::random;
use otclass::scalar::Rational;
use otclass::solver::TransportationInstance;
use otclass::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn values(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(scalar_to_json).collect())
}

fn transport_vertices(rng: &mut ChaCha8Rng, budget: &EnumerationBudget) -> Result<Value> {
    let (m, n) = (rng.gen_range(2..=4), rng.gen_range(2..=4));
    let supply: Vec<Rational> = random::weights(rng, m);
    let demand: Vec<Rational> = random::weights(rng, n);
    let cost = Matrix::from_fn(m, n, |_, _| Rational::from_integer(rng.gen_range(0..=9).into()));
    let inst = TransportationInstance::new(supply.clone(), demand.clone(), cost.clone())?;
    let vertices = enumerate_basic_feasible(&inst, budget)?;
    let best = min_objective(&vertices).expect("balanced instance has a vertex");
    Ok(json!({
        "instance": {"supply": values(&supply), "demand": values(&demand), "cost": matrix_to_json(&cost)},
        "oracle_result": {"value": scalar_to_json(&best), "basic_feasible_solutions": vertices.len()},
    }))
}

fn monge_enumeration(rng: &mut ChaCha8Rng, budget: &EnumerationBudget) -> Result<Value> {
    let m = rng.gen_range(3..=6);
    let n = rng.gen_range(2..=3);
    let mu: DiscreteMeasure<Rational> = random::uniform(rng, m, 1, 6);
    // Target weights are sums of source weights, so at least one map exists.
    let owner = random::index_map(rng, m, n);
    let ys = random::points::<Rational, _>(rng, n, 1, 6);
    let nu = mu.pushforward(&owner, &ys)?;
    let c = CostSpec::SquaredEuclidean;
    let table = c.table(mu.atoms(), nu.atoms())?;
    let maps = enumerate_feasible_maps(&mu, nu.weights(), budget)?;
    let best = maps
        .iter()
        .map(|t| {
            t.as_slice()
                .iter()
                .enumerate()
                .fold(Rational::from_integer(0.into()), |acc, (i, &k)| acc + mu.weights()[i].clone() * table[(i, k)].clone())
        })
        .min();
    Ok(json!({
        "instance": {"mu": measure_to_json(&mu), "nu": measure_to_json(&nu), "cost": cost_to_json(&c)},
        "oracle_result": {"feasible_maps": maps.len(), "best_map_value": best.as_ref().map(scalar_to_json)},
    }))
}

fn cycle_search(rng: &mut ChaCha8Rng, budget: &EnumerationBudget) -> Result<Value> {
    let k = rng.gen_range(3..=5);
    let xs = random::points::<Rational, _>(rng, k, 2, 4);
    let ys = random::points::<Rational, _>(rng, k, 2, 4);
    let perm = random::index_map(rng, k, k);
    let pairs: Vec<(usize, usize)> = (0..k).map(|i| (i, perm.get(i))).collect();
    let c = CostSpec::SquaredEuclidean;
    let witnesses = exhaustive_cycle_search(&c, &xs, &ys, &pairs, 3, budget)?;
    let best = witnesses.iter().map(|w| w.improvement.clone()).max();
    let pts = |v: &[Vec<Rational>]| Value::Array(v.iter().map(|p| values(p)).collect());
    Ok(json!({
        "instance": {"xs": pts(&xs), "ys": pts(&ys), "pairs": pairs, "cost": cost_to_json(&c), "max_cycle": 3},
        "oracle_result": {"violating_cycles": witnesses.len(), "max_improvement": best.as_ref().map(scalar_to_json)},
    }))
}

fn main() -> Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures"));
    std::fs::create_dir_all(&dir).map_err(|e| otclass::Error::InvalidArgument(e.to_string()))?;
    let budget = EnumerationBudget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    let mut records = Vec::new();
    for k in 0..6 {
        records.push((format!("transport_vertex_min_{k}"), transport_vertices(&mut rng, &budget)?));
    }
    for k in 0..4 {
        records.push((format!("monge_map_enumeration_{k}"), monge_enumeration(&mut rng, &budget)?));
    }
    for k in 0..3 {
        records.push((format!("cyclical_monotonicity_search_{k}"), cycle_search(&mut rng, &budget)?));
    }
    for (id, mut record) in records {
        record["derived_example_id"] = Value::String(id.clone());
        let text = serde_json::to_string_pretty(&record).expect("serializable");
        let path = dir.join(format!("{id}.json"));
        std::fs::write(&path, text + "\n").map_err(|e| otclass::Error::InvalidArgument(e.to_string()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
