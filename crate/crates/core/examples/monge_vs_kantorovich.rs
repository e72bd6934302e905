//! Deterministic maps against couplings: a Dirac source cannot be split by a
//! map, while uniform measures of equal size admit an optimal permutation.

use otclass::cost::CostSpec;
use otclass::kantorovich::solve_monge_maps;
use otclass::measure::DiscreteMeasure;
use otclass::scalar::{ratio, Rational};
use otclass::Result;

fn line(xs: &[i64]) -> Vec<Vec<Rational>> {
    xs.iter().map(|&x| vec![ratio(x, 1)]).collect()
}

fn report(label: &str, mu: &DiscreteMeasure<Rational>, nu: &DiscreteMeasure<Rational>) -> Result<()> {
    let r = solve_monge_maps(&CostSpec::SquaredEuclidean, mu, nu)?;
    let shown = |v: &Option<Rational>| v.as_ref().map_or_else(|| "+inf".to_string(), ToString::to_string);
    println!("{label}");
    println!("  Kantorovich value  {}", r.mk_value);
    println!("  best map value     {}", shown(&r.value));
    println!("  gap                {}", shown(&r.gap));
    println!("  map                {:?}", r.best_map.map(|t| t.0));
    Ok(())
}

fn main() -> Result<()> {
    let dirac = DiscreteMeasure::dirac(vec![ratio(0, 1)])?;
    let pair = DiscreteMeasure::uniform(line(&[-1, 1]))?;
    report("δ₀ → ½δ₋₁ + ½δ₁", &dirac, &pair)?;

    let mu = DiscreteMeasure::uniform(line(&[0, 1, 4]))?;
    let nu = DiscreteMeasure::uniform(line(&[2, 3, 5]))?;
    report("three points to three points", &mu, &nu)?;

    let uneven = DiscreteMeasure::new(line(&[0, 2]), vec![ratio(1, 2), ratio(1, 2)])?;
    let thirds = DiscreteMeasure::uniform(line(&[0, 1, 2]))?;
    report("halves to thirds", &uneven, &thirds)
}
