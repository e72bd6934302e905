//! Four suppliers, three delivery profiles: find the blend of profiles that
//! reproduces the demand and the cheapest partition of suppliers.

use otclass::cost::CostSpec;
use otclass::measure::DiscreteMeasure;
use otclass::scalar::{ratio, Rational};
use otclass::transport_class::solve_allocation;
use otclass::Result;

fn p(x: i64, y: i64) -> Vec<Rational> {
    vec![ratio(x, 1), ratio(y, 1)]
}

fn main() -> Result<()> {
    let suppliers = DiscreteMeasure::uniform(vec![p(0, 0), p(0, 4), p(4, 0), p(4, 4)])?;
    let local = DiscreteMeasure::dirac(p(1, 1))?;
    let spread = DiscreteMeasure::uniform(vec![p(1, 1), p(3, 3)])?;
    let far = DiscreteMeasure::dirac(p(3, 3))?;
    let demand = DiscreteMeasure::new(vec![p(1, 1), p(3, 3)], vec![ratio(3, 4), ratio(1, 4)])?;

    let a = solve_allocation(&CostSpec::SquaredEuclidean, &suppliers, &[local, spread, far], &demand)?;
    println!("blend weights   {:?}", a.blend_weights.iter().map(ToString::to_string).collect::<Vec<_>>());
    println!("partition       {:?}", a.partition.map(|t| t.0));
    println!("cost            {:?}", a.report.map_value.map(|v| v.to_string()));
    println!("blends compared {} (exhaustive: {})", a.candidates, a.exhaustive);
    Ok(())
}
