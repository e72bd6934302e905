//! Transport into a prescribed class: each source atom must land on one
//! conditional of `Λ`, and the relaxed problem over the lifted cost matches
//! the best assignment.

use otclass::cost::CostSpec;
use otclass::measure::DiscreteMeasure;
use otclass::scalar::{ratio, Rational};
use otclass::transport_class::{compare_with_kantorovich, generalized_barycenter, solve_class_problem, MetaMeasure};
use otclass::Result;

fn pts(v: &[i64]) -> Vec<Vec<Rational>> {
    v.iter().map(|&x| vec![ratio(x, 1)]).collect()
}

fn main() -> Result<()> {
    let c = CostSpec::SquaredEuclidean;
    let mu = DiscreteMeasure::uniform(pts(&[0, 1, 2, 3]))?;
    let spread = DiscreteMeasure::uniform(pts(&[0, 4]))?;
    let point = DiscreteMeasure::dirac(pts(&[1]).remove(0))?;
    let lambda = MetaMeasure::new(vec![spread, point], vec![ratio(1, 2), ratio(1, 2)])?;

    println!("barycenter of Λ: {:?}", generalized_barycenter(&lambda)?.weights().iter().map(ToString::to_string).collect::<Vec<_>>());
    let r = solve_class_problem(&c, &mu, &lambda)?;
    println!("relaxed value        {}", r.relaxed_value);
    println!("best map value       {:?}", r.map_value.map(|v| v.to_string()));
    println!("plan-integral value  {:?}", r.plan_integral_value.map(|v| v.to_string()));
    println!("assignment           {:?}", r.optimal_assignment.map(|t| t.0));

    let cmp = compare_with_kantorovich(&c, &mu, &lambda)?;
    println!("unconstrained value  {} ≤ {}: {}", cmp.mk_value, cmp.class_value, cmp.inequality_holds);
    Ok(())
}
