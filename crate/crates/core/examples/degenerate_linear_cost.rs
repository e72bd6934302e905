//! With `c(x, y) = −⟨x, y⟩` the class cost only sees barycenters, so two
//! conditionals with a common mean make every feasible assignment tie.

use otclass::cost::CostSpec;
use otclass::measure::DiscreteMeasure;
use otclass::scalar::{ratio, Rational};
use otclass::transport_class::{diagnose_existence, MetaMeasure};
use otclass::Result;

fn p(x: i64, y: i64) -> Vec<Rational> {
    vec![ratio(x, 1), ratio(y, 1)]
}

fn main() -> Result<()> {
    let mu = DiscreteMeasure::uniform(vec![p(0, 0), p(1, 0), p(0, 1), p(2, 3)])?;
    let wide = DiscreteMeasure::uniform(vec![p(-1, 0), p(1, 0)])?;
    let tall = DiscreteMeasure::uniform(vec![p(0, -1), p(0, 1)])?;
    let lambda = MetaMeasure::new(vec![wide, tall], vec![ratio(1, 2), ratio(1, 2)])?;

    let d = diagnose_existence(&CostSpec::InnerProduct, &mu, &lambda)?;
    for pair in &d.pairs {
        println!("meta-atoms {:?}: discriminant vanishes = {}", pair.pair, pair.degenerate);
    }
    println!(
        "{} feasible maps, costs {:?}..{:?}, all tied = {}",
        d.ties.feasible_maps,
        d.ties.min_cost.as_ref().map(ToString::to_string),
        d.ties.max_cost.as_ref().map(ToString::to_string),
        d.ties.all_tied
    );
    Ok(())
}
