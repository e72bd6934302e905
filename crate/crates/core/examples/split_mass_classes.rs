//! Four plans from `μ = ⅓(δ₀ + δ₁ + δ₂)` to `ν = ⅙δ₀ + ⅚δ₁` that share a
//! second marginal but fall into three transport classes.
//!
//! ```text
//! cargo run --example split_mass_classes
//! ```

use otclass::disintegration::{class_distance, classes_equal, disintegrate, pushforward_meta, recombine, second_marginal, DisintegrationMap};
use otclass::measure::DiscreteMeasure;
use otclass::scalar::{ratio, Rational};
use otclass::Result;

fn at(y: i64) -> Vec<Rational> {
    vec![ratio(y, 1)]
}

/// Conditional `(1 − q)·δ₁ + q·δ₀`.
fn split(q: Rational) -> Result<DiscreteMeasure<Rational>> {
    let one = ratio(1, 1);
    if q == ratio(0, 1) {
        return DiscreteMeasure::dirac(at(1));
    }
    DiscreteMeasure::new(vec![at(0), at(1)], vec![q.clone(), one - q])
}

fn main() -> Result<()> {
    let mu = DiscreteMeasure::uniform((0..3).map(at).collect())?;
    let disintegrations = [
        ("f", [ratio(1, 2), ratio(0, 1), ratio(0, 1)]),
        ("g", [ratio(0, 1), ratio(1, 2), ratio(0, 1)]),
        ("h", [ratio(3, 10), ratio(1, 5), ratio(0, 1)]),
        ("k", [ratio(1, 10), ratio(2, 5), ratio(0, 1)]),
    ];
    let mut plans = Vec::new();
    for (name, qs) in disintegrations {
        let conditionals = qs.into_iter().map(split).collect::<Result<Vec<_>>>()?;
        let plan = recombine(&DisintegrationMap::new(mu.clone(), conditionals)?, &mu)?;
        println!("{name}: second marginal weights {:?}", second_marginal(&plan)?.weights().iter().map(ToString::to_string).collect::<Vec<_>>());
        let meta = pushforward_meta(&disintegrate(&plan)?)?;
        println!("   push-forward has {} distinct conditionals", meta.len());
        plans.push((name, plan));
    }
    println!();
    for a in 0..plans.len() {
        for b in a + 1..plans.len() {
            let (na, pa) = &plans[a];
            let (nb, pb) = &plans[b];
            println!(
                "{na} vs {nb}: same class = {:<5}  meta distance = {}",
                classes_equal(pa, pb)?,
                class_distance(pa, pb)?
            );
        }
    }
    Ok(())
}
