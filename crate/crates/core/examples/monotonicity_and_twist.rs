//! Optimal supports are cyclically monotone; a swapped support is not.
//! The twist check separates `|x − y|²` from `|x − y|` on the line.

use otclass::cost::CostSpec;
use otclass::kantorovich::{check_cyclical_monotonicity, check_twist, solve_mk};
use otclass::measure::DiscreteMeasure;
use otclass::Result;

fn main() -> Result<()> {
    let c = CostSpec::SquaredEuclidean;
    let mu = DiscreteMeasure::uniform(vec![vec![0.0], vec![1.0], vec![2.0]])?;
    let nu = DiscreteMeasure::uniform(vec![vec![0.5], vec![1.5], vec![3.0]])?;
    let support = solve_mk(&c, &mu, &nu)?.plan.support();
    let r = check_cyclical_monotonicity(&c, mu.atoms(), nu.atoms(), &support, 3)?;
    println!("optimal support {support:?}: monotone = {}", r.monotone);

    let crossed = [(0, 1), (1, 0), (2, 2)];
    let r = check_cyclical_monotonicity(&c, mu.atoms(), nu.atoms(), &crossed, 3)?;
    if let Some(w) = r.violating_cycle {
        println!("crossed support {crossed:?}: cycle {:?} improves by {}", w.pairs, w.improvement);
    }

    let grid: Vec<Vec<f64>> = (-4..=4).map(|k| vec![k as f64]).collect();
    let ys = vec![vec![0.0], vec![2.0]];
    for (name, cost) in [("squared euclidean", CostSpec::SquaredEuclidean), ("euclidean", CostSpec::euclidean(1.0)?)] {
        let v = check_twist(&cost, &grid, &ys, &[(0, 1)], None)?;
        let at: Vec<f64> = v.iter().map(|t| grid[t.x_index][0]).collect();
        println!("{name}: twist fails at x = {at:?}");
    }
    Ok(())
}
