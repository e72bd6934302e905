//! `W₁` between two planar measures, certified by a `Lip₁` dual potential.

use otclass::cost::CostSpec;
use otclass::kantorovich::{dual_check_w1, solve_mk, w1_dual_potential, wasserstein};
use otclass::measure::DiscreteMeasure;
use otclass::Result;

fn main() -> Result<()> {
    let mu = DiscreteMeasure::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0]], vec![0.5, 0.25, 0.25])?;
    let nu = DiscreteMeasure::new(vec![vec![3.0, 0.0], vec![1.0, 1.0]], vec![0.4, 0.6])?;

    let sol = solve_mk(&CostSpec::euclidean(1.0)?, &mu, &nu)?;
    println!("primal value  {:.12}", sol.value);
    println!("dual value    {:.12}", sol.dual_value());

    let phi = w1_dual_potential(&mu, &nu)?;
    let check = dual_check_w1(&mu, &nu, &phi)?;
    println!("∫φ d(μ−ν)     {:.12}  (φ is 1-Lipschitz: {})", check.lower_bound, check.is_lip1);

    for p in [1.0, 2.0, 3.0] {
        println!("W_{p}          {:.12}", wasserstein(p, &mu, &nu)?);
    }
    Ok(())
}
