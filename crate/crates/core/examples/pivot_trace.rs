//! Network simplex pivots under both entering rules, as CSV.

use otclass::matrix::Matrix;
use otclass::solver::{solve_transportation_with, PivotRule, SolverOptions, TransportationInstance};
use otclass::Result;

fn main() -> Result<()> {
    let cost = Matrix::from_rows(vec![
        vec![4.0, 6.0, 9.0, 5.0],
        vec![2.0, 8.0, 3.0, 7.0],
        vec![6.0, 1.0, 5.0, 4.0],
    ])?;
    let inst = TransportationInstance::new(vec![0.3, 0.5, 0.2], vec![0.25, 0.25, 0.25, 0.25], cost)?;
    for rule in [PivotRule::Bland, PivotRule::StronglyFeasible] {
        let opts = SolverOptions {
            pivot_rule: rule,
            trace: true,
            ..SolverOptions::default()
        };
        let sol = solve_transportation_with(&inst, &opts)?;
        println!("# {rule:?}: objective {:.6} after {} pivots", sol.objective, sol.iterations);
        if let Some(trace) = &sol.trace {
            print!("{}", trace.to_csv());
        }
    }
    Ok(())
}
