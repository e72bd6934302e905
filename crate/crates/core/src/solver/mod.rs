//! Exact linear-programming core.

mod dense;
mod network;

pub use dense::{solve_lp_dense, LpSolution, MAX_DENSE_VARS};
pub use network::{
    solve_transportation, solve_transportation_with, PivotRecord, PivotRule, PivotTrace, SolverOptions,
    SolverSolution, Status, TransportationInstance,
};
