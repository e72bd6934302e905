//! Network simplex on the transportation polytope.
//!
//! The basis is a spanning tree of the complete bipartite graph between
//! supply nodes `0..m` and demand nodes `m..m+n`, rooted at supply node 0.
//! Arc `(i, j)` has id `i * n + j` and is directed from supply to demand.

use std::fmt::Write as _;


use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Scalar, Tolerances};

/// A balanced transportation problem.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportationInstance<S> {
    supply: Vec<S>,
    demand: Vec<S>,
    cost: Matrix<S>,
}

impl<S: Scalar> TransportationInstance<S> {
    /// Validates shapes, positivity and mass balance.
    ///
    /// Totals need not be one; the balance check is relative to the total.
    pub fn new(supply: Vec<S>, demand: Vec<S>, cost: Matrix<S>) -> Result<Self> {
        if supply.is_empty() || demand.is_empty() {
            return Err(Error::InvalidArgument("empty supply or demand".into()));
        }
        if cost.rows() != supply.len() || cost.cols() != demand.len() {
            return Err(Error::DimensionMismatch(format!(
                "cost is {}x{} but instance is {}x{}",
                cost.rows(),
                cost.cols(),
                supply.len(),
                demand.len()
            )));
        }
        for (side, values) in [("supply", &supply), ("demand", &demand)] {
            for (k, v) in values.iter().enumerate() {
                if !v.is_finite_value() {
                    return Err(Error::NonFinite(format!("{side}[{k}]")));
                }
                if !v.gt_zero() {
                    return Err(Error::InvalidArgument(format!("{side}[{k}] = {v} is not positive")));
                }
            }
        }
        if let Some((i, j, _)) = cost.iter().find(|(_, _, v)| !v.is_finite_value()) {
            return Err(Error::NonFinite(format!("cost[{i}][{j}]")));
        }
        let total_s = supply.iter().fold(S::zero(), |a, v| a + v.clone());
        let total_d = demand.iter().fold(S::zero(), |a, v| a + v.clone());
        let scale = total_s.to_f64_lossy().abs().max(1.0);
        if !S::near(&total_s, &total_d, Tolerances::DEFAULT.mass * scale) {
            return Err(Error::Infeasible(format!(
                "total supply {total_s} differs from total demand {total_d}"
            )));
        }
        Ok(Self { supply, demand, cost })
    }

    pub fn supply(&self) -> &[S] {
        &self.supply
    }

    pub fn demand(&self) -> &[S] {
        &self.demand
    }

    pub fn cost(&self) -> &Matrix<S> {
        &self.cost
    }

    pub fn rows(&self) -> usize {
        self.supply.len()
    }

    pub fn cols(&self) -> usize {
        self.demand.len()
    }

    /// Instance with rows reordered: row `i` becomes row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self> {
        Self::new(
            perm.iter().map(|&p| self.supply[p].clone()).collect(),
            self.demand.clone(),
            self.cost.permute_rows(perm),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Lowest-index entering and leaving arcs.
    #[default]
    Bland,
    /// Most negative reduced cost entering; leaving arc chosen to keep the
    /// tree strongly feasible.
    StronglyFeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub pivot_rule: PivotRule,
    /// Defaults to `50·(m+n)²`.
    pub max_iterations: Option<usize>,
    /// Record every pivot.
    pub trace: bool,
    pub tolerances: Tolerances,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            pivot_rule: PivotRule::Bland,
            max_iterations: None,
            trace: false,
            tolerances: Tolerances::DEFAULT,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PivotRecord {
    pub iteration: usize,
    pub entering: (usize, usize),
    pub leaving: (usize, usize),
    pub objective: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PivotTrace {
    pub records: Vec<PivotRecord>,
}

impl PivotTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,entering_i,entering_j,leaving_i,leaving_j,objective\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.iteration, r.entering.0, r.entering.1, r.leaving.0, r.leaving.1, r.objective
            );
        }
        out
    }
}

/// Optimal primal/dual pair of a transportation instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSolution<S> {
    pub plan: Matrix<S>,
    pub objective: S,
    pub dual_row: Vec<S>,
    pub dual_col: Vec<S>,
    pub iterations: usize,
    pub status: Status,
    pub trace: Option<PivotTrace>,
}

impl<S: Scalar> SolverSolution<S> {
    /// `Σ supply·u + Σ demand·v`.
    pub fn dual_objective(&self, inst: &TransportationInstance<S>) -> S {
        let a = inst
            .supply
            .iter()
            .zip(&self.dual_row)
            .fold(S::zero(), |acc, (s, u)| acc + s.clone() * u.clone());
        inst.demand
            .iter()
            .zip(&self.dual_col)
            .fold(a, |acc, (d, v)| acc + d.clone() * v.clone())
    }

    /// Most negative reduced cost `c − u − v` (zero if dual feasible everywhere).
    pub fn min_reduced_cost(&self, inst: &TransportationInstance<S>) -> S {
        let mut worst = S::zero();
        for (i, j, c) in inst.cost.iter() {
            let rc = c.clone() - self.dual_row[i].clone() - self.dual_col[j].clone();
            if rc < worst {
                worst = rc;
            }
        }
        worst
    }
}

/// Solves with default options (Bland's rule).
pub fn solve_transportation<S: Scalar>(inst: &TransportationInstance<S>) -> Result<SolverSolution<S>> {
    solve_transportation_with(inst, &SolverOptions::default())
}

pub fn solve_transportation_with<S: Scalar>(
    inst: &TransportationInstance<S>,
    opts: &SolverOptions,
) -> Result<SolverSolution<S>> {
    let m = inst.rows();
    let n = inst.cols();
    let cap = opts.max_iterations.unwrap_or(50 * (m + n) * (m + n));
    let mut tree = Tree::north_west(inst, opts.tolerances.feas);
    let cmax = inst
        .cost
        .iter()
        .map(|(_, _, c)| c.to_f64_lossy().abs())
        .fold(0.0, f64::max);
    let entering_tol = S::tol(1e-12 * (1.0 + cmax));
    let mut trace = opts.trace.then(PivotTrace::default);
    let mut objective = if trace.is_some() {
        tree.objective(inst).to_f64_lossy()
    } else {
        0.0
    };

    let mut iterations = 0;
    loop {
        tree.rebuild(inst)?;
        let Some((arc, rc)) = tree.entering(inst, opts.pivot_rule, &entering_tol) else {
            break;
        };
        if iterations >= cap {
            return Err(Error::NumericalFailure(format!(
                "iteration cap {cap} reached without optimality"
            )));
        }
        let (leaving, delta) = tree.pivot(arc, opts.pivot_rule);
        iterations += 1;
        if let Some(t) = trace.as_mut() {
            objective += (rc * delta).to_f64_lossy();
            t.records.push(PivotRecord {
                iteration: iterations,
                entering: (arc / n, arc % n),
                leaving: (leaving / n, leaving % n),
                objective,
            });
        }
    }

    let plan = Matrix::from_fn(m, n, |i, j| tree.flow[i * n + j].clone().canonical());
    let objective = plan.dot(&inst.cost);
    Ok(SolverSolution {
        plan,
        objective,
        dual_row: tree.u.into_iter().map(Scalar::canonical).collect(),
        dual_col: tree.v.into_iter().map(Scalar::canonical).collect(),
        iterations,
        status: Status::Optimal,
        trace,
    })
}

const NONE: usize = usize::MAX;

struct Tree<S> {
    m: usize,
    n: usize,
    basic: Vec<bool>,
    flow: Vec<S>,
    adj: Vec<Vec<usize>>,
    parent: Vec<usize>,
    parent_arc: Vec<usize>,
    depth: Vec<usize>,
    u: Vec<S>,
    v: Vec<S>,
}

impl<S: Scalar> Tree<S> {
    /// North-west-corner basis. On simultaneous exhaustion the degenerate arc
    /// is placed to the right, so every zero-flow arc points away from the
    /// root and the initial tree is strongly feasible.
    fn north_west(inst: &TransportationInstance<S>, feas: f64) -> Self {
        let (m, n) = (inst.rows(), inst.cols());
        let mut t = Tree {
            m,
            n,
            basic: vec![false; m * n],
            flow: vec![S::zero(); m * n],
            adj: vec![Vec::new(); m + n],
            parent: vec![NONE; m + n],
            parent_arc: vec![NONE; m + n],
            depth: vec![0; m + n],
            u: vec![S::zero(); m],
            v: vec![S::zero(); n],
        };
        // Only rounding noise counts as a tie; anything larger is real mass.
        let tol = S::tol(feas * 1e-4);
        let (mut i, mut j) = (0, 0);
        let mut rs = inst.supply[0].clone();
        let mut rd = inst.demand[0].clone();
        loop {
            let x = if rs < rd { rs.clone() } else { rd.clone() };
            rs = rs - x.clone();
            rd = rd - x.clone();
            t.add_arc(i * n + j, x);
            if i == m - 1 && j == n - 1 {
                break;
            }
            if i == m - 1 || (j < n - 1 && rd <= tol) {
                j += 1;
                rd = inst.demand[j].clone();
            } else {
                i += 1;
                rs = inst.supply[i].clone();
            }
        }
        t
    }

    fn add_arc(&mut self, arc: usize, flow: S) {
        self.basic[arc] = true;
        self.flow[arc] = flow;
        let (r, c) = (arc / self.n, self.m + arc % self.n);
        self.adj[r].push(arc);
        self.adj[c].push(arc);
    }

    fn remove_arc(&mut self, arc: usize) {
        self.basic[arc] = false;
        self.flow[arc] = S::zero();
        let (r, c) = (arc / self.n, self.m + arc % self.n);
        self.adj[r].retain(|&a| a != arc);
        self.adj[c].retain(|&a| a != arc);
    }

    fn other_end(&self, arc: usize, node: usize) -> usize {
        let (r, c) = (arc / self.n, self.m + arc % self.n);
        if node == r {
            c
        } else {
            r
        }
    }

    fn objective(&self, inst: &TransportationInstance<S>) -> S {
        (0..self.m * self.n)
            .filter(|&a| self.basic[a])
            .fold(S::zero(), |acc, a| {
                acc + self.flow[a].clone() * inst.cost[(a / self.n, a % self.n)].clone()
            })
    }

    /// Recomputes parent pointers, depths and node potentials (`u₀ = 0`).
    fn rebuild(&mut self, inst: &TransportationInstance<S>) -> Result<()> {
        let total = self.m + self.n;
        self.parent.iter_mut().for_each(|p| *p = NONE);
        let mut seen = vec![false; total];
        let mut queue = std::collections::VecDeque::with_capacity(total);
        seen[0] = true;
        self.depth[0] = 0;
        self.u[0] = S::zero();
        queue.push_back(0);
        let mut visited = 0;
        while let Some(node) = queue.pop_front() {
            visited += 1;
            for k in 0..self.adj[node].len() {
                let arc = self.adj[node][k];
                let next = self.other_end(arc, node);
                if seen[next] {
                    continue;
                }
                seen[next] = true;
                self.parent[next] = node;
                self.parent_arc[next] = arc;
                self.depth[next] = self.depth[node] + 1;
                let c = inst.cost[(arc / self.n, arc % self.n)].clone();
                if next >= self.m {
                    self.v[next - self.m] = c - self.u[node].clone();
                } else {
                    self.u[next] = c - self.v[node - self.m].clone();
                }
                queue.push_back(next);
            }
        }
        if visited != total {
            return Err(Error::NumericalFailure("basis is not a spanning tree".into()));
        }
        Ok(())
    }

    fn reduced_cost(&self, inst: &TransportationInstance<S>, arc: usize) -> S {
        let (i, j) = (arc / self.n, arc % self.n);
        inst.cost[(i, j)].clone() - self.u[i].clone() - self.v[j].clone()
    }

    fn entering(&self, inst: &TransportationInstance<S>, rule: PivotRule, tol: &S) -> Option<(usize, S)> {
        let threshold = -tol.clone();
        let candidates = (0..self.m * self.n).filter(|&a| !self.basic[a]);
        match rule {
            PivotRule::Bland => candidates
                .map(|a| (a, self.reduced_cost(inst, a)))
                .find(|(_, rc)| *rc < threshold),
            PivotRule::StronglyFeasible => {
                let mut best: Option<(usize, S)> = None;
                for a in candidates {
                    let rc = self.reduced_cost(inst, a);
                    if rc < threshold && best.as_ref().is_none_or(|(_, b)| rc < *b) {
                        best = Some((a, rc));
                    }
                }
                best
            }
        }
    }

    /// Pushes flow around the cycle closed by `entering`; returns the
    /// leaving arc and the step length.
    fn pivot(&mut self, entering: usize, rule: PivotRule) -> (usize, S) {
        let k = entering / self.n;
        let l = self.m + entering % self.n;
        // (arc, child node) pairs walking up from each endpoint to the apex.
        let mut k_side = Vec::new();
        let mut l_side = Vec::new();
        let (mut a, mut b) = (k, l);
        while self.depth[a] > self.depth[b] {
            k_side.push((self.parent_arc[a], a));
            a = self.parent[a];
        }
        while self.depth[b] > self.depth[a] {
            l_side.push((self.parent_arc[b], b));
            b = self.parent[b];
        }
        while a != b {
            k_side.push((self.parent_arc[a], a));
            a = self.parent[a];
            l_side.push((self.parent_arc[b], b));
            b = self.parent[b];
        }
        let m = self.m;
        // The cycle is oriented along the entering arc k → l, i.e. it runs
        // apex → k, k → l, l → apex. Arcs point from supply to demand.
        let k_backward = |child: usize| child < m;
        let l_backward = |child: usize| child >= m;

        let delta = k_side
            .iter()
            .filter(|(_, c)| k_backward(*c))
            .chain(l_side.iter().filter(|(_, c)| l_backward(*c)))
            .map(|(arc, _)| self.flow[*arc].clone())
            .reduce(|x, y| if y < x { y } else { x })
            .expect("every cycle has a backward arc");
        let blocking = |arc: usize| self.flow[arc] == delta;

        let leaving = match rule {
            PivotRule::Bland => k_side
                .iter()
                .filter(|(_, c)| k_backward(*c))
                .chain(l_side.iter().filter(|(_, c)| l_backward(*c)))
                .map(|(arc, _)| *arc)
                .filter(|&arc| blocking(arc))
                .min()
                .expect("a blocking arc exists"),
            PivotRule::StronglyFeasible => {
                // Last blocking arc met when traversing from the apex along the
                // orientation: first look down the l side from the apex, then
                // up the k side from k.
                l_side
                    .iter()
                    .rev()
                    .filter(|(_, c)| l_backward(*c))
                    .chain(k_side.iter().filter(|(_, c)| k_backward(*c)))
                    .map(|(arc, _)| *arc)
                    .find(|&arc| blocking(arc))
                    .expect("a blocking arc exists")
            }
        };

        if !delta.is_zero() {
            for &(arc, child) in &k_side {
                self.shift(arc, &delta, !k_backward(child));
            }
            for &(arc, child) in &l_side {
                self.shift(arc, &delta, !l_backward(child));
            }
        }
        self.remove_arc(leaving);
        self.add_arc(entering, delta.clone());
        (leaving, delta)
    }

    fn shift(&mut self, arc: usize, delta: &S, forward: bool) {
        let f = std::mem::replace(&mut self.flow[arc], S::zero());
        self.flow[arc] = if forward {
            f + delta.clone()
        } else {
            f - delta.clone()
        };
    }
}
