//! Transport plans, Kantorovich and Monge values, duality and
//! c-transform utilities on finite supports.

use std::fmt::Write as _;

use crate::cost::{CostSpec, Site};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::measure::{same_point, squared_distance, DiscreteMeasure, IndexMap, Point};
use crate::scalar::{Scalar, Tolerances};
use crate::solver::{solve_transportation, solve_transportation_with, SolverOptions, TransportationInstance};

/// Maximum number of source atoms accepted by [`solve_monge_maps`].
pub const MAX_MONGE_ATOMS: usize = 12;
/// Above this many source atoms the map search uses LP lower bounds.
pub const EXHAUSTIVE_MONGE_ATOMS: usize = 8;
/// Largest subset size for [`check_cyclical_monotonicity`].
pub const MAX_CYCLE_LEN: usize = 4;
pub const DEFAULT_CYCLE_LEN: usize = 3;
const MAX_CYCLE_CANDIDATES: u128 = 20_000_000;

/// A coupling `γ` of `source` and `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan<S> {
    source: DiscreteMeasure<S>,
    target: DiscreteMeasure<S>,
    matrix: Matrix<S>,
}

impl<S: Scalar> TransportPlan<S> {
    /// Checks shape, nonnegativity and both marginals within `ε_feas`.
    pub fn new(source: DiscreteMeasure<S>, target: DiscreteMeasure<S>, matrix: Matrix<S>) -> Result<Self> {
        if matrix.rows() != source.len() || matrix.cols() != target.len() {
            return Err(Error::DimensionMismatch(format!(
                "plan is {}x{} but marginals have {} and {} atoms",
                matrix.rows(),
                matrix.cols(),
                source.len(),
                target.len()
            )));
        }
        let eps = Tolerances::DEFAULT.feas;
        let tol = S::tol(eps);
        for (i, j, v) in matrix.iter() {
            if !v.is_finite_value() {
                return Err(Error::NonFinite(format!("plan entry ({i}, {j})")));
            }
            if *v < -tol.clone() {
                return Err(Error::NegativeWeight {
                    index: i * matrix.cols() + j,
                    weight: v.to_string(),
                });
            }
        }
        for (k, (s, w)) in matrix.row_sums().iter().zip(source.weights()).enumerate() {
            if !S::near(s, w, eps) {
                return Err(Error::Infeasible(format!("row {k} sums to {s}, expected {w}")));
            }
        }
        for (k, (s, w)) in matrix.col_sums().iter().zip(target.weights()).enumerate() {
            if !S::near(s, w, eps) {
                return Err(Error::Infeasible(format!("column {k} sums to {s}, expected {w}")));
            }
        }
        Ok(Self { source, target, matrix })
    }

    /// The coupling `(Id × t)_# μ` of a map.
    pub fn from_map(source: DiscreteMeasure<S>, target: DiscreteMeasure<S>, map: &IndexMap) -> Result<Self> {
        if map.len() != source.len() {
            return Err(Error::IncompleteAssignment {
                expected: source.len(),
                got: map.len(),
            });
        }
        let mut matrix = Matrix::zeros(source.len(), target.len());
        for (i, &k) in map.as_slice().iter().enumerate() {
            if k >= target.len() {
                return Err(Error::IndexOutOfRange { index: k, len: target.len() });
            }
            matrix[(i, k)] = source.weight(i).clone();
        }
        Self::new(source, target, matrix)
    }

    pub fn source(&self) -> &DiscreteMeasure<S> {
        &self.source
    }

    pub fn target(&self) -> &DiscreteMeasure<S> {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    /// Cells carrying mass above `ε_feas`, row-major.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let tol = S::tol(Tolerances::DEFAULT.feas);
        self.matrix
            .iter()
            .filter(|(_, _, v)| **v > tol)
            .map(|(i, j, _)| (i, j))
            .collect()
    }

    /// `∫ c dγ`.
    pub fn cost(&self, c: &CostSpec<S>) -> Result<S> {
        Ok(self.matrix.dot(&c.table(self.source.atoms(), self.target.atoms())?))
    }

    /// `i,j,mass,cost` rows for the support.
    pub fn to_csv(&self, c: &CostSpec<S>) -> Result<String> {
        let table = c.table(self.source.atoms(), self.target.atoms())?;
        let mut out = String::from("i,j,mass,cost\n");
        for (i, j) in self.support() {
            let _ = writeln!(out, "{i},{j},{},{}", self.matrix[(i, j)], table[(i, j)]);
        }
        Ok(out)
    }

    /// Bipartite digraph with one edge per support cell; pen width grows with mass.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph plan {\n  rankdir=LR;\n");
        for i in 0..self.source.len() {
            let _ = writeln!(out, "  x{i} [label=\"x{i} {}\"];", fmt_point(self.source.atom(i)));
        }
        for j in 0..self.target.len() {
            let _ = writeln!(out, "  y{j} [label=\"y{j} {}\"];", fmt_point(self.target.atom(j)));
        }
        for (i, j) in self.support() {
            let w = &self.matrix[(i, j)];
            let pen = 1.0 + 8.0 * w.to_f64_lossy();
            let _ = writeln!(out, "  x{i} -> y{j} [label=\"{w}\", penwidth={pen:.3}];");
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn fmt_point<S: Scalar>(p: &[S]) -> String {
    let parts: Vec<String> = p.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

/// Real-valued function on a finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential<S> {
    support: Vec<Point<S>>,
    values: Vec<S>,
}

impl<S: Scalar> Potential<S> {
    pub fn new(support: Vec<Point<S>>, values: Vec<S>) -> Result<Self> {
        if support.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} support points but {} values",
                support.len(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite_value()) {
            return Err(Error::NonFinite(format!("potential value {k}")));
        }
        Ok(Self { support, values })
    }

    pub fn zero(support: Vec<Point<S>>) -> Self {
        let values = vec![S::zero(); support.len()];
        Self { support, values }
    }

    pub fn support(&self) -> &[Point<S>] {
        &self.support
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at a support point (matched within `ε_geom`).
    pub fn value_at(&self, point: &[S]) -> Option<&S> {
        self.support
            .iter()
            .position(|p| same_point(p, point))
            .map(|k| &self.values[k])
    }

    /// Whether `|ψ(a) − ψ(b)| ≤ |a − b|` for every pair of support points.
    ///
    /// Compared through squares in rational mode, so no square roots are taken.
    pub fn is_lip1(&self) -> bool {
        let slack = S::tol(Tolerances::DEFAULT.dual);
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                let diff = (self.values[a].clone() - self.values[b].clone()).abs();
                let sq = squared_distance(&self.support[a], &self.support[b]);
                let ok = match S::MODE {
                    crate::scalar::Mode::Rational => diff.clone() * diff <= sq,
                    crate::scalar::Mode::Float => diff <= S::pow_half(&sq, 1.0) + slack.clone(),
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }
}

/// Optimal coupling, value and dual potentials (`u ⊕ v ≤ c`).
#[derive(Debug, Clone, PartialEq)]
pub struct MkSolution<S> {
    pub plan: TransportPlan<S>,
    pub value: S,
    pub dual_source: Potential<S>,
    pub dual_target: Potential<S>,
    pub iterations: usize,
}

impl<S: Scalar> MkSolution<S> {
    /// `Σ μᵢ uᵢ + Σ νⱼ vⱼ`.
    pub fn dual_value(&self) -> S {
        let dot = |w: &[S], p: &Potential<S>| {
            w.iter()
                .zip(p.values())
                .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
        };
        dot(self.plan.source().weights(), &self.dual_source) + dot(self.plan.target().weights(), &self.dual_target)
    }
}

/// `min_γ ∫ c dγ` over couplings of `mu` and `nu`.
pub fn solve_mk<S: Scalar>(c: &CostSpec<S>, mu: &DiscreteMeasure<S>, nu: &DiscreteMeasure<S>) -> Result<MkSolution<S>> {
    solve_mk_with(c, mu, nu, &SolverOptions::default())
}

pub fn solve_mk_with<S: Scalar>(
    c: &CostSpec<S>,
    mu: &DiscreteMeasure<S>,
    nu: &DiscreteMeasure<S>,
    opts: &SolverOptions,
) -> Result<MkSolution<S>> {
    let table = c.table(mu.atoms(), nu.atoms())?;
    let inst = TransportationInstance::new(mu.weights().to_vec(), nu.weights().to_vec(), table)?;
    let sol = solve_transportation_with(&inst, opts)?;
    Ok(MkSolution {
        value: sol.objective,
        dual_source: Potential::new(mu.atoms().to_vec(), sol.dual_row)?,
        dual_target: Potential::new(nu.atoms().to_vec(), sol.dual_col)?,
        iterations: sol.iterations,
        plan: TransportPlan::new(mu.clone(), nu.clone(), sol.plan)?,
    })
}

/// `W_p(μ, ν) = (min ∫ |x − y|^p dγ)^{1/p}`.
pub fn wasserstein<S: Scalar>(p: f64, mu: &DiscreteMeasure<S>, nu: &DiscreteMeasure<S>) -> Result<S> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch(format!(
            "measures live in dimensions {} and {}",
            mu.dim(),
            nu.dim()
        )));
    }
    let c = CostSpec::euclidean(p)?;
    let value = solve_mk(&c, mu, nu)?.value;
    Ok(S::root(&S::max_of(value, S::zero()), p).canonical())
}

/// Result of testing a candidate potential against the `W₁` dual.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCheck<S> {
    /// `∫ φ d(μ − ν)`.
    pub lower_bound: S,
    pub is_lip1: bool,
}

/// Evaluates `∫ φ d(μ − ν)` and the Lipschitz condition on `φ`'s support.
pub fn dual_check_w1<S: Scalar>(
    mu: &DiscreteMeasure<S>,
    nu: &DiscreteMeasure<S>,
    phi: &Potential<S>,
) -> Result<DualCheck<S>> {
    let integrate = |m: &DiscreteMeasure<S>| -> Result<S> {
        m.atoms().iter().zip(m.weights()).try_fold(S::zero(), |acc, (x, w)| {
            let v = phi
                .value_at(x)
                .ok_or_else(|| Error::SupportMismatch(format!("potential undefined at {}", fmt_point(x))))?;
            Ok(acc + w.clone() * v.clone())
        })
    };
    let lower_bound = integrate(mu)? - integrate(nu)?;
    Ok(DualCheck {
        lower_bound: lower_bound.canonical(),
        is_lip1: phi.is_lip1(),
    })
}

/// A `Lip₁` potential on the union of supports attaining `W₁(μ, ν)`.
///
/// Built from the Euclidean(1) transport duals as `φ(z) = minⱼ d(z, yⱼ) − vⱼ`.
pub fn w1_dual_potential<S: Scalar>(mu: &DiscreteMeasure<S>, nu: &DiscreteMeasure<S>) -> Result<Potential<S>> {
    let c = CostSpec::euclidean(1.0)?;
    let sol = solve_mk(&c, mu, nu)?;
    let mut support: Vec<Point<S>> = mu.atoms().to_vec();
    for y in nu.atoms() {
        if !support.iter().any(|p| same_point(p, y)) {
            support.push(y.clone());
        }
    }
    let values = support
        .iter()
        .map(|z| {
            nu.atoms()
                .iter()
                .zip(sol.dual_target.values())
                .map(|(y, v)| S::pow_half(&squared_distance(z, y), 1.0) - v.clone())
                .reduce(|a, b| if b < a { b } else { a })
                .unwrap_or_else(S::zero)
                .canonical()
        })
        .collect();
    Potential::new(support, values)
}

/// Best map `t` with `t_# μ = ν`, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct MongeResult<S> {
    pub best_map: Option<IndexMap>,
    /// `None` stands for `+∞` (no admissible map).
    pub value: Option<S>,
    /// `value − MK value`; `None` when `value` is.
    pub gap: Option<S>,
    pub mk_value: S,
}

/// Minimises `∫ c(x, t(x)) dμ` over index maps with `t_# μ = ν`.
///
/// Ties resolve to the lexicographically smallest map.
pub fn solve_monge_maps<S: Scalar>(
    c: &CostSpec<S>,
    mu: &DiscreteMeasure<S>,
    nu: &DiscreteMeasure<S>,
) -> Result<MongeResult<S>> {
    if mu.len() > MAX_MONGE_ATOMS {
        return Err(Error::SizeLimitExceeded(format!(
            "{} source atoms (max {MAX_MONGE_ATOMS})",
            mu.len()
        )));
    }
    let table = c.table(mu.atoms(), nu.atoms())?;
    let mk_value = solve_mk(c, mu, nu)?.value;
    let best = min_cost_assignment(&table, mu.weights(), nu.weights())?;
    Ok(match best {
        Some((map, value)) => MongeResult {
            best_map: Some(IndexMap(map)),
            gap: Some(value.clone() - mk_value.clone()),
            value: Some(value),
            mk_value,
        },
        None => MongeResult {
            best_map: None,
            value: None,
            gap: None,
            mk_value,
        },
    })
}

/// Minimises `Σᵢ wᵢ cost[i][t(i)]` over maps `t` whose fibre masses equal
/// `capacity` (exactly in rational mode, within `ε_mass·n` in float mode).
///
/// Depth-first in lexicographic order, so among equal-cost optima the first
/// found is the lexicographically smallest. Beyond
/// [`EXHAUSTIVE_MONGE_ATOMS`] rows each node is also bounded by the
/// transportation relaxation of the remaining rows.
pub(crate) fn min_cost_assignment<S: Scalar>(
    cost: &Matrix<S>,
    weights: &[S],
    capacity: &[S],
) -> Result<Option<(Vec<usize>, S)>> {
    let (m, n) = (cost.rows(), cost.cols());
    if weights.len() != m || capacity.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "cost is {m}x{n}, {} weights, {} capacities",
            weights.len(),
            capacity.len()
        )));
    }
    let mut search = Search {
        cost,
        weights,
        eps: S::tol(Tolerances::DEFAULT.mass * n.max(1) as f64),
        use_lp: m > EXHAUSTIVE_MONGE_ATOMS,
        row_min: (0..m)
            .map(|i| cost.row(i).iter().cloned().reduce(|a, b| if b < a { b } else { a }))
            .map(|v| v.unwrap_or_else(S::zero))
            .collect(),
        best: None,
        current: Vec::with_capacity(m),
    };
    let mut residual = capacity.to_vec();
    search.descend(0, S::zero(), &mut residual);
    Ok(search.best)
}

struct Search<'a, S> {
    cost: &'a Matrix<S>,
    weights: &'a [S],
    eps: S,
    use_lp: bool,
    row_min: Vec<S>,
    best: Option<(Vec<usize>, S)>,
    current: Vec<usize>,
}

impl<S: Scalar> Search<'_, S> {
    fn descend(&mut self, row: usize, partial: S, residual: &mut [S]) {
        let m = self.cost.rows();
        if row == m {
            let improves = self.best.as_ref().is_none_or(|(_, best)| partial < *best);
            if improves && residual.iter().all(|r| r.abs() <= self.eps) {
                self.best = Some((self.current.clone(), partial));
            }
            return;
        }
        if let Some((_, best)) = &self.best {
            let bound = partial.clone() + self.lower_bound(row, residual);
            if bound >= *best {
                return;
            }
        }
        let w = self.weights[row].clone();
        for k in 0..self.cost.cols() {
            if w.clone() > residual[k].clone() + self.eps.clone() {
                continue;
            }
            residual[k] = residual[k].clone() - w.clone();
            self.current.push(k);
            let next = partial.clone() + w.clone() * self.cost[(row, k)].clone();
            self.descend(row + 1, next, residual);
            self.current.pop();
            residual[k] = residual[k].clone() + w.clone();
        }
    }

    /// Lower bound on the cost of rows `row..`.
    fn lower_bound(&self, row: usize, residual: &[S]) -> S {
        let cheap = (row..self.cost.rows()).fold(S::zero(), |acc, i| {
            acc + self.weights[i].clone() * self.row_min[i].clone()
        });
        if !self.use_lp || self.cost.rows() - row < 2 {
            return cheap;
        }
        self.relaxation(row, residual).map_or(cheap.clone(), |lp| S::max_of(lp, cheap))
    }

    fn relaxation(&self, row: usize, residual: &[S]) -> Option<S> {
        let cols: Vec<usize> = (0..self.cost.cols()).filter(|&k| residual[k] > self.eps).collect();
        if cols.is_empty() {
            return None;
        }
        let rows: Vec<usize> = (row..self.cost.rows()).collect();
        let supply = rows.iter().map(|&i| self.weights[i].clone()).collect();
        let demand = cols.iter().map(|&k| residual[k].clone()).collect();
        let table = Matrix::from_fn(rows.len(), cols.len(), |a, b| self.cost[(rows[a], cols[b])].clone());
        let inst = TransportationInstance::new(supply, demand, table).ok()?;
        let value = solve_transportation(&inst).ok()?.objective;
        // Keep float bounds conservative so near-ties are still explored.
        Some(value - S::tol(Tolerances::DEFAULT.dual))
    }
}

/// Which side a potential lives on before transforming.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `ψ` on X, result on Y: `ψᶜ(y) = minᵢ c(xᵢ, y) − ψ(xᵢ)`.
    XToY,
    /// `ψ` on Y, result on X: `ψᶜ(x) = minⱼ c(x, yⱼ) − ψ(yⱼ)`.
    YToX,
}

impl Direction {
    pub fn reverse(self) -> Self {
        match self {
            Direction::XToY => Direction::YToX,
            Direction::YToX => Direction::XToY,
        }
    }
}

/// Discrete c-transform of `psi` onto `target_support`.
///
/// Tabulated costs read `psi`'s support index as the X index (resp. Y index
/// for [`Direction::YToX`]).
pub fn c_transform<S: Scalar>(
    c: &CostSpec<S>,
    psi: &Potential<S>,
    target_support: &[Point<S>],
    direction: Direction,
) -> Result<Potential<S>> {
    if psi.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let values = target_support
        .iter()
        .enumerate()
        .map(|(t, z)| {
            let mut best: Option<S> = None;
            for (s, (w, value)) in psi.support().iter().zip(psi.values()).enumerate() {
                let cost = match direction {
                    Direction::XToY => c.eval(Site::Atom(s, w), Site::Atom(t, z))?,
                    Direction::YToX => c.eval(Site::Atom(t, z), Site::Atom(s, w))?,
                };
                let cand = cost - value.clone();
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
            Ok(best.unwrap_or_else(S::zero).canonical())
        })
        .collect::<Result<Vec<S>>>()?;
    Potential::new(target_support.to_vec(), values)
}

/// `{ j : ψ(x′) − ψ(x) ≤ c(x′, yⱼ) − c(x, yⱼ) for all x′ }`, with `ε_dual`
/// slack in float mode.
pub fn c_superdifferential<S: Scalar>(
    c: &CostSpec<S>,
    psi: &Potential<S>,
    y_support: &[Point<S>],
    x_index: usize,
) -> Result<Vec<usize>> {
    let xs = psi.support();
    if x_index >= xs.len() {
        return Err(Error::IndexOutOfRange { index: x_index, len: xs.len() });
    }
    let slack = S::tol(Tolerances::DEFAULT.dual);
    let mut out = Vec::new();
    'columns: for (j, y) in y_support.iter().enumerate() {
        let here = c.eval(Site::Atom(x_index, &xs[x_index]), Site::Atom(j, y))?;
        for (k, x) in xs.iter().enumerate() {
            let lhs = psi.values()[k].clone() - psi.values()[x_index].clone();
            let rhs = c.eval(Site::Atom(k, x), Site::Atom(j, y))? - here.clone();
            if lhs > rhs + slack.clone() {
                continue 'columns;
            }
        }
        out.push(j);
    }
    Ok(out)
}

/// A cyclic reassignment of pairs that lowers total cost.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolatingCycle<S> {
    /// Indices into the checked pair list.
    pub pairs: Vec<usize>,
    /// `sigma[r]`: position in `pairs` whose target goes to `pairs[r]`'s source.
    pub sigma: Vec<usize>,
    /// `Σ c(xᵢ, yᵢ) − Σ c(xᵢ, y_σ(i))`.
    pub improvement: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport<S> {
    pub monotone: bool,
    pub violating_cycle: Option<ViolatingCycle<S>>,
}

/// Searches every subset of at most `k_max` pairs and every permutation of it
/// for a cost decrease beyond `ε_dual`.
///
/// `pairs` index into `xs` and `ys`.
pub fn check_cyclical_monotonicity<S: Scalar>(
    c: &CostSpec<S>,
    xs: &[Point<S>],
    ys: &[Point<S>],
    pairs: &[(usize, usize)],
    k_max: usize,
) -> Result<MonotonicityReport<S>> {
    if k_max > MAX_CYCLE_LEN {
        return Err(Error::SizeLimitExceeded(format!("k_max = {k_max} (max {MAX_CYCLE_LEN})")));
    }
    for &(i, j) in pairs {
        if i >= xs.len() {
            return Err(Error::IndexOutOfRange { index: i, len: xs.len() });
        }
        if j >= ys.len() {
            return Err(Error::IndexOutOfRange { index: j, len: ys.len() });
        }
    }
    let p = pairs.len();
    let k = k_max.min(p);
    let candidates: u128 = (2..=k).map(|s| binomial(p, s) * factorial(s)).sum();
    if candidates > MAX_CYCLE_CANDIDATES {
        return Err(Error::SizeLimitExceeded(format!(
            "{candidates} subset permutations for {p} pairs"
        )));
    }
    // cross[a][b] = c(x of pair a, y of pair b)
    let cross = Matrix::try_from_fn(p, p, |a, b| {
        let (i, _) = pairs[a];
        let (_, j) = pairs[b];
        c.eval(Site::Atom(i, &xs[i]), Site::Atom(j, &ys[j]))
    })?;
    let tol = S::tol(Tolerances::DEFAULT.dual);
    for size in 2..=k {
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            let base = subset.iter().fold(S::zero(), |acc, &a| acc + cross[(a, a)].clone());
            let mut sigma: Vec<usize> = (0..size).collect();
            while next_permutation(&mut sigma) {
                let moved = sigma
                    .iter()
                    .enumerate()
                    .fold(S::zero(), |acc, (r, &s)| acc + cross[(subset[r], subset[s])].clone());
                let improvement = base.clone() - moved;
                if improvement > tol {
                    return Ok(MonotonicityReport {
                        monotone: false,
                        violating_cycle: Some(ViolatingCycle {
                            pairs: subset,
                            sigma,
                            improvement,
                        }),
                    });
                }
            }
            if !next_combination(&mut subset, p) {
                break;
            }
        }
    }
    Ok(MonotonicityReport {
        monotone: true,
        violating_cycle: None,
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// Advances to the next permutation in lexicographic order.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Advances a sorted `k`-subset of `0..n` in lexicographic order.
fn next_combination(v: &mut [usize], n: usize) -> bool {
    let k = v.len();
    let Some(i) = (0..k).rev().find(|&i| v[i] < n - k + i) else {
        return false;
    };
    v[i] += 1;
    for r in i + 1..k {
        v[r] = v[r - 1] + 1;
    }
    true
}

/// Grid point where `x ↦ c(x, y₁) − c(x, y₂)` looks critical.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistViolation {
    pub x_index: usize,
    pub pair_index: usize,
    pub gradient_norm: f64,
}

/// Finite-difference twist check over a grid.
///
/// Geometric costs use central differences with step `h·(1 + |xₖ|)` per
/// coordinate (`h` defaults to `1e-4`). Separable costs only know `a` on
/// `x_grid`, so their derivative uses neighbouring grid sites along each axis.
/// `y_pairs` index into `ys`.
pub fn check_twist<S: Scalar>(
    c: &CostSpec<S>,
    x_grid: &[Point<S>],
    ys: &[Point<S>],
    y_pairs: &[(usize, usize)],
    h: Option<f64>,
) -> Result<Vec<TwistViolation>> {
    let h = h.unwrap_or(1e-4);
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("finite-difference step {h} must be positive")));
    }
    if matches!(c, CostSpec::Matrix(_)) {
        return Err(Error::NonDifferentiableCost("matrix"));
    }
    for &(a, b) in y_pairs {
        for k in [a, b] {
            if k >= ys.len() {
                return Err(Error::IndexOutOfRange { index: k, len: ys.len() });
            }
        }
        if a == b || same_point(&ys[a], &ys[b]) {
            return Err(Error::InvalidArgument(format!("twist pair ({a}, {b}) repeats a point")));
        }
    }
    let c = c.to_f64();
    let grid: Vec<Vec<f64>> = x_grid.iter().map(|p| p.iter().map(Scalar::to_f64_lossy).collect()).collect();
    let ys: Vec<Vec<f64>> = ys.iter().map(|p| p.iter().map(Scalar::to_f64_lossy).collect()).collect();
    if let CostSpec::Separable { a, b } = &c {
        if a.len() != grid.len() || b.len() != ys.len() {
            return Err(Error::DimensionMismatch(format!(
                "separable samples have lengths {}/{} but grid/targets have {}/{}",
                a.len(),
                b.len(),
                grid.len(),
                ys.len()
            )));
        }
    }

    let threshold = Tolerances::DEFAULT.twist;
    let mut out = Vec::new();
    for (xi, x) in grid.iter().enumerate() {
        for (pi, &(y1, y2)) in y_pairs.iter().enumerate() {
            let gradient: Vec<f64> = match &c {
                CostSpec::Separable { a, b } => grid_gradient(&grid, a, xi)
                    .into_iter()
                    .map(|g| g * (b[y1] - b[y2]))
                    .collect(),
                _ => {
                    let f = |p: &[f64]| -> Result<f64> {
                        Ok(c.eval(Site::Point(p), Site::Point(&ys[y1]))? - c.eval(Site::Point(p), Site::Point(&ys[y2]))?)
                    };
                    let mut g = Vec::with_capacity(x.len());
                    for d in 0..x.len() {
                        let step = h * (1.0 + x[d].abs());
                        let mut up = x.clone();
                        let mut down = x.clone();
                        up[d] += step;
                        down[d] -= step;
                        g.push((f(&up)? - f(&down)?) / (up[d] - down[d]));
                    }
                    g
                }
            };
            let norm = gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
            if norm <= threshold {
                out.push(TwistViolation {
                    x_index: xi,
                    pair_index: pi,
                    gradient_norm: norm,
                });
            }
        }
    }
    Ok(out)
}

/// Per-axis difference quotient of grid samples at `grid[at]`, using the
/// nearest grid sites that differ from it only along that axis.
fn grid_gradient(grid: &[Vec<f64>], values: &[f64], at: usize) -> Vec<f64> {
    let x = &grid[at];
    (0..x.len())
        .map(|d| {
            let aligned = |p: &Vec<f64>| p.iter().zip(x).enumerate().all(|(e, (a, b))| e == d || a == b);
            let mut below: Option<usize> = None;
            let mut above: Option<usize> = None;
            for (k, p) in grid.iter().enumerate() {
                if k == at || !aligned(p) {
                    continue;
                }
                if p[d] < x[d] && below.is_none_or(|b| p[d] > grid[b][d]) {
                    below = Some(k);
                }
                if p[d] > x[d] && above.is_none_or(|a| p[d] < grid[a][d]) {
                    above = Some(k);
                }
            }
            let (lo, hi) = match (below, above) {
                (Some(lo), Some(hi)) => (lo, hi),
                (None, Some(hi)) => (at, hi),
                (Some(lo), None) => (lo, at),
                (None, None) => return 0.0,
            };
            (values[hi] - values[lo]) / (grid[hi][d] - grid[lo][d])
        })
        .collect()
}
