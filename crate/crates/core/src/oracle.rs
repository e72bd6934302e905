//! Brute-force reference implementations.
//!
//! Nothing here is used by the production paths: these routines enumerate
//! spanning-tree bases, maps and permutation cycles directly, sharing only
//! the data model (measures, costs, matrices) with the solvers they check.
//! Single-threaded and deterministic.

use crate::cost::{CostSpec, Site};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::measure::{DiscreteMeasure, IndexMap, Point};
use crate::scalar::{Scalar, Tolerances};
use crate::solver::TransportationInstance;

/// Hard size limits checked before any enumeration starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_atoms: usize,
    pub max_vertices: usize,
    pub max_maps: usize,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self {
            max_atoms: 10,
            max_vertices: 1_000_000,
            max_maps: 10_000_000,
        }
    }
}

impl EnumerationBudget {
    fn validate(&self) -> Result<()> {
        if self.max_atoms == 0 || self.max_vertices == 0 || self.max_maps == 0 {
            return Err(Error::InvalidArgument("enumeration budget entries must be positive".into()));
        }
        Ok(())
    }
}

/// One spanning-tree basis of the transportation polytope with nonnegative flows.
#[derive(Debug, Clone, PartialEq)]
pub struct BasicFeasible<S> {
    pub arcs: Vec<(usize, usize)>,
    pub plan: Matrix<S>,
    pub objective: S,
}

/// Every feasible spanning-tree basis (degenerate bases included, so one
/// vertex may appear several times).
pub fn enumerate_basic_feasible<S: Scalar>(
    inst: &TransportationInstance<S>,
    budget: &EnumerationBudget,
) -> Result<Vec<BasicFeasible<S>>> {
    budget.validate()?;
    let (m, n) = (inst.rows(), inst.cols());
    let limit = budget.max_atoms.min(5);
    if m > limit || n > limit {
        return Err(Error::BudgetExceeded(format!("{m}x{n} instance exceeds {limit}x{limit}")));
    }
    // Cayley count for K_{m,n}.
    let trees = (m as u128).pow(n as u32 - 1) * (n as u128).pow(m as u32 - 1);
    if trees > budget.max_vertices as u128 {
        return Err(Error::BudgetExceeded(format!("{trees} spanning trees to enumerate")));
    }

    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(m + n - 1);
    let mut components: Vec<usize> = (0..m + n).collect();
    forests(inst, 0, &mut chosen, &mut components, &mut out);
    Ok(out)
}

fn forests<S: Scalar>(
    inst: &TransportationInstance<S>,
    next_arc: usize,
    chosen: &mut Vec<(usize, usize)>,
    components: &mut Vec<usize>,
    out: &mut Vec<BasicFeasible<S>>,
) {
    let (m, n) = (inst.rows(), inst.cols());
    if chosen.len() == m + n - 1 {
        if let Some(b) = tree_solution(inst, chosen) {
            out.push(b);
        }
        return;
    }
    let remaining = m * n - next_arc;
    if remaining < m + n - 1 - chosen.len() {
        return;
    }
    for arc in next_arc..m * n {
        let (i, j) = (arc / n, arc % n);
        let (ci, cj) = (components[i], components[m + j]);
        if ci == cj {
            continue;
        }
        // Relabel component cj as ci; restore afterwards.
        let saved = components.clone();
        for c in components.iter_mut() {
            if *c == cj {
                *c = ci;
            }
        }
        chosen.push((i, j));
        forests(inst, arc + 1, chosen, components, out);
        chosen.pop();
        *components = saved;
    }
}

/// Flows on a spanning tree by repeatedly peeling leaves.
fn tree_solution<S: Scalar>(inst: &TransportationInstance<S>, arcs: &[(usize, usize)]) -> Option<BasicFeasible<S>> {
    let (m, n) = (inst.rows(), inst.cols());
    let mut residual: Vec<S> = inst.supply().iter().chain(inst.demand()).cloned().collect();
    let mut alive = vec![true; arcs.len()];
    let mut plan = Matrix::zeros(m, n);
    let ends = |&(i, j): &(usize, usize)| (i, m + j);
    for _ in 0..arcs.len() {
        let mut degree = vec![0usize; m + n];
        for (k, a) in arcs.iter().enumerate() {
            if alive[k] {
                let (p, q) = ends(a);
                degree[p] += 1;
                degree[q] += 1;
            }
        }
        let (k, leaf) = arcs.iter().enumerate().filter(|(k, _)| alive[*k]).find_map(|(k, a)| {
            let (p, q) = ends(a);
            if degree[p] == 1 {
                Some((k, p))
            } else if degree[q] == 1 {
                Some((k, q))
            } else {
                None
            }
        })?;
        let (p, q) = ends(&arcs[k]);
        let other = if leaf == p { q } else { p };
        let flow = residual[leaf].clone();
        residual[other] = residual[other].clone() - flow.clone();
        residual[leaf] = S::zero();
        plan[arcs[k]] = flow;
        alive[k] = false;
    }
    let tol = S::tol(Tolerances::DEFAULT.feas);
    if plan.iter().any(|(_, _, v)| *v < -tol.clone()) {
        return None;
    }
    let objective = plan.dot(inst.cost());
    Some(BasicFeasible {
        arcs: arcs.to_vec(),
        plan,
        objective,
    })
}

/// Smallest objective over the enumerated vertices.
pub fn min_objective<S: Scalar>(vertices: &[BasicFeasible<S>]) -> Option<S> {
    vertices
        .iter()
        .map(|b| b.objective.clone())
        .reduce(|a, b| if b < a { b } else { a })
}

/// Every map `t` with `Σ_{t(i)=k} μᵢ = target_weights[k]` for all `k`, in
/// lexicographic order.
pub fn enumerate_feasible_maps<S: Scalar>(
    mu: &DiscreteMeasure<S>,
    target_weights: &[S],
    budget: &EnumerationBudget,
) -> Result<Vec<IndexMap>> {
    budget.validate()?;
    let m = mu.len();
    let n = target_weights.len();
    let limit = budget.max_atoms.min(10);
    if m > limit {
        return Err(Error::BudgetExceeded(format!("{m} atoms exceeds {limit}")));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let total = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if total > budget.max_maps as u128 {
        return Err(Error::BudgetExceeded(format!("{total} candidate maps")));
    }
    let eps = Tolerances::DEFAULT.mass * n as f64;
    let mut maps = Vec::new();
    let mut digits = vec![0usize; m];
    'odometer: loop {
        let mut sums = vec![S::zero(); n];
        for (i, &k) in digits.iter().enumerate() {
            sums[k] = sums[k].clone() + mu.weight(i).clone();
        }
        if sums.iter().zip(target_weights).all(|(s, t)| S::near(s, t, eps)) {
            maps.push(IndexMap(digits.clone()));
        }
        for pos in (0..m).rev() {
            digits[pos] += 1;
            if digits[pos] < n {
                continue 'odometer;
            }
            digits[pos] = 0;
        }
        break;
    }
    Ok(maps)
}

/// A cyclic reassignment that lowers the total cost.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleWitness<S> {
    /// Indices into the pair list.
    pub subset: Vec<usize>,
    /// `permutation[r]` = position in `subset` whose `y` is given to `subset[r]`.
    pub permutation: Vec<usize>,
    /// `Σ c(xᵢ,yᵢ) − Σ c(xᵢ,y_σ(i)) > 0`.
    pub improvement: S,
}

/// All violating (subset, permutation) pairs with subset size `≤ k`.
pub fn exhaustive_cycle_search<S: Scalar>(
    c: &CostSpec<S>,
    xs: &[Point<S>],
    ys: &[Point<S>],
    pairs: &[(usize, usize)],
    k: usize,
    budget: &EnumerationBudget,
) -> Result<Vec<CycleWitness<S>>> {
    budget.validate()?;
    let p = pairs.len();
    if p > budget.max_atoms.min(8) {
        return Err(Error::BudgetExceeded(format!("{p} pairs exceeds 8")));
    }
    if k > p.max(1) {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds the {p} pairs")));
    }
    let cost = |a: usize, b: usize| -> Result<S> {
        let (i, _) = pairs[a];
        let (_, j) = pairs[b];
        c.eval(Site::Atom(i, &xs[i]), Site::Atom(j, &ys[j]))
    };
    let tol = S::tol(Tolerances::DEFAULT.dual);
    let mut witnesses = Vec::new();
    for mask in 1u32..(1 << p) {
        let size = mask.count_ones() as usize;
        if size < 2 || size > k {
            continue;
        }
        let subset: Vec<usize> = (0..p).filter(|b| mask >> b & 1 == 1).collect();
        let base = subset.iter().try_fold(S::zero(), |acc, &a| Ok::<_, Error>(acc + cost(a, a)?))?;
        let mut perm: Vec<usize> = (0..size).collect();
        for sigma in heap_permutations(&mut perm) {
            if sigma.iter().enumerate().all(|(r, &s)| r == s) {
                continue;
            }
            let permuted = sigma
                .iter()
                .enumerate()
                .try_fold(S::zero(), |acc, (r, &s)| Ok::<_, Error>(acc + cost(subset[r], subset[s])?))?;
            let improvement = base.clone() - permuted;
            if improvement > tol {
                witnesses.push(CycleWitness {
                    subset: subset.clone(),
                    permutation: sigma,
                    improvement,
                });
            }
        }
    }
    Ok(witnesses)
}

/// All permutations of `items` (Heap's algorithm, iterative).
fn heap_permutations(items: &mut [usize]) -> Vec<Vec<usize>> {
    let n = items.len();
    let mut out = vec![items.to_vec()];
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            out.push(items.to_vec());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    #[test]
    fn heap_yields_all_permutations() {
        let perms = heap_permutations(&mut [0, 1, 2, 3]);
        let mut sorted = perms.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 24);
        assert_eq!(perms.len(), 24);
    }

    #[test]
    fn one_by_one_has_one_vertex() {
        let inst = TransportationInstance::new(
            vec![ratio(1, 1)],
            vec![ratio(1, 1)],
            Matrix::from_rows(vec![vec![ratio(3, 1)]]).unwrap(),
        )
        .unwrap();
        let v = enumerate_basic_feasible(&inst, &EnumerationBudget::default()).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].objective, ratio(3, 1));
    }

    #[test]
    fn two_by_two_uniform_vertices() {
        let h = ratio(1, 2);
        let inst = TransportationInstance::new(
            vec![h.clone(), h.clone()],
            vec![h.clone(), h.clone()],
            Matrix::from_fn(2, 2, |i, j| ratio((i != j) as i64, 1)),
        )
        .unwrap();
        let v = enumerate_basic_feasible(&inst, &EnumerationBudget::default()).unwrap();
        // K_{2,2} has 4 spanning trees (paths of 3 arcs); each is feasible
        // and degenerate, carrying one of the two permutation couplings.
        assert_eq!(v.len(), 4);
        let mut plans: Vec<Vec<Vec<Rational>>> = v.iter().map(|b| b.plan.to_rows()).collect();
        plans.sort();
        plans.dedup();
        assert_eq!(plans.len(), 2);
        assert_eq!(min_objective(&v), Some(ratio(0, 1)));
    }

    #[test]
    fn feasible_maps_counts() {
        let two = DiscreteMeasure::uniform(vec![vec![ratio(0, 1)], vec![ratio(1, 1)]]).unwrap();
        let b = EnumerationBudget::default();
        assert_eq!(enumerate_feasible_maps(&two, &[ratio(1, 2), ratio(1, 2)], &b).unwrap().len(), 2);
        assert!(enumerate_feasible_maps(&two, &[ratio(1, 3), ratio(2, 3)], &b).unwrap().is_empty());
        let three = DiscreteMeasure::uniform(vec![vec![ratio(0, 1)], vec![ratio(1, 1)], vec![ratio(2, 1)]]).unwrap();
        let maps = enumerate_feasible_maps(&three, &[ratio(1, 3), ratio(2, 3)], &b).unwrap();
        assert_eq!(maps.len(), 3);
    }

    #[test]
    fn swap_counterexample() {
        let xs = vec![vec![0.0], vec![1.0]];
        let ys = vec![vec![0.0], vec![1.0]];
        // pairs (0 → 1), (1 → 0)
        let w = exhaustive_cycle_search(
            &CostSpec::SquaredEuclidean,
            &xs,
            &ys,
            &[(0, 1), (1, 0)],
            2,
            &EnumerationBudget::default(),
        )
        .unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].improvement, 2.0);
        let none = exhaustive_cycle_search(
            &CostSpec::SquaredEuclidean,
            &xs,
            &ys,
            &[(0, 1), (1, 0)],
            1,
            &EnumerationBudget::default(),
        )
        .unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn budgets_are_enforced() {
        let inst = TransportationInstance::new(
            vec![1.0 / 6.0; 6],
            vec![1.0],
            Matrix::zeros(6, 1),
        )
        .unwrap();
        assert!(matches!(
            enumerate_basic_feasible(&inst, &EnumerationBudget::default()),
            Err(Error::BudgetExceeded(_))
        ));
        let tiny = EnumerationBudget {
            max_maps: 3,
            ..Default::default()
        };
        let two = DiscreteMeasure::uniform(vec![vec![0.0], vec![1.0]]).unwrap();
        assert!(matches!(
            enumerate_feasible_maps(&two, &[0.5, 0.5], &tiny),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
