//! Meta-measures on `(P(Y), W₁)`, nested Wasserstein distances, the lifted
//! cost `c̃(x, λ) = ∫ c(x, y) dλ` and the class-constrained transport problem.

use std::cmp::Ordering;

use crate::cost::{CostSpec, Site};
use crate::disintegration::{recombine, DisintegrationMap};
use crate::error::{Error, Result};
use crate::kantorovich::{min_cost_assignment, solve_mk, wasserstein};
use crate::matrix::Matrix;
use crate::measure::{same_point, DiscreteMeasure, IndexMap, Point};
use crate::scalar::{Mode, Scalar, Tolerances};
use crate::solver::{solve_lp_dense, solve_transportation, TransportationInstance};

/// Largest number of profiles whose blend polytope is enumerated vertex by vertex.
pub const MAX_VERTEX_PROFILES: usize = 6;
/// Cap on feasible maps visited by [`tie_structure`].
pub const MAX_TIE_MAPS: usize = 1_000_000;

/// A finitely supported probability measure whose atoms are measures on Y.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaMeasure<S> {
    atoms: Vec<DiscreteMeasure<S>>,
    weights: Vec<S>,
}

impl<S: Scalar> MetaMeasure<S> {
    /// Validates weights (sum one within `ε_mass`), drops zero weights, merges
    /// atoms that coincide (exactly in rational mode, within `W₁ ≤ ε_meta` in
    /// float mode) and sorts atoms canonically.
    pub fn new(atoms: Vec<DiscreteMeasure<S>>, weights: Vec<S>) -> Result<Self> {
        Self::build(atoms, weights, false)
    }

    /// As [`MetaMeasure::new`] but rescales the weights to total one.
    pub fn normalized(atoms: Vec<DiscreteMeasure<S>>, weights: Vec<S>) -> Result<Self> {
        Self::build(atoms, weights, true)
    }

    pub fn dirac(lambda: DiscreteMeasure<S>) -> Self {
        Self {
            atoms: vec![lambda],
            weights: vec![S::one()],
        }
    }

    fn build(atoms: Vec<DiscreteMeasure<S>>, weights: Vec<S>, normalize: bool) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        if atoms.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} meta-atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        let dim = atoms[0].dim();
        if let Some(a) = atoms.iter().find(|a| a.dim() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "meta-atoms live in dimensions {dim} and {}",
                a.dim()
            )));
        }
        for (index, w) in weights.iter().enumerate() {
            if !w.is_finite_value() {
                return Err(Error::NonFinite(format!("meta-weight {index}")));
            }
            if w.lt_zero() {
                return Err(Error::NegativeWeight {
                    index,
                    weight: w.to_string(),
                });
            }
        }
        let mut total = weights.iter().fold(S::zero(), |a, w| a + w.clone());
        if normalize {
            if !total.gt_zero() {
                return Err(Error::MassNotOne { total: total.to_string() });
            }
        } else if !S::near(&total, &S::one(), Tolerances::DEFAULT.mass) {
            return Err(Error::MassNotOne { total: total.to_string() });
        } else {
            total = S::one();
        }

        let mut pairs: Vec<(DiscreteMeasure<S>, S)> = atoms
            .into_iter()
            .zip(weights)
            .filter(|(_, w)| w.gt_zero())
            .map(|(a, w)| (a, w / total.clone()))
            .collect();
        pairs.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        let mut kept: Vec<(DiscreteMeasure<S>, S)> = Vec::with_capacity(pairs.len());
        for (atom, w) in pairs {
            let mut merged = false;
            for (k, kw) in kept.iter_mut() {
                if same_measure(k, &atom)? {
                    *kw = kw.clone() + w.clone();
                    merged = true;
                    break;
                }
            }
            if !merged {
                kept.push((atom, w));
            }
        }
        let (atoms, weights) = kept.into_iter().unzip();
        Ok(Self { atoms, weights })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].dim()
    }

    pub fn atoms(&self) -> &[DiscreteMeasure<S>] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &DiscreteMeasure<S> {
        &self.atoms[i]
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    /// Index of a meta-atom equal to `lambda` under the merge rule.
    pub fn index_of(&self, lambda: &DiscreteMeasure<S>) -> Result<Option<usize>> {
        for (k, a) in self.atoms.iter().enumerate() {
            if same_measure(a, lambda)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    pub fn to_f64(&self) -> MetaMeasure<f64> {
        MetaMeasure {
            atoms: self.atoms.iter().map(DiscreteMeasure::to_f64).collect(),
            weights: self.weights.iter().map(Scalar::to_f64_lossy).collect(),
        }
    }

    /// Orders by support sizes, then atom data, then weights.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| {
                self.atoms
                    .iter()
                    .zip(&other.atoms)
                    .map(|(a, b)| a.canonical_cmp(b))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
            .then_with(|| {
                self.weights
                    .iter()
                    .zip(&other.weights)
                    .map(|(a, b)| a.total_cmp(b))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
    }
}

fn same_measure<S: Scalar>(a: &DiscreteMeasure<S>, b: &DiscreteMeasure<S>) -> Result<bool> {
    if a == b {
        return Ok(true);
    }
    match S::MODE {
        Mode::Rational => Ok(false),
        Mode::Float => Ok(wasserstein(1.0, a, b)? <= S::tol(Tolerances::DEFAULT.meta)),
    }
}

/// `β(N) = Σ αᵢ λᵢ`.
pub fn generalized_barycenter<S: Scalar>(n: &MetaMeasure<S>) -> Result<DiscreteMeasure<S>> {
    DiscreteMeasure::mixture(n.weights().iter().cloned().zip(n.atoms()))
}

/// Whether `∫ λ dΛ = ν` (exactly in rational mode, `W₁ ≤ ε_meta` in float mode).
pub fn check_class_constraint<S: Scalar>(lambda: &MetaMeasure<S>, nu: &DiscreteMeasure<S>) -> Result<bool> {
    if lambda.dim() != nu.dim() {
        return Err(Error::DimensionMismatch(format!(
            "meta-atoms live in dimension {} but the target in {}",
            lambda.dim(),
            nu.dim()
        )));
    }
    same_measure(&generalized_barycenter(lambda)?, nu)
}

/// Matrix of `W₁(λᵢ, λ′ⱼ)`.
pub fn meta_ground_costs<S: Scalar>(n1: &MetaMeasure<S>, n2: &MetaMeasure<S>) -> Result<Matrix<S>> {
    if n1.dim() != n2.dim() {
        return Err(Error::DimensionMismatch(format!(
            "meta-measures over dimensions {} and {}",
            n1.dim(),
            n2.dim()
        )));
    }
    Matrix::try_from_fn(n1.len(), n2.len(), |i, j| wasserstein(1.0, n1.atom(i), n2.atom(j)))
}

/// Nested `W₁` between meta-measures.
pub fn meta_wasserstein<S: Scalar>(n1: &MetaMeasure<S>, n2: &MetaMeasure<S>) -> Result<S> {
    let ground = meta_ground_costs(n1, n2)?;
    let inst = TransportationInstance::new(n1.weights().to_vec(), n2.weights().to_vec(), ground)?;
    Ok(S::max_of(solve_transportation(&inst)?.objective, S::zero()).canonical())
}

/// `c̃(x, λ) = Σⱼ λⱼ c(x, yⱼ)`.
///
/// Atoms of `lambda` are located in `y_support` so tabulated costs can be
/// evaluated by index; geometric costs only need the points.
pub fn lifted_cost<S: Scalar>(
    c: &CostSpec<S>,
    x: Site<'_, S>,
    lambda: &DiscreteMeasure<S>,
    y_support: &[Point<S>],
) -> Result<S> {
    lambda.atoms().iter().zip(lambda.weights()).try_fold(S::zero(), |acc, (y, w)| {
        let site = match y_support.iter().position(|p| same_point(p, y)) {
            Some(j) => Site::Atom(j, y.as_slice()),
            None if c.is_tabulated() => {
                return Err(Error::SupportMismatch(format!(
                    "meta-atom point {y:?} is not in the target support"
                )))
            }
            None => Site::Point(y.as_slice()),
        };
        Ok(acc + w.clone() * c.eval(x, site)?)
    })
}

/// `L[i][k] = c̃(xᵢ, λₖ)` with Y indexed by the support of `β(Λ)`.
pub fn lifted_cost_table<S: Scalar>(
    c: &CostSpec<S>,
    mu: &DiscreteMeasure<S>,
    lambda: &MetaMeasure<S>,
) -> Result<Matrix<S>> {
    let nu = generalized_barycenter(lambda)?;
    Matrix::try_from_fn(mu.len(), lambda.len(), |i, k| {
        lifted_cost(c, Site::Atom(i, mu.atom(i)), lambda.atom(k), nu.atoms())
    })
}

/// A meta-atom pair whose lifted-cost difference does not depend on `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyFlag<S> {
    pub pair: (usize, usize),
    /// The constant value of `c̃(x, λᵢ) − c̃(x, λⱼ)` over the atoms of μ.
    pub difference: S,
}

/// Outcome of the class-constrained problem for `(c, μ, Λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassProblemReport<S> {
    /// Relaxed value `MK(c̃, μ, Λ)`.
    pub relaxed_value: S,
    /// `min Σ μᵢ c̃(xᵢ, λ_{t(i)})` over exact covers; `None` is `+∞`.
    pub map_value: Option<S>,
    /// The same optimum integrated as `∫ c d(f ⊗ μ)` over the recombined plan.
    pub plan_integral_value: Option<S>,
    /// Whether both computations of the map value agree (exactly in rational mode).
    pub values_agree: bool,
    /// `map_value − relaxed_value`.
    pub gap: Option<S>,
    pub feasible_maps_exist: bool,
    /// Atom of μ → meta-atom index, lexicographically smallest among optima.
    pub optimal_assignment: Option<IndexMap>,
    pub degeneracy_flags: Vec<DegeneracyFlag<S>>,
}

/// Maximum μ atoms for the exact map search.
pub const MAX_CLASS_ATOMS: usize = crate::kantorovich::MAX_MONGE_ATOMS;

/// Solves the relaxed and the map-constrained class problems.
pub fn solve_class_problem<S: Scalar>(
    c: &CostSpec<S>,
    mu: &DiscreteMeasure<S>,
    lambda: &MetaMeasure<S>,
) -> Result<ClassProblemReport<S>> {
    if mu.len() > MAX_CLASS_ATOMS {
        return Err(Error::SizeLimitExceeded(format!(
            "{} source atoms (max {MAX_CLASS_ATOMS})",
            mu.len()
        )));
    }
    if mu.dim() != lambda.dim() && !c.is_tabulated() {
        return Err(Error::DimensionMismatch(format!(
            "source in dimension {} but meta-atoms in {}",
            mu.dim(),
            lambda.dim()
        )));
    }
    let table = lifted_cost_table(c, mu, lambda)?;
    let inst = TransportationInstance::new(mu.weights().to_vec(), lambda.weights().to_vec(), table.clone())?;
    let relaxed_value = solve_transportation(&inst)?.objective;
    let best = min_cost_assignment(&table, mu.weights(), lambda.weights())?;
    let degeneracy_flags = constant_differences(&table);

    let Some((assignment, map_value)) = best else {
        return Ok(ClassProblemReport {
            relaxed_value,
            map_value: None,
            plan_integral_value: None,
            values_agree: true,
            gap: None,
            feasible_maps_exist: false,
            optimal_assignment: None,
            degeneracy_flags,
        });
    };
    let f = DisintegrationMap::new(
        mu.clone(),
        assignment.iter().map(|&k| lambda.atom(k).clone()).collect(),
    )?;
    let plan = recombine(&f, mu)?;
    let plan_integral_value = plan.cost(c)?;
    let values_agree = S::near(&plan_integral_value, &map_value, Tolerances::DEFAULT.dual);
    Ok(ClassProblemReport {
        gap: Some(map_value.clone() - relaxed_value.clone()),
        relaxed_value,
        map_value: Some(map_value),
        plan_integral_value: Some(plan_integral_value),
        values_agree,
        feasible_maps_exist: true,
        optimal_assignment: Some(IndexMap(assignment)),
        degeneracy_flags,
    })
}

/// Column pairs of a lifted table whose difference is constant down the rows.
fn constant_differences<S: Scalar>(table: &Matrix<S>) -> Vec<DegeneracyFlag<S>> {
    let mut out = Vec::new();
    let tol = S::tol(Tolerances::DEFAULT.dual);
    for a in 0..table.cols() {
        for b in a + 1..table.cols() {
            let diffs: Vec<S> = (0..table.rows())
                .map(|i| table[(i, a)].clone() - table[(i, b)].clone())
                .collect();
            let first = diffs[0].clone();
            if diffs.iter().all(|d| (d.clone() - first.clone()).abs() <= tol) {
                out.push(DegeneracyFlag {
                    pair: (a, b),
                    difference: first.canonical(),
                });
            }
        }
    }
    out
}

/// `MK(c, μ, β(Λ))` next to the relaxed class value `MK(c̃, μ, Λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KantorovichComparison<S> {
    pub mk_value: S,
    pub class_value: S,
    /// `mk_value ≤ class_value + ε_dual`.
    pub inequality_holds: bool,
}

pub fn compare_with_kantorovich<S: Scalar>(
    c: &CostSpec<S>,
    mu: &DiscreteMeasure<S>,
    lambda: &MetaMeasure<S>,
) -> Result<KantorovichComparison<S>> {
    let nu = generalized_barycenter(lambda)?;
    let mk_value = solve_mk(c, mu, &nu)?.value;
    let table = lifted_cost_table(c, mu, lambda)?;
    let inst = TransportationInstance::new(mu.weights().to_vec(), lambda.weights().to_vec(), table)?;
    let class_value = solve_transportation(&inst)?.objective;
    let inequality_holds = mk_value <= class_value.clone() + S::tol(Tolerances::DEFAULT.dual);
    Ok(KantorovichComparison {
        mk_value,
        class_value,
        inequality_holds,
    })
}

/// `Λ = Σᵢ μᵢ δ_{δ_{t(xᵢ)}}`.
pub fn class_of_map<S: Scalar>(t: &IndexMap, mu: &DiscreteMeasure<S>, targets: &[Point<S>]) -> Result<MetaMeasure<S>> {
    if t.len() != mu.len() {
        return Err(Error::IncompleteAssignment {
            expected: mu.len(),
            got: t.len(),
        });
    }
    let atoms = t
        .as_slice()
        .iter()
        .map(|&k| {
            let y = targets.get(k).ok_or(Error::IndexOutOfRange { index: k, len: targets.len() })?;
            DiscreteMeasure::dirac(y.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    MetaMeasure::new(atoms, mu.weights().to_vec())
}

/// Closed-form degeneracy quantity for a meta-atom pair.
#[derive(Debug, Clone, PartialEq)]
pub enum Discriminant<S> {
    /// `β(λᵢ) − β(λⱼ)` (inner-product cost).
    Barycenter(Vec<S>),
    /// `∫ b d(λᵢ − λⱼ)` (separable cost).
    Integral(S),
}

impl<S: Scalar> Discriminant<S> {
    pub fn vanishes(&self) -> bool {
        let tol = S::tol(Tolerances::DEFAULT.dual);
        match self {
            Discriminant::Barycenter(v) => v.iter().all(|x| x.abs() <= tol),
            Discriminant::Integral(x) => x.abs() <= tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairDiagnostic<S> {
    pub pair: (usize, usize),
    pub discriminant: Discriminant<S>,
    pub degenerate: bool,
}

/// Costs of all feasible assignments, summarised.
#[derive(Debug, Clone, PartialEq)]
pub struct TieStructure<S> {
    pub feasible_maps: usize,
    pub min_cost: Option<S>,
    pub max_cost: Option<S>,
    /// Every feasible assignment has the same cost.
    pub all_tied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceDiagnosis<S> {
    pub pairs: Vec<PairDiagnostic<S>>,
    pub ties: TieStructure<S>,
    /// Some pair is degenerate and feasible maps exist, so mass may move
    /// between the pair's meta-atoms at no cost.
    pub tie_degenerate: bool,
}

/// Discriminants for inner-product and separable costs plus the observed
/// tie structure of feasible assignments.
pub fn diagnose_existence<S: Scalar>(
    c: &CostSpec<S>,
    mu: &DiscreteMeasure<S>,
    lambda: &MetaMeasure<S>,
) -> Result<ExistenceDiagnosis<S>> {
    let nu = generalized_barycenter(lambda)?;
    let discriminant = |i: usize, j: usize| -> Result<Discriminant<S>> {
        match c {
            CostSpec::InnerProduct => {
                let (bi, bj) = (lambda.atom(i).barycenter(), lambda.atom(j).barycenter());
                Ok(Discriminant::Barycenter(
                    bi.into_iter().zip(bj).map(|(a, b)| (a - b).canonical()).collect(),
                ))
            }
            CostSpec::Separable { b, .. } => {
                if b.len() != nu.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "b has {} samples but the target support has {} atoms",
                        b.len(),
                        nu.len()
                    )));
                }
                let integral = |l: &DiscreteMeasure<S>| -> Result<S> {
                    l.atoms().iter().zip(l.weights()).try_fold(S::zero(), |acc, (y, w)| {
                        let k = nu
                            .index_of(y)
                            .ok_or_else(|| Error::SupportMismatch(format!("{y:?} not in target support")))?;
                        Ok(acc + w.clone() * b[k].clone())
                    })
                };
                Ok(Discriminant::Integral(
                    (integral(lambda.atom(i))? - integral(lambda.atom(j))?).canonical(),
                ))
            }
            _ => Err(Error::UnsupportedCostVariant(c.name())),
        }
    };
    let mut pairs = Vec::new();
    for i in 0..lambda.len() {
        for j in i + 1..lambda.len() {
            let d = discriminant(i, j)?;
            pairs.push(PairDiagnostic {
                pair: (i, j),
                degenerate: d.vanishes(),
                discriminant: d,
            });
        }
    }
    let ties = tie_structure(c, mu, lambda)?;
    let tie_degenerate = ties.feasible_maps > 0 && pairs.iter().any(|p| p.degenerate);
    Ok(ExistenceDiagnosis {
        pairs,
        ties,
        tie_degenerate,
    })
}

/// Visits every assignment of μ-atoms to meta-atoms with `t_# μ = α` and
/// records the spread of their lifted costs. Works for any cost.
pub fn tie_structure<S: Scalar>(
    c: &CostSpec<S>,
    mu: &DiscreteMeasure<S>,
    lambda: &MetaMeasure<S>,
) -> Result<TieStructure<S>> {
    if mu.len() > MAX_CLASS_ATOMS {
        return Err(Error::SizeLimitExceeded(format!(
            "{} source atoms (max {MAX_CLASS_ATOMS})",
            mu.len()
        )));
    }
    let table = lifted_cost_table(c, mu, lambda)?;
    let eps = S::tol(Tolerances::DEFAULT.mass * lambda.len() as f64);
    let mut residual = lambda.weights().to_vec();
    let mut costs = Vec::new();
    let mut visited = 0usize;
    walk_assignments(&table, mu.weights(), &eps, 0, S::zero(), &mut residual, &mut costs, &mut visited)?;
    let min_cost = costs.iter().cloned().reduce(|a, b| if b < a { b } else { a });
    let max_cost = costs.iter().cloned().reduce(|a, b| if b > a { b } else { a });
    let all_tied = match (&min_cost, &max_cost) {
        (Some(lo), Some(hi)) => S::near(lo, hi, Tolerances::DEFAULT.dual),
        _ => false,
    };
    Ok(TieStructure {
        feasible_maps: costs.len(),
        min_cost,
        max_cost,
        all_tied,
    })
}

#[allow(clippy::too_many_arguments)]
fn walk_assignments<S: Scalar>(
    table: &Matrix<S>,
    weights: &[S],
    eps: &S,
    row: usize,
    partial: S,
    residual: &mut [S],
    costs: &mut Vec<S>,
    visited: &mut usize,
) -> Result<()> {
    *visited += 1;
    if *visited > MAX_TIE_MAPS {
        return Err(Error::SizeLimitExceeded(format!("more than {MAX_TIE_MAPS} partial assignments")));
    }
    if row == weights.len() {
        if residual.iter().all(|r| r.abs() <= *eps) {
            costs.push(partial);
        }
        return Ok(());
    }
    let w = &weights[row];
    for k in 0..table.cols() {
        if *w > residual[k].clone() + eps.clone() {
            continue;
        }
        residual[k] = residual[k].clone() - w.clone();
        let next = partial.clone() + w.clone() * table[(row, k)].clone();
        walk_assignments(table, weights, eps, row + 1, next, residual, costs, visited)?;
        residual[k] = residual[k].clone() + w.clone();
    }
    Ok(())
}

/// Best blend of fixed supply profiles reproducing `ν`.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation<S> {
    /// One weight per input profile.
    pub blend_weights: Vec<S>,
    /// Atom of μ → input profile index, when a feasible map exists.
    pub partition: Option<IndexMap>,
    pub report: ClassProblemReport<S>,
    /// Number of distinct blends compared.
    pub candidates: usize,
    /// Whether every vertex of the blend polytope was examined.
    pub exhaustive: bool,
}

/// Chooses `α ≥ 0` with `Σ αᵢ λᵢ = ν` and the partition of μ minimising the
/// class-constrained cost.
///
/// With at most [`MAX_VERTEX_PROFILES`] profiles every vertex of the blend
/// polytope is tried and the smallest map value wins (ties to the first vertex
/// in subset order); otherwise the LP's basic solution is used.
pub fn solve_allocation<S: Scalar>(
    c: &CostSpec<S>,
    mu: &DiscreteMeasure<S>,
    profiles: &[DiscreteMeasure<S>],
    nu: &DiscreteMeasure<S>,
) -> Result<Allocation<S>> {
    if profiles.is_empty() {
        return Err(Error::InvalidArgument("no supply profiles".into()));
    }
    if mu.len() > MAX_CLASS_ATOMS {
        return Err(Error::SizeLimitExceeded(format!(
            "{} source atoms (max {MAX_CLASS_ATOMS})",
            mu.len()
        )));
    }
    if let Some(p) = profiles.iter().find(|p| p.dim() != nu.dim()) {
        return Err(Error::DimensionMismatch(format!(
            "profile in dimension {} but target in {}",
            p.dim(),
            nu.dim()
        )));
    }
    let (a, b) = blend_system(profiles, nu);
    let lp = solve_lp_dense(&vec![S::zero(); profiles.len()], &a, &b).map_err(|e| match e {
        Error::Infeasible(_) => Error::Infeasible("no blend of the profiles reproduces the target".into()),
        other => other,
    })?;

    let exhaustive = profiles.len() <= MAX_VERTEX_PROFILES;
    let blends = if exhaustive { blend_vertices(&a, &b) } else { vec![lp.x] };

    let mut best: Option<Allocation<S>> = None;
    let candidates = blends.len();
    for alpha in blends {
        let used: Vec<usize> = (0..profiles.len()).filter(|&k| alpha[k].gt_zero()).collect();
        let lambda = MetaMeasure::normalized(
            used.iter().map(|&k| profiles[k].clone()).collect(),
            used.iter().map(|&k| alpha[k].clone()).collect(),
        )?;
        let report = solve_class_problem(c, mu, &lambda)?;
        // Meta-atom → first input profile it came from.
        let back: Vec<usize> = lambda
            .atoms()
            .iter()
            .map(|atom| {
                used.iter()
                    .copied()
                    .find(|&k| same_measure(&profiles[k], atom).unwrap_or(false))
                    .expect("every meta-atom comes from a profile")
            })
            .collect();
        let partition = report
            .optimal_assignment
            .as_ref()
            .map(|t| IndexMap(t.as_slice().iter().map(|&k| back[k]).collect()));
        let better = match &best {
            None => true,
            Some(cur) => match (&report.map_value, &cur.report.map_value) {
                (Some(v), Some(w)) => v < w,
                (Some(_), None) => true,
                _ => false,
            },
        };
        if better {
            best = Some(Allocation {
                blend_weights: alpha,
                partition,
                report,
                candidates,
                exhaustive,
            });
        }
    }
    best.ok_or_else(|| Error::Infeasible("no blend of the profiles reproduces the target".into()))
}

/// Rows: one per point of the union support, plus the total-mass row.
fn blend_system<S: Scalar>(profiles: &[DiscreteMeasure<S>], nu: &DiscreteMeasure<S>) -> (Matrix<S>, Vec<S>) {
    let mut points: Vec<Point<S>> = nu.atoms().to_vec();
    for p in profiles {
        for y in p.atoms() {
            if !points.iter().any(|q| same_point(q, y)) {
                points.push(y.clone());
            }
        }
    }
    let weight_at = |m: &DiscreteMeasure<S>, y: &[S]| m.index_of(y).map_or_else(S::zero, |k| m.weight(k).clone());
    let mut a = Matrix::from_fn(points.len() + 1, profiles.len(), |r, k| {
        if r < points.len() {
            weight_at(&profiles[k], &points[r])
        } else {
            S::one()
        }
    });
    let mut b: Vec<S> = points.iter().map(|y| weight_at(nu, y)).collect();
    b.push(S::one());
    for v in b.iter_mut() {
        *v = v.clone().canonical();
    }
    for r in 0..a.rows() {
        for k in 0..a.cols() {
            a[(r, k)] = a[(r, k)].clone().canonical();
        }
    }
    (a, b)
}

/// Distinct basic feasible solutions of `A α = b, α ≥ 0`, in column-subset order.
fn blend_vertices<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Vec<Vec<S>> {
    let k = a.cols();
    let tol = S::tol(Tolerances::DEFAULT.feas);
    let mut out: Vec<Vec<S>> = Vec::new();
    for mask in 1u32..(1 << k) {
        let cols: Vec<usize> = (0..k).filter(|c| mask >> c & 1 == 1).collect();
        let Some(sol) = solve_columns(a, b, &cols) else {
            continue;
        };
        if sol.iter().any(|v| *v < -tol.clone()) {
            continue;
        }
        let mut alpha = vec![S::zero(); k];
        for (c, v) in cols.iter().zip(sol) {
            alpha[*c] = if v.abs() <= tol { S::zero() } else { v.canonical() };
        }
        let duplicate = out
            .iter()
            .any(|o| o.iter().zip(&alpha).all(|(x, y)| S::near(x, y, Tolerances::DEFAULT.feas)));
        if !duplicate {
            out.push(alpha);
        }
    }
    out
}

/// Unique solution of `A[:, cols] z = b` when those columns are independent
/// and the system is consistent.
fn solve_columns<S: Scalar>(a: &Matrix<S>, b: &[S], cols: &[usize]) -> Option<Vec<S>> {
    let r = a.rows();
    let s = cols.len();
    let eps = S::tol(1e-11);
    let mut t: Vec<Vec<S>> = (0..r)
        .map(|i| {
            let mut row: Vec<S> = cols.iter().map(|&c| a[(i, c)].clone()).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..s {
        let p = (pivot_row..r)
            .filter(|&i| t[i][col].abs() > eps)
            .max_by(|&i, &j| t[i][col].abs().partial_cmp(&t[j][col].abs()).unwrap_or(Ordering::Equal))?;
        t.swap(pivot_row, p);
        let pv = t[pivot_row][col].clone();
        for v in t[pivot_row].iter_mut() {
            *v = v.clone() / pv.clone();
        }
        let prow = t[pivot_row].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == pivot_row || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
        pivot_row += 1;
    }
    let consistency = S::tol(Tolerances::DEFAULT.feas);
    if t[s..].iter().any(|row| row[s].abs() > consistency) {
        return None;
    }
    Some((0..s).map(|i| t[i][s].clone()).collect())
}
