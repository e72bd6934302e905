//! Disintegration of plans into conditional measures `x ↦ ν_x` and the
//! transport-class relation induced by `f_# μ`.

use crate::error::{Error, Result};
use crate::kantorovich::TransportPlan;
use crate::matrix::Matrix;
use crate::measure::{same_point, DiscreteMeasure, IndexMap, Point};
use crate::scalar::{Mode, Scalar, Tolerances};
use crate::transport_class::{meta_wasserstein, MetaMeasure};

/// One conditional measure on Y per atom of the base measure.
#[derive(Debug, Clone, PartialEq)]
pub struct DisintegrationMap<S> {
    base: DiscreteMeasure<S>,
    conditionals: Vec<DiscreteMeasure<S>>,
}

impl<S: Scalar> DisintegrationMap<S> {
    pub fn new(base: DiscreteMeasure<S>, conditionals: Vec<DiscreteMeasure<S>>) -> Result<Self> {
        if conditionals.len() != base.len() {
            return Err(Error::IncompleteAssignment {
                expected: base.len(),
                got: conditionals.len(),
            });
        }
        if let Some(c) = conditionals.windows(2).find(|w| w[0].dim() != w[1].dim()) {
            return Err(Error::DimensionMismatch(format!(
                "conditionals live in dimensions {} and {}",
                c[0].dim(),
                c[1].dim()
            )));
        }
        Ok(Self { base, conditionals })
    }

    pub fn base(&self) -> &DiscreteMeasure<S> {
        &self.base
    }

    pub fn conditionals(&self) -> &[DiscreteMeasure<S>] {
        &self.conditionals
    }

    pub fn conditional(&self, i: usize) -> &DiscreteMeasure<S> {
        &self.conditionals[i]
    }
}

/// Rows of the plan divided by the source weights.
///
/// In float mode entries at or below `ε_feas` are dropped before renormalising.
pub fn disintegrate<S: Scalar>(plan: &TransportPlan<S>) -> Result<DisintegrationMap<S>> {
    let source = plan.source();
    let target = plan.target();
    let drop = S::tol(Tolerances::DEFAULT.feas);
    let conditionals = (0..source.len())
        .map(|i| {
            let w = source.weight(i);
            let (points, weights): (Vec<Point<S>>, Vec<S>) = plan
                .matrix()
                .row(i)
                .iter()
                .enumerate()
                .filter(|(_, v)| match S::MODE {
                    Mode::Rational => v.gt_zero(),
                    Mode::Float => **v > drop,
                })
                .map(|(j, v)| (target.atom(j).to_vec(), v.clone() / w.clone()))
                .unzip();
            match S::MODE {
                Mode::Rational => DiscreteMeasure::new(points, weights),
                Mode::Float => DiscreteMeasure::normalized(points, weights),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    DisintegrationMap::new(source.clone(), conditionals)
}

/// `γ = ν_x ⊗ μ`: `γ[i][j] = μᵢ · f(xᵢ)(yⱼ)` over the union of conditional supports.
pub fn recombine<S: Scalar>(f: &DisintegrationMap<S>, mu: &DiscreteMeasure<S>) -> Result<TransportPlan<S>> {
    if !same_base(f.base(), mu) {
        return Err(Error::BaseMismatch);
    }
    let target = DiscreteMeasure::mixture(mu.weights().iter().cloned().zip(f.conditionals()))?;
    let mut matrix: Matrix<S> = Matrix::zeros(mu.len(), target.len());
    for (i, cond) in f.conditionals().iter().enumerate() {
        for (y, w) in cond.atoms().iter().zip(cond.weights()) {
            let j = target
                .index_of(y)
                .ok_or_else(|| Error::SupportMismatch(format!("conditional atom {y:?} lost in mixture")))?;
            matrix[(i, j)] = matrix[(i, j)].clone() + mu.weight(i).clone() * w.clone();
        }
    }
    TransportPlan::new(mu.clone(), target, matrix)
}

fn same_base<S: Scalar>(a: &DiscreteMeasure<S>, b: &DiscreteMeasure<S>) -> bool {
    match S::MODE {
        Mode::Rational => a == b,
        Mode::Float => a.approx_eq(b),
    }
}

/// `f_# μ`: conditionals weighted by their base atoms, equal ones merged.
pub fn pushforward_meta<S: Scalar>(f: &DisintegrationMap<S>) -> Result<MetaMeasure<S>> {
    MetaMeasure::new(f.conditionals().to_vec(), f.base().weights().to_vec())
}

/// Whether two plans on one source induce the same `f_# μ` (nested `W₁ ≤ ε_meta`).
pub fn classes_equal<S: Scalar>(gamma: &TransportPlan<S>, eta: &TransportPlan<S>) -> Result<bool> {
    classes_equal_within(gamma, eta, Tolerances::DEFAULT.meta)
}

/// [`classes_equal`] with an explicit meta tolerance (float mode only).
pub fn classes_equal_within<S: Scalar>(gamma: &TransportPlan<S>, eta: &TransportPlan<S>, eps_meta: f64) -> Result<bool> {
    Ok(class_distance(gamma, eta)? <= S::tol(eps_meta))
}

/// Nested `W₁` between the push-forwards of two plans' disintegrations.
pub fn class_distance<S: Scalar>(gamma: &TransportPlan<S>, eta: &TransportPlan<S>) -> Result<S> {
    if !same_base(gamma.source(), eta.source()) {
        return Err(Error::SourceMismatch);
    }
    let a = pushforward_meta(&disintegrate(gamma)?)?;
    let b = pushforward_meta(&disintegrate(eta)?)?;
    meta_wasserstein(&a, &b)
}

/// `π²_# γ`.
pub fn second_marginal<S: Scalar>(plan: &TransportPlan<S>) -> Result<DiscreteMeasure<S>> {
    DiscreteMeasure::normalized(plan.target().atoms().to_vec(), plan.matrix().col_sums())
}

/// Whether a plan is induced by a map, read off its conditionals.
#[derive(Debug, Clone, PartialEq)]
pub struct MapRecovery {
    /// Target index per source atom, when every conditional is a Dirac.
    pub map: Option<IndexMap>,
    /// Source atoms whose conditional is not a Dirac.
    pub splitting_atoms: Vec<usize>,
    /// Each recovered `t(xᵢ)` equals the barycenter of `f(xᵢ)`.
    pub barycenter_identity: bool,
}

pub fn map_from_class_plan<S: Scalar>(gamma: &TransportPlan<S>) -> Result<MapRecovery> {
    let f = disintegrate(gamma)?;
    let mut splitting_atoms = Vec::new();
    let mut targets = Vec::with_capacity(f.conditionals().len());
    let mut barycenter_identity = true;
    for (i, cond) in f.conditionals().iter().enumerate() {
        if !cond.is_dirac() {
            splitting_atoms.push(i);
            continue;
        }
        let y = cond.atom(0);
        let j = gamma
            .target()
            .index_of(y)
            .ok_or_else(|| Error::SupportMismatch(format!("conditional atom {y:?} not in target")))?;
        barycenter_identity &= same_point(&cond.barycenter(), gamma.target().atom(j));
        targets.push(j);
    }
    Ok(if splitting_atoms.is_empty() {
        MapRecovery {
            map: Some(IndexMap(targets)),
            splitting_atoms,
            barycenter_identity,
        }
    } else {
        MapRecovery {
            map: None,
            splitting_atoms,
            barycenter_identity,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn pt(x: i64) -> Point<Rational> {
        vec![ratio(x, 1)]
    }

    fn mu() -> DiscreteMeasure<Rational> {
        DiscreteMeasure::uniform(vec![pt(0), pt(1), pt(2)]).unwrap()
    }

    fn nu() -> DiscreteMeasure<Rational> {
        DiscreteMeasure::new(vec![pt(0), pt(1)], vec![ratio(1, 6), ratio(5, 6)]).unwrap()
    }

    fn plan(rows: [[(i64, i64); 2]; 3]) -> TransportPlan<Rational> {
        let m = rows.iter().map(|r| r.iter().map(|&(p, q)| ratio(p, q)).collect()).collect();
        TransportPlan::new(mu(), nu(), Matrix::from_rows(m).unwrap()).unwrap()
    }

    fn split_at_first() -> TransportPlan<Rational> {
        plan([[(1, 6), (1, 6)], [(0, 1), (1, 3)], [(0, 1), (1, 3)]])
    }

    fn split_at_second() -> TransportPlan<Rational> {
        plan([[(0, 1), (1, 3)], [(1, 6), (1, 6)], [(0, 1), (1, 3)]])
    }

    fn two_splits() -> TransportPlan<Rational> {
        plan([[(3, 30), (7, 30)], [(2, 30), (8, 30)], [(0, 1), (1, 3)]])
    }

    fn two_other_splits() -> TransportPlan<Rational> {
        plan([[(1, 30), (9, 30)], [(4, 30), (6, 30)], [(0, 1), (1, 3)]])
    }

    #[test]
    fn conditionals_of_single_split() {
        let f = disintegrate(&split_at_first()).unwrap();
        assert_eq!(f.conditional(0), &DiscreteMeasure::uniform(vec![pt(0), pt(1)]).unwrap());
        assert_eq!(f.conditional(1), &DiscreteMeasure::dirac(pt(1)).unwrap());
        assert_eq!(f.conditional(2), &DiscreteMeasure::dirac(pt(1)).unwrap());
        let meta = pushforward_meta(&f).unwrap();
        assert_eq!(meta.len(), 2);
        assert_eq!(meta.weights(), &[ratio(2, 3), ratio(1, 3)]);
    }

    #[test]
    fn class_relations_between_split_plans() {
        assert!(classes_equal(&split_at_first(), &split_at_second()).unwrap());
        assert!(!classes_equal(&split_at_first(), &two_splits()).unwrap());
        assert!(!classes_equal(&two_splits(), &two_other_splits()).unwrap());
        for p in [split_at_first(), split_at_second(), two_splits(), two_other_splits()] {
            assert_eq!(second_marginal(&p).unwrap(), nu());
        }
    }

    #[test]
    fn map_plans_have_dirac_conditionals() {
        let t = IndexMap(vec![0, 1, 1]);
        let target = DiscreteMeasure::new(vec![pt(0), pt(1)], vec![ratio(1, 3), ratio(2, 3)]).unwrap();
        let p = TransportPlan::from_map(mu(), target, &t).unwrap();
        let f = disintegrate(&p).unwrap();
        assert!(f.conditionals().iter().all(DiscreteMeasure::is_dirac));
        let r = map_from_class_plan(&p).unwrap();
        assert_eq!(r.map, Some(t));
        assert!(r.barycenter_identity);
        assert_eq!(recombine(&f, &mu()).unwrap(), p);
    }

    #[test]
    fn product_plan_has_constant_conditionals() {
        let m = Matrix::from_fn(3, 2, |_, j| ratio(1, 3) * nu().weight(j).clone());
        let p = TransportPlan::new(mu(), nu(), m).unwrap();
        let f = disintegrate(&p).unwrap();
        assert!(f.conditionals().iter().all(|c| *c == nu()));
        assert_eq!(pushforward_meta(&f).unwrap(), MetaMeasure::dirac(nu()));
    }

    #[test]
    fn splitting_atom_reported() {
        let r = map_from_class_plan(&split_at_first()).unwrap();
        assert_eq!(r.map, None);
        assert_eq!(r.splitting_atoms, vec![0]);
    }

    #[test]
    fn negligible_mass_is_dropped_in_float_mode() {
        let mu = DiscreteMeasure::uniform(vec![vec![0.0], vec![1.0]]).unwrap();
        let nu = DiscreteMeasure::uniform(vec![vec![0.0], vec![5.0]]).unwrap();
        let m = Matrix::from_rows(vec![vec![0.5 - 1e-13, 1e-13], vec![1e-13, 0.5 - 1e-13]]).unwrap();
        let p = TransportPlan::new(mu, nu, m).unwrap();
        let r = map_from_class_plan(&p).unwrap();
        assert_eq!(r.map, Some(IndexMap(vec![0, 1])));
        assert!(r.barycenter_identity);
    }

    #[test]
    fn mismatched_bases_rejected() {
        let f = disintegrate(&split_at_first()).unwrap();
        let other = DiscreteMeasure::uniform(vec![pt(5), pt(6), pt(7)]).unwrap();
        assert!(matches!(recombine(&f, &other), Err(Error::BaseMismatch)));
        let q = TransportPlan::new(
            other.clone(),
            nu(),
            Matrix::from_fn(3, 2, |_, j| ratio(1, 3) * nu().weight(j).clone()),
        )
        .unwrap();
        assert!(matches!(classes_equal(&split_at_first(), &q), Err(Error::SourceMismatch)));
    }
}
