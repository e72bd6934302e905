//! Finitely supported probability measures on point clouds in `R^d`.

use std::cmp::Ordering;


use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar, Tolerances};

/// A point in `R^d`.
pub type Point<S> = Vec<S>;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 16;

/// Lexicographic order on coordinates.
pub fn cmp_points<S: Scalar>(a: &[S], b: &[S]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Max-norm closeness within the geometric tolerance (exact equality when rational).
pub fn same_point<S: Scalar>(a: &[S], b: &[S]) -> bool {
    a.len() == b.len()
        && a
            .iter()
            .zip(b)
            .all(|(x, y)| S::near(x, y, Tolerances::DEFAULT.geom))
}

pub fn squared_distance<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| {
        let d = x.clone() - y.clone();
        acc + d.clone() * d
    })
}

/// Map from the atoms of a measure (by canonical index) to indices of a
/// target point list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexMap(pub Vec<usize>);

impl IndexMap {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn constant(n: usize, target: usize) -> Self {
        Self(vec![target; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// Probability measure `Σ wᵢ δ_{xᵢ}` in canonical form.
///
/// Atoms are sorted lexicographically, pairwise distinct and carry strictly
/// positive weights that sum to one, so two equal measures have identical
/// representations.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<S> {
    dim: usize,
    atoms: Vec<Point<S>>,
    weights: Vec<S>,
}

impl<S: Scalar> DiscreteMeasure<S> {
    /// Builds a canonical measure. Weights must already sum to one.
    pub fn new(points: Vec<Point<S>>, weights: Vec<S>) -> Result<Self> {
        Self::build(points, weights, false)
    }

    /// Like [`DiscreteMeasure::new`] but rescales the weights to unit mass.
    pub fn normalized(points: Vec<Point<S>>, weights: Vec<S>) -> Result<Self> {
        Self::build(points, weights, true)
    }

    pub fn dirac(point: Point<S>) -> Result<Self> {
        Self::new(vec![point], vec![S::one()])
    }

    pub fn uniform(points: Vec<Point<S>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let w = S::one() / S::of_usize(points.len());
        let weights = vec![w; points.len()];
        Self::normalized(points, weights)
    }

    fn build(points: Vec<Point<S>>, weights: Vec<S>, normalize: bool) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::DimensionMismatch("points must have dimension >= 1".into()));
        }
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge(dim));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "atom {i} has dimension {} but atom 0 has {dim}",
                    p.len()
                )));
            }
            if !p.iter().all(Scalar::is_finite_value) {
                return Err(Error::NonFinite(format!("coordinates of atom {i}")));
            }
        }
        for (i, w) in weights.iter().enumerate() {
            if !w.is_finite_value() {
                return Err(Error::NonFinite(format!("weight {i}")));
            }
            if w.lt_zero() {
                return Err(Error::NegativeWeight {
                    index: i,
                    weight: w.to_string(),
                });
            }
        }
        let total = weights.iter().fold(S::zero(), |acc, w| acc + w.clone());
        let weights = if normalize {
            if !total.gt_zero() {
                return Err(Error::EmptyMeasure);
            }
            weights.into_iter().map(|w| w / total.clone()).collect()
        } else {
            if !S::near(&total, &S::one(), Tolerances::DEFAULT.mass) {
                return Err(Error::MassNotOne {
                    total: total.to_string(),
                });
            }
            weights
        };

        let mut merged: Vec<(Point<S>, S)> = Vec::with_capacity(points.len());
        for (p, w) in points.into_iter().zip(weights) {
            if w.is_zero() {
                continue;
            }
            match merged.iter_mut().find(|(q, _)| same_point(q, &p)) {
                Some((_, acc)) => *acc = acc.clone() + w,
                None => merged.push((p.into_iter().map(Scalar::canonical).collect(), w)),
            }
        }
        if merged.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        merged.sort_by(|a, b| cmp_points(&a.0, &b.0));
        let (atoms, weights) = merged.into_iter().unzip();
        Ok(Self { dim, atoms, weights })
    }

    pub fn mode(&self) -> Mode {
        S::MODE
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Point<S>] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &[S] {
        &self.atoms[i]
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &S {
        &self.weights[i]
    }

    pub fn total_mass(&self) -> S {
        self.weights.iter().fold(S::zero(), |acc, w| acc + w.clone())
    }

    /// Canonical index of `point` in the support, if present.
    pub fn index_of(&self, point: &[S]) -> Option<usize> {
        self.atoms.iter().position(|a| same_point(a, point))
    }

    pub fn is_dirac(&self) -> bool {
        self.atoms.len() == 1
    }

    /// Weighted mean `Σ wᵢ xᵢ`.
    pub fn barycenter(&self) -> Point<S> {
        let mut acc = vec![S::zero(); self.dim];
        for (x, w) in self.atoms.iter().zip(&self.weights) {
            for (a, c) in acc.iter_mut().zip(x) {
                *a = a.clone() + w.clone() * c.clone();
            }
        }
        acc.into_iter().map(Scalar::canonical).collect()
    }

    /// Push-forward by a map sending atom `i` to the point `images[i]`.
    pub fn pushforward_points(&self, images: &[Point<S>]) -> Result<Self> {
        if images.len() != self.len() {
            return Err(Error::IncompleteAssignment {
                expected: self.len(),
                got: images.len(),
            });
        }
        Self::new(images.to_vec(), self.weights.clone())
    }

    /// Push-forward `t_# m` where atom `i` goes to `targets[t(i)]`.
    pub fn pushforward(&self, map: &IndexMap, targets: &[Point<S>]) -> Result<Self> {
        if map.len() != self.len() {
            return Err(Error::IncompleteAssignment {
                expected: self.len(),
                got: map.len(),
            });
        }
        let images = map
            .as_slice()
            .iter()
            .map(|&j| {
                targets.get(j).cloned().ok_or(Error::IndexOutOfRange {
                    index: j,
                    len: targets.len(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        self.pushforward_points(&images)
    }

    /// Mixture `Σ αₖ λₖ` of measures on a common space.
    pub fn mixture<'a>(components: impl IntoIterator<Item = (S, &'a DiscreteMeasure<S>)>) -> Result<Self> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut dim = None;
        for (alpha, m) in components {
            if *dim.get_or_insert(m.dim) != m.dim {
                return Err(Error::DimensionMismatch("mixture components live in different dimensions".into()));
            }
            for (x, w) in m.atoms.iter().zip(&m.weights) {
                points.push(x.clone());
                weights.push(alpha.clone() * w.clone());
            }
        }
        Self::new(points, weights)
    }

    /// Equality within float tolerances (same support up to `geom`, weights up to `mass`).
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self.dim == other.dim
            && self
                .atoms
                .iter()
                .zip(&other.atoms)
                .all(|(a, b)| same_point(a, b))
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| S::near(a, b, Tolerances::DEFAULT.mass))
    }

    /// Converts to float mode.
    pub fn to_f64(&self) -> DiscreteMeasure<f64> {
        DiscreteMeasure {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|p| p.iter().map(Scalar::to_f64_lossy).collect())
                .collect(),
            weights: self.weights.iter().map(Scalar::to_f64_lossy).collect(),
        }
    }

    /// Total order used to sort meta-measure atoms: support size, then
    /// atoms, then weights.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| {
                self.atoms
                    .iter()
                    .zip(&other.atoms)
                    .map(|(a, b)| cmp_points(a, b))
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn q(p: i64, d: i64) -> Rational {
        ratio(p, d)
    }

    fn pt(xs: &[i64]) -> Point<Rational> {
        xs.iter().map(|&x| q(x, 1)).collect()
    }

    #[test]
    fn uniform_three_atoms() {
        let m = DiscreteMeasure::new(
            vec![pt(&[0]), pt(&[1]), pt(&[2])],
            vec![q(1, 3), q(1, 3), q(1, 3)],
        )
        .unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.total_mass(), q(1, 1));
    }

    #[test]
    fn duplicates_merge() {
        let m = DiscreteMeasure::new(vec![vec![2.0, 1.0], vec![2.0, 1.0]], vec![0.5, 0.5]).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.weights(), &[1.0]);
        let near = DiscreteMeasure::new(vec![vec![1.0], vec![1.0 + 1e-13]], vec![0.5, 0.5]).unwrap();
        assert_eq!(near.len(), 1);
    }

    #[test]
    fn mass_not_one() {
        let err = DiscreteMeasure::new(vec![vec![0.0], vec![1.0]], vec![0.2, 0.7]).unwrap_err();
        assert!(matches!(err, Error::MassNotOne { .. }));
        let ok = DiscreteMeasure::normalized(vec![vec![0.0], vec![1.0]], vec![0.2, 0.7]).unwrap();
        assert!((ok.total_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            DiscreteMeasure::new(vec![vec![0.0], vec![1.0, 2.0]], vec![0.5, 0.5]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            DiscreteMeasure::new(vec![vec![0.0], vec![1.0]], vec![1.5, -0.5]),
            Err(Error::NegativeWeight { index: 1, .. })
        ));
        assert!(matches!(
            DiscreteMeasure::<f64>::new(vec![], vec![]),
            Err(Error::EmptyMeasure)
        ));
        assert!(matches!(
            DiscreteMeasure::new(vec![vec![0.0; 17]], vec![1.0]),
            Err(Error::DimensionTooLarge(17))
        ));
        assert!(matches!(
            DiscreteMeasure::new(vec![vec![f64::NAN]], vec![1.0]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn zero_weights_dropped_and_sorted() {
        let m = DiscreteMeasure::new(
            vec![pt(&[3, 0]), pt(&[1, 5]), pt(&[1, 2])],
            vec![q(0, 1), q(1, 2), q(1, 2)],
        )
        .unwrap();
        assert_eq!(m.atoms(), &[pt(&[1, 2]), pt(&[1, 5])]);
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let m = DiscreteMeasure::new(
            vec![vec![0.3, -0.0], vec![-1.0, 2.0], vec![0.3, 0.0]],
            vec![0.25, 0.5, 0.25],
        )
        .unwrap();
        let again = DiscreteMeasure::new(m.atoms().to_vec(), m.weights().to_vec()).unwrap();
        assert_eq!(m, again);
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn barycenters() {
        let d = DiscreteMeasure::dirac(vec![1.5, -2.0]).unwrap();
        assert_eq!(d.barycenter(), vec![1.5, -2.0]);
        let sym = DiscreteMeasure::new(vec![pt(&[1, 0]), pt(&[-1, 0])], vec![q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(sym.barycenter(), pt(&[0, 0]));
        // 1/6·(0,0) + 5/6·(6,0): oracle sum 0 + 30/6 = 5.
        let m = DiscreteMeasure::new(vec![pt(&[0, 0]), pt(&[6, 0])], vec![q(1, 6), q(5, 6)]).unwrap();
        let oracle: Rational = q(1, 6) * q(0, 1) + q(5, 6) * q(6, 1);
        assert_eq!(m.barycenter(), vec![oracle, q(0, 1)]);
        assert_eq!(m.barycenter(), pt(&[5, 0]));
    }

    #[test]
    fn pushforwards() {
        let mu = DiscreteMeasure::uniform(vec![pt(&[0]), pt(&[1]), pt(&[2])]).unwrap();
        let ys = vec![pt(&[0]), pt(&[1])];
        assert_eq!(mu.pushforward(&IndexMap::identity(3), mu.atoms()).unwrap(), mu);
        let constant = mu.pushforward(&IndexMap::constant(3, 1), &ys).unwrap();
        assert_eq!(constant, DiscreteMeasure::dirac(pt(&[1])).unwrap());
        let t = IndexMap(vec![0, 1, 1]);
        let image = mu.pushforward(&t, &ys).unwrap();
        // Oracle: weight of y₁ = 1/3, y₂ = 1/3 + 1/3.
        assert_eq!(image.weights(), &[q(1, 3), q(1, 3) + q(1, 3)]);
        assert!(matches!(
            mu.pushforward(&IndexMap(vec![0, 1]), &ys),
            Err(Error::IncompleteAssignment { expected: 3, got: 2 })
        ));
        assert!(matches!(
            mu.pushforward(&IndexMap(vec![0, 1, 7]), &ys),
            Err(Error::IndexOutOfRange { index: 7, .. })
        ));
    }

    #[test]
    fn mixture_of_diracs() {
        let a = DiscreteMeasure::dirac(pt(&[0])).unwrap();
        let b = DiscreteMeasure::dirac(pt(&[4])).unwrap();
        let m = DiscreteMeasure::mixture([(q(1, 2), &a), (q(1, 2), &b)]).unwrap();
        assert_eq!(m.weights(), &[q(1, 2), q(1, 2)]);
    }
}
