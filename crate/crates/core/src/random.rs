//! Seeded generators for random instances used by the `check` suites,
//! examples and tests.
//!
//! Coordinates are integers and weights are ratios of small integers, so the
//! same draw is exact in rational mode and well conditioned in float mode.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cost::CostSpec;
use crate::disintegration::{recombine, DisintegrationMap};
use crate::kantorovich::TransportPlan;
use crate::measure::{DiscreteMeasure, IndexMap, Point};
use crate::scalar::Scalar;
use crate::transport_class::MetaMeasure;

/// `n` positive weights summing to one, each proportional to a draw in `1..=9`.
pub fn weights<S: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<S> {
    let raw: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
    let total = S::of_usize(raw.iter().sum());
    raw.into_iter().map(|w| S::of_usize(w) / total.clone()).collect()
}

/// `n` distinct integer points in `[-span, span]^dim`.
///
/// Panics if the box holds fewer than `n` points.
pub fn points<S: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize, dim: usize, span: i64) -> Vec<Point<S>> {
    let side = (2 * span + 1) as u128;
    assert!(
        side.checked_pow(dim as u32).is_none_or(|cap| cap >= n as u128),
        "box too small for {n} distinct points"
    );
    let mut out: Vec<Vec<i64>> = Vec::with_capacity(n);
    while out.len() < n {
        let p: Vec<i64> = (0..dim).map(|_| rng.gen_range(-span..=span)).collect();
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out.into_iter()
        .map(|p| p.into_iter().map(|x| S::from_i64(x).expect("small integer")).collect())
        .collect()
}

/// Random measure on `n` distinct grid points.
pub fn measure<S: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize, dim: usize, span: i64) -> DiscreteMeasure<S> {
    let pts = points(rng, n, dim, span);
    let w = weights(rng, n);
    DiscreteMeasure::normalized(pts, w).expect("generated measure is valid")
}

/// Uniform measure on `n` distinct grid points.
pub fn uniform<S: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize, dim: usize, span: i64) -> DiscreteMeasure<S> {
    DiscreteMeasure::uniform(points(rng, n, dim, span)).expect("generated measure is valid")
}

/// `m × n` cost matrix with integer entries in `0..=max`.
pub fn cost_matrix<S: Scalar, R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize, max: i64) -> CostSpec<S> {
    let rows = (0..m)
        .map(|_| (0..n).map(|_| S::from_i64(rng.gen_range(0..=max)).expect("small integer")).collect())
        .collect();
    CostSpec::matrix(rows).expect("nonnegative entries")
}

/// Uniform index map into `0..n`.
pub fn index_map<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> IndexMap {
    IndexMap((0..m).map(|_| rng.gen_range(0..n)).collect())
}

/// Random conditional for each atom of `mu` on random subsets of `targets`,
/// recombined into a plan.
pub fn plan<S: Scalar, R: Rng + ?Sized>(rng: &mut R, mu: &DiscreteMeasure<S>, targets: &[Point<S>]) -> TransportPlan<S> {
    let conditionals = (0..mu.len()).map(|_| conditional(rng, targets)).collect();
    let f = DisintegrationMap::new(mu.clone(), conditionals).expect("one conditional per atom");
    recombine(&f, mu).expect("base matches")
}

/// Random measure supported on a nonempty subset of `targets`.
pub fn conditional<S: Scalar, R: Rng + ?Sized>(rng: &mut R, targets: &[Point<S>]) -> DiscreteMeasure<S> {
    let k = rng.gen_range(1..=targets.len());
    let chosen: Vec<Point<S>> = targets.choose_multiple(rng, k).cloned().collect();
    let w = weights(rng, k);
    DiscreteMeasure::normalized(chosen, w).expect("generated measure is valid")
}

/// Meta-measure with `k` random atoms of at most `max_points` points each.
pub fn meta_measure<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    k: usize,
    max_points: usize,
    dim: usize,
    span: i64,
) -> MetaMeasure<S> {
    let atoms = (0..k)
        .map(|_| {
            let n = rng.gen_range(1..=max_points);
            measure(rng, n, dim, span)
        })
        .collect();
    MetaMeasure::normalized(atoms, weights(rng, k)).expect("generated meta-measure is valid")
}
