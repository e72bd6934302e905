//! Hand-written reference arithmetic shared by the integration tests.
//!
//! Nothing here calls the solver, the cost module or the class module; the
//! formulas are written out directly so they can serve as oracles.

#![allow(dead_code)]

use num_traits::Zero;
use otclass::measure::DiscreteMeasure;
use otclass::scalar::{ratio, Rational};

pub fn r(p: i64, q: i64) -> Rational {
    ratio(p, q)
}

pub fn line(xs: &[i64]) -> Vec<Vec<Rational>> {
    xs.iter().map(|&x| vec![r(x, 1)]).collect()
}

pub fn sq_dist(x: &[Rational], y: &[Rational]) -> Rational {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

pub fn inner(x: &[Rational], y: &[Rational]) -> Rational {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `Σⱼ λⱼ · c(x, yⱼ)` with `c` given as a closure on points.
pub fn lifted(c: impl Fn(&[Rational], &[Rational]) -> Rational, x: &[Rational], lambda: &DiscreteMeasure<Rational>) -> Rational {
    lambda
        .atoms()
        .iter()
        .zip(lambda.weights())
        .fold(Rational::zero(), |acc, (y, w)| acc + w * c(x, y))
}

/// `Σᵢ μᵢ · cost[i][t(i)]`.
pub fn map_cost(weights: &[Rational], t: &[usize], cost: &[Vec<Rational>]) -> Rational {
    t.iter()
        .enumerate()
        .fold(Rational::zero(), |acc, (i, &k)| acc + &weights[i] * &cost[i][k])
}

/// Matrix whose rows are `p/q` pairs.
pub fn rows(m: &[&[(i64, i64)]]) -> Vec<Vec<Rational>> {
    m.iter().map(|row| row.iter().map(|&(p, q)| r(p, q)).collect()).collect()
}

/// Transportation optimum through the dense tableau simplex, a code path
/// separate from the network simplex.
pub fn dense_transport<S: otclass::scalar::Scalar>(supply: &[S], demand: &[S], cost: &[Vec<S>]) -> S {
    use otclass::matrix::Matrix;
    let (m, n) = (supply.len(), demand.len());
    let a = Matrix::from_fn(m + n, m * n, |row, var| {
        let (i, j) = (var / n, var % n);
        if (row < m && row == i) || (row >= m && row - m == j) {
            S::one()
        } else {
            S::zero()
        }
    });
    let objective: Vec<S> = cost.iter().flatten().cloned().collect();
    let b: Vec<S> = supply.iter().chain(demand).cloned().collect();
    otclass::solver::solve_lp_dense(&objective, &a, &b).expect("balanced instance").objective
}
