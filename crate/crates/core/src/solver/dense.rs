//! Two-phase tableau simplex for small equality-form LPs:
//! `min cᵀx  s.t.  A x = b,  x ≥ 0`.


use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub const MAX_DENSE_VARS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<S> {
    pub x: Vec<S>,
    pub objective: S,
    pub iterations: usize,
}

/// Solves `min cᵀx` subject to `A x = b`, `x ≥ 0` with Bland's rule.
pub fn solve_lp_dense<S: Scalar>(objective: &[S], a_eq: &Matrix<S>, b_eq: &[S]) -> Result<LpSolution<S>> {
    let k = objective.len();
    let r = a_eq.rows();
    if k > MAX_DENSE_VARS {
        return Err(Error::SizeLimitExceeded(format!("{k} variables (max {MAX_DENSE_VARS})")));
    }
    if a_eq.cols() != k || b_eq.len() != r {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{}, c has {k} entries, b has {}",
            r,
            a_eq.cols(),
            b_eq.len()
        )));
    }
    let mut tab = Tableau::new(a_eq, b_eq);
    let cap = 50 * (r + k + 1) * (r + k + 1);

    // Phase 1: minimise the sum of artificials.
    let phase1: Vec<S> = (0..k + r).map(|j| if j < k { S::zero() } else { S::one() }).collect();
    tab.run(&phase1, k + r, cap)?;
    if tab.value(&phase1) > S::tol(1e-9) {
        return Err(Error::Infeasible("equality constraints cannot be met with x >= 0".into()));
    }
    tab.drive_out_artificials(k);

    // Phase 2 over structural columns only.
    let mut phase2 = objective.to_vec();
    phase2.extend(std::iter::repeat_n(S::zero(), r));
    tab.run(&phase2, k, cap)?;

    let mut x = vec![S::zero(); k];
    for (row, &col) in tab.basis.iter().enumerate() {
        if col < k && tab.active[row] {
            x[col] = tab.rhs(row).clone().canonical();
        }
    }
    let value = x
        .iter()
        .zip(objective)
        .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
    Ok(LpSolution {
        x,
        objective: value,
        iterations: tab.iterations,
    })
}

struct Tableau<S> {
    /// `r × (k + r + 1)`; last column is the right-hand side.
    t: Vec<Vec<S>>,
    basis: Vec<usize>,
    active: Vec<bool>,
    width: usize,
    iterations: usize,
    eps: S,
}

impl<S: Scalar> Tableau<S> {
    fn new(a: &Matrix<S>, b: &[S]) -> Self {
        let (r, k) = (a.rows(), a.cols());
        let width = k + r;
        let t = (0..r)
            .map(|i| {
                let flip = b[i].lt_zero();
                let sign = |v: S| if flip { -v } else { v };
                let mut row: Vec<S> = a.row(i).iter().cloned().map(sign).collect();
                row.extend((0..r).map(|q| if q == i { S::one() } else { S::zero() }));
                row.push(sign(b[i].clone()));
                row
            })
            .collect();
        Self {
            t,
            basis: (k..k + r).collect(),
            active: vec![true; r],
            width,
            iterations: 0,
            eps: S::tol(1e-11),
        }
    }

    fn rhs(&self, row: usize) -> &S {
        &self.t[row][self.width]
    }

    fn value(&self, cost: &[S]) -> S {
        self.basis
            .iter()
            .enumerate()
            .filter(|(row, _)| self.active[*row])
            .fold(S::zero(), |acc, (row, &col)| acc + cost[col].clone() * self.rhs(row).clone())
    }

    fn reduced_cost(&self, cost: &[S], col: usize) -> S {
        self.basis
            .iter()
            .enumerate()
            .filter(|(row, _)| self.active[*row])
            .fold(cost[col].clone(), |acc, (row, &b)| {
                acc - cost[b].clone() * self.t[row][col].clone()
            })
    }

    /// Primal simplex restricted to columns `< allowed`.
    fn run(&mut self, cost: &[S], allowed: usize, cap: usize) -> Result<()> {
        loop {
            let threshold = -self.eps.clone();
            let entering = (0..allowed)
                .filter(|c| !self.basis.contains(c))
                .find(|&c| self.reduced_cost(cost, c) < threshold);
            let Some(col) = entering else {
                return Ok(());
            };
            let mut best: Option<(usize, S)> = None;
            for row in 0..self.t.len() {
                if !self.active[row] || self.t[row][col] <= self.eps {
                    continue;
                }
                let ratio = self.rhs(row).clone() / self.t[row][col].clone();
                let better = match &best {
                    None => true,
                    Some((brow, bratio)) => {
                        ratio < *bratio || (ratio == *bratio && self.basis[row] < self.basis[*brow])
                    }
                };
                if better {
                    best = Some((row, ratio));
                }
            }
            let Some((row, _)) = best else {
                return Err(Error::Unbounded);
            };
            if self.iterations >= cap {
                return Err(Error::NumericalFailure(format!("dense simplex hit {cap} iterations")));
            }
            self.pivot(row, col);
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        self.iterations += 1;
        let p = self.t[row][col].clone();
        for v in self.t[row].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.t[row].clone();
        for (i, other) in self.t.iter_mut().enumerate() {
            if i == row || other[col].is_zero() {
                continue;
            }
            let f = other[col].clone();
            for (v, pv) in other.iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
        self.basis[row] = col;
    }

    /// Pivots basic artificials out; rows with no structural entry are redundant.
    fn drive_out_artificials(&mut self, k: usize) {
        for row in 0..self.t.len() {
            if self.basis[row] < k || !self.active[row] {
                continue;
            }
            match (0..k).find(|&c| self.t[row][c].abs() > self.eps && !self.basis.contains(&c)) {
                Some(col) => self.pivot(row, col),
                None => self.active[row] = false,
            }
        }
    }
}
