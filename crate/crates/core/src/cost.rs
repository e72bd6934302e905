//! Ground cost functions `c(x, y)`.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::measure::{squared_distance, Point};
use crate::scalar::Scalar;

/// Argument of a cost evaluation.
///
/// Geometric variants read the point, tabulated variants read the index;
/// [`Site::Atom`] carries both.
#[derive(Debug)]
pub enum Site<'a, S> {
    Index(usize),
    Point(&'a [S]),
    Atom(usize, &'a [S]),
}

impl<S> Clone for Site<'_, S> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<S> Copy for Site<'_, S> {}

impl<'a, S> Site<'a, S> {
    fn index(&self) -> Option<usize> {
        match *self {
            Site::Index(i) | Site::Atom(i, _) => Some(i),
            Site::Point(_) => None,
        }
    }

    fn point(&self) -> Option<&'a [S]> {
        match *self {
            Site::Point(p) | Site::Atom(_, p) => Some(p),
            Site::Index(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CostSpec<S> {
    /// Tabulated `m × n` nonnegative costs, indexed by canonical atom order.
    Matrix(Matrix<S>),
    /// `|x − y|^p`, `p ≥ 1`.
    Euclidean { p: f64 },
    /// `|x − y|²`.
    SquaredEuclidean,
    /// `⟨x, y⟩`; the only built-in that may be negative.
    InnerProduct,
    /// `a(x)·b(y)` with `a` sampled on the X-atoms and `b` on the Y-atoms.
    Separable { a: Vec<S>, b: Vec<S> },
}

impl<S: Scalar> CostSpec<S> {
    pub fn euclidean(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("euclidean cost needs p >= 1, got {p}")));
        }
        Ok(CostSpec::Euclidean { p })
    }

    /// Tabulated cost; rejects negative or non-finite entries.
    pub fn matrix(rows: Vec<Vec<S>>) -> Result<Self> {
        let m = Matrix::from_rows(rows)?;
        for (i, j, v) in m.iter() {
            if !v.is_finite_value() {
                return Err(Error::NonFinite(format!("cost matrix entry ({i}, {j})")));
            }
            if v.lt_zero() {
                return Err(Error::InvalidArgument(format!(
                    "cost matrix entry ({i}, {j}) is negative"
                )));
            }
        }
        Ok(CostSpec::Matrix(m))
    }

    pub fn separable(a: Vec<S>, b: Vec<S>) -> Result<Self> {
        if !a.iter().chain(&b).all(Scalar::is_finite_value) {
            return Err(Error::NonFinite("separable cost samples".into()));
        }
        Ok(CostSpec::Separable { a, b })
    }

    pub fn name(&self) -> &'static str {
        match self {
            CostSpec::Matrix(_) => "matrix",
            CostSpec::Euclidean { .. } => "euclidean",
            CostSpec::SquaredEuclidean => "sqeuclidean",
            CostSpec::InnerProduct => "inner",
            CostSpec::Separable { .. } => "separable",
        }
    }

    /// Whether values may be negative (exempt from `c ≥ 0`).
    pub fn is_signed(&self) -> bool {
        match self {
            CostSpec::InnerProduct => true,
            CostSpec::Separable { a, b } => a.iter().chain(b).any(|v| v.lt_zero()),
            _ => false,
        }
    }

    /// Tabulated variants are evaluated by atom index rather than by point.
    pub fn is_tabulated(&self) -> bool {
        matches!(self, CostSpec::Matrix(_) | CostSpec::Separable { .. })
    }

    pub fn eval(&self, x: Site<'_, S>, y: Site<'_, S>) -> Result<S> {
        match self {
            CostSpec::Matrix(m) => {
                let (i, j) = (need_index(x)?, need_index(y)?);
                check_range(i, m.rows())?;
                check_range(j, m.cols())?;
                Ok(m[(i, j)].clone())
            }
            CostSpec::Separable { a, b } => {
                let (i, j) = (need_index(x)?, need_index(y)?);
                check_range(i, a.len())?;
                check_range(j, b.len())?;
                Ok(a[i].clone() * b[j].clone())
            }
            CostSpec::Euclidean { p } => {
                let (x, y) = points(x, y)?;
                Ok(S::pow_half(&squared_distance(x, y), *p))
            }
            CostSpec::SquaredEuclidean => {
                let (x, y) = points(x, y)?;
                Ok(squared_distance(x, y))
            }
            CostSpec::InnerProduct => {
                let (x, y) = points(x, y)?;
                Ok(x
                    .iter()
                    .zip(y)
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
                    .canonical())
            }
        }
    }

    /// Cost table over two supports.
    pub fn table(&self, xs: &[Point<S>], ys: &[Point<S>]) -> Result<Matrix<S>> {
        match self {
            CostSpec::Matrix(m) if m.rows() != xs.len() || m.cols() != ys.len() => {
                return Err(Error::DimensionMismatch(format!(
                    "cost matrix is {}x{} but supports are {}x{}",
                    m.rows(),
                    m.cols(),
                    xs.len(),
                    ys.len()
                )))
            }
            CostSpec::Separable { a, b } if a.len() != xs.len() || b.len() != ys.len() => {
                return Err(Error::DimensionMismatch(format!(
                    "separable samples have lengths {}/{} but supports are {}/{}",
                    a.len(),
                    b.len(),
                    xs.len(),
                    ys.len()
                )))
            }
            _ => {}
        }
        Matrix::try_from_fn(xs.len(), ys.len(), |i, j| {
            self.eval(Site::Atom(i, &xs[i]), Site::Atom(j, &ys[j]))
        })
    }

    pub fn to_f64(&self) -> CostSpec<f64> {
        match self {
            CostSpec::Matrix(m) => CostSpec::Matrix(m.map(Scalar::to_f64_lossy)),
            CostSpec::Euclidean { p } => CostSpec::Euclidean { p: *p },
            CostSpec::SquaredEuclidean => CostSpec::SquaredEuclidean,
            CostSpec::InnerProduct => CostSpec::InnerProduct,
            CostSpec::Separable { a, b } => CostSpec::Separable {
                a: a.iter().map(Scalar::to_f64_lossy).collect(),
                b: b.iter().map(Scalar::to_f64_lossy).collect(),
            },
        }
    }
}

fn need_index<S>(s: Site<'_, S>) -> Result<usize> {
    s.index().ok_or_else(|| {
        Error::InvalidArgument("tabulated costs are evaluated by atom index".into())
    })
}

fn check_range(i: usize, len: usize) -> Result<()> {
    if i < len {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index: i, len })
    }
}

fn points<'a, S>(x: Site<'a, S>, y: Site<'a, S>) -> Result<(&'a [S], &'a [S])> {
    let missing = || Error::InvalidArgument("geometric costs are evaluated on points".into());
    let (x, y) = (x.point().ok_or_else(missing)?, y.point().ok_or_else(missing)?);
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "cost arguments have dimensions {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok((x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    #[test]
    fn euclidean_three_four_five() {
        let c = CostSpec::<f64>::euclidean(1.0).unwrap();
        let v = c.eval(Site::Point(&[0.0, 0.0]), Site::Point(&[3.0, 4.0])).unwrap();
        assert_eq!(v, 5.0);
        let cq = CostSpec::<Rational>::euclidean(1.0).unwrap();
        let x = [ratio(0, 1), ratio(0, 1)];
        let y = [ratio(3, 1), ratio(4, 1)];
        assert_eq!(cq.eval(Site::Point(&x), Site::Point(&y)).unwrap(), ratio(5, 1));
    }

    #[test]
    fn squared_on_diagonal_is_zero() {
        let c = CostSpec::<f64>::SquaredEuclidean;
        assert_eq!(c.eval(Site::Point(&[1.5, 2.0]), Site::Point(&[1.5, 2.0])).unwrap(), 0.0);
    }

    #[test]
    fn inner_product_may_be_negative() {
        // (1,2)·(3,−1) = 3 − 2 = 1
        let c = CostSpec::<f64>::InnerProduct;
        assert_eq!(c.eval(Site::Point(&[1.0, 2.0]), Site::Point(&[3.0, -1.0])).unwrap(), 1.0);
        assert_eq!(c.eval(Site::Point(&[1.0]), Site::Point(&[-3.0])).unwrap(), -3.0);
        assert!(c.is_signed());
        assert!(!CostSpec::<f64>::SquaredEuclidean.is_signed());
    }

    #[test]
    fn euclidean_symmetry_is_exact() {
        let c = CostSpec::<f64>::euclidean(1.7).unwrap();
        let (x, y) = ([0.3, -1.2, 7.0], [2.5, 0.1, -3.3]);
        let a = c.eval(Site::Point(&x), Site::Point(&y)).unwrap();
        let b = c.eval(Site::Point(&y), Site::Point(&x)).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn errors() {
        assert!(CostSpec::<f64>::euclidean(0.5).is_err());
        assert!(CostSpec::matrix(vec![vec![1.0, -1.0]]).is_err());
        let m = CostSpec::matrix(vec![vec![1.0, 2.0]]).unwrap();
        assert_eq!(m.eval(Site::Index(0), Site::Index(1)).unwrap(), 2.0);
        assert!(matches!(
            m.eval(Site::Index(1), Site::Index(0)),
            Err(Error::IndexOutOfRange { index: 1, len: 1 })
        ));
        assert!(matches!(
            CostSpec::<f64>::SquaredEuclidean.eval(Site::Point(&[1.0]), Site::Point(&[1.0, 2.0])),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(m.table(&[vec![0.0], vec![1.0]], &[vec![0.0]]).is_err());
    }

    #[test]
    fn separable_product() {
        let c = CostSpec::separable(vec![2.0, 3.0], vec![5.0]).unwrap();
        assert_eq!(c.eval(Site::Index(1), Site::Index(0)).unwrap(), 15.0);
    }
}
