//! Cholesky-based dense linear algebra for small SPD matrices.

use crate::error::{Error, Result};
use crate::numerics::Tensor2;
use crate::scalar::Scalar;

/// Symmetry tolerance for precision and covariance matrices.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Lower-triangular factor `L` with `A = L Lᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cholesky<T> {
    l: Tensor2<T>,
}

impl<T: Scalar> Cholesky<T> {
    pub fn new(a: &Tensor2<T>, what: &'static str) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::shape("cholesky", format!("{}x{} is not square", n, a.cols())));
        }
        let mut l = Tensor2::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d = d - l[(j, k)] * l[(j, k)];
            }
            if !(d > T::zero()) || !d.is_finite() {
                return Err(Error::NotSpd(what));
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Self { l })
    }

    pub fn factor(&self) -> &Tensor2<T> {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// `ln det A`.
    pub fn log_det(&self) -> T {
        let two = T::lit(2.0);
        (0..self.dim()).map(|i| two * self.l[(i, i)].ln()).sum()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        let mut y = vec![T::zero(); n];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s = s - self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s = s - self.l[(k, i)] * x[k];
            }
            x[i] = s / self.l[(i, i)];
        }
        x
    }

    /// `A⁻¹`, symmetrized.
    pub fn inverse(&self) -> Tensor2<T> {
        let n = self.dim();
        let mut inv = Tensor2::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        symmetrize(&inv)
    }
}

pub fn is_symmetric<T: Scalar>(a: &Tensor2<T>, tol: T) -> bool {
    a.rows() == a.cols()
        && (0..a.rows()).all(|i| (0..i).all(|j| (a[(i, j)] - a[(j, i)]).abs() <= tol))
}

pub fn symmetrize<T: Scalar>(a: &Tensor2<T>) -> Tensor2<T> {
    let half = T::lit(0.5);
    Tensor2::from_fn(a.rows(), a.cols(), |i, j| half * (a[(i, j)] + a[(j, i)]))
}

pub fn mat_vec<T: Scalar>(a: &Tensor2<T>, x: &[T]) -> Vec<T> {
    a.iter_rows()
        .map(|r| r.iter().zip(x).map(|(&p, &q)| p * q).sum())
        .collect()
}

/// `xᵀ A x`.
pub fn quad_form<T: Scalar>(a: &Tensor2<T>, x: &[T]) -> T {
    mat_vec(a, x).iter().zip(x).map(|(&p, &q)| p * q).sum()
}

/// `tr(A B)` for square matrices of equal size.
pub fn trace_of_product<T: Scalar>(a: &Tensor2<T>, b: &Tensor2<T>) -> T {
    let n = a.rows();
    (0..n)
        .map(|i| (0..n).map(|k| a[(i, k)] * b[(k, i)]).sum::<T>())
        .sum()
}

pub(crate) fn add_scaled<T: Scalar>(acc: &mut Tensor2<T>, a: &Tensor2<T>, s: T) {
    for (o, &v) in acc.data_mut().iter_mut().zip(a.data()) {
        *o = *o + s * v;
    }
}
