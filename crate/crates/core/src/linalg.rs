//! Complex tridiagonal systems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Pivot magnitude below which the Thomas sweep hands over to a pivoted
/// dense solve.
pub const PIVOT_FLOOR: f64 = 1e-13;

/// `n x n` tridiagonal matrix stored by diagonals.
///
/// `sub[i]` sits at `(i + 1, i)` and `sup[i]` at `(i, i + 1)`, so both have
/// length `n - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub sup: Vec<Complex64>,
}

impl Tridiagonal {
    pub fn new(sub: Vec<Complex64>, diag: Vec<Complex64>, sup: Vec<Complex64>) -> Self {
        let n = diag.len();
        assert!(n > 0, "empty tridiagonal matrix");
        assert_eq!(sub.len(), n - 1);
        assert_eq!(sup.len(), n - 1);
        Self { sub, diag, sup }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        if row == col {
            self.diag[row]
        } else if row == col + 1 {
            self.sub[col]
        } else if col == row + 1 {
            self.sup[row]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.sup[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.get(i, j))
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].norm();
                if i > 0 {
                    s += self.sub[i - 1].norm();
                }
                if i + 1 < n {
                    s += self.sup[i].norm();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// Solves `A x = rhs`. Returns `None` when the matrix is numerically
    /// singular under both the Thomas sweep and the pivoted fallback.
    pub fn solve(&self, rhs: &[Complex64]) -> Option<Vec<Complex64>> {
        self.solve_thomas(rhs).or_else(|| self.solve_dense(rhs))
    }

    /// LU without pivoting; `None` if a pivot falls below [`PIVOT_FLOOR`].
    pub fn solve_thomas(&self, rhs: &[Complex64]) -> Option<Vec<Complex64>> {
        let n = self.dim();
        assert_eq!(rhs.len(), n);
        let mut c_prime = vec![Complex64::new(0.0, 0.0); n];
        let mut d_prime = vec![Complex64::new(0.0, 0.0); n];

        let mut pivot = self.diag[0];
        if pivot.norm() < PIVOT_FLOOR {
            return None;
        }
        if n > 1 {
            c_prime[0] = self.sup[0] / pivot;
        }
        d_prime[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.sub[i - 1] * c_prime[i - 1];
            if pivot.norm() < PIVOT_FLOOR {
                return None;
            }
            if i + 1 < n {
                c_prime[i] = self.sup[i] / pivot;
            }
            d_prime[i] = (rhs[i] - self.sub[i - 1] * d_prime[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            let next = d_prime[i + 1];
            d_prime[i] -= c_prime[i] * next;
        }
        if d_prime.iter().all(|v| v.is_finite()) {
            Some(d_prime)
        } else {
            None
        }
    }

    /// Partial-pivot dense LU.
    pub fn solve_dense(&self, rhs: &[Complex64]) -> Option<Vec<Complex64>> {
        let lu = self.to_dense().lu();
        let b = DVector::from_column_slice(rhs);
        let x = lu.solve(&b)?;
        if x.iter().all(|v| v.is_finite()) {
            Some(x.iter().copied().collect())
        } else {
            None
        }
    }

    /// Infinity-norm condition number, from the explicit inverse.
    ///
    /// Costs `n` solves; only used for endpoint classification.
    pub fn condition_inf(&self) -> f64 {
        let n = self.dim();
        let mut row_sums = vec![0.0; n];
        for j in 0..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            match self.solve(&e) {
                Some(col) => {
                    for (s, v) in row_sums.iter_mut().zip(&col) {
                        *s += v.norm();
                    }
                }
                None => return f64::INFINITY,
            }
        }
        self.norm_inf() * row_sums.into_iter().fold(0.0, f64::max)
    }
}
