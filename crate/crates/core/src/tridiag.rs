//! Thomas algorithm for tridiagonal systems with a reusable factorization.

use alloc::vec::Vec;

use crate::{Error, Result};

/// LU factors of a tridiagonal matrix without pivoting.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    lower: Vec<f64>,
    /// Modified upper diagonal `c'_i`.
    upper: Vec<f64>,
    /// Reciprocal pivots.
    inv_pivot: Vec<f64>,
}

impl Tridiagonal {
    /// Factors the matrix with sub-diagonal `lower[i]` (row `i + 1`), diagonal
    /// `diag[i]` and super-diagonal `upper[i]` (row `i`).
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        if n == 0 || lower.len() + 1 != n || upper.len() + 1 != n {
            return Err(Error::domain("tridiagonal bands have inconsistent lengths"));
        }
        let mut inv_pivot = Vec::with_capacity(n);
        let mut modified = Vec::with_capacity(n - 1);
        let mut prev_c = 0.0;
        for i in 0..n {
            let pivot = if i == 0 {
                diag[0]
            } else {
                diag[i] - lower[i - 1] * prev_c
            };
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::numerical("zero pivot in tridiagonal solve", pivot));
            }
            inv_pivot.push(1.0 / pivot);
            if i + 1 < n {
                prev_c = upper[i] / pivot;
                modified.push(prev_c);
            }
        }
        Ok(Tridiagonal {
            lower: lower.to_vec(),
            upper: modified,
            inv_pivot,
        })
    }

    /// Factors the Toeplitz matrix `tridiag(off, diag, off)` of size `n`.
    pub fn constant(n: usize, off: f64, diag: f64) -> Result<Self> {
        let offs = alloc::vec![off; n.saturating_sub(1)];
        Self::factor(&offs, &alloc::vec![diag; n], &offs)
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Overwrites `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.len();
        debug_assert_eq!(rhs.len(), n);
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i - 1] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.upper[i] * rhs[i + 1];
        }
    }
}
