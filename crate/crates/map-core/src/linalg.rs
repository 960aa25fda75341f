//! Dense symmetric-matrix routines backing the wrench-model covariances.
//!
//! Movements are a few hundred samples long at most, so a plain row-major
//! `Vec<f64>` store with a handwritten Cholesky factorization covers every
//! need without pulling in a linear algebra stack.

use alloc::vec;
use alloc::vec::Vec;

// Float method calls resolve inherently instead when a test build
// links std into the graph; the import must stay for no_std builds.
#[allow(unused_imports)]
use num_traits::Float;

/// Row-major square matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    /// Zero matrix of side `n`.
    pub fn zeros(n: usize) -> Self {
        SquareMatrix { n, data: vec![0.0; n * n] }
    }

    /// Builds the matrix entry by entry from `f(row, col)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    /// Builds a symmetric matrix, evaluating `f(row, col)` for the lower
    /// triangle only and mirroring it upwards.
    pub fn from_fn_symmetric(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Adds `v` to every diagonal entry.
    pub fn add_to_diagonal(&mut self, v: f64) {
        for i in 0..self.n {
            self.data[i * self.n + i] += v;
        }
    }

    /// Entrywise average `(a + b) / 2` of two equally sized matrices.
    pub fn average(a: &SquareMatrix, b: &SquareMatrix) -> SquareMatrix {
        assert_eq!(a.n, b.n, "matrix dimensions must match");
        let mut m = SquareMatrix::zeros(a.n);
        for (out, (&x, &y)) in m.data.iter_mut().zip(a.data.iter().zip(&b.data)) {
            *out = 0.5 * (x + y);
        }
        m
    }

    /// Largest absolute entry; zero for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, &v| acc.max(v.abs()))
    }
}

/// Why a Cholesky factorization was rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotPositiveDefinite {
    /// Index of the pivot at which the factorization broke down.
    pub pivot: usize,
    /// Value of that pivot before the square root; non-positive or non-finite.
    pub value: f64,
}

impl core::fmt::Display for NotPositiveDefinite {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "matrix is not positive definite: pivot {} evaluated to {}",
            self.pivot, self.value
        )
    }
}

impl core::error::Error for NotPositiveDefinite {}

/// Lower-triangular Cholesky factor `L` with `L * L^T` equal to the input.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    n: usize,
    l: Vec<f64>,
}

/// Cholesky factorization of a symmetric positive-definite matrix.
///
/// Only the lower triangle of `a` is read. Fails on the first non-positive
/// (or non-finite) pivot instead of silently producing NaNs.
pub fn cholesky(a: &SquareMatrix) -> Result<CholeskyFactor, NotPositiveDefinite> {
    let n = a.n();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.get(i, j);
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                // `!(sum > 0)` also catches NaN pivots.
                if !(sum > 0.0) || !sum.is_finite() {
                    return Err(NotPositiveDefinite { pivot: i, value: sum });
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Ok(CholeskyFactor { n, l })
}

impl CholeskyFactor {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `L[i][j]`; zero above the diagonal.
    #[inline]
    pub fn lower(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.l[i * self.n + j]
        }
    }

    /// Log-determinant of the factored matrix: `2 * sum(ln L[i][i])`.
    pub fn log_det(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            acc += self.l[i * self.n + i].ln();
        }
        2.0 * acc
    }

    /// Solves `L * y = b` by forward substitution.
    pub fn forward_solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n, "right-hand side length must match");
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut sum = b[i];
            for k in 0..i {
                sum -= self.l[i * n + k] * y[k];
            }
            y[i] = sum / self.l[i * n + i];
        }
        y
    }

    /// Quadratic form `b^T A^{-1} b` of the factored matrix `A`,
    /// computed as the squared norm of the forward-solve of `b`.
    pub fn inv_quad_form(&self, b: &[f64]) -> f64 {
        let y = self.forward_solve(b);
        y.iter().map(|v| v * v).sum()
    }

    /// Recomputes `L * L^T`.
    pub fn reconstruct(&self) -> SquareMatrix {
        let n = self.n;
        SquareMatrix::from_fn(n, |i, j| {
            let mut sum = 0.0;
            for k in 0..=i.min(j) {
                sum += self.l[i * n + k] * self.l[j * n + k];
            }
            sum
        })
    }
}
