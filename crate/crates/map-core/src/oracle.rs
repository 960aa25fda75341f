//! Independent reference computations for the test suites.
//!
//! Everything here deliberately avoids the crate's Cholesky code paths:
//! determinants and inverses come from Gauss-Jordan elimination,
//! eigenvalues from Jacobi rotations, and the 1-D Hellinger distance from
//! direct quadrature. Slow and simple on purpose; none of it belongs in a
//! production code path.

use alloc::vec;

// Float method calls resolve inherently instead when a test build
// links std into the graph; the import must stay for no_std builds.
#[allow(unused_imports)]
use num_traits::Float;

use crate::kernel::{kernel_entry, KernelParams};
use crate::linalg::SquareMatrix;

/// Hellinger distance between two zero-mean 1-D Gaussians with variances
/// `k1` and `k2`, by Simpson quadrature of
/// `1/2 * integral (sqrt(p) - sqrt(q))^2`.
pub fn hellinger_1d(k1: f64, k2: f64) -> f64 {
    assert!(k1 > 0.0 && k2 > 0.0, "variances must be positive");
    let s1 = k1.sqrt();
    let s2 = k2.sqrt();
    let half_width = 12.0 * s1.max(s2);
    let step_target = s1.min(s2) / 50.0;
    let mut n = (2.0 * half_width / step_target).ceil() as usize;
    n = n.clamp(64, 2_000_000);
    if n % 2 == 1 {
        n += 1;
    }
    let h = 2.0 * half_width / n as f64;

    let pdf = |x: f64, var: f64| {
        (-x * x / (2.0 * var)).exp() / (2.0 * core::f64::consts::PI * var).sqrt()
    };
    let integrand = |x: f64| {
        let d = pdf(x, k1).sqrt() - pdf(x, k2).sqrt();
        0.5 * d * d
    };

    // Composite Simpson's rule.
    let mut acc = integrand(-half_width) + integrand(half_width);
    for i in 1..n {
        let x = -half_width + h * i as f64;
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * integrand(x);
    }
    let h2 = acc * h / 3.0;
    h2.max(0.0).sqrt()
}

/// Determinant and inverse by Gauss-Jordan elimination with partial
/// pivoting. `None` when a pivot degenerates.
pub fn gauss_jordan(a: &SquareMatrix) -> Option<(f64, SquareMatrix)> {
    let n = a.n();
    // Augmented system [A | I], eliminated in place.
    let mut m = vec![0.0f64; n * 2 * n];
    let w = 2 * n;
    for i in 0..n {
        for j in 0..n {
            m[i * w + j] = a.get(i, j);
        }
        m[i * w + n + i] = 1.0;
    }

    let mut det = 1.0f64;
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = m[col * w + col].abs();
        for r in (col + 1)..n {
            let mag = m[r * w + col].abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if !(pivot_mag > 0.0) || !pivot_mag.is_finite() {
            return None;
        }
        if pivot_row != col {
            for j in 0..w {
                m.swap(col * w + j, pivot_row * w + j);
            }
            det = -det;
        }
        let pivot = m[col * w + col];
        det *= pivot;
        for j in 0..w {
            m[col * w + j] /= pivot;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = m[r * w + col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..w {
                m[r * w + j] -= factor * m[col * w + j];
            }
        }
    }

    let inv = SquareMatrix::from_fn(n, |i, j| m[i * w + n + j]);
    Some((det, inv))
}

/// Log marginal likelihood of zero-mean GP targets evaluated densely:
/// the kernel matrix is inverted outright and its determinant taken from
/// the elimination, bypassing the Cholesky path entirely.
pub fn lml_dense(inputs: &[[f64; 8]], targets: &[f64], p: &KernelParams) -> f64 {
    assert_eq!(inputs.len(), targets.len());
    let n = inputs.len();
    let k = SquareMatrix::from_fn(n, |i, j| kernel_entry(&inputs[i], &inputs[j], p, i == j));
    let (det, inv) = gauss_jordan(&k).expect("oracle kernel matrix must be invertible");

    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += targets[i] * inv.get(i, j) * targets[j];
        }
    }
    let ln_2pi = (2.0 * core::f64::consts::PI).ln();
    -0.5 * det.ln() - 0.5 * quad - 0.5 * n as f64 * ln_2pi
}

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
pub fn sym_min_eigenvalue(a: &SquareMatrix) -> f64 {
    let n = a.n();
    if n == 1 {
        return a.get(0, 0);
    }
    let mut m = a.clone();
    let scale = 1.0 + m.max_abs();

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * m.get(p, q) * m.get(p, q);
            }
        }
        if off.sqrt() < 1e-12 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() < 1e-300 {
                    continue;
                }
                // Symmetric Schur rotation zeroing (p, q).
                let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
            }
        }
    }

    let mut min = f64::INFINITY;
    for i in 0..n {
        min = min.min(m.get(i, i));
    }
    min
}
