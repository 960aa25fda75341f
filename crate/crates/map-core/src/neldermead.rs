//! Derivative-free simplex minimization for the evidence maximization.
//!
//! Standard Nelder-Mead with the textbook coefficients (reflection 1,
//! expansion 2, contraction 0.5, shrink 0.5). Everything is deterministic:
//! ties sort stably and non-finite objective values are treated as
//! positive infinity, so a fixed start always yields the same result.

use alloc::vec::Vec;

// Float method calls resolve inherently instead when a test build
// links std into the graph; the import must stay for no_std builds.
#[allow(unused_imports)]
use num_traits::Float;

/// Termination settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Offset added to each coordinate in turn to form the initial simplex.
    pub initial_step: f64,
    /// Converged when the largest vertex-to-vertex distance drops below this.
    pub diameter_tolerance: f64,
    /// Stop when the best value improves by less than this over a whole
    /// window of `stall_iterations`. Catches near-flat ridges where the
    /// simplex wanders without the diameter ever collapsing.
    pub stall_tolerance: f64,
    /// Length of the stall window; 0 disables the stall check.
    pub stall_iterations: usize,
    pub max_iterations: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            initial_step: 0.5,
            diameter_tolerance: 1e-6,
            stall_tolerance: 1e-9,
            stall_iterations: 40,
            max_iterations: 500,
        }
    }
}

/// Best point found by [`minimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexResult<const D: usize> {
    pub x: [f64; D],
    pub value: f64,
    pub iterations: usize,
    /// Whether the diameter tolerance was reached before the iteration cap.
    pub converged: bool,
}

fn distance<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    let mut sq = 0.0;
    for d in 0..D {
        let diff = a[d] - b[d];
        sq += diff * diff;
    }
    sq.sqrt()
}

/// Minimizes `f` from `start`. `f` may return non-finite values for
/// infeasible points; they are ranked as positive infinity.
pub fn minimize<const D: usize>(
    mut f: impl FnMut(&[f64; D]) -> f64,
    start: [f64; D],
    opts: SimplexOptions,
) -> SimplexResult<D> {
    let mut eval = |x: &[f64; D]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<([f64; D], f64)> = Vec::with_capacity(D + 1);
    let v = eval(&start);
    simplex.push((start, v));
    for d in 0..D {
        let mut x = start;
        x[d] += opts.initial_step;
        let v = eval(&x);
        simplex.push((x, v));
    }

    let mut iterations = 0;
    let mut converged = false;
    let mut window_best = simplex.iter().fold(f64::INFINITY, |m, v| m.min(v.1));
    while iterations < opts.max_iterations {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal));

        let mut diameter = 0.0f64;
        for i in 0..simplex.len() {
            for j in (i + 1)..simplex.len() {
                diameter = diameter.max(distance(&simplex[i].0, &simplex[j].0));
            }
        }
        if diameter < opts.diameter_tolerance {
            converged = true;
            break;
        }
        // Progress check once per window: a whole window of iterations
        // that fails to improve the best value is a stall. Infeasible
        // bests make the improvement infinite or NaN, never a stall.
        if opts.stall_iterations > 0
            && iterations > 0
            && iterations % opts.stall_iterations == 0
        {
            let improvement = window_best - simplex[0].1;
            if improvement < opts.stall_tolerance {
                converged = true;
                break;
            }
            window_best = simplex[0].1;
        }
        iterations += 1;

        let best = simplex[0].1;
        let second_worst = simplex[D - 1].1;
        let (worst_x, worst) = simplex[D];

        // Centroid of all vertices except the worst.
        let mut centroid = [0.0f64; D];
        for (x, _) in &simplex[..D] {
            for d in 0..D {
                centroid[d] += x[d];
            }
        }
        for c in centroid.iter_mut() {
            *c /= D as f64;
        }

        let blend = |a: f64, b: f64| {
            let mut x = [0.0f64; D];
            for d in 0..D {
                x[d] = a * centroid[d] + b * worst_x[d];
            }
            x
        };

        let reflected = blend(2.0, -1.0);
        let fr = eval(&reflected);

        if fr < best {
            let expanded = blend(3.0, -2.0);
            let fe = eval(&expanded);
            simplex[D] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < second_worst {
            simplex[D] = (reflected, fr);
        } else {
            let contracted = if fr < worst {
                // Outside contraction, halfway toward the reflected point.
                blend(1.5, -0.5)
            } else {
                // Inside contraction, halfway toward the worst point.
                blend(0.5, 0.5)
            };
            let fc = eval(&contracted);
            if fc < fr.min(worst) {
                simplex[D] = (contracted, fc);
            } else {
                // Shrink everything toward the best vertex.
                let best_x = simplex[0].0;
                for (x, v) in simplex.iter_mut().skip(1) {
                    for d in 0..D {
                        x[d] = 0.5 * (x[d] + best_x[d]);
                    }
                    *v = eval(x);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal));
    SimplexResult { x: simplex[0].0, value: simplex[0].1, iterations, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let f = |x: &[f64; 3]| {
            (x[0] - 1.0).powi(2) + 2.0 * (x[1] + 2.0).powi(2) + 0.5 * (x[2] - 3.0).powi(2)
        };
        let r = minimize(f, [0.0, 0.0, 0.0], SimplexOptions::default());
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-4);
        assert!((r.x[1] + 2.0).abs() < 1e-4);
        assert!((r.x[2] - 3.0).abs() < 1e-4);
        assert!(r.value < 1e-7);
    }

    #[test]
    fn handles_infinite_regions() {
        // Infeasible half-space returns infinity; the minimum sits at x = 1.
        let f = |x: &[f64; 2]| {
            if x[0] < 0.0 {
                f64::INFINITY
            } else {
                (x[0] - 1.0).powi(2) + x[1].powi(2)
            }
        };
        let r = minimize(f, [2.0, 2.0], SimplexOptions::default());
        assert!((r.x[0] - 1.0).abs() < 1e-4);
        assert!(r.x[1].abs() < 1e-4);
    }

    #[test]
    fn nan_objective_treated_as_infeasible() {
        let f = |x: &[f64; 2]| {
            if x[0] < 0.0 {
                f64::NAN
            } else {
                (x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2)
            }
        };
        let r = minimize(f, [1.0, 1.0], SimplexOptions::default());
        assert!(r.value.is_finite());
        assert!((r.x[0] - 0.5).abs() < 1e-3);
    }

    #[test]
    fn deterministic_across_runs() {
        let f = |x: &[f64; 3]| {
            // Rosenbrock-flavored surface with a curved valley.
            100.0 * (x[1] - x[0] * x[0]).powi(2)
                + (1.0 - x[0]).powi(2)
                + (x[2] - x[1]).powi(2)
        };
        let a = minimize(f, [-1.2, 1.0, 0.5], SimplexOptions::default());
        let b = minimize(f, [-1.2, 1.0, 0.5], SimplexOptions::default());
        assert_eq!(a.x, b.x);
        assert_eq!(a.value, b.value);
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn respects_iteration_cap() {
        let opts = SimplexOptions { max_iterations: 5, ..SimplexOptions::default() };
        let f = |x: &[f64; 2]| x[0].powi(2) + x[1].powi(2);
        let r = minimize(f, [100.0, 100.0], opts);
        assert!(!r.converged);
        assert_eq!(r.iterations, 5);
    }
}
