//! Squared-exponential covariance over time, position, and orientation.
//!
//! The kernel measures squared input distance as the sum of squared time
//! difference, squared Euclidean position difference, and squared geodesic
//! angle between the orientation quaternions, so one length scale governs
//! the whole pose. Measurement noise enters only on the diagonal.

// Float method calls resolve inherently instead when a test build
// links std into the graph; the import must stay for no_std builds.
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{cholesky, CholeskyFactor, NotPositiveDefinite, SquareMatrix};
use crate::quat::Quat;

/// First jitter attempt, as a fraction of the signal variance `theta0`.
pub const JITTER_INITIAL_FRACTION: f64 = 1e-10;

/// Largest jitter attempted before giving up, as a fraction of `theta0`.
pub const JITTER_MAX_FRACTION: f64 = 1e-4;

/// Hyperparameters of one wrench component's covariance:
/// signal variance `theta0`, inverse squared length scale `theta1`,
/// and measurement noise variance `sigma2`. All strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub theta0: f64,
    pub theta1: f64,
    pub sigma2: f64,
}

/// A kernel hyperparameter was non-positive or non-finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvalidParams {
    pub theta0: f64,
    pub theta1: f64,
    pub sigma2: f64,
}

impl core::fmt::Display for InvalidParams {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "kernel parameters must be finite and strictly positive: \
             theta0 = {}, theta1 = {}, sigma2 = {}",
            self.theta0, self.theta1, self.sigma2
        )
    }
}

impl core::error::Error for InvalidParams {}

impl KernelParams {
    pub fn new(theta0: f64, theta1: f64, sigma2: f64) -> Result<KernelParams, InvalidParams> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(theta0) && ok(theta1) && ok(sigma2) {
            Ok(KernelParams { theta0, theta1, sigma2 })
        } else {
            Err(InvalidParams { theta0, theta1, sigma2 })
        }
    }

    /// Parameters from their logs `(ln theta0, ln theta1, ln sigma2)`,
    /// the space the evidence optimization works in.
    pub fn from_log(log: [f64; 3]) -> KernelParams {
        KernelParams { theta0: log[0].exp(), theta1: log[1].exp(), sigma2: log[2].exp() }
    }

    pub fn to_log(self) -> [f64; 3] {
        [self.theta0.ln(), self.theta1.ln(), self.sigma2.ln()]
    }
}

/// Squared geodesic angle between two unit quaternions:
/// `(2 * acos(min(1, |<qa, qb>|)))^2`. The absolute dot product folds the
/// double cover, so `q` and `-q` are zero distance apart.
pub fn quaternion_sq_angle(qa: Quat, qb: Quat) -> f64 {
    let d = qa.dot(qb).abs().min(1.0);
    let angle = 2.0 * d.acos();
    angle * angle
}

/// Squared distance between input rows `[t, x, y, z, qw, qx, qy, qz]`:
/// squared time and position differences plus the squared geodesic angle.
pub fn squared_input_distance(a: &[f64; 8], b: &[f64; 8]) -> f64 {
    let dt = a[0] - b[0];
    let dx = a[1] - b[1];
    let dy = a[2] - b[2];
    let dz = a[3] - b[3];
    let qa = Quat::new(a[4], a[5], a[6], a[7]);
    let qb = Quat::new(b[4], b[5], b[6], b[7]);
    dt * dt + dx * dx + dy * dy + dz * dz + quaternion_sq_angle(qa, qb)
}

fn entry_from_distance(sq: f64, p: &KernelParams, same_index: bool) -> f64 {
    let mut v = p.theta0 * (-0.5 * p.theta1 * sq).exp();
    if same_index {
        v += p.sigma2;
    }
    v
}

/// One kernel entry between input rows. `same_index` adds the noise
/// variance, which belongs to the sample index, not the input value:
/// repeated input values at different indices get no noise coupling.
pub fn kernel_entry(a: &[f64; 8], b: &[f64; 8], p: &KernelParams, same_index: bool) -> f64 {
    entry_from_distance(squared_input_distance(a, b), p, same_index)
}

/// Pairwise squared input distances, independent of the hyperparameters.
/// Computing them once lets an optimizer rebuild the covariance for many
/// parameter candidates without revisiting the inputs.
#[derive(Debug, Clone)]
pub struct SquaredDistances {
    d2: SquareMatrix,
}

impl SquaredDistances {
    pub fn new(inputs: &[[f64; 8]]) -> SquaredDistances {
        let d2 = SquareMatrix::from_fn(inputs.len(), |i, j| {
            squared_input_distance(&inputs[i], &inputs[j])
        });
        SquaredDistances { d2 }
    }

    pub fn n(&self) -> usize {
        self.d2.n()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d2.get(i, j)
    }
}

/// Covariance matrix of one wrench component over a movement's inputs,
/// together with its Cholesky factorization.
#[derive(Debug, Clone)]
pub struct Covariance {
    matrix: SquareMatrix,
    chol: CholeskyFactor,
    log_det: f64,
    jitter: f64,
}

impl Covariance {
    /// The factored matrix, including noise and any jitter on the diagonal.
    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn chol(&self) -> &CholeskyFactor {
        &self.chol
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// Diagonal jitter that was needed for the factorization; usually zero.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }
}

/// Covariance construction failed even at the maximum jitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericalError {
    pub n: usize,
    /// Failure of the final (largest-jitter) attempt.
    pub cause: NotPositiveDefinite,
    pub max_jitter_tried: f64,
}

impl core::fmt::Display for NumericalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "covariance factorization failed for n = {} even with jitter {:e}: {}",
            self.n, self.max_jitter_tried, self.cause
        )
    }
}

impl core::error::Error for NumericalError {}

/// Builds the covariance matrix over `inputs` and factors it.
///
/// The clean matrix is tried first. If the factorization is rejected,
/// diagonal jitter is added starting at `theta0 * 1e-10` and growing
/// tenfold up to `theta0 * 1e-4`; the jitter that succeeded is recorded in
/// the result so it can be reproduced.
pub fn build_covariance(
    inputs: &[[f64; 8]],
    p: &KernelParams,
) -> Result<Covariance, NumericalError> {
    build_covariance_from_distances(&SquaredDistances::new(inputs), p)
}

/// [`build_covariance`] over precomputed distances. Both paths produce
/// bit-identical matrices for the same inputs.
pub fn build_covariance_from_distances(
    dists: &SquaredDistances,
    p: &KernelParams,
) -> Result<Covariance, NumericalError> {
    let n = dists.n();
    // The kernel is symmetric in its inputs, so the upper triangle is a
    // mirror rather than a second set of exponentials.
    let base = SquareMatrix::from_fn_symmetric(n, |i, j| {
        entry_from_distance(dists.get(i, j), p, i == j)
    });

    if let Ok(chol) = cholesky(&base) {
        let log_det = chol.log_det();
        return Ok(Covariance { matrix: base, chol, log_det, jitter: 0.0 });
    }

    let mut jitter = p.theta0 * JITTER_INITIAL_FRACTION;
    let max_jitter = p.theta0 * JITTER_MAX_FRACTION;
    loop {
        let mut m = base.clone();
        m.add_to_diagonal(jitter);
        match cholesky(&m) {
            Ok(chol) => {
                let log_det = chol.log_det();
                return Ok(Covariance { matrix: m, chol, log_det, jitter });
            }
            Err(cause) => {
                if jitter >= max_jitter {
                    return Err(NumericalError { n, cause, max_jitter_tried: jitter });
                }
            }
        }
        jitter *= 10.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;
    use proptest::prelude::*;

    const P: KernelParams = KernelParams { theta0: 1.0, theta1: 1.0, sigma2: 0.1 };

    fn row(t: f64, pos: [f64; 3], q: Quat) -> [f64; 8] {
        [t, pos[0], pos[1], pos[2], q.w, q.x, q.y, q.z]
    }

    #[test]
    fn identical_inputs_give_theta0_plus_noise_on_diagonal() {
        let r = row(0.3, [0.1, 0.2, 0.3], Quat::IDENTITY);
        assert_eq!(kernel_entry(&r, &r, &P, true), 1.1);
        assert_eq!(kernel_entry(&r, &r, &P, false), 1.0);
    }

    #[test]
    fn unit_squared_distance_decays_by_exp_half() {
        // Pure time offset of 1 with theta1 = 2: exp(-1).
        let p = KernelParams { theta0: 1.0, theta1: 2.0, sigma2: 0.1 };
        let a = row(0.0, [0.0; 3], Quat::IDENTITY);
        let b = row(1.0, [0.0; 3], Quat::IDENTITY);
        let expect = 0.367_879_441_171_442_33; // exp(-1)
        assert!((kernel_entry(&a, &b, &p, false) - expect).abs() < 1e-15);
    }

    #[test]
    fn quaternion_angle_is_geodesic() {
        let q = Quat::from_axis_angle([0.0, 0.0, 1.0], FRAC_PI_2);
        let sq = quaternion_sq_angle(Quat::IDENTITY, q);
        // Quarter turn: angle pi/2, squared 2.4674011002723395.
        assert!((sq - 2.467_401_100_272_339_5).abs() < 1e-12);
    }

    #[test]
    fn double_cover_is_folded() {
        let q = Quat::from_axis_angle([1.0, 0.0, 0.0], 0.8);
        let neg = Quat::new(-q.w, -q.x, -q.y, -q.z);
        assert_eq!(quaternion_sq_angle(q, neg), 0.0);
        assert_eq!(quaternion_sq_angle(q, q), 0.0);
    }

    #[test]
    fn repeated_inputs_stay_factorable_through_noise() {
        // Two identical rows: off-diagonal theta0, diagonal theta0 + sigma2.
        // The noise keeps the matrix positive definite without jitter.
        let r = row(0.5, [1.0, 2.0, 3.0], Quat::IDENTITY);
        let cov = build_covariance(&[r, r], &P).unwrap();
        assert_eq!(cov.jitter(), 0.0);
        assert_eq!(cov.matrix().get(0, 1), 1.0);
        assert!((cov.matrix().get(0, 0) - 1.1).abs() < 1e-15);
    }

    #[test]
    fn jitter_ladder_rescues_noiseless_duplicates() {
        // With sigma2 ~ 0 and duplicated rows the clean matrix is singular;
        // the ladder must find a small jitter instead of failing.
        let p = KernelParams { theta0: 1.0, theta1: 1.0, sigma2: 1e-300 };
        let r = row(0.5, [0.0; 3], Quat::IDENTITY);
        let cov = build_covariance(&[r, r], &p).unwrap();
        assert!(cov.jitter() > 0.0);
        assert!(cov.jitter() <= JITTER_MAX_FRACTION * p.theta0);
        // The recorded jitter sits on the diagonal of the kept matrix.
        assert!((cov.matrix().get(0, 0) - (1.0 + 1e-300 + cov.jitter())).abs() < 1e-12);
    }

    #[test]
    fn log_det_matches_2x2_closed_form() {
        let a = row(0.0, [0.0; 3], Quat::IDENTITY);
        let b = row(1.0, [0.0; 3], Quat::IDENTITY);
        let cov = build_covariance(&[a, b], &P).unwrap();
        let off = (-0.5f64).exp();
        let expect = ((1.1 * 1.1) - off * off).ln();
        assert!((cov.log_det() - expect).abs() < 1e-12);
    }

    fn arb_quat() -> impl Strategy<Value = Quat> {
        ([-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0]).prop_filter_map(
            "normalizable",
            |c| Quat::new(c[0], c[1], c[2], c[3]).normalized(),
        )
    }

    fn arb_row() -> impl Strategy<Value = [f64; 8]> {
        (0.0f64..1.0, [-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0], arb_quat())
            .prop_map(|(t, pos, q)| row(t, pos, q))
    }

    proptest! {
        #[test]
        fn kernel_is_symmetric_bitwise(a in arb_row(), b in arb_row()) {
            prop_assert_eq!(
                kernel_entry(&a, &b, &P, false),
                kernel_entry(&b, &a, &P, false)
            );
        }

        #[test]
        fn kernel_off_diagonal_is_bounded_by_theta0(a in arb_row(), b in arb_row()) {
            let v = kernel_entry(&a, &b, &P, false);
            prop_assert!(v > 0.0 && v <= P.theta0);
        }

        #[test]
        fn sq_angle_is_nonnegative_and_bounded(a in arb_quat(), b in arb_quat()) {
            let sq = quaternion_sq_angle(a, b);
            // Folded geodesic angle lies in [0, pi].
            prop_assert!(sq >= 0.0);
            prop_assert!(sq <= core::f64::consts::PI * core::f64::consts::PI + 1e-9);
        }
    }
}
