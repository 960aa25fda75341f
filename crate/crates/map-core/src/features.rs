//! Hellinger similarity between wrench models and the normalized feature
//! vector fed to the classifier.
//!
//! Demonstration and reproduction induce one zero-mean multivariate
//! Gaussian per wrench component (their covariance matrices over the
//! shared aligned grid). The Hellinger distance between those Gaussians
//! is computed in log-determinant space so it stays finite for any
//! movement length.

// Float method calls resolve inherently instead when a test build
// links std into the graph; the import must stay for no_std builds.
#[allow(unused_imports)]
use num_traits::Float;

use crate::gp::{WrenchComponent, WrenchModelSet};
use crate::linalg::{cholesky, NotPositiveDefinite, SquareMatrix};

/// Distance totals below this are degenerate: no component separates the
/// pair, so the feature vector falls back to uniform.
pub const DEGENERATE_TOTAL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeatureError {
    /// The two model sets cover different sample counts.
    DimensionMismatch { demo: usize, rep: usize },
    /// A covariance stopped being positive definite inside the distance.
    NotPositiveDefinite(NotPositiveDefinite),
}

impl core::fmt::Display for FeatureError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FeatureError::DimensionMismatch { demo, rep } => write!(
                f,
                "model sets cover different sample counts: demonstration {}, reproduction {}",
                demo, rep
            ),
            FeatureError::NotPositiveDefinite(e) => write!(f, "{}", e),
        }
    }
}

impl core::error::Error for FeatureError {}

impl From<NotPositiveDefinite> for FeatureError {
    fn from(e: NotPositiveDefinite) -> FeatureError {
        FeatureError::NotPositiveDefinite(e)
    }
}

/// Hellinger distance between two zero-mean Gaussians given by covariance
/// matrices of equal size:
///
/// `h = sqrt(1 - |K1|^{1/4} |K2|^{1/4} / |(K1 + K2) / 2|^{1/2})`
///
/// evaluated as `sqrt(1 - exp(ld1/4 + ld2/4 - ld_avg/2))` with
/// log-determinants from Cholesky factors, then clamped to `[0, 1]`
/// against roundoff. Identical covariances give exactly zero.
pub fn hellinger_gp(k1: &SquareMatrix, k2: &SquareMatrix) -> Result<f64, FeatureError> {
    if k1.n() != k2.n() {
        return Err(FeatureError::DimensionMismatch { demo: k1.n(), rep: k2.n() });
    }
    let ld1 = cholesky(k1)?.log_det();
    let ld2 = cholesky(k2)?.log_det();
    let avg = SquareMatrix::average(k1, k2);
    let ld_avg = cholesky(&avg)?.log_det();

    let bc = (0.25 * (ld1 + ld2) - 0.5 * ld_avg).exp();
    let h2 = 1.0 - bc;
    Ok(h2.max(0.0).sqrt().min(1.0))
}

/// Similarity feature vector of one demonstration/reproduction pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    /// Normalized Hellinger distances, in component order `fx..tz`.
    /// Sums to one unless degenerate.
    pub m: [f64; 6],
    /// Unnormalized distances the vector was built from.
    pub raw_h: [f64; 6],
    /// Whether the distances were too small to normalize, in which case
    /// `m` is uniform.
    pub degenerate: bool,
}

/// Normalizes raw per-component distances to sum to one. A total below
/// [`DEGENERATE_TOTAL`] (a reproduction indistinguishable from its
/// demonstration in every component) degrades to the uniform vector with
/// the `degenerate` flag set.
pub fn normalize_features(raw_h: [f64; 6]) -> FeatureVector {
    let total: f64 = raw_h.iter().sum();
    if total < DEGENERATE_TOTAL {
        FeatureVector { m: [1.0 / 6.0; 6], raw_h, degenerate: true }
    } else {
        let mut m = [0.0; 6];
        for (out, h) in m.iter_mut().zip(&raw_h) {
            *out = h / total;
        }
        FeatureVector { m, raw_h, degenerate: false }
    }
}

/// Hellinger distance per wrench component between two model sets over
/// the same aligned grid, normalized into a feature vector.
pub fn extract_features(
    demo: &WrenchModelSet,
    rep: &WrenchModelSet,
) -> Result<FeatureVector, FeatureError> {
    if demo.n() != rep.n() {
        return Err(FeatureError::DimensionMismatch { demo: demo.n(), rep: rep.n() });
    }
    let mut raw_h = [0.0; 6];
    for c in WrenchComponent::ALL {
        raw_h[c.index()] = hellinger_gp(
            demo.model(c).covariance().matrix(),
            rep.model(c).covariance().matrix(),
        )?;
    }
    Ok(normalize_features(raw_h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{build_covariance, KernelParams};
    use proptest::prelude::*;

    fn scalar(v: f64) -> SquareMatrix {
        SquareMatrix::from_fn(1, |_, _| v)
    }

    #[test]
    fn identical_covariances_are_exactly_zero_distance() {
        let k = SquareMatrix::from_fn(3, |i, j| if i == j { 2.0 } else { 0.3 });
        assert_eq!(hellinger_gp(&k, &k).unwrap(), 0.0);
    }

    #[test]
    fn scalar_variances_match_quadrature_oracle() {
        let cases = [(1.0, 4.0), (1.0, 1.5), (0.2, 0.9), (5.0, 0.3)];
        for (k1, k2) in cases {
            let got = hellinger_gp(&scalar(k1), &scalar(k2)).unwrap();
            let expect = crate::oracle::hellinger_1d(k1, k2);
            assert!(
                (got - expect).abs() < 1e-7,
                "variances ({}, {}): {} vs oracle {}",
                k1,
                k2,
                got,
                expect
            );
        }
        // Frozen value: variances 1 and 4 sit at distance 0.324920.
        assert!((hellinger_gp(&scalar(1.0), &scalar(4.0)).unwrap() - 0.324_920).abs() < 1e-6);
    }

    #[test]
    fn identity_against_doubled_identity_matches_closed_form() {
        // |I| = 1, |2I| = 4, |1.5 I| = 2.25 for n = 2:
        // h = sqrt(1 - 4^{1/4} / 2.25^{1/2}) = 0.239146.
        let i2 = SquareMatrix::from_fn(2, |i, j| if i == j { 1.0 } else { 0.0 });
        let two_i2 = SquareMatrix::from_fn(2, |i, j| if i == j { 2.0 } else { 0.0 });
        let h = hellinger_gp(&i2, &two_i2).unwrap();
        assert!((h - 0.239_146).abs() < 1e-6);
    }

    #[test]
    fn dense_determinant_oracle_agrees_on_structured_covariances() {
        // Covariances from actual kernel matrices, compared against the
        // raw determinant formula via Gauss-Jordan.
        let inputs_a: alloc::vec::Vec<[f64; 8]> = (0..7)
            .map(|i| {
                let t = i as f64 / 6.0;
                [t, 0.1 * t, 0.0, 1.0 - t, 1.0, 0.0, 0.0, 0.0]
            })
            .collect();
        let inputs_b: alloc::vec::Vec<[f64; 8]> = (0..7)
            .map(|i| {
                let t = i as f64 / 6.0;
                [t, 0.0, 0.2 * t, (1.0 - t) * 0.5, 1.0, 0.0, 0.0, 0.0]
            })
            .collect();
        let pa = KernelParams { theta0: 1.2, theta1: 3.0, sigma2: 0.2 };
        let pb = KernelParams { theta0: 0.8, theta1: 5.0, sigma2: 0.4 };
        let ka = build_covariance(&inputs_a, &pa).unwrap();
        let kb = build_covariance(&inputs_b, &pb).unwrap();

        let (det_a, _) = crate::oracle::gauss_jordan(ka.matrix()).unwrap();
        let (det_b, _) = crate::oracle::gauss_jordan(kb.matrix()).unwrap();
        let avg = SquareMatrix::average(ka.matrix(), kb.matrix());
        let (det_avg, _) = crate::oracle::gauss_jordan(&avg).unwrap();
        let expect = (1.0 - det_a.powf(0.25) * det_b.powf(0.25) / det_avg.sqrt())
            .max(0.0)
            .sqrt();

        let got = hellinger_gp(ka.matrix(), kb.matrix()).unwrap();
        assert!((got - expect).abs() < 1e-9, "{} vs {}", got, expect);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = SquareMatrix::from_fn(2, |i, j| if i == j { 1.0 } else { 0.0 });
        let b = SquareMatrix::from_fn(3, |i, j| if i == j { 1.0 } else { 0.0 });
        assert_eq!(
            hellinger_gp(&a, &b),
            Err(FeatureError::DimensionMismatch { demo: 2, rep: 3 })
        );
    }

    #[test]
    fn normalization_sums_to_one() {
        let f = normalize_features([0.1, 0.2, 0.3, 0.05, 0.25, 0.1]);
        assert!(!f.degenerate);
        let sum: f64 = f.m.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!((f.m[2] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn degenerate_total_falls_back_to_uniform() {
        let f = normalize_features([0.0; 6]);
        assert!(f.degenerate);
        assert_eq!(f.m, [1.0 / 6.0; 6]);

        let f = normalize_features([1e-14; 6]);
        assert!(f.degenerate);
    }

    proptest! {
        #[test]
        fn hellinger_stays_in_unit_interval(v1 in 0.01f64..100.0, v2 in 0.01f64..100.0) {
            let h = hellinger_gp(&scalar(v1), &scalar(v2)).unwrap();
            prop_assert!((0.0..=1.0).contains(&h));
        }

        #[test]
        fn hellinger_is_symmetric(v1 in 0.01f64..100.0, v2 in 0.01f64..100.0) {
            let a = hellinger_gp(&scalar(v1), &scalar(v2)).unwrap();
            let b = hellinger_gp(&scalar(v2), &scalar(v1)).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn normalized_features_sum_to_one_or_flag(
            raw in [0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0]
        ) {
            let f = normalize_features(raw);
            let sum: f64 = f.m.iter().sum();
            if f.degenerate {
                prop_assert_eq!(f.m, [1.0 / 6.0; 6]);
            } else {
                prop_assert!((sum - 1.0).abs() < 1e-9);
                for v in f.m {
                    prop_assert!((0.0..=1.0).contains(&v));
                }
            }
        }
    }
}
