//! Per-component Gaussian-process wrench models fit by evidence
//! maximization.
//!
//! Each wrench dimension is modeled as a zero-mean GP over the inputs
//! `[t, x, y, z, qw, qx, qy, qz]`. The zero mean is what makes the model
//! transferable: in goal-relative coordinates a wrench that deviates from
//! rest is explained by the kernel, not by where the movement started.

use alloc::vec::Vec;

// Float method calls resolve inherently instead when a test build
// links std into the graph; the import must stay for no_std builds.
#[allow(unused_imports)]
use num_traits::Float;

use crate::kernel::{
    build_covariance, build_covariance_from_distances, Covariance, KernelParams, NumericalError,
    SquaredDistances,
};
use crate::neldermead::{minimize, SimplexOptions};

/// Variance floor for the hyperparameter starting points.
const START_VARIANCE_EPS: f64 = 1e-8;

/// Wrench dimensions in their fixed model order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WrenchComponent {
    Fx,
    Fy,
    Fz,
    Tx,
    Ty,
    Tz,
}

impl WrenchComponent {
    pub const ALL: [WrenchComponent; 6] = [
        WrenchComponent::Fx,
        WrenchComponent::Fy,
        WrenchComponent::Fz,
        WrenchComponent::Tx,
        WrenchComponent::Ty,
        WrenchComponent::Tz,
    ];

    pub fn index(self) -> usize {
        match self {
            WrenchComponent::Fx => 0,
            WrenchComponent::Fy => 1,
            WrenchComponent::Fz => 2,
            WrenchComponent::Tx => 3,
            WrenchComponent::Ty => 4,
            WrenchComponent::Tz => 5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            WrenchComponent::Fx => "fx",
            WrenchComponent::Fy => "fy",
            WrenchComponent::Fz => "fz",
            WrenchComponent::Tx => "tx",
            WrenchComponent::Ty => "ty",
            WrenchComponent::Tz => "tz",
        }
    }
}

impl core::fmt::Display for WrenchComponent {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Hyperparameter fitting failed.
#[derive(Debug, Clone, PartialEq)]
pub enum FitError {
    /// Fewer than two samples.
    TooFewSamples { len: usize },
    /// Input and target lengths differ.
    LengthMismatch { inputs: usize, targets: usize },
    NonFiniteTarget { index: usize },
    /// Every optimization start ended with a non-finite evidence.
    AllStartsFailed,
    /// Rebuilding the covariance at the chosen optimum failed.
    Numerical(NumericalError),
}

impl core::fmt::Display for FitError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FitError::TooFewSamples { len } => {
                write!(f, "model fit needs at least 2 samples, got {}", len)
            }
            FitError::LengthMismatch { inputs, targets } => {
                write!(f, "{} inputs but {} targets", inputs, targets)
            }
            FitError::NonFiniteTarget { index } => {
                write!(f, "non-finite target at index {}", index)
            }
            FitError::AllStartsFailed => {
                f.write_str("all hyperparameter starts failed numerically")
            }
            FitError::Numerical(e) => write!(f, "{}", e),
        }
    }
}

impl core::error::Error for FitError {}

impl From<NumericalError> for FitError {
    fn from(e: NumericalError) -> FitError {
        FitError::Numerical(e)
    }
}

/// A component fit failure tagged with the component it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentFitError {
    pub component: WrenchComponent,
    pub source: FitError,
}

impl core::fmt::Display for ComponentFitError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "fit failed for wrench component {}: {}", self.component, self.source)
    }
}

impl core::error::Error for ComponentFitError {}

/// Log marginal likelihood of zero-mean GP targets under the kernel:
/// `-1/2 ln|K| - 1/2 w^T K^{-1} w - N/2 ln 2pi`, evaluated through the
/// Cholesky factor (the quadratic form is the squared norm of the
/// forward-solve, the log-determinant twice the log-trace of the factor).
pub fn log_marginal_likelihood(
    inputs: &[[f64; 8]],
    targets: &[f64],
    p: &KernelParams,
) -> Result<f64, NumericalError> {
    assert_eq!(inputs.len(), targets.len(), "inputs and targets must pair up");
    let cov = build_covariance(inputs, p)?;
    Ok(lml_from_covariance(&cov, targets))
}

fn lml_from_covariance(cov: &Covariance, targets: &[f64]) -> f64 {
    let n = targets.len() as f64;
    let quad = cov.chol().inv_quad_form(targets);
    let ln_2pi = (2.0 * core::f64::consts::PI).ln();
    -0.5 * cov.log_det() - 0.5 * quad - 0.5 * n * ln_2pi
}

/// Zero-mean GP over one wrench component, pinned to the samples it was
/// fit on. Holds everything the similarity features need: the fitted
/// hyperparameters and the factored covariance of the training inputs.
#[derive(Debug, Clone)]
pub struct GpWrenchModel {
    params: KernelParams,
    inputs: Vec<[f64; 8]>,
    targets: Vec<f64>,
    covariance: Covariance,
    lml: f64,
}

impl GpWrenchModel {
    /// Builds the model at fixed hyperparameters, factoring the covariance.
    /// This is also the deserialization path: persisted models store only
    /// the hyperparameters and recompute the factors here.
    pub fn from_params(
        params: KernelParams,
        inputs: Vec<[f64; 8]>,
        targets: Vec<f64>,
    ) -> Result<GpWrenchModel, FitError> {
        validate_training_data(&inputs, &targets)?;
        let covariance = build_covariance(&inputs, &params)?;
        let lml = lml_from_covariance(&covariance, &targets);
        Ok(GpWrenchModel { params, inputs, targets, covariance, lml })
    }

    pub fn params(&self) -> KernelParams {
        self.params
    }

    pub fn inputs(&self) -> &[[f64; 8]] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn covariance(&self) -> &Covariance {
        &self.covariance
    }

    /// Log marginal likelihood of the targets under the fitted kernel.
    pub fn lml(&self) -> f64 {
        self.lml
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

fn validate_training_data(inputs: &[[f64; 8]], targets: &[f64]) -> Result<(), FitError> {
    if inputs.len() != targets.len() {
        return Err(FitError::LengthMismatch { inputs: inputs.len(), targets: targets.len() });
    }
    if targets.len() < 2 {
        return Err(FitError::TooFewSamples { len: targets.len() });
    }
    if let Some(index) = targets.iter().position(|v| !v.is_finite()) {
        return Err(FitError::NonFiniteTarget { index });
    }
    Ok(())
}

fn population_variance(targets: &[f64]) -> f64 {
    let n = targets.len() as f64;
    let mean = targets.iter().sum::<f64>() / n;
    targets.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Fits one wrench component by maximizing the log marginal likelihood
/// over `(ln theta0, ln theta1, ln sigma2)` with Nelder-Mead.
///
/// Four fixed starting points are tried: `ln theta0` from the target
/// variance (floored at 1e-8) and from 1, crossed with `ln theta1` of
/// `ln 1` and `ln 10`; `ln sigma2` always starts at a tenth of the target
/// variance. Starts whose evidence is non-finite are ranked as infeasible;
/// the best final vertex wins, earlier starts winning ties. The whole
/// procedure is deterministic.
pub fn fit_wrench_model(
    inputs: &[[f64; 8]],
    targets: &[f64],
) -> Result<GpWrenchModel, FitError> {
    validate_training_data(inputs, targets)?;

    let var = population_variance(targets);
    let log_t0_var = (var + START_VARIANCE_EPS).ln();
    let log_s2 = (0.1 * var + START_VARIANCE_EPS).ln();
    let log_t1_short = 0.0; // ln 1
    let log_t1_long = core::f64::consts::LN_10;
    let starts: [[f64; 3]; 4] = [
        [log_t0_var, log_t1_short, log_s2],
        [log_t0_var, log_t1_long, log_s2],
        [0.0, log_t1_short, log_s2],
        [0.0, log_t1_long, log_s2],
    ];

    // Input distances do not depend on the hyperparameters; computing
    // them once leaves only the kernel map and the factorization in the
    // optimization loop.
    let dists = SquaredDistances::new(inputs);
    let objective = |x: &[f64; 3]| {
        // Underflowed or overflowed log-parameters violate the strictly
        // positive invariant; rank them infeasible like numerical failures.
        let p = KernelParams::from_log(*x);
        if KernelParams::new(p.theta0, p.theta1, p.sigma2).is_err() {
            return f64::INFINITY;
        }
        match build_covariance_from_distances(&dists, &p) {
            Ok(cov) => {
                let lml = lml_from_covariance(&cov, targets);
                if lml.is_finite() {
                    -lml
                } else {
                    f64::INFINITY
                }
            }
            Err(_) => f64::INFINITY,
        }
    };

    let mut best: Option<([f64; 3], f64)> = None;
    for start in starts {
        let r = minimize(objective, start, SimplexOptions::default());
        let better = match &best {
            Some((_, value)) => r.value < *value,
            None => true,
        };
        if better {
            best = Some((r.x, r.value));
        }
    }

    let (x, value) = best.expect("at least one start was tried");
    if !value.is_finite() {
        return Err(FitError::AllStartsFailed);
    }
    GpWrenchModel::from_params(KernelParams::from_log(x), inputs.to_vec(), targets.to_vec())
}

/// The six per-component models of one movement, in the fixed order
/// `fx, fy, fz, tx, ty, tz`. All components share the same inputs.
#[derive(Debug, Clone)]
pub struct WrenchModelSet {
    models: [GpWrenchModel; 6],
}

impl WrenchModelSet {
    pub fn new(models: [GpWrenchModel; 6]) -> WrenchModelSet {
        let n = models[0].len();
        assert!(
            models.iter().all(|m| m.len() == n),
            "all components must share the sample count"
        );
        WrenchModelSet { models }
    }

    pub fn model(&self, c: WrenchComponent) -> &GpWrenchModel {
        &self.models[c.index()]
    }

    pub fn models(&self) -> &[GpWrenchModel; 6] {
        &self.models
    }

    /// Samples under every component model.
    pub fn n(&self) -> usize {
        self.models[0].len()
    }
}

/// Extracts one component's target column from wrench rows.
pub fn component_targets(wrench: &[[f64; 6]], c: WrenchComponent) -> Vec<f64> {
    wrench.iter().map(|row| row[c.index()]).collect()
}

/// Fits all six wrench components over shared inputs, sequentially.
/// Fails on the first failing component, naming it.
pub fn fit_model_set(
    inputs: &[[f64; 8]],
    wrench: &[[f64; 6]],
) -> Result<WrenchModelSet, ComponentFitError> {
    let mut models = Vec::with_capacity(6);
    for c in WrenchComponent::ALL {
        let targets = component_targets(wrench, c);
        let model = fit_wrench_model(inputs, &targets)
            .map_err(|source| ComponentFitError { component: c, source })?;
        models.push(model);
    }
    let models: [GpWrenchModel; 6] =
        models.try_into().unwrap_or_else(|_| unreachable!("exactly six components"));
    Ok(WrenchModelSet::new(models))
}
