//! Gaussian naive Bayes over similarity features.
//!
//! Two classes (success, failure), six features, per-class Gaussian
//! likelihood per feature with maximum-likelihood parameters. Scores are
//! accumulated in the log domain: the literal product of six small
//! densities underflows long before the posterior is ambiguous.

use alloc::string::String;
use alloc::vec::Vec;

// Float method calls resolve inherently instead when a test build
// links std into the graph; the import must stay for no_std builds.
#[allow(unused_imports)]
use num_traits::Float;

use crate::features::FeatureVector;
use crate::trajectory::Label;

/// Default lower bound on the per-feature standard deviation. A class
/// with one training instance has zero MLE variance; the floor keeps its
/// densities proper.
pub const DEFAULT_SIGMA_FLOOR: f64 = 1e-4;

/// Per-class Gaussian parameters of the six features.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassStats {
    /// Per-feature sample means.
    pub mu: [f64; 6],
    /// Per-feature standard deviations (MLE, floored).
    pub sigma: [f64; 6],
    /// Class prior, the training frequency.
    pub prior: f64,
    /// Training instances behind the estimates.
    pub count: usize,
}

/// Trained classifier: one [`ClassStats`] per outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveBayesModel {
    pub success: ClassStats,
    pub failure: ClassStats,
}

/// Outcome of classifying one reproduction.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub trajectory_id: String,
    pub p_success: f64,
    /// Success iff `p_success >= 0.5`; exact ties go to success.
    pub predicted: Label,
    pub features: FeatureVector,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrainError {
    /// No training instance carried this class.
    MissingClass(Label),
    LengthMismatch { features: usize, labels: usize },
    /// The sigma floor must be finite and positive.
    InvalidSigmaFloor(f64),
}

impl core::fmt::Display for TrainError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TrainError::MissingClass(l) => {
                write!(f, "training set has no {} instances", l)
            }
            TrainError::LengthMismatch { features, labels } => {
                write!(f, "{} feature vectors but {} labels", features, labels)
            }
            TrainError::InvalidSigmaFloor(v) => {
                write!(f, "sigma floor must be positive, got {}", v)
            }
        }
    }
}

impl core::error::Error for TrainError {}

/// A feature handed to [`classify`] was non-finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonFiniteFeature {
    pub index: usize,
    pub value: f64,
}

impl core::fmt::Display for NonFiniteFeature {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "feature {} is not finite: {}", self.index, self.value)
    }
}

impl core::error::Error for NonFiniteFeature {}

fn class_stats(features: &[&FeatureVector], prior: f64, sigma_floor: f64) -> ClassStats {
    let n = features.len() as f64;
    let mut mu = [0.0f64; 6];
    for f in features {
        for k in 0..6 {
            mu[k] += f.m[k];
        }
    }
    for m in mu.iter_mut() {
        *m /= n;
    }
    let mut sigma = [0.0f64; 6];
    for k in 0..6 {
        let var: f64 =
            features.iter().map(|f| (f.m[k] - mu[k]) * (f.m[k] - mu[k])).sum::<f64>() / n;
        sigma[k] = var.sqrt().max(sigma_floor);
    }
    ClassStats { mu, sigma, prior, count: features.len() }
}

/// Trains the classifier: per class and feature, the sample mean and the
/// maximum-likelihood (1/n) standard deviation floored at `sigma_floor`;
/// priors are the class frequencies.
pub fn train_classifier(
    features: &[FeatureVector],
    labels: &[Label],
    sigma_floor: f64,
) -> Result<NaiveBayesModel, TrainError> {
    if features.len() != labels.len() {
        return Err(TrainError::LengthMismatch {
            features: features.len(),
            labels: labels.len(),
        });
    }
    if !(sigma_floor > 0.0) || !sigma_floor.is_finite() {
        return Err(TrainError::InvalidSigmaFloor(sigma_floor));
    }
    let mut success = Vec::new();
    let mut failure = Vec::new();
    for (f, l) in features.iter().zip(labels) {
        match l {
            Label::Success => success.push(f),
            Label::Failure => failure.push(f),
        }
    }
    if success.is_empty() {
        return Err(TrainError::MissingClass(Label::Success));
    }
    if failure.is_empty() {
        return Err(TrainError::MissingClass(Label::Failure));
    }
    let total = features.len() as f64;
    Ok(NaiveBayesModel {
        success: class_stats(&success, success.len() as f64 / total, sigma_floor),
        failure: class_stats(&failure, failure.len() as f64 / total, sigma_floor),
    })
}

fn log_score(stats: &ClassStats, m: &[f64; 6]) -> f64 {
    let ln_sqrt_2pi = 0.5 * (2.0 * core::f64::consts::PI).ln();
    let mut score = stats.prior.ln();
    for k in 0..6 {
        let z = (m[k] - stats.mu[k]) / stats.sigma[k];
        score += -stats.sigma[k].ln() - ln_sqrt_2pi - 0.5 * z * z;
    }
    score
}

/// Success posterior from the two class log-scores:
/// `1 / (1 + exp(s_failure - s_success))`, the log-sum-exp normalization
/// reduced to a sigmoid. Equal scores give exactly 0.5, and shifting both
/// scores by a constant cannot change the result.
pub fn posterior_from_log_scores(s_success: f64, s_failure: f64) -> f64 {
    1.0 / (1.0 + (s_failure - s_success).exp())
}

/// Posterior success probability and predicted label for one feature
/// vector. Deterministic; ties at `p_success = 0.5` predict success.
pub fn classify(
    model: &NaiveBayesModel,
    trajectory_id: &str,
    features: &FeatureVector,
) -> Result<Assessment, NonFiniteFeature> {
    for (index, &value) in features.m.iter().enumerate() {
        if !value.is_finite() {
            return Err(NonFiniteFeature { index, value });
        }
    }
    let s_success = log_score(&model.success, &features.m);
    let s_failure = log_score(&model.failure, &features.m);
    let p_success = posterior_from_log_scores(s_success, s_failure);
    let predicted = if p_success >= 0.5 { Label::Success } else { Label::Failure };
    Ok(Assessment {
        trajectory_id: String::from(trajectory_id),
        p_success,
        predicted,
        features: *features,
    })
}

/// 2x2 confusion counts; rows are actual labels, columns predicted,
/// ordered success then failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    counts: [[usize; 2]; 2],
}

fn label_index(l: Label) -> usize {
    match l {
        Label::Success => 0,
        Label::Failure => 1,
    }
}

impl ConfusionMatrix {
    pub fn new() -> ConfusionMatrix {
        ConfusionMatrix::default()
    }

    pub fn record(&mut self, actual: Label, predicted: Label) {
        self.counts[label_index(actual)][label_index(predicted)] += 1;
    }

    pub fn count(&self, actual: Label, predicted: Label) -> usize {
        self.counts[label_index(actual)][label_index(predicted)]
    }

    /// Raw counts, rows actual (success, failure), columns predicted.
    pub fn counts(&self) -> [[usize; 2]; 2] {
        self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        self.counts[0][0] + self.counts[1][1]
    }

    /// `(TP + TN) / n`; NaN when nothing was recorded.
    pub fn accuracy(&self) -> f64 {
        self.correct() as f64 / self.total() as f64
    }
}

/// Prediction for one leave-one-out fold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldPrediction {
    pub p_success: f64,
    pub predicted: Label,
}

/// Leave-one-out cross-validation result.
#[derive(Debug, Clone, PartialEq)]
pub struct LoocvOutcome {
    pub confusion: ConfusionMatrix,
    /// `correct / evaluated`.
    pub accuracy: f64,
    pub evaluated: usize,
    /// Folds whose training split lost a whole class, left unevaluated.
    pub skipped: usize,
    /// Per input instance: the fold's prediction, or `None` if skipped.
    pub per_instance: Vec<Option<FoldPrediction>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LoocvError {
    LengthMismatch { features: usize, labels: usize },
    /// Every fold lost a class; nothing could be evaluated.
    NoEvaluableFolds,
}

impl core::fmt::Display for LoocvError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LoocvError::LengthMismatch { features, labels } => {
                write!(f, "{} feature vectors but {} labels", features, labels)
            }
            LoocvError::NoEvaluableFolds => {
                f.write_str("every leave-one-out fold would lose a class")
            }
        }
    }
}

impl core::error::Error for LoocvError {}

/// Leave-one-out cross-validation: each instance is classified by a model
/// trained on all the others. Folds whose training split has no success
/// or no failure left are skipped and reported in `skipped`.
pub fn evaluate_loocv(
    features: &[FeatureVector],
    labels: &[Label],
    sigma_floor: f64,
) -> Result<LoocvOutcome, LoocvError> {
    if features.len() != labels.len() {
        return Err(LoocvError::LengthMismatch {
            features: features.len(),
            labels: labels.len(),
        });
    }
    let n = features.len();
    let mut confusion = ConfusionMatrix::new();
    let mut per_instance = Vec::with_capacity(n);
    let mut skipped = 0usize;

    let mut train_features = Vec::with_capacity(n.saturating_sub(1));
    let mut train_labels = Vec::with_capacity(n.saturating_sub(1));
    for held_out in 0..n {
        train_features.clear();
        train_labels.clear();
        for i in 0..n {
            if i != held_out {
                train_features.push(features[i]);
                train_labels.push(labels[i]);
            }
        }
        match train_classifier(&train_features, &train_labels, sigma_floor) {
            Ok(model) => {
                let a = classify(&model, "", &features[held_out])
                    .expect("normalized features are finite");
                confusion.record(labels[held_out], a.predicted);
                per_instance.push(Some(FoldPrediction {
                    p_success: a.p_success,
                    predicted: a.predicted,
                }));
            }
            Err(TrainError::MissingClass(_)) => {
                skipped += 1;
                per_instance.push(None);
            }
            Err(e) => unreachable!("fold training cannot fail structurally: {}", e),
        }
    }

    let evaluated = n - skipped;
    if evaluated == 0 {
        return Err(LoocvError::NoEvaluableFolds);
    }
    Ok(LoocvOutcome {
        confusion,
        accuracy: confusion.accuracy(),
        evaluated,
        skipped,
        per_instance,
    })
}
