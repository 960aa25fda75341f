//! Trained model persistence.
//!
//! The JSON stores only what cannot be recomputed: per-component kernel
//! hyperparameters (plus the jitter the factorization settled on, as a
//! cross-check), the classifier statistics, and the options the model was
//! trained with. Covariances are rebuilt from the demonstration data on
//! load; a content hash of the demonstration inputs catches a swapped or
//! edited dataset before the rebuild can silently disagree.

use std::path::Path;

use map_core::classifier::{ClassStats, NaiveBayesModel};
use map_core::gp::{component_targets, GpWrenchModel, WrenchComponent, WrenchModelSet};
use map_core::kernel::KernelParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::io::write_json;

#[derive(Debug, Serialize, Deserialize)]
pub struct PersistedModel {
    pub dtw_enabled: bool,
    pub sigma_floor: f64,
    pub demo_inputs_sha256: String,
    pub gp: PersistedGp,
    pub classifier: PersistedClassifier,
}

/// One entry per wrench component, in the fixed component order.
#[derive(Debug, Serialize, Deserialize)]
pub struct PersistedGp {
    pub fx: PersistedComponent,
    pub fy: PersistedComponent,
    pub fz: PersistedComponent,
    pub tx: PersistedComponent,
    pub ty: PersistedComponent,
    pub tz: PersistedComponent,
}

impl PersistedGp {
    fn component(&self, c: WrenchComponent) -> &PersistedComponent {
        match c {
            WrenchComponent::Fx => &self.fx,
            WrenchComponent::Fy => &self.fy,
            WrenchComponent::Fz => &self.fz,
            WrenchComponent::Tx => &self.tx,
            WrenchComponent::Ty => &self.ty,
            WrenchComponent::Tz => &self.tz,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PersistedComponent {
    pub theta0: f64,
    pub theta1: f64,
    pub sigma2: f64,
    /// Diagonal jitter the Cholesky settled on; the rebuild must land on
    /// the same value or the model no longer matches its data.
    pub jitter: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PersistedClassifier {
    pub success: PersistedClass,
    pub failure: PersistedClass,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PersistedClass {
    pub prior: f64,
    pub mu: [f64; 6],
    pub sigma: [f64; 6],
    pub count: u64,
}

impl PersistedClass {
    fn from_stats(s: &ClassStats) -> PersistedClass {
        PersistedClass { prior: s.prior, mu: s.mu, sigma: s.sigma, count: s.count as u64 }
    }

    fn to_stats(&self) -> ClassStats {
        ClassStats {
            mu: self.mu,
            sigma: self.sigma,
            prior: self.prior,
            count: self.count as usize,
        }
    }
}

/// Content hash of a model input matrix: SHA-256 over the rows'
/// little-endian float bytes.
pub fn inputs_sha256(inputs: &[[f64; 8]]) -> String {
    let mut hasher = Sha256::new();
    for row in inputs {
        for v in row {
            hasher.update(v.to_le_bytes());
        }
    }
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

fn persist_component(m: &GpWrenchModel) -> PersistedComponent {
    let p = m.params();
    PersistedComponent {
        theta0: p.theta0,
        theta1: p.theta1,
        sigma2: p.sigma2,
        jitter: m.covariance().jitter(),
    }
}

pub fn save_model(
    path: &Path,
    demo_set: &WrenchModelSet,
    classifier: &NaiveBayesModel,
    dtw_enabled: bool,
    sigma_floor: f64,
) -> Result<(), CliError> {
    let model = PersistedModel {
        dtw_enabled,
        sigma_floor,
        demo_inputs_sha256: inputs_sha256(demo_set.model(WrenchComponent::Fx).inputs()),
        gp: PersistedGp {
            fx: persist_component(demo_set.model(WrenchComponent::Fx)),
            fy: persist_component(demo_set.model(WrenchComponent::Fy)),
            fz: persist_component(demo_set.model(WrenchComponent::Fz)),
            tx: persist_component(demo_set.model(WrenchComponent::Tx)),
            ty: persist_component(demo_set.model(WrenchComponent::Ty)),
            tz: persist_component(demo_set.model(WrenchComponent::Tz)),
        },
        classifier: PersistedClassifier {
            success: PersistedClass::from_stats(&classifier.success),
            failure: PersistedClass::from_stats(&classifier.failure),
        },
    };
    write_json(path, &model)
}

pub fn load_model(path: &Path) -> Result<PersistedModel, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.to_path_buf(), source })
}

/// Rebuilds the demonstration model set from persisted hyperparameters
/// and the demonstration's goal-relative data, verifying the content
/// hash first and the settled jitter afterwards.
pub fn rebuild_demo_set(
    path: &Path,
    model: &PersistedModel,
    inputs: &[[f64; 8]],
    wrench: &[[f64; 6]],
) -> Result<WrenchModelSet, CliError> {
    let hash = inputs_sha256(inputs);
    if hash != model.demo_inputs_sha256 {
        return Err(CliError::ModelMismatch {
            path: path.to_path_buf(),
            message: format!(
                "demonstration inputs hash {hash} does not match the stored {}; \
                 the model was trained on different data",
                model.demo_inputs_sha256
            ),
        });
    }

    let mut models = Vec::with_capacity(6);
    for c in WrenchComponent::ALL {
        let stored = model.gp.component(c);
        let params = KernelParams::new(stored.theta0, stored.theta1, stored.sigma2)
            .map_err(|e| CliError::ModelMismatch {
                path: path.to_path_buf(),
                message: format!("component {c}: {e}"),
            })?;
        let rebuilt =
            GpWrenchModel::from_params(params, inputs.to_vec(), component_targets(wrench, c))
                .map_err(|e| CliError::ModelMismatch {
                    path: path.to_path_buf(),
                    message: format!("component {c}: rebuild failed: {e}"),
                })?;
        if rebuilt.covariance().jitter() != stored.jitter {
            return Err(CliError::ModelMismatch {
                path: path.to_path_buf(),
                message: format!(
                    "component {c}: factorization settled on jitter {} but the model \
                     stored {}; data or arithmetic changed since training",
                    rebuilt.covariance().jitter(),
                    stored.jitter
                ),
            });
        }
        models.push(rebuilt);
    }
    let models: [GpWrenchModel; 6] =
        models.try_into().unwrap_or_else(|_| unreachable!("exactly six components"));
    Ok(WrenchModelSet::new(models))
}

pub fn classifier_from_model(model: &PersistedModel) -> NaiveBayesModel {
    NaiveBayesModel {
        success: model.classifier.success.to_stats(),
        failure: model.classifier.failure.to_stats(),
    }
}
