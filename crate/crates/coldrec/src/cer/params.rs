use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Hyperparameters of the confidence-weighted ALS model.
///
/// `scaling = 1.0` reproduces the unscaled confidence scheme exactly: every
/// positive carries weight 1 and every unobserved cell the base confidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CerHyperParams {
    /// Latent factor count `k`.
    pub latent_dim: usize,
    /// User ridge weight.
    pub reg_user: f64,
    /// Weight tethering warm item factors to their content projection.
    pub reg_item: f64,
    /// Ridge weight on the projection matrix.
    pub reg_proj: f64,
    /// Confidence of unobserved cells.
    pub base_confidence: f64,
    /// Popularity scaling exponent `d`; positives weigh `norm^(d-1)`.
    pub scaling: f64,
    pub max_sweeps: usize,
    /// Sweeps without validation improvement before training stops.
    pub patience: usize,
    /// Std-dev of the Gaussian factor initialization.
    pub init_scale: f64,
    pub seed: u64,
}

impl Default for CerHyperParams {
    fn default() -> Self {
        Self {
            latent_dim: 50,
            reg_user: 0.01,
            reg_item: 1.0,
            reg_proj: 0.01,
            base_confidence: 0.01,
            scaling: 1.0,
            max_sweeps: 50,
            patience: 5,
            init_scale: 0.01,
            seed: 42,
        }
    }
}

impl CerHyperParams {
    pub fn validate(&self) -> Result<()> {
        if self.latent_dim == 0 {
            return Err(Error::invalid("latent_dim must be at least 1"));
        }
        for (name, v) in [
            ("reg_user", self.reg_user),
            ("reg_item", self.reg_item),
            ("reg_proj", self.reg_proj),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite and >= 0")));
            }
        }
        if !(self.base_confidence > 0.0 && self.base_confidence <= 1.0) {
            return Err(Error::invalid("base_confidence must lie in (0, 1]"));
        }
        if !(self.scaling > 0.0) || !self.scaling.is_finite() {
            return Err(Error::invalid("scaling must be finite and > 0"));
        }
        if !(self.init_scale >= 0.0) || !self.init_scale.is_finite() {
            return Err(Error::invalid("init_scale must be finite and >= 0"));
        }
        Ok(())
    }
}
