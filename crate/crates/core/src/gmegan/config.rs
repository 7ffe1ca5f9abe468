use serde::{Deserialize, Serialize};

use crate::ot::CostKind;

use super::{TrainError, TrainResult};

/// Pairwise cost family used by the embedding regularizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GmeCost {
    #[default]
    LogQuadratic,
    Quadratic,
}

impl GmeCost {
    pub fn kind(&self) -> CostKind<'static> {
        match self {
            GmeCost::LogQuadratic => CostKind::LogQuadratic,
            GmeCost::Quadratic => CostKind::QuadraticP { p: 2.0 },
        }
    }
}

/// Training hyperparameters. The defaults are the synthetic-benchmark
/// settings: lambda = (10, 1, 5), batch 16, all learning rates 1e-4.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// Embedding-regularizer weight.
    pub lambda1: f64,
    /// Discriminator gradient-penalty weight.
    pub lambda2: f64,
    /// Reconstruction weight.
    pub lambda3: f64,
    pub lr_g: f64,
    pub lr_t: f64,
    pub lr_psi: f64,
    pub lr_rinv: f64,
    pub batch: usize,
    pub iterations: usize,
    pub seed: u64,
    pub latent_dim: usize,
    pub ambient_dim: usize,
    pub hidden: Vec<usize>,
    pub gme_cost: GmeCost,
    /// First-moment decay for all four Adam optimizers.
    pub adam_beta1: f64,
    /// Second-moment decay for all four Adam optimizers.
    pub adam_beta2: f64,
    /// Checkpoint cadence in iterations; 0 disables periodic checkpoints.
    pub checkpoint_interval: usize,
    /// Metadata tag carried into the history when a term is ablated.
    pub ablation: Option<String>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lambda1: 10.0,
            lambda2: 1.0,
            lambda3: 5.0,
            lr_g: 1e-4,
            lr_t: 1e-4,
            lr_psi: 1e-4,
            lr_rinv: 1e-4,
            batch: 16,
            iterations: 20_000,
            seed: 0,
            latent_dim: 2,
            ambient_dim: 100,
            hidden: vec![128, 128],
            gme_cost: GmeCost::LogQuadratic,
            adam_beta1: 0.5,
            adam_beta2: 0.999,
            checkpoint_interval: 5000,
            ablation: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> TrainResult<()> {
        if self.lambda1 < 0.0 || self.lambda2 < 0.0 || self.lambda3 < 0.0 {
            return Err(TrainError::Config("lambdas must be nonnegative".into()));
        }
        if [self.lr_g, self.lr_t, self.lr_psi, self.lr_rinv]
            .iter()
            .any(|&lr| !(lr >= 0.0) || !lr.is_finite())
        {
            return Err(TrainError::Config("learning rates must be finite and >= 0".into()));
        }
        if self.batch < 2 {
            return Err(TrainError::Config(
                "batch must be at least 2 (pairwise embedding cost)".into(),
            ));
        }
        if self.latent_dim == 0 || self.ambient_dim == 0 {
            return Err(TrainError::Config("dimensions must be positive".into()));
        }
        Ok(())
    }
}
