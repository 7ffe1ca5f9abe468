//! Four-network adversarial objective and training loop: a generator `G`,
//! a geometry-preserving encoder `T`, a discriminator `psi`, and an inverse
//! corrector `R_inv`, jointly trained so that `T . G` approximates the
//! quadratic optimal-transport map from the latent measure to the encoded
//! data measure.

mod bundle;
mod config;
mod loss;
mod train;

pub use bundle::NetworkBundle;
pub use config::{GmeCost, TrainConfig};
pub use loss::{assemble_loss, LossBreakdown};
pub use train::{
    generate, generate_with_latents, train, train_step, TrainHistory, TrainOutcome, TrainRecord,
    TrainerState,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("non-finite {term} at iteration {iter}")]
    NonFinite { term: &'static str, iter: usize },
    #[error(transparent)]
    Nd(#[from] crate::nd::NdError),
    #[error(transparent)]
    Ot(#[from] crate::ot::OtError),
    #[error(transparent)]
    Measure(#[from] crate::measures::MeasureError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type TrainResult<T> = Result<T, TrainError>;
