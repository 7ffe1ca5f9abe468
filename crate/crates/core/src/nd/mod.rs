//! Dense f64 tensors, a reverse-mode gradient tape, multilayer perceptrons,
//! and the Adam optimizer.
//!
//! Everything in this crate computes on `batch x width` row-major matrices.
//! The tape is rebuilt per minibatch; gradients for the discriminator's
//! gradient penalty come from recording the input-gradient computation
//! itself as tape operations, so one ordinary reverse pass differentiates
//! `mean ||grad_x psi||^2` with respect to the parameters (ReLU second
//! derivative taken as zero almost everywhere).

mod adam;
mod checkpoint;
mod mlp;
mod tape;
mod tensor;

pub use adam::AdamState;
pub use checkpoint::{load_networks, save_networks, CHECKPOINT_MAGIC};
pub use mlp::{grad_penalty_and_param_grad, input_gradient, mlp_forward, Activation, Mlp, MlpSpec};
pub use tape::{BoundMlp, Gradients, Node, Tape};
pub use tensor::Tensor;

use thiserror::Error;

/// Errors from tensor arithmetic, autodiff, and network evaluation.
#[derive(Debug, Error)]
pub enum NdError {
    #[error("shape mismatch: {context} (got {got_rows}x{got_cols}, expected {want_rows}x{want_cols})")]
    ShapeMismatch {
        context: &'static str,
        got_rows: usize,
        got_cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("checkpoint format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type NdResult<T> = Result<T, NdError>;
