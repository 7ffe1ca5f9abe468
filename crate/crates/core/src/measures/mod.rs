//! Probability-measure data model: weighted point sets, the synthetic
//! Gaussian-mixture benchmark, the standard-normal latent sampler, and
//! dataset persistence.

mod empirical;
mod io;
mod mixture;
mod rng;

pub use empirical::EmpiricalMeasure;
pub use io::{load_dataset, save_dataset, write_points_csv, DATASET_MAGIC};
pub use mixture::{
    assign_mode, grid_centers, sample_latent, sample_mixture, GaussianMixtureSpec, UNASSIGNED,
};
pub use rng::{RngState, Stream};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("invalid measure: {0}")]
    Invalid(String),
    #[error("dataset format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type MeasureResult<T> = Result<T, MeasureError>;
