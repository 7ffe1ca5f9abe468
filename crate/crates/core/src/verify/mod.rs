//! Numerical certificates: every structural claim of the method, checked
//! on brute-force discrete instances and on trained bundles.

mod bilip;
mod gk;
mod instances;
mod kset;
mod relstd;
mod suites;
mod theorems;
mod trained;

pub use bilip::{bilip_scatter, discrete_bilip_alpha, BiLipReport};
pub use gk::{gk_pushforward_demo, ks_statistic_uniform, sawtooth};
pub use instances::{
    brute_force_min_assignment, random_cloud, random_invertible_map, random_orthogonal_matrix,
};
pub use kset::{kset_check, KSetReport};
pub use relstd::{relative_std, RelStdReport};
pub use suites::{
    run_suite, suite_ccm, suite_equality, suite_gk, suite_gme, suite_kset, suite_ot,
    suite_pushforward, suite_sandwich, SuiteReport, SUITE_NAMES,
};
pub use theorems::{
    encoder_cost_equality, pushforward_via_inverse, sandwich_check, EqualityReport,
    PushforwardReport, SandwichReport,
};
pub use trained::{ccm_trained, modulus_probe, monotone2d_check, ModulusProfile};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error(transparent)]
    Ot(#[from] crate::ot::OtError),
    #[error(transparent)]
    Nd(#[from] crate::nd::NdError),
    #[error(transparent)]
    Measure(#[from] crate::measures::MeasureError),
    #[error(transparent)]
    Train(#[from] crate::gmegan::TrainError),
}

pub type VerifyResult<T> = Result<T, VerifyError>;
