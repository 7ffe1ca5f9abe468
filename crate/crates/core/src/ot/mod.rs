//! Optimal-transport core: cost functions, exact discrete OT on uniform
//! supports, Wasserstein-p, the Gromov-Monge embedding cost, coupling-level
//! Gromov-Wasserstein evaluation, and the c-cyclical-monotonicity checker.

mod assignment;
pub(crate) mod ccm;
mod cost;
mod coupling;
mod gme;
mod wasserstein;

pub use assignment::min_cost_assignment;
pub use ccm::{ccm_check, ccm_check_with_tol, CcmReport, CcmWitness, CCM_TOL};
pub use cost::{pairwise_cost, CostKind, LinearMap, PointMap};
pub use coupling::{gw_objective, Coupling};
pub use gme::{gm_cost, gme_minibatch, gme_term};
pub use wasserstein::{exact_ot_uniform, solve_ot, wasserstein_p, OtSolution};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OtError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("infeasible coupling: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Nd(#[from] crate::nd::NdError),
}

pub type OtResult<T> = Result<T, OtError>;
