//! Geometry-preserving encoder GAN over synthetic Gaussian-mixture
//! benchmarks, with exact optimal-transport oracles for every claimed
//! property.
//!
//! Layout:
//! - [`nd`]: tensors, reverse-mode autodiff, MLPs, Adam, checkpoints
//! - [`measures`]: empirical measures, the mixture benchmark, persistence
//! - [`ot`]: exact OT, Wasserstein-p, embedding costs, c-CM checking
//! - [`gmegan`]: the four-network objective and training loop
//! - [`verify`]: numerical certificates for the method's structural claims

pub mod gmegan;
pub mod measures;
pub mod nd;
pub mod ot;
pub mod verify;
