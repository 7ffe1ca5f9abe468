//! Run configuration: a sectioned key-value text file (TOML grammar). A
//! run is reproducible from its persisted config alone; the `GMEGAN_SEED`
//! environment variable overrides the configured seed.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use gmelab_core::gmegan::TrainConfig;
use gmelab_core::measures::{
    grid_centers, load_dataset, sample_mixture, EmpiricalMeasure, GaussianMixtureSpec, RngState,
    Stream,
};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DatasetConfig {
    /// Synthetic benchmark: K spherical modes on a planar grid inside a
    /// high-dimensional ambient space.
    GaussianMixture {
        ambient_dim: usize,
        modes: usize,
        n: usize,
        #[serde(default = "default_var_leading")]
        var_leading: f64,
        #[serde(default = "default_var_trailing")]
        var_trailing: f64,
    },
    /// Pre-sampled dataset file.
    File { path: PathBuf },
}

fn default_var_leading() -> f64 {
    0.3
}

fn default_var_trailing() -> f64 {
    0.003
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig::GaussianMixture {
            ambient_dim: 100,
            modes: 9,
            n: 1000,
            var_leading: 0.3,
            var_trailing: 0.003,
        }
    }
}

impl DatasetConfig {
    pub fn mixture_spec(&self) -> Result<Option<GaussianMixtureSpec>, CliError> {
        match self {
            DatasetConfig::GaussianMixture {
                ambient_dim,
                modes,
                var_leading,
                var_trailing,
                ..
            } => {
                let centers = match modes {
                    9 => grid_centers(&[-3.0, 0.0, 3.0], &[-3.0, 0.0, 3.0], *ambient_dim),
                    12 => grid_centers(
                        &[-4.5, -1.5, 1.5, 4.5],
                        &[-3.0, 0.0, 3.0],
                        *ambient_dim,
                    ),
                    other => {
                        return Err(CliError::Config(format!(
                            "unsupported mode count {other}: the benchmark defines 9 and 12"
                        )))
                    }
                };
                Ok(Some(
                    GaussianMixtureSpec::with_uniform_weights(
                        *ambient_dim,
                        centers,
                        *var_leading,
                        *var_trailing,
                    )
                    .map_err(|e| CliError::Config(e.to_string()))?,
                ))
            }
            DatasetConfig::File { .. } => Ok(None),
        }
    }

    /// Materializes the dataset (sampling or loading) plus mode labels.
    pub fn realize(
        &self,
        seed: u64,
    ) -> Result<(EmpiricalMeasure, Option<Vec<u32>>), CliError> {
        match self {
            DatasetConfig::GaussianMixture { n, .. } => {
                let spec = self.mixture_spec()?.expect("mixture branch");
                let mut rng = RngState::stream(seed, Stream::Data);
                let (measure, labels) =
                    sample_mixture(&spec, *n, &mut rng).map_err(CliError::from)?;
                Ok((measure, Some(labels)))
            }
            DatasetConfig::File { path } => {
                let (measure, labels) = load_dataset(path)?;
                Ok((measure, labels))
            }
        }
    }
}

/// Verification knobs shared by `train` summaries and the `verify` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    pub samples: usize,
    pub radius_multiplier: f64,
    pub bilip_pairs: usize,
    pub monotone_pairs: usize,
    pub ccm_probes: usize,
    pub ccm_cycles_per_len: usize,
    pub ccm_cycle_len: usize,
    pub ccm_tol: f64,
    pub modulus_pairs: usize,
    pub modulus_bins: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: 10_000,
            radius_multiplier: 3.0,
            bilip_pairs: 2000,
            monotone_pairs: 1000,
            ccm_probes: 200,
            ccm_cycles_per_len: 500,
            ccm_cycle_len: 3,
            ccm_tol: 1e-6,
            modulus_pairs: 2000,
            modulus_bins: 20,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub dataset: DatasetConfig,
    pub train: TrainConfig,
    pub verify: VerifyConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        config.apply_seed(config.seed);
        Ok(config)
    }

    /// Propagates the run seed into the training section and honors the
    /// `GMEGAN_SEED` environment override.
    pub fn apply_seed(&mut self, seed: u64) {
        self.seed = seed;
        if let Ok(env_seed) = std::env::var("GMEGAN_SEED") {
            if let Ok(parsed) = env_seed.parse::<u64>() {
                self.seed = parsed;
            }
        }
        self.train.seed = self.seed;
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = toml::to_string_pretty(self)
            .map_err(|e| CliError::Config(format!("serialize config: {e}")))?;
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Keeps the training section consistent with the dataset section.
    pub fn reconcile(&mut self) -> Result<(), CliError> {
        if let DatasetConfig::GaussianMixture { ambient_dim, .. } = &self.dataset {
            self.train.ambient_dim = *ambient_dim;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let cfg = RunConfig::default();
        let text = toml::to_string_pretty(&cfg).unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.train.lambda1, cfg.train.lambda1);
        assert_eq!(back.verify.samples, cfg.verify.samples);
    }

    #[test]
    fn nine_and_twelve_mode_grids_are_the_benchmark_layouts() {
        let nine = DatasetConfig::default().mixture_spec().unwrap().unwrap();
        assert_eq!(nine.num_modes(), 9);
        assert_eq!(nine.centers.row(0)[..2], [-3.0, -3.0]);

        let twelve = DatasetConfig::GaussianMixture {
            ambient_dim: 500,
            modes: 12,
            n: 1000,
            var_leading: 0.3,
            var_trailing: 0.003,
        };
        let spec = twelve.mixture_spec().unwrap().unwrap();
        assert_eq!(spec.num_modes(), 12);
        assert_eq!(spec.ambient_dim, 500);
    }

    #[test]
    fn unsupported_mode_count_is_a_config_error() {
        let bad = DatasetConfig::GaussianMixture {
            ambient_dim: 10,
            modes: 7,
            n: 100,
            var_leading: 0.3,
            var_trailing: 0.003,
        };
        assert!(bad.mixture_spec().is_err());
    }
}
