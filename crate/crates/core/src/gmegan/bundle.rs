use std::path::Path;

use crate::measures::RngState;
use crate::nd::{load_networks, save_networks, Mlp, MlpSpec, NdResult, Tensor};

use super::{TrainError, TrainResult};

/// The four trained maps. Dimension chain: `G: d -> D`, `T: D -> d`,
/// `psi: D -> 1`, `R_inv: d -> d`.
#[derive(Debug, Clone)]
pub struct NetworkBundle {
    pub g: Mlp,
    pub t: Mlp,
    pub psi: Mlp,
    pub r_inv: Mlp,
}

impl NetworkBundle {
    pub fn new(g: Mlp, t: Mlp, psi: Mlp, r_inv: Mlp) -> TrainResult<Self> {
        let d = g.spec().input_width();
        let big_d = g.spec().output_width();
        let ok = t.spec().input_width() == big_d
            && t.spec().output_width() == d
            && psi.spec().input_width() == big_d
            && psi.spec().output_width() == 1
            && r_inv.spec().input_width() == d
            && r_inv.spec().output_width() == d;
        if !ok {
            return Err(TrainError::Config(format!(
                "inconsistent dimension chain: G {}->{}, T {}->{}, psi {}->{}, R_inv {}->{}",
                d,
                big_d,
                t.spec().input_width(),
                t.spec().output_width(),
                psi.spec().input_width(),
                psi.spec().output_width(),
                r_inv.spec().input_width(),
                r_inv.spec().output_width()
            )));
        }
        Ok(NetworkBundle { g, t, psi, r_inv })
    }

    /// Fresh bundle with ReLU hidden layers and identity outputs,
    /// He-initialized from the given stream. Initialization order is fixed
    /// (G, T, psi, R_inv) so a seed pins every parameter.
    pub fn init(
        latent_dim: usize,
        ambient_dim: usize,
        hidden: &[usize],
        rng: &mut RngState,
    ) -> TrainResult<Self> {
        let arch = |input: usize, output: usize| -> NdResult<MlpSpec> {
            let mut widths = Vec::with_capacity(hidden.len() + 2);
            widths.push(input);
            widths.extend_from_slice(hidden);
            widths.push(output);
            MlpSpec::relu(widths)
        };
        let g = Mlp::init_he(arch(latent_dim, ambient_dim)?, rng);
        let t = Mlp::init_he(arch(ambient_dim, latent_dim)?, rng);
        let psi = Mlp::init_he(arch(ambient_dim, 1)?, rng);
        let r_inv = Mlp::init_he(arch(latent_dim, latent_dim)?, rng);
        NetworkBundle::new(g, t, psi, r_inv)
    }

    pub fn latent_dim(&self) -> usize {
        self.g.spec().input_width()
    }

    pub fn ambient_dim(&self) -> usize {
        self.g.spec().output_width()
    }

    /// `G(y)` for a batch of latent rows.
    pub fn generate_points(&self, y: &Tensor) -> NdResult<Tensor> {
        self.g.eval(y)
    }

    /// `T(x)` for a batch of ambient rows.
    pub fn encode(&self, x: &Tensor) -> NdResult<Tensor> {
        self.t.eval(x)
    }

    /// `T(G(y))`: the latent-to-latent transport realized by the bundle.
    pub fn transport(&self, y: &Tensor) -> NdResult<Tensor> {
        self.t.eval(&self.g.eval(y)?)
    }

    pub fn save(&self, path: &Path) -> NdResult<()> {
        save_networks(path, &[&self.g, &self.t, &self.psi, &self.r_inv])
    }

    pub fn load(path: &Path) -> TrainResult<Self> {
        let nets = load_networks(path)?;
        if nets.len() != 4 {
            return Err(TrainError::Config(format!(
                "checkpoint holds {} networks, expected 4",
                nets.len()
            )));
        }
        let mut it = nets.into_iter();
        NetworkBundle::new(
            it.next().unwrap(),
            it.next().unwrap(),
            it.next().unwrap(),
            it.next().unwrap(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Stream;

    #[test]
    fn dimension_chain_is_validated() {
        let mut rng = RngState::stream(1, Stream::Init);
        let bundle = NetworkBundle::init(2, 10, &[8], &mut rng).unwrap();
        assert_eq!(bundle.latent_dim(), 2);
        assert_eq!(bundle.ambient_dim(), 10);

        // Swap G and T: chain breaks.
        let bad = NetworkBundle::new(
            bundle.t.clone(),
            bundle.g.clone(),
            bundle.psi.clone(),
            bundle.r_inv.clone(),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn checkpoint_round_trip() {
        let mut rng = RngState::stream(2, Stream::Init);
        let bundle = NetworkBundle::init(2, 6, &[4, 4], &mut rng).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bundle.gmeg");
        bundle.save(&path).unwrap();
        let loaded = NetworkBundle::load(&path).unwrap();
        assert_eq!(loaded.g, bundle.g);
        assert_eq!(loaded.t, bundle.t);
        assert_eq!(loaded.psi, bundle.psi);
        assert_eq!(loaded.r_inv, bundle.r_inv);
    }
}
