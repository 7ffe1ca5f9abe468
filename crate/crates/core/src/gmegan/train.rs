use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::measures::{sample_latent, EmpiricalMeasure, RngState, Stream};
use crate::nd::{AdamState, Tensor};

use super::loss::build_loss;
use super::{LossBreakdown, NetworkBundle, TrainConfig, TrainError, TrainResult};

/// Adam state per network.
#[derive(Debug, Clone)]
pub struct TrainerState {
    pub adam_g: AdamState,
    pub adam_t: AdamState,
    pub adam_psi: AdamState,
    pub adam_rinv: AdamState,
}

impl TrainerState {
    pub fn new(bundle: &NetworkBundle, cfg: &TrainConfig) -> Self {
        let with_beta = |len: usize| {
            let mut state = AdamState::new(len);
            state.beta1 = cfg.adam_beta1;
            state.beta2 = cfg.adam_beta2;
            state
        };
        TrainerState {
            adam_g: with_beta(bundle.g.params().len()),
            adam_t: with_beta(bundle.t.params().len()),
            adam_psi: with_beta(bundle.psi.params().len()),
            adam_rinv: with_beta(bundle.r_inv.params().len()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainRecord {
    pub iter: usize,
    #[serde(flatten)]
    pub loss: LossBreakdown,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TrainHistory {
    pub records: Vec<TrainRecord>,
    pub ablation: Option<String>,
    pub checkpoints: Vec<PathBuf>,
}

/// Result of a full training run: the history survives even when the run
/// aborts, so callers can persist it for diagnosis.
pub struct TrainOutcome {
    pub history: TrainHistory,
    pub result: TrainResult<NetworkBundle>,
}

/// One simultaneous update: all four gradients are taken from the same
/// loss graph, then G, T, R_inv descend and psi ascends its own objective
/// (the adversarial gap minus the weighted gradient penalty).
pub fn train_step(
    bundle: &mut NetworkBundle,
    opt: &mut TrainerState,
    x_batch: &Tensor,
    y_batch: &Tensor,
    cfg: &TrainConfig,
    iter: usize,
) -> TrainResult<LossBreakdown> {
    if std::env::var("GMELAB_SEQUENTIAL").is_ok() {
        return train_step_sequential(bundle, opt, x_batch, y_batch, cfg, iter);
    }
    let graph = build_loss(bundle, x_batch, y_batch, cfg, iter)?;
    let grads = graph.tape.backward(graph.update_root)?;

    let g_g = grads.of_net(&graph.g, &graph.tape);
    let g_t = grads.of_net(&graph.t, &graph.tape);
    let g_psi = grads.of_net(&graph.psi, &graph.tape);
    let g_r = grads.of_net(&graph.r_inv, &graph.tape);
    for (name, g) in [
        ("G", &g_g),
        ("T", &g_t),
        ("psi", &g_psi),
        ("R_inv", &g_r),
    ] {
        if g.iter().any(|v| !v.is_finite()) {
            let _ = name;
            return Err(TrainError::NonFinite {
                term: "gradient",
                iter,
            });
        }
    }

    opt.adam_g.step(bundle.g.params_mut(), &g_g, cfg.lr_g)?;
    opt.adam_t.step(bundle.t.params_mut(), &g_t, cfg.lr_t)?;
    // Ascent for the discriminator: feed the negated gradient.
    let ascent: Vec<f64> = g_psi.iter().map(|v| -v).collect();
    opt.adam_psi.step(bundle.psi.params_mut(), &ascent, cfg.lr_psi)?;
    opt.adam_rinv.step(bundle.r_inv.params_mut(), &g_r, cfg.lr_rinv)?;

    Ok(graph.breakdown)
}

/// Diagnosis variant (temporary): the four update lines executed in
/// order, each on a freshly evaluated gradient of the same batch.
fn train_step_sequential(
    bundle: &mut NetworkBundle,
    opt: &mut TrainerState,
    x_batch: &Tensor,
    y_batch: &Tensor,
    cfg: &TrainConfig,
    iter: usize,
) -> TrainResult<LossBreakdown> {
    let breakdown = {
        let graph = build_loss(bundle, x_batch, y_batch, cfg, iter)?;
        let grads = graph.tape.backward(graph.update_root)?;
        let g = grads.of_net(&graph.g, &graph.tape);
        opt.adam_g.step(bundle.g.params_mut(), &g, cfg.lr_g)?;
        graph.breakdown
    };
    {
        let graph = build_loss(bundle, x_batch, y_batch, cfg, iter)?;
        let grads = graph.tape.backward(graph.update_root)?;
        let g = grads.of_net(&graph.t, &graph.tape);
        opt.adam_t.step(bundle.t.params_mut(), &g, cfg.lr_t)?;
    }
    {
        let graph = build_loss(bundle, x_batch, y_batch, cfg, iter)?;
        let grads = graph.tape.backward(graph.update_root)?;
        let g = grads.of_net(&graph.psi, &graph.tape);
        let ascent: Vec<f64> = g.iter().map(|v| -v).collect();
        opt.adam_psi.step(bundle.psi.params_mut(), &ascent, cfg.lr_psi)?;
    }
    {
        let graph = build_loss(bundle, x_batch, y_batch, cfg, iter)?;
        let grads = graph.tape.backward(graph.update_root)?;
        let g = grads.of_net(&graph.r_inv, &graph.tape);
        opt.adam_rinv.step(bundle.r_inv.params_mut(), &g, cfg.lr_rinv)?;
    }
    Ok(breakdown)
}

/// Epoch sampler: one pass over a shuffled index order per epoch, batches
/// taken without replacement; a trailing partial batch is dropped and the
/// order reshuffled.
struct EpochSampler {
    order: Vec<usize>,
    pos: usize,
}

impl EpochSampler {
    fn new(n: usize, rng: &mut RngState) -> Self {
        EpochSampler {
            order: rng.permutation(n),
            pos: 0,
        }
    }

    fn next_batch(&mut self, m: usize, rng: &mut RngState) -> &[usize] {
        if self.pos + m > self.order.len() {
            self.order = rng.permutation(self.order.len());
            self.pos = 0;
        }
        let batch = &self.order[self.pos..self.pos + m];
        self.pos += m;
        batch
    }
}

fn gather_rows(points: &Tensor, indices: &[usize]) -> Tensor {
    let mut data = Vec::with_capacity(indices.len() * points.cols());
    for &i in indices {
        data.extend_from_slice(points.row(i));
    }
    Tensor::new(indices.len(), points.cols(), data).expect("gathered batch shape")
}

/// Full training run. Minibatches are drawn without replacement per epoch
/// from the dataset; latent batches are fresh standard-normal draws each
/// iteration. Periodic checkpoints land in `checkpoint_dir` when given.
pub fn train(
    dataset: &EmpiricalMeasure,
    cfg: &TrainConfig,
    checkpoint_dir: Option<&Path>,
) -> TrainOutcome {
    let mut history = TrainHistory {
        ablation: cfg.ablation.clone(),
        ..TrainHistory::default()
    };
    let result = train_inner(dataset, cfg, checkpoint_dir, &mut history);
    TrainOutcome { history, result }
}

fn train_inner(
    dataset: &EmpiricalMeasure,
    cfg: &TrainConfig,
    checkpoint_dir: Option<&Path>,
    history: &mut TrainHistory,
) -> TrainResult<NetworkBundle> {
    cfg.validate()?;
    if dataset.dim() != cfg.ambient_dim {
        return Err(TrainError::Config(format!(
            "dataset dim {} does not match configured ambient dim {}",
            dataset.dim(),
            cfg.ambient_dim
        )));
    }
    if dataset.n() < cfg.batch {
        return Err(TrainError::Config(format!(
            "dataset of {} points cannot supply batches of {}",
            dataset.n(),
            cfg.batch
        )));
    }

    let mut init_rng = RngState::stream(cfg.seed, Stream::Init);
    let mut latent_rng = RngState::stream(cfg.seed, Stream::Latent);
    let mut shuffle_rng = RngState::stream(cfg.seed, Stream::Shuffle);

    let mut bundle = NetworkBundle::init(cfg.latent_dim, cfg.ambient_dim, &cfg.hidden, &mut init_rng)?;
    let mut opt = TrainerState::new(&bundle, cfg);
    let mut sampler = EpochSampler::new(dataset.n(), &mut shuffle_rng);

    if let Some(dir) = checkpoint_dir {
        std::fs::create_dir_all(dir)?;
        let path = dir.join("initial.gmeg");
        bundle.save(&path)?;
        history.checkpoints.push(path);
    }

    for iter in 0..cfg.iterations {
        let idx = sampler.next_batch(cfg.batch, &mut shuffle_rng).to_vec();
        let x_batch = gather_rows(dataset.points(), &idx);
        let y_batch = sample_latent(cfg.latent_dim, cfg.batch, &mut latent_rng)?
            .points()
            .clone();
        let loss = train_step(&mut bundle, &mut opt, &x_batch, &y_batch, cfg, iter)?;
        history.records.push(TrainRecord { iter, loss });

        if let Some(dir) = checkpoint_dir {
            if cfg.checkpoint_interval > 0 && (iter + 1) % cfg.checkpoint_interval == 0 {
                let path = dir.join(format!("ckpt_{:06}.gmeg", iter + 1));
                bundle.save(&path)?;
                history.checkpoints.push(path);
            }
        }
    }

    if let Some(dir) = checkpoint_dir {
        let path = dir.join("final.gmeg");
        bundle.save(&path)?;
        history.checkpoints.push(path);
    }
    Ok(bundle)
}

/// Pushforward sample: `n` fresh latent draws through `G`.
pub fn generate(
    bundle: &NetworkBundle,
    n: usize,
    rng: &mut RngState,
) -> TrainResult<EmpiricalMeasure> {
    let d = bundle.latent_dim();
    if n == 0 {
        return Ok(EmpiricalMeasure::uniform(Tensor::zeros(0, bundle.ambient_dim()))?);
    }
    let latent = sample_latent(d, n, rng)?;
    let points = bundle.generate_points(latent.points())?;
    Ok(EmpiricalMeasure::uniform(points)?)
}

/// Latent draws paired with their images; used by diagnostics that color
/// generated points by latent radius.
pub fn generate_with_latents(
    bundle: &NetworkBundle,
    n: usize,
    rng: &mut RngState,
) -> TrainResult<(Tensor, Tensor)> {
    let latent = sample_latent(bundle.latent_dim(), n.max(1), rng)?;
    let latent_pts = if n == 0 {
        Tensor::zeros(0, bundle.latent_dim())
    } else {
        latent.points().clone()
    };
    let generated = if n == 0 {
        Tensor::zeros(0, bundle.ambient_dim())
    } else {
        bundle.generate_points(&latent_pts)?
    };
    Ok((latent_pts, generated))
}
