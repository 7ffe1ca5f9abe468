use serde::Serialize;

use crate::nd::{BoundMlp, Node, Tape, Tensor};
use crate::ot::gme_term;

use super::{NetworkBundle, TrainConfig, TrainError, TrainResult};

/// The five loss terms on one batch pair, plus their weighted total
/// `ot + l1*gme + disc + l2*gp + l3*recon`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LossBreakdown {
    /// `E_y ||T(G(y)) - y||^2 / 2`
    pub ot: f64,
    /// minibatch embedding cost of `T` on the data batch
    pub gme: f64,
    /// `E_y psi(G(y)) - E_x psi(x)`
    pub disc: f64,
    /// `E_x ||grad psi(x)||^2`
    pub gp: f64,
    /// `E_x ||G(R_inv(T(x))) - x||^2`
    pub recon: f64,
    pub total: f64,
}

impl LossBreakdown {
    pub fn is_finite(&self) -> bool {
        [self.ot, self.gme, self.disc, self.gp, self.recon, self.total]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// Assembled loss graph for one step: the recorded tape, the bound
/// networks, and the scalar the optimizers differentiate. The update root
/// carries the gradient penalty with a descent sign so the discriminator's
/// ascent step shrinks it; the reported total keeps the written `+l2*gp`.
pub(crate) struct LossGraph {
    pub tape: Tape,
    pub g: BoundMlp,
    pub t: BoundMlp,
    pub psi: BoundMlp,
    pub r_inv: BoundMlp,
    pub update_root: Node,
    pub breakdown: LossBreakdown,
}

pub(crate) fn build_loss(
    bundle: &NetworkBundle,
    x_batch: &Tensor,
    y_batch: &Tensor,
    cfg: &TrainConfig,
    iter: usize,
) -> TrainResult<LossGraph> {
    let m = x_batch.rows();
    if m != y_batch.rows() {
        return Err(TrainError::Config(format!(
            "batch sizes differ: {} data rows, {} latent rows",
            m,
            y_batch.rows()
        )));
    }
    if x_batch.cols() != bundle.ambient_dim() || y_batch.cols() != bundle.latent_dim() {
        return Err(TrainError::Config("batch widths do not match the bundle".into()));
    }

    let mut tape = Tape::new();
    let g = tape.bind(&bundle.g);
    let t = tape.bind(&bundle.t);
    let psi = tape.bind(&bundle.psi);
    let r_inv = tape.bind(&bundle.r_inv);
    let x = tape.constant(x_batch);
    let y = tape.constant(y_batch);

    // Transport term: E ||T(G(y)) - y||^2 / 2.
    let gy = tape.forward(&g, y)?;
    let tgy = tape.forward(&t, gy)?;
    let ot = {
        let diff = tape.sub(tgy, y)?;
        let sq = tape.mul(diff, diff)?;
        let total = tape.sum(sq);
        tape.affine(total, 1.0 / (2.0 * m as f64), 0.0)
    };

    // Embedding cost of the encoder on the data batch.
    let tx = tape.forward(&t, x)?;
    let kind = cfg.gme_cost.kind();
    let gme = gme_term(&mut tape, tx, x_batch, &kind, &kind)?;

    // Adversarial term: E psi(G(y)) - E psi(x).
    let psi_gy = tape.forward(&psi, gy)?;
    let psi_x = tape.forward(&psi, x)?;
    let disc = {
        let mean_fake = tape.mean(psi_gy);
        let mean_real = tape.mean(psi_x);
        tape.sub(mean_fake, mean_real)?
    };

    // Gradient penalty at real samples.
    let u = tape.input_gradient(&psi, x)?;
    let gp = {
        let sq = tape.mul(u, u)?;
        let total = tape.sum(sq);
        tape.affine(total, 1.0 / m as f64, 0.0)
    };

    // Reconstruction through the corrected inverse: E ||G(R_inv(T(x))) - x||^2.
    let rtx = tape.forward(&r_inv, tx)?;
    let grtx = tape.forward(&g, rtx)?;
    let recon = {
        let diff = tape.sub(grtx, x)?;
        let sq = tape.mul(diff, diff)?;
        let total = tape.sum(sq);
        tape.affine(total, 1.0 / m as f64, 0.0)
    };

    let breakdown = LossBreakdown {
        ot: tape.scalar(ot)?,
        gme: tape.scalar(gme)?,
        disc: tape.scalar(disc)?,
        gp: tape.scalar(gp)?,
        recon: tape.scalar(recon)?,
        total: 0.0,
    };
    let breakdown = LossBreakdown {
        total: breakdown.ot
            + cfg.lambda1 * breakdown.gme
            + breakdown.disc
            + cfg.lambda2 * breakdown.gp
            + cfg.lambda3 * breakdown.recon,
        ..breakdown
    };
    if !breakdown.is_finite() {
        return Err(TrainError::NonFinite { term: "loss", iter });
    }

    // Diagnosis toggle (temporary): literal ascent sign on the penalty.
    let gp_sign = if std::env::var("GMELAB_GP_ASCENT").is_ok() { 1.0 } else { -1.0 };
    let update_root = {
        let gme_w = tape.affine(gme, cfg.lambda1, 0.0);
        let gp_w = tape.affine(gp, gp_sign * cfg.lambda2, 0.0);
        let recon_w = tape.affine(recon, cfg.lambda3, 0.0);
        let s1 = tape.add(ot, gme_w)?;
        let s2 = tape.add(s1, disc)?;
        let s3 = tape.add(s2, gp_w)?;
        tape.add(s3, recon_w)?
    };

    Ok(LossGraph {
        tape,
        g,
        t,
        psi,
        r_inv,
        update_root,
        breakdown,
    })
}

/// The loss terms on one batch, without touching any parameters.
pub fn assemble_loss(
    bundle: &NetworkBundle,
    x_batch: &Tensor,
    y_batch: &Tensor,
    cfg: &TrainConfig,
) -> TrainResult<LossBreakdown> {
    Ok(build_loss(bundle, x_batch, y_batch, cfg, 0)?.breakdown)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{RngState, Stream};
    use crate::nd::{grad_penalty_and_param_grad, Activation, Mlp, MlpSpec};
    use crate::ot::gme_minibatch;

    fn small_bundle(seed: u64) -> NetworkBundle {
        let mut rng = RngState::stream(seed, Stream::Init);
        NetworkBundle::init(2, 5, &[6], &mut rng).unwrap()
    }

    fn batches(seed: u64, m: usize, big_d: usize, d: usize) -> (Tensor, Tensor) {
        let mut rng = RngState::stream(seed, Stream::Data);
        let x = Tensor::new(m, big_d, (0..m * big_d).map(|_| rng.normal()).collect()).unwrap();
        let y = Tensor::new(m, d, (0..m * d).map(|_| rng.normal()).collect()).unwrap();
        (x, y)
    }

    #[test]
    fn reduces_to_transport_term_when_everything_else_is_off() {
        let mut bundle = small_bundle(3);
        bundle.psi = Mlp::zeros(bundle.psi.spec().clone());
        let (x, y) = batches(4, 4, 5, 2);
        let cfg = TrainConfig {
            lambda1: 0.0,
            lambda2: 0.0,
            lambda3: 0.0,
            ambient_dim: 5,
            ..TrainConfig::default()
        };
        let loss = assemble_loss(&bundle, &x, &y, &cfg).unwrap();
        assert_eq!(loss.disc, 0.0);
        assert!((loss.total - loss.ot).abs() < 1e-15);

        // Independent transport-term recomputation.
        let tgy = bundle.transport(&y).unwrap();
        let mut expected = 0.0;
        for i in 0..y.rows() {
            for j in 0..y.cols() {
                let d = tgy.get(i, j) - y.get(i, j);
                expected += d * d;
            }
        }
        expected /= 2.0 * y.rows() as f64;
        assert!((loss.ot - expected).abs() < 1e-12);
    }

    #[test]
    fn identity_chain_zeroes_the_transport_term() {
        // Linear G = T = identity on R^2 makes T(G(y)) = y exactly.
        let ident =
            |n: usize| MlpSpec::new(vec![n, n], vec![], Activation::Identity).unwrap();
        let eye = |n: usize| {
            let mut p = vec![0.0; n * n + n];
            for i in 0..n {
                p[i * n + i] = 1.0;
            }
            Mlp::new(ident(n), p).unwrap()
        };
        let psi_spec = MlpSpec::new(vec![2, 1], vec![], Activation::Identity).unwrap();
        let bundle = NetworkBundle::new(
            eye(2),
            eye(2),
            Mlp::zeros(psi_spec),
            eye(2),
        )
        .unwrap();
        let (x, y) = batches(5, 3, 2, 2);
        let cfg = TrainConfig {
            ambient_dim: 2,
            ..TrainConfig::default()
        };
        let loss = assemble_loss(&bundle, &x, &y, &cfg).unwrap();
        assert!(loss.ot.abs() < 1e-15);
        assert!(loss.recon.abs() < 1e-15);
    }

    #[test]
    fn total_matches_independent_term_by_term_recomputation() {
        let bundle = small_bundle(8);
        let (x, y) = batches(9, 6, 5, 2);
        let cfg = TrainConfig {
            ambient_dim: 5,
            ..TrainConfig::default()
        };
        let loss = assemble_loss(&bundle, &x, &y, &cfg).unwrap();

        let m = x.rows() as f64;
        // Transport.
        let tgy = bundle.transport(&y).unwrap();
        let mut ot = 0.0;
        for i in 0..y.rows() {
            for j in 0..y.cols() {
                let d = tgy.get(i, j) - y.get(i, j);
                ot += d * d;
            }
        }
        ot /= 2.0 * m;
        // Embedding cost.
        let kind = cfg.gme_cost.kind();
        let gme = gme_minibatch(&bundle.t, &x, &kind, &kind).unwrap();
        // Adversarial.
        let psi_fake = bundle.psi.eval(&bundle.generate_points(&y).unwrap()).unwrap();
        let psi_real = bundle.psi.eval(&x).unwrap();
        let disc = psi_fake.data().iter().sum::<f64>() / m
            - psi_real.data().iter().sum::<f64>() / m;
        // Gradient penalty.
        let (gp, _) = grad_penalty_and_param_grad(&bundle.psi, &x).unwrap();
        // Reconstruction.
        let recon_pts = bundle
            .g
            .eval(&bundle.r_inv.eval(&bundle.encode(&x).unwrap()).unwrap())
            .unwrap();
        let mut recon = 0.0;
        for i in 0..x.rows() {
            for j in 0..x.cols() {
                let d = recon_pts.get(i, j) - x.get(i, j);
                recon += d * d;
            }
        }
        recon /= m;

        let total = ot + cfg.lambda1 * gme + disc + cfg.lambda2 * gp + cfg.lambda3 * recon;
        assert!((loss.ot - ot).abs() < 1e-12);
        assert!((loss.gme - gme).abs() < 1e-12);
        assert!((loss.disc - disc).abs() < 1e-12);
        assert!((loss.gp - gp).abs() < 1e-12);
        assert!((loss.recon - recon).abs() < 1e-12);
        assert!((loss.total - total).abs() < 1e-12);
    }

    #[test]
    fn additivity_of_the_reported_total() {
        let bundle = small_bundle(12);
        let (x, y) = batches(13, 5, 5, 2);
        let cfg = TrainConfig {
            ambient_dim: 5,
            ..TrainConfig::default()
        };
        let loss = assemble_loss(&bundle, &x, &y, &cfg).unwrap();
        let recomposed = loss.ot
            + cfg.lambda1 * loss.gme
            + loss.disc
            + cfg.lambda2 * loss.gp
            + cfg.lambda3 * loss.recon;
        assert!((loss.total - recomposed).abs() < 1e-9);
    }
}
