use serde::Serialize;

use crate::gmegan::NetworkBundle;
use crate::measures::{sample_latent, EmpiricalMeasure, RngState};
use crate::nd::Mlp;
use crate::ot::ccm::test_subset;
use crate::ot::{pairwise_cost, CcmReport, CostKind};

use super::{VerifyError, VerifyResult};

/// Cyclical-monotonicity scan of a trained generator under the
/// encoder-composed cost: builds pairs `(G(y_i), y_i)` from fresh latent
/// draws and tests randomly sampled cycles up to `cycle_len`. Trained maps
/// are only approximately optimal, so this reports a pass fraction rather
/// than asserting; the conventional gate is 0.95 at tolerance 1e-6.
pub fn ccm_trained(
    bundle: &NetworkBundle,
    n_probe: usize,
    cycle_len: usize,
    cycles_per_len: usize,
    tol: f64,
    rng: &mut RngState,
) -> VerifyResult<CcmReport> {
    if cycle_len < 2 || cycle_len > 5 {
        return Err(VerifyError::Contract(format!(
            "cycle length {cycle_len} outside 2..=5"
        )));
    }
    if n_probe < cycle_len {
        return Err(VerifyError::Contract("need at least cycle_len probes".into()));
    }
    let latent = sample_latent(bundle.latent_dim(), n_probe, rng)?;
    let generated = bundle.generate_points(latent.points())?;
    let kind = CostKind::EncoderQuadratic { encoder: &bundle.t };
    let cost = pairwise_cost(&kind, &generated, latent.points())?;

    let mut report = CcmReport {
        is_ccm: true,
        worst_violation: f64::NEG_INFINITY,
        witness: None,
        cycles_tested: 0,
        cycles_violated: 0,
    };
    for k in 2..=cycle_len {
        for _ in 0..cycles_per_len {
            let subset = distinct_indices(n_probe, k, rng);
            test_subset(&cost, &subset, tol, &mut report);
        }
    }
    if report.cycles_tested == 0 {
        report.worst_violation = 0.0;
    }
    Ok(report)
}

fn distinct_indices(n: usize, k: usize, rng: &mut RngState) -> Vec<usize> {
    let mut chosen = Vec::with_capacity(k);
    while chosen.len() < k {
        let candidate = rng.index(n);
        if !chosen.contains(&candidate) {
            chosen.push(candidate);
        }
    }
    chosen
}

/// Fraction of latent pairs with `<T(G(y)) - T(G(y')), y - y'> >= 0`;
/// the planar monotonicity witness for a two-dimensional latent space.
pub fn monotone2d_check(
    bundle: &NetworkBundle,
    n_probe: usize,
    rng: &mut RngState,
) -> VerifyResult<f64> {
    if bundle.latent_dim() != 2 {
        return Err(VerifyError::Contract(
            "planar monotonicity check needs a 2-D latent space".into(),
        ));
    }
    if n_probe == 0 {
        return Err(VerifyError::Contract("need at least one probe pair".into()));
    }
    let latent = sample_latent(2, 2 * n_probe, rng)?;
    let transported = bundle.transport(latent.points())?;
    let mut ok = 0usize;
    for p in 0..n_probe {
        let (i, j) = (2 * p, 2 * p + 1);
        let dy: Vec<f64> = latent
            .point(i)
            .iter()
            .zip(latent.point(j))
            .map(|(a, b)| a - b)
            .collect();
        let dt: Vec<f64> = transported
            .row(i)
            .iter()
            .zip(transported.row(j))
            .map(|(a, b)| a - b)
            .collect();
        let inner: f64 = dy.iter().zip(&dt).map(|(a, b)| a * b).sum();
        if inner >= 0.0 {
            ok += 1;
        }
    }
    Ok(ok as f64 / n_probe as f64)
}

/// Empirical modulus-of-continuity profile of a scalar network: the
/// largest observed `|psi(x) - psi(x')|` per distance bin, made monotone by
/// a running maximum. A flatter curve certifies a more regular
/// discriminator.
#[derive(Debug, Clone, Serialize)]
pub struct ModulusProfile {
    /// Upper edge of each distance bin.
    pub bin_edges: Vec<f64>,
    /// Monotone envelope of per-bin maxima.
    pub omega: Vec<f64>,
    pub pair_counts: Vec<usize>,
}

pub fn modulus_probe(
    psi: &Mlp,
    sample: &EmpiricalMeasure,
    num_pairs: usize,
    num_bins: usize,
    rng: &mut RngState,
) -> VerifyResult<ModulusProfile> {
    if num_pairs == 0 || num_bins == 0 {
        return Err(VerifyError::Contract("need pairs and bins".into()));
    }
    if sample.n() < 2 {
        return Err(VerifyError::Degenerate("sample has fewer than two points".into()));
    }
    let values = psi.eval(sample.points())?;
    let mut draws: Vec<(f64, f64)> = Vec::with_capacity(num_pairs);
    let mut max_dist: f64 = 0.0;
    for _ in 0..num_pairs {
        let i = rng.index(sample.n());
        let mut j = rng.index(sample.n());
        if i == j {
            j = (j + 1) % sample.n();
        }
        let dist = sample
            .point(i)
            .iter()
            .zip(sample.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let gap = (values.get(i, 0) - values.get(j, 0)).abs();
        max_dist = max_dist.max(dist);
        draws.push((dist, gap));
    }
    if max_dist == 0.0 {
        // All sampled pairs coincide; profile is identically zero.
        return Ok(ModulusProfile {
            bin_edges: vec![0.0; num_bins],
            omega: vec![0.0; num_bins],
            pair_counts: vec![0; num_bins],
        });
    }
    let width = max_dist / num_bins as f64;
    let mut omega = vec![0.0f64; num_bins];
    let mut counts = vec![0usize; num_bins];
    for (dist, gap) in draws {
        let bin = ((dist / width) as usize).min(num_bins - 1);
        omega[bin] = omega[bin].max(gap);
        counts[bin] += 1;
    }
    // Isotonic post-processing: running maximum.
    for b in 1..num_bins {
        omega[b] = omega[b].max(omega[b - 1]);
    }
    Ok(ModulusProfile {
        bin_edges: (1..=num_bins).map(|b| b as f64 * width).collect(),
        omega,
        pair_counts: counts,
    })
}
