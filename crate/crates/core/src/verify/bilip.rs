use serde::Serialize;

use crate::measures::{EmpiricalMeasure, RngState};
use crate::ot::PointMap;

use super::{VerifyError, VerifyResult};

/// Pairs below this separation are excluded from every ratio diagnostic.
const MIN_SEPARATION: f64 = 1e-9;

/// Distortion scatter of a map over sampled point pairs: each entry is
/// `(||x - x'||, ||T(x) - T(x')|| / ||x - x'||)`.
#[derive(Debug, Clone, Serialize)]
pub struct BiLipReport {
    pub pairs: Vec<(f64, f64)>,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl BiLipReport {
    pub fn iqr(&self) -> f64 {
        self.q75 - self.q25
    }
}

pub fn bilip_scatter(
    map: &dyn PointMap,
    sample: &EmpiricalMeasure,
    num_pairs: usize,
    rng: &mut RngState,
) -> VerifyResult<BiLipReport> {
    if num_pairs == 0 {
        return Err(VerifyError::Contract("need at least one pair".into()));
    }
    if sample.n() < 2 {
        return Err(VerifyError::Degenerate("sample has fewer than two points".into()));
    }
    let mapped = map.map_rows(sample.points());
    let mut pairs = Vec::with_capacity(num_pairs);
    let mut attempts = 0usize;
    // Rejection bound guards against an all-identical sample.
    let max_attempts = num_pairs.saturating_mul(100) + 1000;
    while pairs.len() < num_pairs {
        attempts += 1;
        if attempts > max_attempts {
            return Err(VerifyError::Degenerate(
                "could not sample separated pairs; points may all coincide".into(),
            ));
        }
        let i = rng.index(sample.n());
        let j = rng.index(sample.n());
        if i == j {
            continue;
        }
        let dist = euclid(sample.point(i), sample.point(j));
        if dist < MIN_SEPARATION {
            continue;
        }
        let mapped_dist = euclid(mapped.row(i), mapped.row(j));
        pairs.push((dist, mapped_dist / dist));
    }

    let mut ratios: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    ratios.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
    let q = |frac: f64| -> f64 {
        let idx = ((ratios.len() - 1) as f64 * frac).round() as usize;
        ratios[idx]
    };
    Ok(BiLipReport {
        q25: q(0.25),
        median: q(0.5),
        q75: q(0.75),
        min_ratio: ratios[0],
        max_ratio: *ratios.last().expect("non-empty"),
        pairs,
    })
}

/// Discrete bi-Lipschitz constant of a map over a support: the largest
/// `alpha <= 1` with `alpha ||x-x'|| <= ||Tx-Tx'|| <= ||x-x'|| / alpha`
/// over all separated pairs.
pub fn discrete_bilip_alpha(map: &dyn PointMap, points: &crate::nd::Tensor) -> f64 {
    let mapped = map.map_rows(points);
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    for i in 0..points.rows() {
        for j in (i + 1)..points.rows() {
            let dist = euclid(points.row(i), points.row(j));
            if dist < MIN_SEPARATION {
                continue;
            }
            let r = euclid(mapped.row(i), mapped.row(j)) / dist;
            min_ratio = min_ratio.min(r);
            max_ratio = max_ratio.max(r);
        }
    }
    if !min_ratio.is_finite() || max_ratio == 0.0 {
        return 1.0; // no separated pairs: any constant works
    }
    min_ratio.min(1.0 / max_ratio).min(1.0)
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Stream;
    use crate::nd::Tensor;
    use crate::ot::LinearMap;

    fn cloud(seed: u64, n: usize, d: usize) -> EmpiricalMeasure {
        let mut rng = RngState::stream(seed, Stream::Data);
        let data: Vec<f64> = (0..n * d).map(|_| rng.normal()).collect();
        EmpiricalMeasure::uniform(Tensor::new(n, d, data).unwrap()).unwrap()
    }

    #[test]
    fn identity_map_has_unit_ratios() {
        let sample = cloud(1, 20, 3);
        let mut rng = RngState::stream(2, Stream::Probe);
        let id = LinearMap::scaled_identity(3, 1.0);
        let report = bilip_scatter(&id, &sample, 200, &mut rng).unwrap();
        for &(_, r) in &report.pairs {
            assert!((r - 1.0).abs() < 1e-12);
        }
        assert!((report.median - 1.0).abs() < 1e-12);
    }

    #[test]
    fn doubling_map_has_ratio_two() {
        let sample = cloud(3, 15, 2);
        let mut rng = RngState::stream(4, Stream::Probe);
        let double = LinearMap::scaled_identity(2, 2.0);
        let report = bilip_scatter(&double, &sample, 100, &mut rng).unwrap();
        assert!((report.min_ratio - 2.0).abs() < 1e-12);
        assert!((report.max_ratio - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_sample_is_rejected() {
        let sample = EmpiricalMeasure::uniform(Tensor::zeros(5, 2)).unwrap();
        let mut rng = RngState::stream(5, Stream::Probe);
        let id = LinearMap::scaled_identity(2, 1.0);
        assert!(bilip_scatter(&id, &sample, 10, &mut rng).is_err());
    }

    #[test]
    fn discrete_alpha_of_scaling_maps() {
        let pts = cloud(6, 12, 2);
        let triple = LinearMap::scaled_identity(2, 3.0);
        let alpha = discrete_bilip_alpha(&triple, pts.points());
        assert!((alpha - 1.0 / 3.0).abs() < 1e-12);
        let half = LinearMap::scaled_identity(2, 0.5);
        let alpha = discrete_bilip_alpha(&half, pts.points());
        assert!((alpha - 0.5).abs() < 1e-12);
    }
}
