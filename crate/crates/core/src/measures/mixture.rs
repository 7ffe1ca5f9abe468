use crate::nd::Tensor;

use super::{EmpiricalMeasure, MeasureError, MeasureResult, RngState};

/// Label value for points no mode claims.
pub const UNASSIGNED: u32 = u32::MAX;

/// Mixture of spherical Gaussians living in the first two coordinates of a
/// high-dimensional ambient space; trailing coordinates carry only small
/// isotropic noise so the data is effectively two-dimensional.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixtureSpec {
    pub ambient_dim: usize,
    pub centers: Tensor,
    pub var_leading: f64,
    pub var_trailing: f64,
    pub mode_weights: Vec<f64>,
}

impl GaussianMixtureSpec {
    pub fn new(
        ambient_dim: usize,
        centers: Tensor,
        var_leading: f64,
        var_trailing: f64,
        mode_weights: Vec<f64>,
    ) -> MeasureResult<Self> {
        if ambient_dim < 2 {
            return Err(MeasureError::Invalid("ambient dimension must be >= 2".into()));
        }
        if centers.rows() == 0 || centers.cols() != ambient_dim {
            return Err(MeasureError::Invalid(format!(
                "centers must be K x {ambient_dim} with K >= 1"
            )));
        }
        for i in 0..centers.rows() {
            if centers.row(i)[2..].iter().any(|&c| c != 0.0) {
                return Err(MeasureError::Invalid(
                    "center coordinates beyond index 2 must be exactly zero".into(),
                ));
            }
        }
        if !(var_leading > var_trailing && var_trailing > 0.0) {
            return Err(MeasureError::Invalid(format!(
                "need var_leading > var_trailing > 0, got {var_leading} and {var_trailing}"
            )));
        }
        if mode_weights.len() != centers.rows() {
            return Err(MeasureError::Invalid("one weight per mode required".into()));
        }
        let total: f64 = mode_weights.iter().sum();
        if mode_weights.iter().any(|&w| w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(MeasureError::Invalid("mode weights must form a simplex".into()));
        }
        Ok(GaussianMixtureSpec {
            ambient_dim,
            centers,
            var_leading,
            var_trailing,
            mode_weights,
        })
    }

    /// Uniform mode weights over a given center grid.
    pub fn with_uniform_weights(
        ambient_dim: usize,
        centers: Tensor,
        var_leading: f64,
        var_trailing: f64,
    ) -> MeasureResult<Self> {
        let k = centers.rows();
        let weights = vec![1.0 / k as f64; k];
        let mut weights = weights;
        let total: f64 = weights.iter().sum();
        weights[k - 1] += 1.0 - total;
        GaussianMixtureSpec::new(ambient_dim, centers, var_leading, var_trailing, weights)
    }

    /// 9-mode benchmark: 3x3 grid {-3, 0, 3}^2 in R^100.
    pub fn nine_mode_100d() -> Self {
        let centers = grid_centers(&[-3.0, 0.0, 3.0], &[-3.0, 0.0, 3.0], 100);
        GaussianMixtureSpec::with_uniform_weights(100, centers, 0.3, 0.003)
            .expect("benchmark spec is valid")
    }

    /// 12-mode benchmark: 4x3 grid {-4.5, -1.5, 1.5, 4.5} x {-3, 0, 3} in R^500.
    pub fn twelve_mode_500d() -> Self {
        let centers = grid_centers(&[-4.5, -1.5, 1.5, 4.5], &[-3.0, 0.0, 3.0], 500);
        GaussianMixtureSpec::with_uniform_weights(500, centers, 0.3, 0.003)
            .expect("benchmark spec is valid")
    }

    pub fn num_modes(&self) -> usize {
        self.centers.rows()
    }
}

/// Centers on the cartesian grid `xs x ys`, embedded in the first two
/// coordinates of `ambient_dim`.
pub fn grid_centers(xs: &[f64], ys: &[f64], ambient_dim: usize) -> Tensor {
    let mut rows = Vec::with_capacity(xs.len() * ys.len());
    for &x in xs {
        for &y in ys {
            let mut row = vec![0.0; ambient_dim];
            row[0] = x;
            row[1] = y;
            rows.push(row);
        }
    }
    Tensor::from_rows(&rows).expect("grid rows share ambient_dim")
}

/// Draws `n` i.i.d. mixture samples with uniform point weights; the returned
/// labels record each point's generating mode.
pub fn sample_mixture(
    spec: &GaussianMixtureSpec,
    n: usize,
    rng: &mut RngState,
) -> MeasureResult<(EmpiricalMeasure, Vec<u32>)> {
    if n == 0 {
        return Err(MeasureError::Invalid("need at least one sample".into()));
    }
    let d = spec.ambient_dim;
    let std_leading = spec.var_leading.sqrt();
    let std_trailing = spec.var_trailing.sqrt();
    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let mode = sample_categorical(&spec.mode_weights, rng);
        labels.push(mode as u32);
        let center = spec.centers.row(mode);
        for j in 0..d {
            let std = if j < 2 { std_leading } else { std_trailing };
            data.push(center[j] + std * rng.normal());
        }
    }
    let points = Tensor::new(n, d, data).map_err(|e| MeasureError::Invalid(e.to_string()))?;
    Ok((EmpiricalMeasure::uniform(points)?, labels))
}

fn sample_categorical(weights: &[f64], rng: &mut RngState) -> usize {
    let u = rng.uniform(0.0, 1.0);
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// `n` i.i.d. standard-normal points in `R^d`, uniform weights.
pub fn sample_latent(d: usize, n: usize, rng: &mut RngState) -> MeasureResult<EmpiricalMeasure> {
    if d == 0 {
        return Err(MeasureError::Invalid("latent dimension must be positive".into()));
    }
    let data: Vec<f64> = (0..n * d).map(|_| rng.normal()).collect();
    let points = Tensor::new(n, d, data).map_err(|e| MeasureError::Invalid(e.to_string()))?;
    EmpiricalMeasure::uniform(points)
}

/// Nearest mode center in the first two coordinates, accepted only within
/// `radius_multiplier * sqrt(var_leading)`; ties go to the lowest index.
pub fn assign_mode(
    points: &Tensor,
    spec: &GaussianMixtureSpec,
    radius_multiplier: f64,
) -> MeasureResult<Vec<u32>> {
    if points.cols() != spec.ambient_dim {
        return Err(MeasureError::Invalid(format!(
            "points have dim {}, spec expects {}",
            points.cols(),
            spec.ambient_dim
        )));
    }
    let radius_sq = (radius_multiplier * spec.var_leading.sqrt()).powi(2);
    let mut labels = Vec::with_capacity(points.rows());
    for i in 0..points.rows() {
        let p = points.row(i);
        let mut best = UNASSIGNED;
        let mut best_d = f64::INFINITY;
        for k in 0..spec.num_modes() {
            let c = spec.centers.row(k);
            let d = (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2);
            if d < best_d {
                best_d = d;
                best = k as u32;
            }
        }
        if best_d > radius_sq {
            best = UNASSIGNED;
        }
        labels.push(best);
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Stream;

    #[test]
    fn single_mode_mean_is_near_center() {
        let centers = grid_centers(&[0.0], &[0.0], 4);
        let spec = GaussianMixtureSpec::with_uniform_weights(4, centers, 0.3, 0.003).unwrap();
        let mut rng = RngState::stream(3, Stream::Data);
        let n = 100_000;
        let (m, _) = sample_mixture(&spec, n, &mut rng).unwrap();
        for j in 0..4 {
            let var = if j < 2 { 0.3 } else { 0.003 };
            let mean: f64 = (0..n).map(|i| m.point(i)[j]).sum::<f64>() / n as f64;
            let bound = 4.0 * (var / n as f64).sqrt();
            assert!(mean.abs() < bound, "coord {j}: mean {mean} exceeds {bound}");
        }
    }

    #[test]
    fn degenerate_trailing_variance_pins_trailing_coords() {
        let centers = grid_centers(&[1.0], &[-1.0], 5);
        let spec = GaussianMixtureSpec::with_uniform_weights(5, centers, 0.3, 1e-12).unwrap();
        let mut rng = RngState::stream(4, Stream::Data);
        let (m, _) = sample_mixture(&spec, 500, &mut rng).unwrap();
        for i in 0..m.n() {
            for &v in &m.point(i)[2..] {
                assert!(v.abs() < 1e-5);
            }
        }
    }

    #[test]
    fn nine_mode_benchmark_shape() {
        let spec = GaussianMixtureSpec::nine_mode_100d();
        assert_eq!(spec.num_modes(), 9);
        let mut rng = RngState::stream(5, Stream::Data);
        let (m, labels) = sample_mixture(&spec, 1000, &mut rng).unwrap();
        assert_eq!(m.n(), 1000);
        assert_eq!(m.dim(), 100);
        assert_eq!(labels.len(), 1000);
        assert!(labels.iter().all(|&l| l < 9));
    }

    #[test]
    fn latent_covariance_is_near_identity() {
        let mut rng = RngState::stream(6, Stream::Latent);
        let n = 100_000;
        let m = sample_latent(2, n, &mut rng).unwrap();
        let mut cov = [0.0f64; 4];
        for i in 0..n {
            let p = m.point(i);
            cov[0] += p[0] * p[0];
            cov[1] += p[0] * p[1];
            cov[2] += p[1] * p[0];
            cov[3] += p[1] * p[1];
        }
        for c in cov.iter_mut() {
            *c /= n as f64;
        }
        assert!((cov[0] - 1.0).abs() < 0.05);
        assert!((cov[3] - 1.0).abs() < 0.05);
        assert!(cov[1].abs() < 0.05);
    }

    #[test]
    fn latent_single_point_and_determinism() {
        let mut rng = RngState::stream(9, Stream::Latent);
        let m = sample_latent(3, 1, &mut rng).unwrap();
        assert_eq!(m.n(), 1);
        assert_eq!(m.weights(), &[1.0]);

        let a = sample_latent(2, 16, &mut RngState::stream(10, Stream::Latent)).unwrap();
        let b = sample_latent(2, 16, &mut RngState::stream(10, Stream::Latent)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn assign_mode_center_hit_and_tie_break() {
        let centers = grid_centers(&[-3.0, 3.0], &[0.0], 3);
        let spec = GaussianMixtureSpec::with_uniform_weights(3, centers, 0.3, 0.003).unwrap();
        // exactly at center 1
        let at_center = Tensor::new(1, 3, vec![-3.0, 0.0, 0.0]).unwrap();
        assert_eq!(assign_mode(&at_center, &spec, 3.0).unwrap(), vec![0]);
        // equidistant from both centers: lowest index wins
        let midpoint = Tensor::new(1, 3, vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(assign_mode(&midpoint, &spec, 10.0).unwrap(), vec![0]);
        // far away: unassigned
        let far = Tensor::new(1, 3, vec![50.0, 50.0, 0.0]).unwrap();
        assert_eq!(assign_mode(&far, &spec, 3.0).unwrap(), vec![UNASSIGNED]);
    }

    #[test]
    fn assign_mode_recovers_generating_labels() {
        let spec = GaussianMixtureSpec::nine_mode_100d();
        for seed in 0..10u64 {
            let mut rng = RngState::stream(100 + seed, Stream::Data);
            let (m, truth) = sample_mixture(&spec, 1000, &mut rng).unwrap();
            let labels = assign_mode(m.points(), &spec, 3.0).unwrap();
            let hits = labels
                .iter()
                .zip(&truth)
                .filter(|(a, b)| a == b)
                .count();
            assert!(hits >= 980, "seed {seed}: only {hits}/1000 recovered");
        }
    }

    #[test]
    fn assign_mode_is_translation_consistent() {
        let spec = GaussianMixtureSpec::nine_mode_100d();
        let mut rng = RngState::stream(21, Stream::Data);
        let (m, _) = sample_mixture(&spec, 200, &mut rng).unwrap();
        let labels = assign_mode(m.points(), &spec, 3.0).unwrap();

        // Translate points and centers by the same in-plane vector.
        let (dx, dy) = (1.75, -0.5);
        let mut shifted_points = m.points().clone();
        for i in 0..shifted_points.rows() {
            let v0 = shifted_points.get(i, 0);
            let v1 = shifted_points.get(i, 1);
            shifted_points.set(i, 0, v0 + dx);
            shifted_points.set(i, 1, v1 + dy);
        }
        let mut shifted_centers = spec.centers.clone();
        for k in 0..shifted_centers.rows() {
            let v0 = shifted_centers.get(k, 0);
            let v1 = shifted_centers.get(k, 1);
            shifted_centers.set(k, 0, v0 + dx);
            shifted_centers.set(k, 1, v1 + dy);
        }
        let shifted_spec = GaussianMixtureSpec::with_uniform_weights(
            100,
            shifted_centers,
            spec.var_leading,
            spec.var_trailing,
        )
        .unwrap();
        let shifted_labels = assign_mode(&shifted_points, &shifted_spec, 3.0).unwrap();
        assert_eq!(labels, shifted_labels);
    }

    #[test]
    fn per_mode_counts_near_uniform() {
        let spec = GaussianMixtureSpec::nine_mode_100d();
        let n = 1000usize;
        let k = 9.0;
        let bound = 4.0 * (n as f64 * (1.0 / k) * (1.0 - 1.0 / k)).sqrt();
        for seed in 0..10u64 {
            let mut rng = RngState::stream(300 + seed, Stream::Data);
            let (_, labels) = sample_mixture(&spec, n, &mut rng).unwrap();
            let mut counts = [0usize; 9];
            for &l in &labels {
                counts[l as usize] += 1;
            }
            for (mode, &c) in counts.iter().enumerate() {
                let dev = (c as f64 - n as f64 / k).abs();
                assert!(dev <= bound, "seed {seed} mode {mode}: |{c} - n/K| > {bound}");
            }
        }
    }
}
