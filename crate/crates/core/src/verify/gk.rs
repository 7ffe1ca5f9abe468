use super::{VerifyError, VerifyResult};

/// Piecewise-linear sawtooth on [0, 1] with `k` teeth:
/// `2k |x - (2i+1)/(2k)|` on segment `[i/k, (i+1)/k]`; `k = 0` is the
/// identity. Every member pushes the uniform law on [0, 1] to itself, yet
/// the graphs grow arbitrarily irregular with `k` -- the canonical
/// demonstration that the pushforward constraint alone cannot pin down a
/// well-behaved generator.
pub fn sawtooth(k: usize, x: f64) -> f64 {
    if k == 0 {
        return x;
    }
    let kf = k as f64;
    let segment = ((x * kf).floor() as usize).min(k - 1);
    2.0 * kf * (x - (2 * segment + 1) as f64 / (2.0 * kf)).abs()
}

/// One-sample Kolmogorov-Smirnov statistic against Uniform[0, 1].
pub fn ks_statistic_uniform(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = values.len() as f64;
    let mut ks: f64 = 0.0;
    for (i, &v) in values.iter().enumerate() {
        ks = ks.max((i as f64 + 1.0) / n - v).max(v - i as f64 / n);
    }
    ks
}

/// KS distance between the sawtooth pushforward of an `n`-point uniform
/// midpoint grid and the uniform law. Analytically the pushforward is
/// exactly uniform; the statistic only measures grid discretization
/// (0.5/n for k = 0, k/n for k >= 1 on aligned grids).
pub fn gk_pushforward_demo(k: usize, n: usize) -> VerifyResult<f64> {
    if n < 100 {
        return Err(VerifyError::Contract("need a grid of at least 100 points".into()));
    }
    let mut values: Vec<f64> = (0..n)
        .map(|j| sawtooth(k, (j as f64 + 0.5) / n as f64))
        .collect();
    Ok(ks_statistic_uniform(&mut values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sawtooth_hits_its_corners() {
        assert_eq!(sawtooth(0, 0.3), 0.3);
        // k = 2: segment boundaries map to 1, midpoints to 0.
        assert!((sawtooth(2, 0.0) - 1.0).abs() < 1e-12);
        assert!(sawtooth(2, 0.25) < 1e-12);
        assert!((sawtooth(2, 0.5) - 1.0).abs() < 1e-12);
        assert!(sawtooth(2, 0.75) < 1e-12);
        assert!((sawtooth(2, 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_ks_is_half_grid_resolution() {
        let n = 10_000;
        let ks = gk_pushforward_demo(0, n).unwrap();
        assert!((ks - 0.5 / n as f64).abs() < 1e-12, "ks = {ks}");
    }

    #[test]
    fn aligned_grids_give_k_over_n() {
        // Each output value repeats 2k times on an aligned grid, so the
        // empirical CDF steps in increments of 2k/n and the statistic is k/n.
        let n = 10_000;
        for k in [2usize, 5] {
            let ks = gk_pushforward_demo(k, n).unwrap();
            let expected = k as f64 / n as f64;
            assert!(
                (ks - expected).abs() < 1e-12,
                "k = {k}: ks = {ks}, expected {expected}"
            );
        }
    }

    #[test]
    fn small_grids_are_rejected() {
        assert!(gk_pushforward_demo(1, 10).is_err());
    }
}
