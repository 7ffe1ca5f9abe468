use serde::Serialize;

use crate::measures::EmpiricalMeasure;
use crate::ot::{gm_cost, CostKind, PointMap};

use super::{VerifyError, VerifyResult};

/// Certificate that a small embedding cost forces near-isometry on a set of
/// large product measure. Every ordered support pair is classified by the
/// ratio `(||Tx - Tx'||^2 + 1) / (||x - x'||^2 + 1)`:
/// the good set `K` has ratio in `[alpha, 1/alpha]`, `B` is above, `Q`
/// below. A pass means `mu^2[K] >= 1 - eps / (log alpha)^2` and every
/// sufficiently separated pair in `K` satisfies the two-sided squared-norm
/// bound with constants `alpha (1 - gamma)` and `1/alpha + gamma`.
#[derive(Debug, Clone, Serialize)]
pub struct KSetReport {
    pub alpha: f64,
    pub gamma: f64,
    /// Measured embedding cost of the map.
    pub epsilon: f64,
    pub mass_in_k: f64,
    pub mass_b: f64,
    pub mass_q: f64,
    pub count_k: usize,
    pub count_b: usize,
    pub count_q: usize,
    /// `1 - eps / (log alpha)^2`
    pub bound: f64,
    pub measure_bound_ok: bool,
    pub bilip_bound_ok: bool,
    pub separated_pairs_checked: usize,
    pub pass: bool,
}

pub fn kset_check(
    map: &dyn PointMap,
    mu: &EmpiricalMeasure,
    alpha: f64,
    gamma: f64,
) -> VerifyResult<KSetReport> {
    if !(0.0 < alpha && alpha < 1.0) || !(0.0 < gamma && gamma < 1.0) {
        return Err(VerifyError::Contract(
            "alpha and gamma must lie strictly in (0, 1)".into(),
        ));
    }
    let epsilon = gm_cost(map, mu, &CostKind::LogQuadratic, &CostKind::LogQuadratic)?;
    let mapped = map.map_rows(mu.points());
    let w = mu.weights();
    let n = mu.n();

    let separation_sq = (1.0 - alpha) / (alpha * gamma);
    let mut mass_in_k = 0.0;
    let mut mass_b = 0.0;
    let mut mass_q = 0.0;
    let (mut count_k, mut count_b, mut count_q) = (0usize, 0usize, 0usize);
    let mut bilip_bound_ok = true;
    let mut separated_pairs_checked = 0usize;

    for i in 0..n {
        for j in 0..n {
            let d_sq = sqdist(mu.point(i), mu.point(j));
            let t_sq = sqdist(mapped.row(i), mapped.row(j));
            let ratio = (t_sq + 1.0) / (d_sq + 1.0);
            let wij = w[i] * w[j];
            if ratio > 1.0 / alpha {
                mass_b += wij;
                count_b += 1;
            } else if ratio < alpha {
                mass_q += wij;
                count_q += 1;
            } else {
                mass_in_k += wij;
                count_k += 1;
                if d_sq >= separation_sq {
                    separated_pairs_checked += 1;
                    let lower = alpha * (1.0 - gamma) * d_sq;
                    let upper = (1.0 / alpha + gamma) * d_sq;
                    if t_sq + 1e-12 < lower || t_sq > upper + 1e-12 {
                        bilip_bound_ok = false;
                    }
                }
            }
        }
    }

    let bound = 1.0 - epsilon / alpha.ln().powi(2);
    let measure_bound_ok = mass_in_k + 1e-12 >= bound;
    Ok(KSetReport {
        alpha,
        gamma,
        epsilon,
        mass_in_k,
        mass_b,
        mass_q,
        count_k,
        count_b,
        count_q,
        bound,
        measure_bound_ok,
        bilip_bound_ok,
        separated_pairs_checked,
        pass: measure_bound_ok && bilip_bound_ok,
    })
}

fn sqdist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
