use serde::Serialize;

use crate::measures::EmpiricalMeasure;
use crate::nd::Tensor;
use crate::ot::{solve_ot, wasserstein_p, CostKind, PointMap};

use super::{VerifyError, VerifyResult};

const EXACT_TOL: f64 = 1e-9;

/// Two-sided Wasserstein comparison under a bi-Lipschitz map:
/// `alpha W_p(T#a, T#b) <= W_p(a, b) <= W_p(T#a, T#b) / alpha`.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub alpha: f64,
    pub p: f64,
    pub w_original: f64,
    pub w_mapped: f64,
    pub lower: f64,
    pub upper: f64,
    pub slack_lower: f64,
    pub slack_upper: f64,
    pub pass: bool,
}

pub fn sandwich_check(
    map: &dyn PointMap,
    alpha: f64,
    a: &EmpiricalMeasure,
    b: &EmpiricalMeasure,
    p: f64,
) -> VerifyResult<SandwichReport> {
    if !(0.0 < alpha && alpha <= 1.0) {
        return Err(VerifyError::Contract("alpha must lie in (0, 1]".into()));
    }
    let w_original = wasserstein_p(a, b, p)?;
    let ta = a.map_points(|row| map.map_rows(&one_row(row)).row(0).to_vec())?;
    let tb = b.map_points(|row| map.map_rows(&one_row(row)).row(0).to_vec())?;
    let w_mapped = wasserstein_p(&ta, &tb, p)?;
    let lower = alpha * w_mapped;
    let upper = w_mapped / alpha;
    let slack_lower = w_original - lower;
    let slack_upper = upper - w_original;
    Ok(SandwichReport {
        alpha,
        p,
        w_original,
        w_mapped,
        lower,
        upper,
        slack_lower,
        slack_upper,
        pass: slack_lower >= -EXACT_TOL && slack_upper >= -EXACT_TOL,
    })
}

fn one_row(row: &[f64]) -> Tensor {
    Tensor::new(1, row.len(), row.to_vec()).expect("single row")
}

/// Exact agreement between OT under the encoder-composed cost
/// `||T(x) - y||^2 / 2` and the squared quadratic OT between `T#mu` and
/// `nu` (both solved exactly).
#[derive(Debug, Clone, Serialize)]
pub struct EqualityReport {
    /// OT cost under the encoder-composed cost on (mu, nu).
    pub encoder_side: f64,
    /// Quadratic OT cost between T#mu and nu.
    pub pushforward_side: f64,
    pub delta: f64,
    pub pass: bool,
}

pub fn encoder_cost_equality(
    map: &dyn PointMap,
    mu: &EmpiricalMeasure,
    nu: &EmpiricalMeasure,
) -> VerifyResult<EqualityReport> {
    ensure_injective_on_support(map, mu)?;
    let encoder_side = solve_ot(mu, nu, &CostKind::EncoderQuadratic { encoder: map })?.cost;
    let tmu = pushforward(map, mu)?;
    let pushforward_side = solve_ot(&tmu, nu, &CostKind::quadratic())?.cost;
    let delta = (encoder_side - pushforward_side).abs();
    Ok(EqualityReport {
        encoder_side,
        pushforward_side,
        delta,
        pass: delta <= EXACT_TOL,
    })
}

/// Constructive check of the generator factorization: the optimal
/// quadratic assignment `R*` from `nu` to `T#mu`, pulled back through
/// `T^{-1}` (an index lookup on the support), must push `nu` onto `mu` as a
/// multiset and attain the encoder-composed OT cost.
#[derive(Debug, Clone, Serialize)]
pub struct PushforwardReport {
    pub multiset_match: bool,
    pub attained_cost: f64,
    pub optimal_cost: f64,
    pub cost_delta: f64,
    pub pass: bool,
    /// Index map: generated point for each latent support index.
    pub generator_assignment: Vec<usize>,
}

pub fn pushforward_via_inverse(
    map: &dyn PointMap,
    mu: &EmpiricalMeasure,
    nu: &EmpiricalMeasure,
) -> VerifyResult<PushforwardReport> {
    ensure_injective_on_support(map, mu)?;
    let n = mu.n();
    if n != nu.n() {
        return Err(VerifyError::Contract("supports must have equal size".into()));
    }
    let tmu = pushforward(map, mu)?;

    // Optimal assignment for W2(T#mu, nu), read in the nu -> T#mu direction.
    let sol = solve_ot(&tmu, nu, &CostKind::quadratic())?;
    let assignment = sol.assignment.as_ref().expect("uniform solve yields an assignment");
    let mut source_of = vec![usize::MAX; n];
    for (i, &j) in assignment.iter().enumerate() {
        source_of[j] = i; // latent j receives image point i, so G(y_j) = x_i
    }

    // G#nu = { x_{source_of(j)} } must equal the support of mu as a multiset.
    let mut generated: Vec<Vec<f64>> = source_of
        .iter()
        .map(|&i| mu.point(i).to_vec())
        .collect();
    let mut original: Vec<Vec<f64>> = (0..n).map(|i| mu.point(i).to_vec()).collect();
    let key = |v: &Vec<f64>| {
        v.iter()
            .map(|x| x.to_bits())
            .collect::<Vec<u64>>()
    };
    generated.sort_by_key(key);
    original.sort_by_key(key);
    let multiset_match = generated == original;

    // The factored generator must attain the encoder-composed OT cost.
    let attained_cost = (0..n)
        .map(|j| {
            let image = map.map_rows(&one_row(mu.point(source_of[j])));
            sqdist(image.row(0), nu.point(j)) / 2.0
        })
        .sum::<f64>()
        / n as f64;
    let optimal_cost = solve_ot(mu, nu, &CostKind::EncoderQuadratic { encoder: map })?.cost;
    let cost_delta = (attained_cost - optimal_cost).abs();

    Ok(PushforwardReport {
        multiset_match,
        attained_cost,
        optimal_cost,
        cost_delta,
        pass: multiset_match && cost_delta <= EXACT_TOL,
        generator_assignment: source_of,
    })
}

fn pushforward(map: &dyn PointMap, mu: &EmpiricalMeasure) -> VerifyResult<EmpiricalMeasure> {
    Ok(EmpiricalMeasure::uniform(map.map_rows(mu.points()))?)
}

fn ensure_injective_on_support(map: &dyn PointMap, mu: &EmpiricalMeasure) -> VerifyResult<()> {
    let mapped = map.map_rows(mu.points());
    for i in 0..mu.n() {
        for j in (i + 1)..mu.n() {
            if sqdist(mapped.row(i), mapped.row(j)) < 1e-18 {
                return Err(VerifyError::Contract(format!(
                    "map is not injective on the support: images {i} and {j} coincide"
                )));
            }
        }
    }
    Ok(())
}

fn sqdist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{RngState, Stream};
    use crate::ot::LinearMap;

    fn cloud(seed: u64, n: usize, d: usize) -> EmpiricalMeasure {
        let mut rng = RngState::stream(seed, Stream::Data);
        let data: Vec<f64> = (0..n * d).map(|_| rng.normal()).collect();
        EmpiricalMeasure::uniform(Tensor::new(n, d, data).unwrap()).unwrap()
    }

    fn line(xs: &[f64]) -> EmpiricalMeasure {
        EmpiricalMeasure::uniform(Tensor::new(xs.len(), 1, xs.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn sandwich_identity_is_tight_on_both_sides() {
        let a = cloud(1, 6, 2);
        let b = cloud(2, 6, 2);
        let id = LinearMap::scaled_identity(2, 1.0);
        let r = sandwich_check(&id, 1.0, &a, &b, 2.0).unwrap();
        assert!(r.pass);
        assert!(r.slack_lower.abs() < 1e-12);
        assert!(r.slack_upper.abs() < 1e-12);
    }

    #[test]
    fn sandwich_pure_scaling_attains_each_end() {
        let a = cloud(3, 5, 2);
        let b = cloud(4, 5, 2);
        // Expansion by 3: alpha = 1/3, lower end tight.
        let expand = LinearMap::scaled_identity(2, 3.0);
        let r = sandwich_check(&expand, 1.0 / 3.0, &a, &b, 2.0).unwrap();
        assert!(r.pass);
        assert!(r.slack_lower.abs() < 1e-9, "lower end should be tight");
        // Contraction by alpha: upper end tight.
        let contract = LinearMap::scaled_identity(2, 0.4);
        let r = sandwich_check(&contract, 0.4, &a, &b, 2.0).unwrap();
        assert!(r.pass);
        assert!(r.slack_upper.abs() < 1e-9, "upper end should be tight");
    }

    #[test]
    fn encoder_cost_equality_hand_instance() {
        // mu = {0, 1}, T(x) = 2x, nu = {0.5, 2.5}: both sides equal 0.125.
        let mu = line(&[0.0, 1.0]);
        let nu = line(&[0.5, 2.5]);
        let double = LinearMap::scaled_identity(1, 2.0);
        let r = encoder_cost_equality(&double, &mu, &nu).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.encoder_side - 0.125).abs() < 1e-12);
        assert!((r.pushforward_side - 0.125).abs() < 1e-12);
    }

    #[test]
    fn pushforward_hand_instance_sends_latents_to_their_sources() {
        // T#mu = {0, 2}; optimal quadratic matching pairs 0.5 -> 0 and
        // 2.5 -> 2, so the factored generator sends 0.5 -> 0 and 2.5 -> 1.
        let mu = line(&[0.0, 1.0]);
        let nu = line(&[0.5, 2.5]);
        let double = LinearMap::scaled_identity(1, 2.0);
        let r = pushforward_via_inverse(&double, &mu, &nu).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.generator_assignment, vec![0, 1]);
    }

    #[test]
    fn non_injective_map_is_a_contract_error() {
        let mu = line(&[0.0, 1.0]);
        let nu = line(&[0.0, 1.0]);
        let collapse = LinearMap::scaled_identity(1, 0.0);
        assert!(encoder_cost_equality(&collapse, &mu, &nu).is_err());
    }
}
