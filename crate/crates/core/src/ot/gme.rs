use crate::measures::EmpiricalMeasure;
use crate::nd::{Node, Tape, Tensor};

use super::{pairwise_cost, CostKind, OtError, OtResult, PointMap};

/// Embedding cost of a map `T` against its own pushforward: the expectation
/// over distinct ordered support pairs of `(c_X(x, x') - c_Y(Tx, Tx'))^2`.
/// Zero exactly when `T` transports every pairwise cost, e.g. for
/// isometries under the log-quadratic cost.
pub fn gm_cost(
    map: &dyn PointMap,
    mu: &EmpiricalMeasure,
    cost_x: &CostKind,
    cost_y: &CostKind,
) -> OtResult<f64> {
    let n = mu.n();
    if n < 2 {
        return Err(OtError::Contract(
            "embedding cost needs at least two support points".into(),
        ));
    }
    let mapped = map.map_rows(mu.points());
    let cx = pairwise_cost(cost_x, mu.points(), mu.points())?;
    let cy = pairwise_cost(cost_y, &mapped, &mapped)?;
    let w = mu.weights();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let diff = cx.get(i, j) - cy.get(i, j);
            let wij = w[i] * w[j];
            num += wij * diff * diff;
            den += wij;
        }
    }
    Ok(num / den)
}

/// Differentiable minibatch embedding cost. `mapped` is the on-tape image
/// of the batch (so gradients reach the encoder's parameters); `x_batch`
/// supplies the constant source-side cost matrix. Averages over the
/// `m (m - 1)` ordered off-diagonal pairs, matching [`gm_cost`] on uniform
/// weights.
pub fn gme_term(
    tape: &mut Tape,
    mapped: Node,
    x_batch: &Tensor,
    cost_x: &CostKind,
    cost_y: &CostKind,
) -> OtResult<Node> {
    let m = x_batch.rows();
    if m < 2 {
        return Err(OtError::Contract(
            "minibatch embedding cost needs m >= 2".into(),
        ));
    }
    if tape.shape(mapped).0 != m {
        return Err(OtError::Dimension(
            "mapped batch and source batch row counts differ".into(),
        ));
    }
    let cx = pairwise_cost(cost_x, x_batch, x_batch)?;
    let cx_node = tape.constant(&cx);

    let sq = tape.pair_sqdist(mapped);
    let cy_node = match cost_y {
        CostKind::LogQuadratic => {
            let shifted = tape.affine(sq, 1.0, 1.0);
            tape.ln(shifted)
        }
        CostKind::QuadraticP { p } if *p == 2.0 => tape.affine(sq, 0.5, 0.0),
        CostKind::QuadraticP { p } => {
            return Err(OtError::Contract(format!(
                "differentiable embedding cost supports p = 2, got p = {p}"
            )));
        }
        CostKind::EncoderQuadratic { .. } => {
            return Err(OtError::Contract(
                "encoder cost is not a pairwise embedding cost".into(),
            ));
        }
    };
    let diff = tape.sub(cx_node, cy_node)?;
    let sq_diff = tape.mul(diff, diff)?;
    let total = tape.sum(sq_diff);
    // Diagonal entries are zero for both cost kinds, so summing everything
    // and dividing by m(m-1) is the off-diagonal average.
    Ok(tape.affine(total, 1.0 / (m * (m - 1)) as f64, 0.0))
}

/// Minibatch embedding cost of a network, as a plain value.
pub fn gme_minibatch(
    encoder: &crate::nd::Mlp,
    x_batch: &Tensor,
    cost_x: &CostKind,
    cost_y: &CostKind,
) -> OtResult<f64> {
    let mut tape = Tape::new();
    let x = tape.constant(x_batch);
    let bound = tape.bind(encoder);
    let mapped = tape.forward(&bound, x)?;
    let term = gme_term(&mut tape, mapped, x_batch, cost_x, cost_y)?;
    Ok(tape.scalar(term)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::EmpiricalMeasure;
    use crate::ot::LinearMap;

    fn uniform(points: Tensor) -> EmpiricalMeasure {
        EmpiricalMeasure::uniform(points).unwrap()
    }

    #[test]
    fn identity_map_scores_zero() {
        let mu = uniform(Tensor::new(3, 2, vec![0.0, 0.0, 1.0, -1.0, 2.5, 0.5]).unwrap());
        let id = LinearMap::scaled_identity(2, 1.0);
        let c = gm_cost(&id, &mu, &CostKind::LogQuadratic, &CostKind::LogQuadratic).unwrap();
        assert_eq!(c, 0.0);
    }

    #[test]
    fn rotation_scores_zero() {
        let mu = uniform(Tensor::new(3, 2, vec![1.0, 0.0, -0.5, 2.0, 0.0, -1.0]).unwrap());
        let theta = 0.7f64;
        let rot = LinearMap::new(
            Tensor::new(
                2,
                2,
                vec![theta.cos(), theta.sin(), -theta.sin(), theta.cos()],
            )
            .unwrap(),
        );
        let c = gm_cost(&rot, &mu, &CostKind::LogQuadratic, &CostKind::LogQuadratic).unwrap();
        assert!(c.abs() < 1e-12);
    }

    #[test]
    fn two_points_under_doubling_map() {
        // ||x - x'|| = 1, T doubles distances:
        // c_X = log 2, c_Y = log 5, cost = (log 2.5)^2 on every distinct pair.
        let mu = uniform(Tensor::new(2, 1, vec![0.0, 1.0]).unwrap());
        let double = LinearMap::scaled_identity(1, 2.0);
        let c = gm_cost(&double, &mu, &CostKind::LogQuadratic, &CostKind::LogQuadratic).unwrap();
        let expected = (2.5f64).ln().powi(2);
        assert!((c - expected).abs() < 1e-12, "got {c}, want {expected}");
    }

    #[test]
    fn minibatch_matches_gm_cost_and_handles_degenerate_batches() {
        let pts = Tensor::new(2, 1, vec![0.0, 1.0]).unwrap();
        let spec = crate::nd::MlpSpec::new(vec![1, 1], vec![], crate::nd::Activation::Identity)
            .unwrap();
        let double = crate::nd::Mlp::new(spec, vec![2.0, 0.0]).unwrap();
        let v = gme_minibatch(&double, &pts, &CostKind::LogQuadratic, &CostKind::LogQuadratic)
            .unwrap();
        assert!((v - (2.5f64).ln().powi(2)).abs() < 1e-12);

        // Identical points: everything cancels.
        let same = Tensor::new(3, 1, vec![0.4, 0.4, 0.4]).unwrap();
        let v0 = gme_minibatch(&double, &same, &CostKind::LogQuadratic, &CostKind::LogQuadratic)
            .unwrap();
        assert_eq!(v0, 0.0);

        // m = 1 is rejected.
        let one = Tensor::new(1, 1, vec![0.0]).unwrap();
        assert!(
            gme_minibatch(&double, &one, &CostKind::LogQuadratic, &CostKind::LogQuadratic)
                .is_err()
        );
    }
}
