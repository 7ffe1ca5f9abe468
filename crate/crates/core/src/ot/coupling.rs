use serde::Serialize;

use crate::nd::Tensor;

use super::{OtError, OtResult};

const MARGINAL_TOL: f64 = 1e-9;

/// Doubly-marginal-feasible transport plan on two finite supports.
#[derive(Debug, Clone, Serialize)]
pub struct Coupling {
    #[serde(skip)]
    plan: Tensor,
    row_weights: Vec<f64>,
    col_weights: Vec<f64>,
}

impl Coupling {
    pub fn new(plan: Tensor, row_weights: Vec<f64>, col_weights: Vec<f64>) -> OtResult<Self> {
        if plan.rows() != row_weights.len() || plan.cols() != col_weights.len() {
            return Err(OtError::Dimension(format!(
                "plan {}x{} against {} row and {} col weights",
                plan.rows(),
                plan.cols(),
                row_weights.len(),
                col_weights.len()
            )));
        }
        if plan.data().iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(OtError::Infeasible("negative or non-finite plan entry".into()));
        }
        for i in 0..plan.rows() {
            let sum: f64 = plan.row(i).iter().sum();
            if (sum - row_weights[i]).abs() > MARGINAL_TOL {
                return Err(OtError::Infeasible(format!(
                    "row {i} sums to {sum}, expected {}",
                    row_weights[i]
                )));
            }
        }
        for j in 0..plan.cols() {
            let sum: f64 = (0..plan.rows()).map(|i| plan.get(i, j)).sum();
            if (sum - col_weights[j]).abs() > MARGINAL_TOL {
                return Err(OtError::Infeasible(format!(
                    "column {j} sums to {sum}, expected {}",
                    col_weights[j]
                )));
            }
        }
        Ok(Coupling {
            plan,
            row_weights,
            col_weights,
        })
    }

    /// Deterministic plan induced by a row-to-column assignment on uniform
    /// supports of equal size.
    pub fn from_assignment(assignment: &[usize], n: usize) -> OtResult<Self> {
        if assignment.len() != n {
            return Err(OtError::Contract("assignment length mismatch".into()));
        }
        let w = 1.0 / n as f64;
        let mut plan = Tensor::zeros(n, n);
        for (i, &j) in assignment.iter().enumerate() {
            if j >= n {
                return Err(OtError::Contract(format!("assignment target {j} out of range")));
            }
            plan.set(i, j, w);
        }
        Coupling::new(plan, vec![w; n], vec![w; n])
    }

    /// Plan induced by mapping each row atom to itself under arbitrary
    /// weights (the coupling of `T` pushing `mu` forward: row i pairs with
    /// the image point i).
    pub fn map_induced(weights: &[f64]) -> OtResult<Self> {
        let n = weights.len();
        let mut plan = Tensor::zeros(n, n);
        for (i, &w) in weights.iter().enumerate() {
            plan.set(i, i, w);
        }
        Coupling::new(plan, weights.to_vec(), weights.to_vec())
    }

    pub fn plan(&self) -> &Tensor {
        &self.plan
    }

    pub fn row_weights(&self) -> &[f64] {
        &self.row_weights
    }

    pub fn col_weights(&self) -> &[f64] {
        &self.col_weights
    }

    /// Plan-weighted sum of a cost matrix.
    pub fn transport_cost(&self, cost: &Tensor) -> OtResult<f64> {
        if cost.rows() != self.plan.rows() || cost.cols() != self.plan.cols() {
            return Err(OtError::Dimension("cost matrix does not match plan".into()));
        }
        Ok(self
            .plan
            .data()
            .iter()
            .zip(cost.data())
            .map(|(&p, &c)| p * c)
            .sum())
    }
}

/// Coupling-level Gromov-Wasserstein objective
/// `sum_{i,j,i',j'} pi_ij pi_i'j' (c_X(i,i') - c_Y(j,j'))^2` -- evaluation
/// only, no minimization.
pub fn gw_objective(coupling: &Coupling, cost_x: &Tensor, cost_y: &Tensor) -> OtResult<f64> {
    let n = coupling.plan().rows();
    let k = coupling.plan().cols();
    if cost_x.rows() != n || cost_x.cols() != n {
        return Err(OtError::Dimension("c_X must be square on the row support".into()));
    }
    if cost_y.rows() != k || cost_y.cols() != k {
        return Err(OtError::Dimension("c_Y must be square on the column support".into()));
    }
    // Only pairs of nonzero plan entries contribute.
    let mut support: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..n {
        for j in 0..k {
            let p = coupling.plan().get(i, j);
            if p > 0.0 {
                support.push((i, j, p));
            }
        }
    }
    let mut total = 0.0;
    for &(i, j, p) in &support {
        for &(i2, j2, q) in &support {
            let diff = cost_x.get(i, i2) - cost_y.get(j, j2);
            total += p * q * diff * diff;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marginals_are_enforced() {
        let plan = Tensor::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(Coupling::new(plan.clone(), vec![0.5, 0.5], vec![0.5, 0.5]).is_ok());
        assert!(Coupling::new(plan, vec![0.6, 0.4], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn identity_coupling_of_a_space_with_itself_scores_zero() {
        let c = Tensor::new(2, 2, vec![0.0, 1.7, 1.7, 0.0]).unwrap();
        let coupling = Coupling::from_assignment(&[0, 1], 2).unwrap();
        let gw = gw_objective(&coupling, &c, &c).unwrap();
        assert_eq!(gw, 0.0);
    }

    #[test]
    fn two_by_two_hand_sum() {
        // Permutation coupling 0->1, 1->0 with weights 1/2.
        // Nonzero support: (0,1), (1,0). Four (pair, pair) terms:
        //   (0,1)(0,1): (cx00 - cy11)^2 = (0 - 0)^2
        //   (0,1)(1,0): (cx01 - cy10)^2 = (1 - 4)^2 = 9
        //   (1,0)(0,1): (cx10 - cy01)^2 = 9
        //   (1,0)(1,0): 0
        // each weighted by 1/4 -> total = 4.5
        let cx = Tensor::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let cy = Tensor::new(2, 2, vec![0.0, 4.0, 4.0, 0.0]).unwrap();
        let coupling = Coupling::from_assignment(&[1, 0], 2).unwrap();
        let gw = gw_objective(&coupling, &cx, &cy).unwrap();
        assert!((gw - 4.5).abs() < 1e-12);
    }
}
