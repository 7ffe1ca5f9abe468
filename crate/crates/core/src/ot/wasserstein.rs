use crate::measures::EmpiricalMeasure;
use crate::nd::Tensor;

use super::{min_cost_assignment, pairwise_cost, CostKind, Coupling, OtError, OtResult};

/// Result of an exact discrete OT solve on equal-size uniform supports.
#[derive(Debug, Clone)]
pub struct OtSolution {
    /// Minimum mean matched cost (the plan-weighted cost sum).
    pub cost: f64,
    pub coupling: Coupling,
    pub assignment: Option<Vec<usize>>,
}

/// Globally optimal transport for a square cost matrix between two uniform
/// measures of equal size.
pub fn exact_ot_uniform(cost: &Tensor) -> OtResult<OtSolution> {
    if cost.rows() != cost.cols() {
        return Err(OtError::Contract(format!(
            "exact OT needs a square cost matrix, got {}x{}",
            cost.rows(),
            cost.cols()
        )));
    }
    let n = cost.rows();
    let (assignment, total) = min_cost_assignment(cost.data(), n)?;
    let coupling = Coupling::from_assignment(&assignment, n)?;
    Ok(OtSolution {
        cost: total / n as f64,
        coupling,
        assignment: Some(assignment),
    })
}

/// Exact OT between two measures under a cost kind; enforces the
/// equal-size uniform-support restriction.
pub fn solve_ot(
    mu: &EmpiricalMeasure,
    nu: &EmpiricalMeasure,
    kind: &CostKind,
) -> OtResult<OtSolution> {
    if mu.n() != nu.n() {
        return Err(OtError::Contract(format!(
            "supports have {} and {} points; only equal sizes are supported",
            mu.n(),
            nu.n()
        )));
    }
    if !mu.is_uniform() || !nu.is_uniform() {
        return Err(OtError::Contract(
            "exact OT is restricted to uniform weights".into(),
        ));
    }
    let cost = pairwise_cost(kind, mu.points(), nu.points())?;
    exact_ot_uniform(&cost)
}

/// `W_p(mu, nu) = (min mean ||x - y||^p)^{1/p}` via the exact solver.
pub fn wasserstein_p(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, p: f64) -> OtResult<f64> {
    if mu.dim() != nu.dim() {
        return Err(OtError::Dimension(format!(
            "point dims {} and {}",
            mu.dim(),
            nu.dim()
        )));
    }
    let sol = solve_ot(mu, nu, &CostKind::QuadraticP { p })?;
    Ok((p * sol.cost).powf(1.0 / p))
}
