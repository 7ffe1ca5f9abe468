use serde::Serialize;

use crate::nd::Tensor;

use super::{pairwise_cost, CostKind, OtError, OtResult};

/// Default absolute tolerance on cycle cost sums.
pub const CCM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct CcmWitness {
    /// Support indices forming the violating cycle.
    pub indices: Vec<usize>,
    /// Permutation of those indices whose reassignment lowers the cost.
    pub sigma: Vec<usize>,
    pub violation: f64,
}

/// Outcome of a cyclical-monotonicity scan over a paired set
/// `{(x_i, y_i)}`: the set is c-CM when no finite cyclic reassignment of
/// pairs lowers the total cost.
#[derive(Debug, Clone, Serialize)]
pub struct CcmReport {
    pub is_ccm: bool,
    /// Largest value of `sum c(x_i, y_i) - sum c(x_sigma(i), y_i)` seen;
    /// positive means some reassignment is strictly cheaper.
    pub worst_violation: f64,
    pub witness: Option<CcmWitness>,
    pub cycles_tested: usize,
    pub cycles_violated: usize,
}

impl CcmReport {
    pub fn pass_fraction(&self) -> f64 {
        if self.cycles_tested == 0 {
            1.0
        } else {
            1.0 - self.cycles_violated as f64 / self.cycles_tested as f64
        }
    }
}

/// Exhaustive check of every subset of up to `max_cycle_len` pairs and
/// every permutation of each subset. Factorial enumeration caps the cycle
/// length at 6.
pub fn ccm_check(
    xs: &Tensor,
    ys: &Tensor,
    kind: &CostKind,
    max_cycle_len: usize,
) -> OtResult<CcmReport> {
    ccm_check_with_tol(xs, ys, kind, max_cycle_len, CCM_TOL)
}

pub fn ccm_check_with_tol(
    xs: &Tensor,
    ys: &Tensor,
    kind: &CostKind,
    max_cycle_len: usize,
    tol: f64,
) -> OtResult<CcmReport> {
    if xs.rows() != ys.rows() {
        return Err(OtError::Contract("paired sets must have equal size".into()));
    }
    if max_cycle_len < 2 || max_cycle_len > 6 {
        return Err(OtError::Contract(format!(
            "cycle length {max_cycle_len} outside 2..=6"
        )));
    }
    let n = xs.rows();
    let cost = pairwise_cost(kind, xs, ys)?;

    let mut report = CcmReport {
        is_ccm: true,
        worst_violation: f64::NEG_INFINITY,
        witness: None,
        cycles_tested: 0,
        cycles_violated: 0,
    };
    let max_k = max_cycle_len.min(n);
    for k in 2..=max_k {
        for subset in combinations(n, k) {
            test_subset(&cost, &subset, tol, &mut report);
        }
    }
    if report.cycles_tested == 0 {
        report.worst_violation = 0.0;
    }
    Ok(report)
}

pub(crate) fn test_subset(cost: &Tensor, subset: &[usize], tol: f64, report: &mut CcmReport) {
    let k = subset.len();
    let baseline: f64 = subset.iter().map(|&i| cost.get(i, i)).sum();
    let mut perm: Vec<usize> = (0..k).collect();
    permute(&mut perm, 0, &mut |sigma| {
        if sigma.iter().enumerate().all(|(i, &s)| i == s) {
            return; // identity reassignment changes nothing
        }
        let reassigned: f64 = (0..k)
            .map(|i| cost.get(subset[sigma[i]], subset[i]))
            .sum();
        let violation = baseline - reassigned;
        report.cycles_tested += 1;
        if violation > report.worst_violation {
            report.worst_violation = violation;
            if violation > tol {
                report.witness = Some(CcmWitness {
                    indices: subset.to_vec(),
                    sigma: sigma.to_vec(),
                    violation,
                });
            }
        }
        if violation > tol {
            report.is_ccm = false;
            report.cycles_violated += 1;
        }
    });
}

/// Lexicographic k-subsets of `0..n`.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

fn permute(items: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(points: &[(f64, f64)]) -> (Tensor, Tensor) {
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        (
            Tensor::new(points.len(), 1, xs).unwrap(),
            Tensor::new(points.len(), 1, ys).unwrap(),
        )
    }

    #[test]
    fn monotone_pairs_are_ccm() {
        let (xs, ys) = pairs(&[(0.0, 0.0), (1.0, 1.0)]);
        let report = ccm_check(&xs, &ys, &CostKind::quadratic(), 2).unwrap();
        assert!(report.is_ccm);
        assert!(report.worst_violation <= 0.0);
    }

    #[test]
    fn crossed_pairs_are_violated_with_swap_witness() {
        // Gamma = {(0,1), (1,0)}: swapping saves 1 under |x-y|^2/2.
        let (xs, ys) = pairs(&[(0.0, 1.0), (1.0, 0.0)]);
        let report = ccm_check(&xs, &ys, &CostKind::quadratic(), 2).unwrap();
        assert!(!report.is_ccm);
        assert!((report.worst_violation - 1.0).abs() < 1e-12);
        let w = report.witness.unwrap();
        assert_eq!(w.sigma, vec![1, 0]);
    }

    #[test]
    fn cycle_length_cap_is_enforced() {
        let (xs, ys) = pairs(&[(0.0, 0.0), (1.0, 1.0)]);
        assert!(ccm_check(&xs, &ys, &CostKind::quadratic(), 7).is_err());
        assert!(ccm_check(&xs, &ys, &CostKind::quadratic(), 1).is_err());
    }
}
