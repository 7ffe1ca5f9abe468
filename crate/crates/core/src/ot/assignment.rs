use super::{OtError, OtResult};

/// Dense `O(n^3)` minimum-cost assignment (shortest augmenting paths over
/// dual potentials). `cost` is row-major `n x n`; returns the column
/// assigned to each row plus the total matched cost. Ties resolve to the
/// lowest-index augmenting column, so results are deterministic; the
/// optimal cost is unique even when the assignment is not.
pub fn min_cost_assignment(cost: &[f64], n: usize) -> OtResult<(Vec<usize>, f64)> {
    if cost.len() != n * n {
        return Err(OtError::Contract(format!(
            "cost matrix length {} is not {n}x{n}",
            cost.len()
        )));
    }
    if n == 0 {
        return Err(OtError::Contract("empty assignment instance".into()));
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(OtError::Contract("non-finite assignment cost".into()));
    }

    // 1-based with a virtual column 0 holding the currently inserted row.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of_col = vec![0usize; n + 1]; // 0 = unmatched
    let mut prev_col = vec![0usize; n + 1];

    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        let mut min_to = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if reduced < min_to[j] {
                    min_to[j] = reduced;
                    prev_col[j] = j0;
                }
                if min_to[j] < delta {
                    delta = min_to[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        // Augment along the recorded path.
        loop {
            let j1 = prev_col[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if row_of_col[j] != 0 {
            assignment[row_of_col[j] - 1] = j - 1;
        }
    }
    let total: f64 = (0..n).map(|i| cost[i * n + assignment[i]]).sum();
    Ok((assignment, total))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one_is_the_single_pairing() {
        let (a, c) = min_cost_assignment(&[3.5], 1).unwrap();
        assert_eq!(a, vec![0]);
        assert_eq!(c, 3.5);
    }

    #[test]
    fn classic_three_by_three() {
        let cost = [2.0, 3.0, 3.0, 3.0, 2.0, 3.0, 3.0, 3.0, 2.0];
        let (a, c) = min_cost_assignment(&cost, 3).unwrap();
        assert_eq!(a, vec![0, 1, 2]);
        assert_eq!(c, 6.0);
    }

    #[test]
    fn picks_the_cheap_diagonal() {
        let cost = [
            10.0, 25.0, 15.0, 20.0, //
            15.0, 30.0, 5.0, 15.0, //
            35.0, 20.0, 12.0, 24.0, //
            17.0, 25.0, 24.0, 20.0,
        ];
        let (a, c) = min_cost_assignment(&cost, 4).unwrap();
        assert_eq!(a, vec![0, 2, 1, 3]);
        assert_eq!(c, 10.0 + 5.0 + 20.0 + 20.0);
    }

    #[test]
    fn rejects_non_finite_and_bad_shapes() {
        assert!(min_cost_assignment(&[f64::INFINITY], 1).is_err());
        assert!(min_cost_assignment(&[1.0, 2.0], 2).is_err());
        assert!(min_cost_assignment(&[], 0).is_err());
    }
}
