use serde::Serialize;

use crate::measures::UNASSIGNED;

use super::{VerifyError, VerifyResult};

/// Mode-balance summary of labelled samples. A relative standard deviation
/// of 0 means perfectly even coverage; values near `sqrt(K)` signal
/// collapse onto a single mode.
#[derive(Debug, Clone, Serialize)]
pub struct RelStdReport {
    pub rel_std: f64,
    pub counts: Vec<usize>,
    pub unassigned: usize,
    pub mean: f64,
    pub std: f64,
}

/// `sigma / mu` of per-class counts with `mu = sum n_i / K` and
/// `sigma^2 = sum (n_i - mu)^2 / (K - 1)`. Unassigned labels are excluded
/// from the counts and reported separately.
pub fn relative_std(labels: &[u32], num_classes: usize) -> VerifyResult<RelStdReport> {
    if num_classes < 2 {
        return Err(VerifyError::Contract("need at least two classes".into()));
    }
    let mut counts = vec![0usize; num_classes];
    let mut unassigned = 0usize;
    for &l in labels {
        if l == UNASSIGNED {
            unassigned += 1;
        } else if (l as usize) < num_classes {
            counts[l as usize] += 1;
        } else {
            return Err(VerifyError::Contract(format!(
                "label {l} outside 0..{num_classes}"
            )));
        }
    }
    let assigned: usize = counts.iter().sum();
    if assigned == 0 {
        return Err(VerifyError::Degenerate("every label is unassigned".into()));
    }
    let k = num_classes as f64;
    let mean = assigned as f64 / k;
    let var = counts
        .iter()
        .map(|&c| (c as f64 - mean).powi(2))
        .sum::<f64>()
        / (k - 1.0);
    let std = var.sqrt();
    Ok(RelStdReport {
        rel_std: std / mean,
        counts,
        unassigned,
        mean,
        std,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels_from_counts(counts: &[usize]) -> Vec<u32> {
        let mut labels = Vec::new();
        for (mode, &c) in counts.iter().enumerate() {
            labels.extend(std::iter::repeat(mode as u32).take(c));
        }
        labels
    }

    #[test]
    fn balanced_counts_score_zero() {
        let labels = labels_from_counts(&[10, 10, 10]);
        let r = relative_std(&labels, 3).unwrap();
        assert_eq!(r.rel_std, 0.0);
    }

    #[test]
    fn hand_evaluated_imbalance() {
        // counts (5, 10, 15): mean 10, std 5, rel std 0.5
        let labels = labels_from_counts(&[5, 10, 15]);
        let r = relative_std(&labels, 3).unwrap();
        assert!((r.rel_std - 0.5).abs() < 1e-12);
        assert_eq!(r.counts, vec![5, 10, 15]);
    }

    #[test]
    fn total_collapse_signature() {
        // counts (0, 0, 30): mean 10, var = (100 + 100 + 400)/2 = 300
        let labels = labels_from_counts(&[0, 0, 30]);
        let r = relative_std(&labels, 3).unwrap();
        assert!((r.rel_std - 300f64.sqrt() / 10.0).abs() < 1e-12);
    }

    #[test]
    fn unassigned_are_excluded_and_counted() {
        let mut labels = labels_from_counts(&[4, 6]);
        labels.push(UNASSIGNED);
        labels.push(UNASSIGNED);
        let r = relative_std(&labels, 2).unwrap();
        assert_eq!(r.unassigned, 2);
        assert_eq!(r.counts, vec![4, 6]);
    }

    #[test]
    fn all_unassigned_is_an_error() {
        let labels = vec![UNASSIGNED; 5];
        assert!(relative_std(&labels, 3).is_err());
    }

    #[test]
    fn permutation_and_scale_invariance() {
        let a = relative_std(&labels_from_counts(&[3, 9, 6]), 3).unwrap();
        let b = relative_std(&labels_from_counts(&[9, 6, 3]), 3).unwrap();
        assert!((a.rel_std - b.rel_std).abs() < 1e-12);
        let scaled = relative_std(&labels_from_counts(&[12, 36, 24]), 3).unwrap();
        assert!((a.rel_std - scaled.rel_std).abs() < 1e-12);
    }
}
