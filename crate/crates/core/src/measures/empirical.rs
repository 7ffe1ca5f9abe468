use crate::nd::Tensor;

use super::{MeasureError, MeasureResult};

/// Finite weighted point set; the discrete stand-in for every probability
/// measure in this crate. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    points: Tensor,
    weights: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(points: Tensor, weights: Vec<f64>) -> MeasureResult<Self> {
        if weights.len() != points.rows() {
            return Err(MeasureError::Invalid(format!(
                "{} weights for {} points",
                weights.len(),
                points.rows()
            )));
        }
        if !points.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(MeasureError::Invalid("non-finite coordinate or weight".into()));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(MeasureError::Invalid("negative weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(MeasureError::Invalid(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(EmpiricalMeasure { points, weights })
    }

    /// Uniform weights `1/n`.
    pub fn uniform(points: Tensor) -> MeasureResult<Self> {
        let n = points.rows();
        if n == 0 {
            // An empty measure (n = 0) is allowed as a degenerate carrier for
            // `generate(bundle, 0, ..)`; it has no weights to normalize.
            return Ok(EmpiricalMeasure {
                points,
                weights: Vec::new(),
            });
        }
        let w = 1.0 / n as f64;
        let mut weights = vec![w; n];
        // Nudge the last weight so the sum is exactly 1 in floating point.
        let total: f64 = weights.iter().sum();
        weights[n - 1] += 1.0 - total;
        EmpiricalMeasure::new(points, weights)
    }

    pub fn n(&self) -> usize {
        self.points.rows()
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }

    pub fn points(&self) -> &Tensor {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.points.row(i)
    }

    pub fn is_uniform(&self) -> bool {
        if self.n() == 0 {
            return true;
        }
        let w = 1.0 / self.n() as f64;
        self.weights.iter().all(|&x| (x - w).abs() <= 1e-12)
    }

    /// New measure with every point mapped through `f`, weights preserved.
    pub fn map_points(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> MeasureResult<Self> {
        let rows: Vec<Vec<f64>> = (0..self.n()).map(|i| f(self.point(i))).collect();
        let points = Tensor::from_rows(&rows)
            .map_err(|e| MeasureError::Invalid(e.to_string()))?;
        EmpiricalMeasure::new(points, self.weights.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_weights_sum_to_one() {
        for n in [1usize, 3, 7, 1000] {
            let m = EmpiricalMeasure::uniform(Tensor::zeros(n, 2)).unwrap();
            let total: f64 = m.weights().iter().sum();
            assert!((total - 1.0).abs() <= 1e-12, "n={n} sum={total}");
        }
    }

    #[test]
    fn bad_weights_rejected() {
        let pts = Tensor::zeros(2, 2);
        assert!(EmpiricalMeasure::new(pts.clone(), vec![0.7, 0.7]).is_err());
        assert!(EmpiricalMeasure::new(pts.clone(), vec![1.5, -0.5]).is_err());
        assert!(EmpiricalMeasure::new(pts, vec![f64::NAN, 1.0]).is_err());
    }
}
