use crate::nd::{Mlp, Tensor};

use super::{OtError, OtResult};

/// Row-wise map between point clouds. Implemented by networks, explicit
/// linear maps, and plain closures (handy in oracles).
pub trait PointMap {
    fn map_rows(&self, points: &Tensor) -> Tensor;
}

impl PointMap for Mlp {
    fn map_rows(&self, points: &Tensor) -> Tensor {
        self.eval(points).expect("network evaluation on finite input")
    }
}

/// `y = x * matrix`, matrix is `in x out` row-major like an MLP weight.
#[derive(Debug, Clone)]
pub struct LinearMap {
    pub matrix: Tensor,
}

impl LinearMap {
    pub fn new(matrix: Tensor) -> Self {
        LinearMap { matrix }
    }

    pub fn scaled_identity(dim: usize, scale: f64) -> Self {
        let mut m = Tensor::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, scale);
        }
        LinearMap { matrix: m }
    }
}

impl PointMap for LinearMap {
    fn map_rows(&self, points: &Tensor) -> Tensor {
        points.matmul(&self.matrix).expect("linear map dims")
    }
}

impl<F: Fn(&[f64]) -> Vec<f64>> PointMap for F {
    fn map_rows(&self, points: &Tensor) -> Tensor {
        let rows: Vec<Vec<f64>> = (0..points.rows()).map(|i| self(points.row(i))).collect();
        Tensor::from_rows(&rows).expect("map produced ragged rows")
    }
}

/// Ground cost selector.
///
/// `LogQuadratic` is `log(1 + ||x - y||^2)`: symmetric, zero on the
/// diagonal, and the cost under which small embedding costs force
/// near-isometry. `QuadraticP` is `||x - y||^p / p`. `EncoderQuadratic`
/// composes the quadratic cost with an encoder: `||T(x) - y||^2 / 2`.
pub enum CostKind<'a> {
    LogQuadratic,
    QuadraticP { p: f64 },
    EncoderQuadratic { encoder: &'a dyn PointMap },
}

impl<'a> CostKind<'a> {
    pub fn quadratic() -> Self {
        CostKind::QuadraticP { p: 2.0 }
    }
}

pub(crate) fn sqdist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `n x k` matrix with entry `(i, j) = c(a_i, b_j)`.
pub fn pairwise_cost(kind: &CostKind, a: &Tensor, b: &Tensor) -> OtResult<Tensor> {
    match kind {
        CostKind::LogQuadratic => {
            same_dim(a, b)?;
            Ok(dense(a.rows(), b.rows(), |i, j| {
                (1.0 + sqdist(a.row(i), b.row(j))).ln()
            }))
        }
        CostKind::QuadraticP { p } => {
            if *p < 1.0 {
                return Err(OtError::Contract(format!("cost exponent p = {p} < 1")));
            }
            same_dim(a, b)?;
            let p = *p;
            Ok(dense(a.rows(), b.rows(), |i, j| {
                sqdist(a.row(i), b.row(j)).sqrt().powf(p) / p
            }))
        }
        CostKind::EncoderQuadratic { encoder } => {
            let mapped = encoder.map_rows(a);
            same_dim(&mapped, b)?;
            Ok(dense(mapped.rows(), b.rows(), |i, j| {
                sqdist(mapped.row(i), b.row(j)) / 2.0
            }))
        }
    }
}

fn same_dim(a: &Tensor, b: &Tensor) -> OtResult<()> {
    if a.cols() != b.cols() {
        return Err(OtError::Dimension(format!(
            "point dims {} and {}",
            a.cols(),
            b.cols()
        )));
    }
    Ok(())
}

fn dense(n: usize, k: usize, f: impl Fn(usize, usize) -> f64) -> Tensor {
    let mut data = Vec::with_capacity(n * k);
    for i in 0..n {
        for j in 0..k {
            data.push(f(i, j));
        }
    }
    Tensor::new(n, k, data).expect("dense cost shape")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_cost_is_zero_on_identical_points() {
        let a = Tensor::new(2, 2, vec![1.0, -1.0, 0.5, 2.0]).unwrap();
        let c = pairwise_cost(&CostKind::LogQuadratic, &a, &a).unwrap();
        assert_eq!(c.get(0, 0), 0.0);
        assert_eq!(c.get(1, 1), 0.0);
        assert_eq!(c.get(0, 1), c.get(1, 0));
    }

    #[test]
    fn log_cost_hits_one_at_sqdist_e_minus_one() {
        let a = Tensor::new(1, 1, vec![0.0]).unwrap();
        let b = Tensor::new(1, 1, vec![(std::f64::consts::E - 1.0).sqrt()]).unwrap();
        let c = pairwise_cost(&CostKind::LogQuadratic, &a, &b).unwrap();
        assert!((c.get(0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_cost_three_four_five() {
        let a = Tensor::new(1, 2, vec![0.0, 0.0]).unwrap();
        let b = Tensor::new(1, 2, vec![3.0, 4.0]).unwrap();
        let c = pairwise_cost(&CostKind::quadratic(), &a, &b).unwrap();
        assert!((c.get(0, 0) - 12.5).abs() < 1e-12);
    }

    #[test]
    fn encoder_cost_maps_first_argument() {
        let enc = LinearMap::scaled_identity(2, 2.0);
        let a = Tensor::new(1, 2, vec![1.0, 0.0]).unwrap();
        let b = Tensor::new(1, 2, vec![2.0, 0.0]).unwrap();
        let kind = CostKind::EncoderQuadratic { encoder: &enc };
        let c = pairwise_cost(&kind, &a, &b).unwrap();
        // T(a) = (2, 0) coincides with b.
        assert_eq!(c.get(0, 0), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = Tensor::zeros(1, 2);
        let b = Tensor::zeros(1, 3);
        assert!(pairwise_cost(&CostKind::LogQuadratic, &a, &b).is_err());
    }
}
