//! Randomized instance generators and factorial brute-force oracles shared
//! by the oracle suites and the test harness.

use crate::measures::{EmpiricalMeasure, RngState};
use crate::nd::Tensor;
use crate::ot::{LinearMap, OtError, OtResult};

/// Random point cloud with i.i.d. normal coordinates at the given scale.
pub fn random_cloud(n: usize, dim: usize, scale: f64, rng: &mut RngState) -> EmpiricalMeasure {
    let data: Vec<f64> = (0..n * dim).map(|_| scale * rng.normal()).collect();
    EmpiricalMeasure::uniform(Tensor::new(n, dim, data).expect("cloud shape"))
        .expect("finite cloud")
}

/// Haar-ish random orthogonal matrix via Gram-Schmidt on a Gaussian matrix.
pub fn random_orthogonal_matrix(dim: usize, rng: &mut RngState) -> Tensor {
    loop {
        let mut rows: Vec<Vec<f64>> = (0..dim)
            .map(|_| (0..dim).map(|_| rng.normal()).collect())
            .collect();
        let mut ok = true;
        for i in 0..dim {
            for j in 0..i {
                let proj: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
                let prev = rows[j].clone();
                for (v, p) in rows[i].iter_mut().zip(prev) {
                    *v -= proj * p;
                }
            }
            let norm: f64 = rows[i].iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false; // nearly dependent draw, resample
                break;
            }
            for v in rows[i].iter_mut() {
                *v /= norm;
            }
        }
        if ok {
            return Tensor::from_rows(&rows).expect("square orthogonal matrix");
        }
    }
}

/// Well-conditioned random invertible map: orthogonal, diagonal scaling in
/// [0.5, 2], orthogonal.
pub fn random_invertible_map(dim: usize, rng: &mut RngState) -> LinearMap {
    let q1 = random_orthogonal_matrix(dim, rng);
    let q2 = random_orthogonal_matrix(dim, rng);
    let mut scaled = q1;
    for j in 0..dim {
        let s = rng.uniform(0.5, 2.0);
        for i in 0..dim {
            let v = scaled.get(i, j);
            scaled.set(i, j, v * s);
        }
    }
    LinearMap::new(scaled.matmul(&q2).expect("square product"))
}

/// Exhaustive minimum over all `n!` assignments; the independent oracle
/// for the polynomial solver. Usable up to n = 8 or so.
pub fn brute_force_min_assignment(cost: &[f64], n: usize) -> OtResult<(Vec<usize>, f64)> {
    if cost.len() != n * n {
        return Err(OtError::Contract("cost matrix shape".into()));
    }
    if n == 0 || n > 10 {
        return Err(OtError::Contract(format!("brute force supports 1..=10, got {n}")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best_perm = perm.clone();
    let mut best = f64::INFINITY;
    permute_all(&mut perm, 0, &mut |p| {
        let total: f64 = p.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum();
        if total < best {
            best = total;
            best_perm = p.to_vec();
        }
    });
    Ok((best_perm, best))
}

fn permute_all(items: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute_all(items, start + 1, visit);
        items.swap(start, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Stream;

    #[test]
    fn orthogonal_matrices_preserve_norms() {
        let mut rng = RngState::stream(1, Stream::Probe);
        for dim in [2usize, 3, 5] {
            let q = random_orthogonal_matrix(dim, &mut rng);
            let qt = q.transpose();
            let prod = q.matmul(&qt).unwrap();
            for i in 0..dim {
                for j in 0..dim {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (prod.get(i, j) - want).abs() < 1e-10,
                        "dim {dim}: Q Q^T deviates at ({i}, {j})"
                    );
                }
            }
        }
    }

    #[test]
    fn brute_force_matches_a_tiny_hand_case() {
        // 2x2: diagonal costs 1 + 1 = 2, anti-diagonal 3 + 4 = 7.
        let cost = [1.0, 3.0, 4.0, 1.0];
        let (perm, total) = brute_force_min_assignment(&cost, 2).unwrap();
        assert_eq!(perm, vec![0, 1]);
        assert_eq!(total, 2.0);
    }
}
