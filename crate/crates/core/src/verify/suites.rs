//! Randomized oracle suites behind both the CLI oracle command and the
//! acceptance harness. Each suite draws `count` seeded instances, applies
//! a hard gate, and reports the worst observed slack plus a replayable
//! witness for the first failure.

use serde::Serialize;

use crate::measures::{RngState, Stream};
use crate::nd::Tensor;
use crate::ot::{ccm_check, exact_ot_uniform, gm_cost, solve_ot, CostKind, LinearMap};

use super::{
    brute_force_min_assignment, encoder_cost_equality, gk_pushforward_demo, kset_check,
    pushforward_via_inverse, random_cloud, random_invertible_map, random_orthogonal_matrix,
    sandwich_check, VerifyError, VerifyResult,
};

pub const SUITE_NAMES: &[&str] = &[
    "ot",
    "gme",
    "kset",
    "equality",
    "pushforward",
    "ccm",
    "sandwich",
    "gk",
];

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub count: usize,
    pub failures: usize,
    pub pass: bool,
    /// Suite-specific worst slack (deltas for exact gates, statistics for
    /// distributional ones); small is good.
    pub worst: f64,
    /// Replay information for the first failing instance.
    pub witness: Option<String>,
}

impl SuiteReport {
    fn new(suite: &str, seed: u64, count: usize) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            seed,
            count,
            failures: 0,
            pass: true,
            worst: 0.0,
            witness: None,
        }
    }

    fn record(&mut self, slack: f64, ok: bool, witness: impl FnOnce() -> String) {
        if slack > self.worst {
            self.worst = slack;
        }
        if !ok {
            self.failures += 1;
            self.pass = false;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }
}

pub fn run_suite(name: &str, count: usize, seed: u64) -> VerifyResult<SuiteReport> {
    match name {
        "ot" => Ok(suite_ot(count, seed)),
        "gme" => suite_gme(count, seed),
        "kset" => suite_kset(count, seed),
        "equality" => suite_equality(count, seed),
        "pushforward" => suite_pushforward(count, seed),
        "ccm" => suite_ccm(count, seed),
        "sandwich" => suite_sandwich(count, seed),
        "gk" => suite_gk(),
        other => Err(VerifyError::Contract(format!(
            "unknown suite '{other}'; valid suites: {}",
            SUITE_NAMES.join(", ")
        ))),
    }
}

/// Polynomial assignment solver vs factorial enumeration, n <= 8, 1e-12.
pub fn suite_ot(count: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("ot", seed, count);
    let mut rng = RngState::stream(seed, Stream::Probe);
    for case in 0..count {
        let n = 2 + rng.index(7);
        let cost: Vec<f64> = (0..n * n).map(|_| rng.uniform(0.0, 10.0)).collect();
        let tensor = Tensor::new(n, n, cost.clone()).expect("square cost");
        let solved = exact_ot_uniform(&tensor).expect("finite costs");
        let (_, brute) = brute_force_min_assignment(&cost, n).expect("small instance");
        let delta = (solved.cost * n as f64 - brute).abs();
        report.record(delta, delta <= 1e-12, || {
            format!("case {case}: n={n}, solver={}, brute={brute}", solved.cost * n as f64)
        });
    }
    report
}

/// Embedding-cost analytics: zero for isometries, the hand-computed value
/// for the two-point doubling instance, both at 1e-12.
pub fn suite_gme(count: usize, seed: u64) -> VerifyResult<SuiteReport> {
    let mut report = SuiteReport::new("gme", seed, count);
    let mut rng = RngState::stream(seed, Stream::Probe);
    let log = CostKind::LogQuadratic;

    // Fixed analytic case: two points at distance 1, doubling map.
    let mu = crate::measures::EmpiricalMeasure::uniform(
        Tensor::new(2, 1, vec![0.0, 1.0]).expect("two points"),
    )?;
    let double = LinearMap::scaled_identity(1, 2.0);
    let got = gm_cost(&double, &mu, &log, &log)?;
    let expected = (2.5f64).ln().powi(2);
    let delta = (got - expected).abs();
    report.record(delta, delta <= 1e-12, || {
        format!("doubling case: got {got}, expected {expected}")
    });

    for case in 0..count {
        let dim = 2 + rng.index(3);
        let n = 5 + rng.index(10);
        let cloud = random_cloud(n, dim, 1.5, &mut rng);
        // Isometry: orthogonal map, optionally with identity embedding.
        let q = LinearMap::new(random_orthogonal_matrix(dim, &mut rng));
        let cost = gm_cost(&q, &cloud, &log, &log)?;
        report.record(cost.abs(), cost.abs() <= 1e-12, || {
            format!("case {case}: orthogonal map on {n} points in dim {dim} scored {cost}")
        });

        let ident = LinearMap::scaled_identity(dim, 1.0);
        let cost = gm_cost(&ident, &cloud, &log, &log)?;
        report.record(cost.abs(), cost.abs() <= 1e-12, || {
            format!("case {case}: identity scored {cost}")
        });
    }
    Ok(report)
}

/// Measure-and-bi-Lipschitz certificate on random linear maps over random
/// 20-point clouds, alpha = 0.8, gamma = 0.5.
pub fn suite_kset(count: usize, seed: u64) -> VerifyResult<SuiteReport> {
    let mut report = SuiteReport::new("kset", seed, count);
    let mut rng = RngState::stream(seed, Stream::Probe);
    for case in 0..count {
        let ambient = 2 + rng.index(3);
        let scale = rng.uniform(0.3, 1.5) / (ambient as f64).sqrt();
        let entries: Vec<f64> = (0..ambient * 2).map(|_| scale * rng.normal()).collect();
        let map = LinearMap::new(Tensor::new(ambient, 2, entries).expect("map shape"));
        let mu = random_cloud(20, ambient, 1.2, &mut rng);
        let r = kset_check(&map, &mu, 0.8, 0.5)?;
        let slack = (r.bound - r.mass_in_k).max(0.0);
        report.record(slack, r.pass, || {
            format!(
                "case {case}: mass_in_k={}, bound={}, bilip_ok={}",
                r.mass_in_k, r.bound, r.bilip_bound_ok
            )
        });
    }
    Ok(report)
}

fn equality_instance(rng: &mut RngState) -> (LinearMap, crate::measures::EmpiricalMeasure, crate::measures::EmpiricalMeasure) {
    let dim = 1 + rng.index(3);
    let n = 2 + rng.index(15); // n <= 16
    let map = random_invertible_map(dim, rng);
    let mu = random_cloud(n, dim, 1.3, rng);
    let nu = random_cloud(n, dim, 1.3, rng);
    (map, mu, nu)
}

/// Encoder-composed OT vs quadratic OT of the pushforward, |delta| <= 1e-9.
pub fn suite_equality(count: usize, seed: u64) -> VerifyResult<SuiteReport> {
    let mut report = SuiteReport::new("equality", seed, count);
    let mut rng = RngState::stream(seed, Stream::Probe);
    for case in 0..count {
        let (map, mu, nu) = equality_instance(&mut rng);
        let r = encoder_cost_equality(&map, &mu, &nu)?;
        report.record(r.delta, r.pass, || {
            format!("case {case}: encoder side {}, pushforward side {}", r.encoder_side, r.pushforward_side)
        });
    }
    Ok(report)
}

/// Factored-generator construction: multiset pushforward equality and cost
/// attainment, |delta| <= 1e-9.
pub fn suite_pushforward(count: usize, seed: u64) -> VerifyResult<SuiteReport> {
    let mut report = SuiteReport::new("pushforward", seed, count);
    let mut rng = RngState::stream(seed, Stream::Probe);
    for case in 0..count {
        let (map, mu, nu) = equality_instance(&mut rng);
        let r = pushforward_via_inverse(&map, &mu, &nu)?;
        report.record(r.cost_delta, r.pass, || {
            format!(
                "case {case}: multiset_match={}, attained={}, optimal={}",
                r.multiset_match, r.attained_cost, r.optimal_cost
            )
        });
    }
    Ok(report)
}

/// Optimal assignments are cyclically monotone; exhaustive cycles <= 4 on
/// n <= 8 instances.
pub fn suite_ccm(count: usize, seed: u64) -> VerifyResult<SuiteReport> {
    let mut report = SuiteReport::new("ccm", seed, count);
    let mut rng = RngState::stream(seed, Stream::Probe);
    for case in 0..count {
        let n = 3 + rng.index(6);
        let dim = 1 + rng.index(3);
        let mu = random_cloud(n, dim, 1.5, &mut rng);
        let nu = random_cloud(n, dim, 1.5, &mut rng);
        let kind = match case % 3 {
            0 => CostKind::quadratic(),
            1 => CostKind::QuadraticP { p: 1.0 },
            _ => CostKind::LogQuadratic,
        };
        let sol = solve_ot(&mu, &nu, &kind)?;
        let assignment = sol.assignment.expect("uniform solve");
        let matched: Vec<Vec<f64>> = assignment.iter().map(|&j| nu.point(j).to_vec()).collect();
        let ys = Tensor::from_rows(&matched).expect("matched rows");
        let r = ccm_check(mu.points(), &ys, &kind, 4)?;
        report.record(r.worst_violation.max(0.0), r.is_ccm, || {
            format!("case {case}: n={n}, witness {:?}", r.witness)
        });
    }
    Ok(report)
}

/// Two-sided Wasserstein comparison under bi-Lipschitz maps; alternates
/// analytic scalings with diagonal stretches whose constant is computed by
/// brute force over the support.
pub fn suite_sandwich(count: usize, seed: u64) -> VerifyResult<SuiteReport> {
    let mut report = SuiteReport::new("sandwich", seed, count);
    let mut rng = RngState::stream(seed, Stream::Probe);
    for case in 0..count {
        let dim = 2 + rng.index(2);
        let n = 3 + rng.index(8);
        let a = random_cloud(n, dim, 1.0, &mut rng);
        let b = random_cloud(n, dim, 1.0, &mut rng);
        let p = [1.0, 2.0, 3.0][case % 3];
        let (map, alpha) = if case % 2 == 0 {
            // s-scaled orthogonal: exact alpha = 1/s for s >= 1.
            let s = rng.uniform(1.0, 3.0);
            let q = random_orthogonal_matrix(dim, &mut rng);
            let scaled = Tensor::new(dim, dim, q.data().iter().map(|v| s * v).collect())
                .expect("scaled matrix");
            (LinearMap::new(scaled), 1.0 / s)
        } else {
            // Diagonal stretch; constant from brute force over both supports.
            let mut m = Tensor::zeros(dim, dim);
            for i in 0..dim {
                m.set(i, i, rng.uniform(0.5, 2.0));
            }
            let map = LinearMap::new(m);
            let mut all_rows: Vec<Vec<f64>> = Vec::new();
            for i in 0..a.n() {
                all_rows.push(a.point(i).to_vec());
            }
            for i in 0..b.n() {
                all_rows.push(b.point(i).to_vec());
            }
            let support = Tensor::from_rows(&all_rows).expect("joint support");
            let alpha = super::discrete_bilip_alpha(&map, &support);
            (map, alpha)
        };
        let r = sandwich_check(&map, alpha, &a, &b, p)?;
        let slack = (-r.slack_lower).max(-r.slack_upper).max(0.0);
        report.record(slack, r.pass, || {
            format!(
                "case {case}: alpha={alpha}, W={}, mapped W={}",
                r.w_original, r.w_mapped
            )
        });
    }
    Ok(report)
}

/// Sawtooth pushforward KS gates: <= 0.02 at n = 10^4 for k in {0, 2, 5}.
pub fn suite_gk() -> VerifyResult<SuiteReport> {
    let mut report = SuiteReport::new("gk", 0, 3);
    let n = 10_000;
    for (idx, k) in [0usize, 2, 5].into_iter().enumerate() {
        let ks = gk_pushforward_demo(k, n)?;
        report.record(ks, ks <= 0.02, || {
            format!("case {idx}: k={k}, ks={ks} exceeds 0.02")
        });
    }
    Ok(report)
}
