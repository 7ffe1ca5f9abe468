//! Scratch pilot for the synthetic benchmark: trains the 9-mode 100-D
//! scenario for a configurable number of iterations and reports timing,
//! loss trajectory, and the mode-coverage diagnostics.
//!
//! Usage: cargo run --example pilot -- [iterations] [seed] [lambda1]

use std::time::Instant;

use gmelab_core::gmegan::{generate, train, TrainConfig};
use gmelab_core::measures::{
    assign_mode, sample_mixture, GaussianMixtureSpec, RngState, Stream,
};
use gmelab_core::verify::{bilip_scatter, ccm_trained, monotone2d_check, relative_std};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let iterations: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(2000);
    let seed: u64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(7);
    let lambda1: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(10.0);
    let lambda2: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let lr_psi: f64 = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(1e-4);
    let adam_beta1: f64 = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(0.5);
    let adam_beta2: f64 = args.get(7).map(|s| s.parse().unwrap()).unwrap_or(0.999);

    let spec = GaussianMixtureSpec::nine_mode_100d();
    let mut data_rng = RngState::stream(seed, Stream::Data);
    let (dataset, _) = sample_mixture(&spec, 1000, &mut data_rng).unwrap();

    let cfg = TrainConfig {
        iterations,
        seed,
        lambda1,
        lambda2,
        lr_psi,
        adam_beta1,
        adam_beta2,
        checkpoint_interval: 0,
        ..TrainConfig::default()
    };

    let start = Instant::now();
    let outcome = train(&dataset, &cfg, None);
    let elapsed = start.elapsed().as_secs_f64();
    let bundle = match outcome.result {
        Ok(b) => b,
        Err(e) => {
            eprintln!("training aborted: {e}");
            for r in outcome.history.records.iter().rev().take(5) {
                eprintln!("  iter {}: {:?}", r.iter, r.loss);
            }
            std::process::exit(3);
        }
    };
    println!(
        "trained {iterations} iters in {elapsed:.1}s ({:.1} ms/iter)",
        1000.0 * elapsed / iterations.max(1) as f64
    );
    for r in outcome
        .history
        .records
        .iter()
        .step_by((iterations / 10).max(1))
    {
        println!(
            "  iter {:5}  ot {:8.4}  gme {:8.4}  disc {:8.4}  gp {:8.4}  recon {:8.4}",
            r.iter, r.loss.ot, r.loss.gme, r.loss.disc, r.loss.gp, r.loss.recon
        );
    }

    let mut gen_rng = RngState::stream(seed + 1, Stream::Probe);
    let sample = generate(&bundle, 10_000, &mut gen_rng).unwrap();
    let labels = assign_mode(sample.points(), &spec, 3.0).unwrap();
    let rel = relative_std(&labels, 9).unwrap();
    println!("mode counts: {:?}  unassigned {}", rel.counts, rel.unassigned);
    println!("rel std: {:.4}", rel.rel_std);
    let min_share = rel.counts.iter().map(|&c| c as f64 / 10_000.0).fold(f64::INFINITY, f64::min);
    println!("min mode share: {:.4}", min_share);

    // Nearest-center with no rejection radius: separates dispersion
    // (points in the gaps) from genuine mass imbalance.
    let nearest = assign_mode(sample.points(), &spec, 1e12).unwrap();
    let rel_nc = relative_std(&nearest, 9).unwrap();
    println!(
        "nearest-center counts: {:?}  rel std {:.4}",
        rel_nc.counts, rel_nc.rel_std
    );

    let mut probe_rng = RngState::stream(seed + 2, Stream::Probe);
    let mono = monotone2d_check(&bundle, 1000, &mut probe_rng).unwrap();
    println!("monotone2d fraction: {mono:.4}");

    let mut data_measure_rng = RngState::stream(seed + 3, Stream::Probe);
    let bl = bilip_scatter(&bundle.t, &dataset, 2000, &mut data_measure_rng).unwrap();
    println!(
        "bilip ratios: median {:.4}  iqr {:.4}  min {:.4}  max {:.4}",
        bl.median,
        bl.iqr(),
        bl.min_ratio,
        bl.max_ratio
    );

    let mut ccm_rng = RngState::stream(seed + 4, Stream::Probe);
    let ccm = ccm_trained(&bundle, 200, 3, 500, 1e-6, &mut ccm_rng).unwrap();
    println!(
        "ccm pass fraction: {:.4}  worst violation {:.3e}",
        ccm.pass_fraction(),
        ccm.worst_violation
    );
}
