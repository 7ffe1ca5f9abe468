use std::path::Path;

use serde_json::json;

use gmelab_core::gmegan::{generate_with_latents, NetworkBundle};
use gmelab_core::measures::{assign_mode, load_dataset, RngState, Stream, UNASSIGNED};
use gmelab_core::verify::{
    bilip_scatter, ccm_trained, modulus_probe, monotone2d_check, relative_std,
};

use crate::config::RunConfig;
use crate::report::{fmt_f64, write_json, CsvWriter};
use crate::CliError;

const MONOTONE_GATE: f64 = 0.95;
const CCM_GATE: f64 = 0.95;
const BILIP_MEDIAN_RANGE: (f64, f64) = (0.5, 2.0);

pub fn run(
    checkpoint: &Path,
    dataset_path: &Path,
    config_path: Option<&Path>,
    out: &Path,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let config = match config_path {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let seed = seed.unwrap_or(config.seed);
    let vcfg = &config.verify;

    let bundle = NetworkBundle::load(checkpoint).map_err(|e| CliError::Other(e.to_string()))?;
    let (dataset, file_labels) = load_dataset(dataset_path)?;
    if dataset.dim() != bundle.ambient_dim() {
        return Err(CliError::Other(format!(
            "dataset dim {} does not match checkpoint ambient dim {}",
            dataset.dim(),
            bundle.ambient_dim()
        )));
    }
    std::fs::create_dir_all(out)?;
    let mixture = config.dataset.mixture_spec()?;

    // Encoder distortion scatter on data pairs.
    let mut rng = RngState::stream(seed, Stream::Probe);
    let bilip = bilip_scatter(&bundle.t, &dataset, vcfg.bilip_pairs, &mut rng)?;
    let mut csv = CsvWriter::create(&out.join("bilip_scatter.csv"), "dist,ratio")?;
    for &(d, r) in &bilip.pairs {
        csv.row(&[fmt_f64(d), fmt_f64(r)])?;
    }
    csv.finish()?;

    // Latent embedding of the data, with mode labels.
    let embedded = bundle.encode(dataset.points())?;
    let labels: Vec<u32> = match (&file_labels, &mixture) {
        (Some(l), _) => l.clone(),
        (None, Some(spec)) => assign_mode(dataset.points(), spec, vcfg.radius_multiplier)?,
        (None, None) => vec![UNASSIGNED; dataset.n()],
    };
    let mut csv = CsvWriter::create(&out.join("latent_embedding.csv"), "y0,y1,label")?;
    for i in 0..embedded.rows() {
        let label = if labels[i] == UNASSIGNED {
            "-1".to_string()
        } else {
            labels[i].to_string()
        };
        csv.row(&[
            fmt_f64(embedded.get(i, 0)),
            fmt_f64(embedded.get(i, 1)),
            label,
        ])?;
    }
    csv.finish()?;

    // Generated samples colored by latent radius.
    let mut gen_rng = RngState::stream(seed.wrapping_add(1), Stream::Probe);
    let (latents, generated) = generate_with_latents(&bundle, vcfg.samples, &mut gen_rng)?;
    let mut csv = CsvWriter::create(
        &out.join("generated_by_radius.csv"),
        "x0,x1,latent_radius",
    )?;
    for i in 0..generated.rows() {
        let radius = latents.row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
        csv.row(&[
            fmt_f64(generated.get(i, 0)),
            fmt_f64(generated.get(i, 1)),
            fmt_f64(radius),
        ])?;
    }
    csv.finish()?;

    // Discriminator modulus profile on data pairs.
    let mut mod_rng = RngState::stream(seed.wrapping_add(2), Stream::Probe);
    let modulus = modulus_probe(
        &bundle.psi,
        &dataset,
        vcfg.modulus_pairs,
        vcfg.modulus_bins,
        &mut mod_rng,
    )?;
    let mut csv = CsvWriter::create(&out.join("modulus_profile.csv"), "bin_upper,omega,count")?;
    for i in 0..modulus.bin_edges.len() {
        csv.row(&[
            fmt_f64(modulus.bin_edges[i]),
            fmt_f64(modulus.omega[i]),
            modulus.pair_counts[i].to_string(),
        ])?;
    }
    csv.finish()?;

    // Cyclical monotonicity and planar monotonicity of the trained maps.
    let mut ccm_rng = RngState::stream(seed.wrapping_add(3), Stream::Probe);
    let ccm = ccm_trained(
        &bundle,
        vcfg.ccm_probes,
        vcfg.ccm_cycle_len,
        vcfg.ccm_cycles_per_len,
        vcfg.ccm_tol,
        &mut ccm_rng,
    )?;
    let mut mono_rng = RngState::stream(seed.wrapping_add(4), Stream::Probe);
    let monotone = monotone2d_check(&bundle, vcfg.monotone_pairs, &mut mono_rng)?;

    // Mode balance of generated samples.
    let balance = match &mixture {
        Some(spec) => {
            let gen_labels = assign_mode(&generated, spec, vcfg.radius_multiplier)?;
            Some(relative_std(&gen_labels, spec.num_modes())?)
        }
        None => None,
    };

    let report = json!({
        "seed": seed,
        "checkpoint": checkpoint,
        "dataset": dataset_path,
        "bilip": {
            "median": bilip.median,
            "q25": bilip.q25,
            "q75": bilip.q75,
            "iqr": bilip.iqr(),
            "median_in_gate": bilip.median >= BILIP_MEDIAN_RANGE.0
                && bilip.median <= BILIP_MEDIAN_RANGE.1,
        },
        "ccm": {
            "pass_fraction": ccm.pass_fraction(),
            "worst_violation": ccm.worst_violation,
            "cycles_tested": ccm.cycles_tested,
            "gate": CCM_GATE,
            "meets_gate": ccm.pass_fraction() >= CCM_GATE,
        },
        "monotone2d": {
            "fraction": monotone,
            "gate": MONOTONE_GATE,
            "meets_gate": monotone >= MONOTONE_GATE,
        },
        "mode_balance": balance.as_ref().map(|b| json!({
            "relative_std": b.rel_std,
            "counts": b.counts,
            "unassigned": b.unassigned,
        })),
    });
    write_json(&out.join("verify_report.json"), &report)?;
    println!(
        "verify: bilip median {:.4}, monotone2d {:.4}, ccm {:.4}",
        bilip.median,
        monotone,
        ccm.pass_fraction()
    );
    if let Some(b) = &balance {
        println!("mode balance: rel std {:.4}, unassigned {}", b.rel_std, b.unassigned);
    }
    Ok(())
}
