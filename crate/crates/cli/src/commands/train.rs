use std::path::Path;

use serde_json::json;

use gmelab_core::gmegan::{generate_with_latents, train};
use gmelab_core::measures::{assign_mode, save_dataset, UNASSIGNED};
use gmelab_core::verify::relative_std;

use crate::config::RunConfig;
use crate::report::{fmt_f64, write_history_csv, write_json, CsvWriter};
use crate::CliError;

pub fn run(
    config_path: Option<&Path>,
    out: &Path,
    seed: Option<u64>,
    iterations: Option<usize>,
    ablate: Option<&str>,
) -> Result<(), CliError> {
    let mut config = match config_path {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = seed {
        config.apply_seed(s);
    } else {
        config.apply_seed(config.seed);
    }
    if let Some(iters) = iterations {
        config.train.iterations = iters;
    }
    if let Some(which) = ablate {
        match which {
            "gme" => {
                config.train.lambda1 = 0.0;
                config.train.ablation = Some("gme".into());
            }
            "gp" => {
                config.train.lambda2 = 0.0;
                config.train.ablation = Some("gp".into());
            }
            "recon" => {
                config.train.lambda3 = 0.0;
                config.train.ablation = Some("recon".into());
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown ablation '{other}' (expected gme, gp, or recon)"
                )))
            }
        }
    }
    config.reconcile()?;
    config.train.validate().map_err(|e| CliError::Config(e.to_string()))?;

    std::fs::create_dir_all(out)?;
    config.save(&out.join("config.cfg"))?;

    let (dataset, labels) = config.dataset.realize(config.seed)?;
    save_dataset(&out.join("dataset.gmds"), &dataset, labels.as_deref())?;

    let ckpt_dir = out.join("checkpoints");
    let outcome = train(&dataset, &config.train, Some(&ckpt_dir));
    write_history_csv(&out.join("history.csv"), &outcome.history)?;

    let bundle = match outcome.result {
        Ok(b) => b,
        Err(e) => return Err(CliError::TrainingAborted(e.to_string())),
    };

    // Generated-sample export: planar coordinates, assigned mode, latent radius.
    let mut gen_rng =
        gmelab_core::measures::RngState::stream(config.seed, gmelab_core::measures::Stream::Probe);
    let (latents, points) = generate_with_latents(&bundle, config.verify.samples, &mut gen_rng)?;
    let mixture = config.dataset.mixture_spec()?;
    let gen_labels = match &mixture {
        Some(spec) => assign_mode(&points, spec, config.verify.radius_multiplier)?,
        None => vec![UNASSIGNED; points.rows()],
    };
    let mut csv = CsvWriter::create(&out.join("generated.csv"), "x0,x1,mode,latent_radius")?;
    for i in 0..points.rows() {
        let radius = latents.row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
        let mode = if gen_labels[i] == UNASSIGNED {
            "-1".to_string()
        } else {
            gen_labels[i].to_string()
        };
        csv.row(&[
            fmt_f64(points.get(i, 0)),
            fmt_f64(points.get(i, 1)),
            mode,
            fmt_f64(radius),
        ])?;
    }
    csv.finish()?;

    let final_loss = outcome.history.records.last().map(|r| r.loss);
    let balance = match &mixture {
        Some(spec) => Some(relative_std(&gen_labels, spec.num_modes())?),
        None => None,
    };
    let summary = json!({
        "seed": config.seed,
        "iterations": config.train.iterations,
        "ablation": config.train.ablation,
        "final_loss": final_loss,
        "mode_counts": balance.as_ref().map(|b| b.counts.clone()),
        "unassigned": balance.as_ref().map(|b| b.unassigned),
        "relative_std": balance.as_ref().map(|b| b.rel_std),
        "checkpoints": outcome.history.checkpoints,
    });
    write_json(&out.join("summary.json"), &summary)?;
    println!(
        "run complete: {} iterations, artifacts in {}",
        config.train.iterations,
        out.display()
    );
    if let Some(b) = &balance {
        println!("relative std {:.4}, unassigned {}", b.rel_std, b.unassigned);
    }
    Ok(())
}
