use std::path::Path;

use serde_json::json;

use gmelab_core::verify::{gk_pushforward_demo, run_suite, SuiteReport, SUITE_NAMES};

use crate::report::write_json;
use crate::CliError;

pub fn run(
    suite: &str,
    count: usize,
    seed: u64,
    k: Option<usize>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    // Single sawtooth index requested: report the statistic directly.
    if suite == "gk" {
        if let Some(k) = k {
            let ks = gk_pushforward_demo(k, 10_000)?;
            let report = json!({ "suite": "gk", "k": k, "n": 10_000, "ks": ks, "pass": ks <= 0.02 });
            println!("{}", serde_json::to_string_pretty(&report)?);
            if let Some(path) = out {
                write_json(path, &report)?;
            }
            if ks > 0.02 {
                return Err(CliError::OracleFailed(format!("gk k={k}: ks {ks} > 0.02")));
            }
            return Ok(());
        }
    }

    let reports: Vec<SuiteReport> = if suite == "all" {
        SUITE_NAMES
            .iter()
            .map(|name| run_suite(name, count, seed))
            .collect::<Result<_, _>>()?
    } else {
        vec![run_suite(suite, count, seed)?]
    };

    for r in &reports {
        println!(
            "[{}] suite {:<12} {} / {} instances passed (worst slack {:.3e})",
            if r.pass { "PASS" } else { "FAIL" },
            r.suite,
            r.count - r.failures,
            r.count,
            r.worst
        );
        if let Some(w) = &r.witness {
            eprintln!("  witness: {w}");
        }
    }
    if let Some(path) = out {
        write_json(path, &reports)?;
    }
    if let Some(failed) = reports.iter().find(|r| !r.pass) {
        return Err(CliError::OracleFailed(format!(
            "suite {} failed on {} of {} instances (seed {}): {}",
            failed.suite,
            failed.failures,
            failed.count,
            failed.seed,
            failed.witness.as_deref().unwrap_or("see report")
        )));
    }
    Ok(())
}
