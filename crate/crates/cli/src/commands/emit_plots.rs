use std::path::Path;

use serde_json::json;

use crate::report::write_json;
use crate::CliError;

/// The plot-ready artifact inventory a complete run directory provides:
/// two CSVs from `train` and four from `verify`.
pub const EXPECTED_CSVS: [&str; 6] = [
    "history.csv",
    "generated.csv",
    "bilip_scatter.csv",
    "latent_embedding.csv",
    "generated_by_radius.csv",
    "modulus_profile.csv",
];

pub fn run(run_dir: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let bundle_dir = out
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| run_dir.join("plots"));
    std::fs::create_dir_all(&bundle_dir)?;

    let mut present = Vec::new();
    let mut missing = Vec::new();
    for name in EXPECTED_CSVS {
        let src = run_dir.join(name);
        if src.is_file() {
            std::fs::copy(&src, bundle_dir.join(name))?;
            present.push(name.to_string());
        } else {
            missing.push(name.to_string());
        }
    }

    let manifest = json!({
        "files": present,
        "missing": missing,
    });
    write_json(&bundle_dir.join("manifest.json"), &manifest)?;

    if missing.is_empty() {
        println!(
            "plot bundle: {} files in {}",
            EXPECTED_CSVS.len(),
            bundle_dir.display()
        );
        Ok(())
    } else {
        Err(CliError::MissingArtifacts(missing))
    }
}
