//! CSV and JSON emission. Floats print with Rust's shortest round-trip
//! representation; lines end with `\n`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use gmelab_core::gmegan::TrainHistory;

use crate::CliError;

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn write_history_csv(path: &Path, history: &TrainHistory) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "iter,ot,gme,disc,gp,recon,total")?;
    for r in &history.records {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.iter, r.loss.ot, r.loss.gme, r.loss.disc, r.loss.gp, r.loss.recon, r.loss.total
        )?;
    }
    w.flush()?;
    Ok(())
}

pub struct CsvWriter {
    inner: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &str) -> Result<Self, CliError> {
        let mut inner = BufWriter::new(File::create(path)?);
        writeln!(inner, "{header}")?;
        Ok(CsvWriter { inner })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        writeln!(self.inner, "{}", fields.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.inner.flush()?;
        Ok(())
    }
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}
