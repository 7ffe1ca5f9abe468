//! Dataset file format.
//!
//! Layout (all integers little-endian):
//!   magic    4 bytes  "GMDS"
//!   version  u32      currently 1
//!   n        u64
//!   dim      u64
//!   payload  f64 * n * dim, row-major
//!   labels   u32 * n, optional: present iff the file continues past the
//!            payload (u32::MAX marks an unassigned point)

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::nd::Tensor;

use super::{EmpiricalMeasure, MeasureError, MeasureResult};

pub const DATASET_MAGIC: &[u8; 4] = b"GMDS";
const VERSION: u32 = 1;

pub fn save_dataset(
    path: &Path,
    measure: &EmpiricalMeasure,
    labels: Option<&[u32]>,
) -> MeasureResult<()> {
    if let Some(l) = labels {
        if l.len() != measure.n() {
            return Err(MeasureError::Invalid(format!(
                "{} labels for {} points",
                l.len(),
                measure.n()
            )));
        }
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(DATASET_MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(measure.n() as u64).to_le_bytes())?;
    w.write_all(&(measure.dim() as u64).to_le_bytes())?;
    for &v in measure.points().data() {
        w.write_all(&v.to_le_bytes())?;
    }
    if let Some(l) = labels {
        for &lab in l {
            w.write_all(&lab.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_dataset(path: &Path) -> MeasureResult<(EmpiricalMeasure, Option<Vec<u32>>)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| MeasureError::Format("file shorter than header".into()))?;
    if &magic != DATASET_MAGIC {
        return Err(MeasureError::Format("bad dataset magic".into()));
    }
    let mut buf4 = [0u8; 4];
    r.read_exact(&mut buf4)
        .map_err(|_| MeasureError::Format("truncated version field".into()))?;
    let version = u32::from_le_bytes(buf4);
    if version != VERSION {
        return Err(MeasureError::Format(format!(
            "unsupported dataset version {version}"
        )));
    }
    let mut buf8 = [0u8; 8];
    r.read_exact(&mut buf8)
        .map_err(|_| MeasureError::Format("truncated point count".into()))?;
    let n = u64::from_le_bytes(buf8) as usize;
    r.read_exact(&mut buf8)
        .map_err(|_| MeasureError::Format("truncated dimension".into()))?;
    let dim = u64::from_le_bytes(buf8) as usize;

    let mut data = Vec::with_capacity(n * dim);
    for _ in 0..n * dim {
        r.read_exact(&mut buf8)
            .map_err(|_| MeasureError::Format("truncated payload".into()))?;
        data.push(f64::from_le_bytes(buf8));
    }
    let points = Tensor::new(n, dim, data).map_err(|e| MeasureError::Format(e.to_string()))?;
    let measure = EmpiricalMeasure::uniform(points)?;

    // Anything after the payload must be exactly one u32 label per point.
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    let labels = if rest.is_empty() {
        None
    } else if rest.len() == 4 * n {
        Some(
            rest.chunks_exact(4)
                .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect(),
        )
    } else {
        return Err(MeasureError::Format(format!(
            "trailing {} bytes is not a label block for {} points",
            rest.len(),
            n
        )));
    };
    Ok((measure, labels))
}

/// CSV with header `x0,x1,...,label`; unlabeled points get -1. Floats use
/// the shortest representation that round-trips.
pub fn write_points_csv(
    path: &Path,
    points: &Tensor,
    labels: Option<&[u32]>,
) -> MeasureResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let header: Vec<String> = (0..points.cols()).map(|j| format!("x{j}")).collect();
    writeln!(w, "{},label", header.join(","))?;
    for i in 0..points.rows() {
        let row: Vec<String> = points.row(i).iter().map(|v| format!("{v}")).collect();
        let label = labels
            .map(|l| {
                if l[i] == super::UNASSIGNED {
                    "-1".to_string()
                } else {
                    l[i].to_string()
                }
            })
            .unwrap_or_else(|| "-1".to_string());
        writeln!(w, "{},{}", row.join(","), label)?;
    }
    w.flush()?;
    Ok(())
}
