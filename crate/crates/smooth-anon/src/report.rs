//! CSV rows emitted by the command layer. The column set is a stable
//! contract for plotting scripts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;

pub const CSV_HEADER: &str =
    "dataset,algorithm,param,jaccard_mean,jaccard_std,suppressed_frac,created_frac,runtime_ms";

/// One aggregated measurement: a dataset, an algorithm, one parameter value
/// (k or epsilon), and metrics averaged over repeats.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub dataset: String,
    pub algorithm: String,
    pub param: f64,
    pub jaccard_mean: f64,
    pub jaccard_std: f64,
    pub suppressed_frac: f64,
    pub created_frac: f64,
    pub runtime_ms: f64,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.dataset,
            self.algorithm,
            format_param(self.param),
            self.jaccard_mean,
            self.jaccard_std,
            self.suppressed_frac,
            self.created_frac,
            self.runtime_ms
        )
    }
}

fn format_param(p: f64) -> String {
    if p.fract() == 0.0 && p.abs() < 1e15 {
        format!("{}", p as i64)
    } else {
        format!("{p}")
    }
}

pub fn write_csv(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(w, "{}", row.to_csv())?;
    }
    w.flush()?;
    Ok(())
}

/// Mean and sample standard deviation (0 for fewer than two values).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    (mean, var.sqrt())
}
