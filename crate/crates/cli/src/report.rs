//! Report assembly and serialization. Field names and ordering are part of
//! the output contract; identical configs must produce byte-identical files.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use statvac::verify::IdentityReport;

use crate::config::Format;

#[derive(Serialize)]
pub struct Report {
    pub metric: String,
    pub params: BTreeMap<String, f64>,
    pub identities: Vec<IdentityReport>,
    pub mass: Option<MassBlock>,
    pub convergence: Vec<ConvergenceEntry>,
}

#[derive(Serialize)]
pub struct MassBlock {
    pub alpha_mean: f64,
    pub alpha_spread: f64,
    pub scalar_mass: f64,
    pub vector_mass: f64,
    pub inequality: bool,
}

#[derive(Serialize)]
pub struct ConvergenceEntry {
    pub name: String,
    pub parameter: String,
    pub samples: Vec<Sample>,
}

#[derive(Serialize)]
pub struct Sample {
    pub h: f64,
    pub value: f64,
}

/// One flattened residual row for the CSV export.
pub struct CsvRow {
    pub identity: String,
    pub point: usize,
    pub abs: f64,
    pub rel: f64,
}

pub fn write_report(
    path: &Path,
    format: Format,
    report: &Report,
    rows: &[CsvRow],
) -> std::io::Result<()> {
    let mut out = std::fs::File::create(path)?;
    match format {
        Format::Json => {
            let text = serde_json::to_string_pretty(report).expect("report serialization");
            writeln!(out, "{text}")?;
        }
        Format::Csv => {
            writeln!(out, "identity,point,abs_residual,rel_residual")?;
            for r in rows {
                writeln!(out, "{},{},{:e},{:e}", r.identity, r.point, r.abs, r.rel)?;
            }
        }
    }
    Ok(())
}
