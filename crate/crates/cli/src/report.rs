//! Report rows and their CSV/JSON encodings.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// One line of an `analyze` or `phase` report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub command: String,
    pub curve: usize,
    pub label: usize,
    /// Cycle notation of the loop's monodromy, 1-based.
    pub monodromy: String,
    pub traversals: usize,
    pub delta_re: Option<f64>,
    pub delta_im: Option<f64>,
    pub gamma_raw: Option<f64>,
    pub gamma_mod_2pi: Option<f64>,
    pub gamma_im: Option<f64>,
    pub holonomy_abs: Option<f64>,
    pub refinement_depth: usize,
    pub min_gap: f64,
    /// Largest holonomy change under random gauge rescalings, when requested.
    pub gauge_deviation: Option<f64>,
}

/// One duration of a `sweep`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub curve: usize,
    pub label: usize,
    pub duration: f64,
    pub gamma_exact_re: Option<f64>,
    pub gamma_exact_im: Option<f64>,
    pub gamma_discrete_re: f64,
    pub gamma_discrete_im: f64,
    pub error: Option<f64>,
    pub fidelity: Option<f64>,
    pub status: String,
}

/// One grid point of a curvature scan; `masked` points carry no values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureRecord {
    pub label: usize,
    pub x: f64,
    pub y: f64,
    pub masked: bool,
    pub f_re: Option<f64>,
    pub f_im: Option<f64>,
    pub f_ed_re: Option<f64>,
    pub f_ed_im: Option<f64>,
    pub disagreement: Option<f64>,
}

/// 17 significant digits: enough to recover every `f64` exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub trait CsvRecord {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

impl CsvRecord for ReportRow {
    const HEADER: &'static [&'static str] = &[
        "command",
        "curve",
        "label",
        "monodromy",
        "traversals",
        "delta_re",
        "delta_im",
        "gamma_raw",
        "gamma_mod_2pi",
        "gamma_im",
        "holonomy_abs",
        "refinement_depth",
        "min_gap",
        "gauge_deviation",
    ];
    fn fields(&self) -> Vec<String> {
        vec![
            self.command.clone(),
            self.curve.to_string(),
            self.label.to_string(),
            self.monodromy.clone(),
            self.traversals.to_string(),
            fmt_opt(self.delta_re),
            fmt_opt(self.delta_im),
            fmt_opt(self.gamma_raw),
            fmt_opt(self.gamma_mod_2pi),
            fmt_opt(self.gamma_im),
            fmt_opt(self.holonomy_abs),
            self.refinement_depth.to_string(),
            fmt_f64(self.min_gap),
            fmt_opt(self.gauge_deviation),
        ]
    }
}

impl CsvRecord for SweepRecord {
    const HEADER: &'static [&'static str] = &[
        "curve",
        "label",
        "duration",
        "gamma_exact_re",
        "gamma_exact_im",
        "gamma_discrete_re",
        "gamma_discrete_im",
        "error",
        "fidelity",
        "status",
    ];
    fn fields(&self) -> Vec<String> {
        vec![
            self.curve.to_string(),
            self.label.to_string(),
            fmt_f64(self.duration),
            fmt_opt(self.gamma_exact_re),
            fmt_opt(self.gamma_exact_im),
            fmt_f64(self.gamma_discrete_re),
            fmt_f64(self.gamma_discrete_im),
            fmt_opt(self.error),
            fmt_opt(self.fidelity),
            self.status.clone(),
        ]
    }
}

impl CsvRecord for CurvatureRecord {
    const HEADER: &'static [&'static str] =
        &["label", "x", "y", "masked", "f_re", "f_im", "f_ed_re", "f_ed_im", "disagreement"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.label.to_string(),
            fmt_f64(self.x),
            fmt_f64(self.y),
            self.masked.to_string(),
            fmt_opt(self.f_re),
            fmt_opt(self.f_im),
            fmt_opt(self.f_ed_re),
            fmt_opt(self.f_ed_im),
            fmt_opt(self.disagreement),
        ]
    }
}

pub fn write_csv<R: CsvRecord>(path: &Path, rows: &[R]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(R::HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<R: Serialize>(path: &Path, rows: &[R]) -> Result<(), CliError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut f, rows)?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<R: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<R>, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Parses a CSV written by [`write_csv`] back into rows of strings keyed by header.
pub fn read_csv(path: &Path) -> Result<Vec<std::collections::BTreeMap<String, String>>, CliError> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    r.records()
        .map(|rec| {
            let rec = rec?;
            Ok(header.iter().zip(rec.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect())
        })
        .collect()
}
