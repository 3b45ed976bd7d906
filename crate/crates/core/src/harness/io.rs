//! On-disk formats.
//!
//! * Dataset CSV: header `x0,x1,...,label`, one sample per row. The `label` column is
//!   omitted for unlabelled data.
//! * Mask CSV: header `m0,m1,...`, one row per sample, `1` = observed and `0` = missing.
//! * Result JSON: see [`ResultFile`].

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::Algorithm;
use crate::error::{ClusterError, Result};
use crate::lloyd::LloydResult;
use crate::model::{Dataset, ObservationMask, RunConfig};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ClusterError + '_ {
    move |source| ClusterError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> ClusterError + '_ {
    move |source| ClusterError::Csv {
        path: path.display().to_string(),
        source,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

pub fn write_dataset_csv(path: &Path, data: &Dataset<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut header: Vec<String> = (0..data.d()).map(|j| format!("x{j}")).collect();
    if data.labels().is_some() {
        header.push("label".into());
    }
    w.write_record(&header).map_err(csv_err(path))?;
    for (i, row) in data.points().outer_iter().enumerate() {
        let mut record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        if let Some(labels) = data.labels() {
            record.push(labels[i].to_string());
        }
        w.write_record(&record).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_dataset_csv(path: &Path) -> Result<Dataset<f64>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = r.headers().map_err(csv_err(path))?.clone();
    let has_label = header.iter().next_back() == Some("label");
    let d = header.len() - usize::from(has_label);
    for (j, name) in header.iter().take(d).enumerate() {
        if name != format!("x{j}") {
            return Err(ClusterError::InvalidData(format!(
                "{}: unexpected column '{name}' (expected x{j})",
                path.display()
            )));
        }
    }
    let mut flat = Vec::new();
    let mut labels = Vec::new();
    let mut m = 0;
    for record in r.records() {
        let record = record.map_err(csv_err(path))?;
        for j in 0..d {
            let v: f64 = record[j].trim().parse().map_err(|_| {
                ClusterError::InvalidData(format!(
                    "{}: row {m}, column {j}: '{}' is not a number",
                    path.display(),
                    &record[j]
                ))
            })?;
            flat.push(v);
        }
        if has_label {
            let l: usize = record[d].trim().parse().map_err(|_| {
                ClusterError::InvalidData(format!(
                    "{}: row {m}: bad label '{}'",
                    path.display(),
                    &record[d]
                ))
            })?;
            labels.push(l);
        }
        m += 1;
    }
    let points = Array2::from_shape_vec((m, d), flat)
        .map_err(|e| ClusterError::InvalidData(e.to_string()))?;
    Dataset::new(points, has_label.then_some(labels))
}

pub fn write_mask_csv(path: &Path, mask: &ObservationMask) -> Result<()> {
    let (m, d) = mask.dim();
    let mut w = csv::Writer::from_writer(create(path)?);
    let header: Vec<String> = (0..d).map(|j| format!("m{j}")).collect();
    w.write_record(&header).map_err(csv_err(path))?;
    for i in 0..m {
        let record: Vec<&str> = (0..d)
            .map(|j| if mask.is_observed(i, j) { "1" } else { "0" })
            .collect();
        w.write_record(&record).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_mask_csv(path: &Path) -> Result<ObservationMask> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let d = r.headers().map_err(csv_err(path))?.len();
    let mut flat = Vec::new();
    let mut m = 0;
    for record in r.records() {
        let record = record.map_err(csv_err(path))?;
        for field in record.iter() {
            flat.push(match field.trim() {
                "1" => true,
                "0" => false,
                other => {
                    return Err(ClusterError::InvalidData(format!(
                        "{}: mask entries must be 0 or 1, got '{other}'",
                        path.display()
                    )))
                }
            });
        }
        m += 1;
    }
    let observed = Array2::from_shape_vec((m, d), flat)
        .map_err(|e| ClusterError::InvalidData(e.to_string()))?;
    Ok(ObservationMask::new(observed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub n: usize,
    pub movement: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultConfig {
    pub algorithm: Algorithm,
    pub k: usize,
    pub epsilon: f64,
    pub max_iter: usize,
    pub n_init: usize,
    pub missing_fraction: f64,
    /// Name shown in reports.
    pub dataset_name: String,
    /// Path of the dataset CSV this result was fitted on.
    pub dataset: String,
    /// Path of the mask CSV, when any element was hidden.
    pub mask: Option<String>,
}

/// Everything a fit produced, as written by `run`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub centroids: Vec<Vec<f64>>,
    pub assignment: Vec<usize>,
    pub trace: Vec<TraceEntry>,
    pub converged: bool,
    pub elapsed_seconds: f64,
    pub seed: u64,
    pub config: ResultConfig,
}

impl ResultFile {
    pub fn from_fit(fit: &LloydResult<f64>, cfg: &RunConfig, config: ResultConfig) -> Self {
        ResultFile {
            centroids: fit.model.to_rows(),
            assignment: fit.assignment.as_slice().to_vec(),
            trace: fit
                .trace
                .iterations
                .iter()
                .map(|r| TraceEntry {
                    n: r.n,
                    movement: r.movement,
                    objective: r.objective,
                })
                .collect(),
            converged: fit.trace.converged,
            elapsed_seconds: fit.trace.elapsed,
            seed: cfg.seed,
            config,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = create(path)?;
        serde_json::to_writer_pretty(&mut w, self).map_err(|source| ClusterError::Json {
            path: path.display().to_string(),
            source,
        })?;
        writeln!(w).map_err(io_err(path))?;
        w.flush().map_err(io_err(path))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(io_err(path))?;
        serde_json::from_reader(std::io::BufReader::new(file)).map_err(|source| {
            ClusterError::Json {
                path: path.display().to_string(),
                source,
            }
        })
    }
}
