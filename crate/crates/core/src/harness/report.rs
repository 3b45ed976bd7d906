//! Table-style CSV report over fitted results.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::io::{read_dataset_csv, ResultFile};
use crate::error::{ClusterError, Result};
use crate::metrics::MetricReport;
use crate::model::{ClusterModel, Dataset};

pub const HEADER: [&str; 10] = [
    "Dataset",
    "Algorithm",
    "Missing",
    "Time",
    "Homogeneity",
    "Completeness",
    "V-measure",
    "ARI",
    "AMI",
    "Silhouette",
];

pub const TRUTH_LABEL: &str = "original dataset";

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub dataset: String,
    pub algorithm: String,
    pub missing: f64,
    pub report: MetricReport,
}

impl ReportRow {
    pub fn fields(&self) -> [String; 10] {
        let r = &self.report;
        let f3 = |v: f64| format!("{v:.3}");
        [
            self.dataset.clone(),
            self.algorithm.clone(),
            format!("{:.2}", self.missing),
            f3(r.time_seconds),
            f3(r.homogeneity),
            f3(r.completeness),
            f3(r.v_measure),
            f3(r.ari),
            f3(r.ami),
            f3(r.silhouette),
        ]
    }
}

/// Scores a result's centroids against the labelled dataset it references.
pub fn row_from_result(result: &ResultFile, dataset: &Dataset<f64>) -> Result<ReportRow> {
    let name = &result.config.dataset;
    if dataset.labels().is_none() {
        return Err(ClusterError::Integrity(format!(
            "dataset {name} has no ground-truth labels"
        )));
    }
    if result.assignment.len() != dataset.m() {
        return Err(ClusterError::Integrity(format!(
            "result assigns {} samples but dataset {name} has {}",
            result.assignment.len(),
            dataset.m()
        )));
    }
    if result.centroids.iter().any(|c| c.len() != dataset.d()) {
        return Err(ClusterError::Integrity(format!(
            "centroid dimension does not match dataset {name} (d = {})",
            dataset.d()
        )));
    }
    if result.assignment.iter().any(|&c| c >= result.centroids.len()) {
        return Err(ClusterError::Integrity(
            "assignment refers to a missing centroid".into(),
        ));
    }
    let model = ClusterModel::from_rows(&result.centroids)?;
    let report = super::score(dataset, &model, result.elapsed_seconds)?;
    Ok(ReportRow {
        dataset: result.config.dataset_name.clone(),
        algorithm: result.config.algorithm.label().to_string(),
        missing: result.config.missing_fraction,
        report,
    })
}

/// The ground truth scored against itself, with zero time.
pub fn truth_row(name: &str, dataset: &Dataset<f64>) -> Result<ReportRow> {
    let truth = dataset.labels().ok_or_else(|| {
        ClusterError::Integrity(format!("dataset {name} has no ground-truth labels"))
    })?;
    Ok(ReportRow {
        dataset: name.to_string(),
        algorithm: TRUTH_LABEL.to_string(),
        missing: 0.0,
        report: MetricReport::compute(dataset, truth, truth, 0.0)?,
    })
}

/// Loads each result and its dataset, in the given order. With `with_truth`, an
/// "original dataset" row precedes the first result of each dataset.
pub fn rows_from_files(paths: &[PathBuf], with_truth: bool) -> Result<Vec<ReportRow>> {
    let mut cache: BTreeMap<String, Dataset<f64>> = BTreeMap::new();
    let mut rows = Vec::with_capacity(paths.len());
    for path in paths {
        let result = ResultFile::read(path)?;
        let key = result.config.dataset.clone();
        let fresh = !cache.contains_key(&key);
        if fresh {
            let data = read_dataset_csv(Path::new(&key)).map_err(|e| {
                ClusterError::Integrity(format!(
                    "{} references dataset {key}, which cannot be loaded: {e}",
                    path.display()
                ))
            })?;
            cache.insert(key.clone(), data);
        }
        let data = &cache[&key];
        if fresh && with_truth {
            rows.push(truth_row(&result.config.dataset_name, data)?);
        }
        rows.push(row_from_result(&result, data)?);
    }
    Ok(rows)
}

pub fn render_report_csv(rows: &[ReportRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |source| ClusterError::Csv {
        path: "<report>".into(),
        source,
    };
    w.write_record(HEADER).map_err(err)?;
    for row in rows {
        w.write_record(row.fields()).map_err(err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| ClusterError::InvalidData(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| ClusterError::InvalidData(e.to_string()))
}

pub fn write_report_csv(path: &Path, rows: &[ReportRow]) -> Result<()> {
    let text = render_report_csv(rows)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| ClusterError::Io {
            path: parent.display().to_string(),
            source,
        })?;
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(|source| ClusterError::Io {
            path: path.display().to_string(),
            source,
        })
}
