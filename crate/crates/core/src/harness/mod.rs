//! Experiment pipeline: generate datasets, hide elements, fit, score, and write artifacts.

pub mod io;
pub mod plot;
pub mod report;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ClusterError, Result};
use crate::lloyd::{assign_step, run_lloyd_restarts, LloydResult};
use crate::metrics::MetricReport;
use crate::mm::run_mm_restarts;
use crate::model::{ClusterModel, Dataset, ObservationMask, RunConfig};
use crate::rng::{derive_seed, rng_from_seed};
use crate::synth::{generate, inject_missing, standardize, DatasetSpec, Family};

pub use io::{ResultConfig, ResultFile, TraceEntry};
pub use report::ReportRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Lloyd,
    Mm,
}

impl Algorithm {
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Lloyd => "K-means",
            Algorithm::Mm => "MM K-means",
        }
    }

    pub fn check_fraction(self, fraction: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(ClusterError::InvalidConfig(format!(
                "missing fraction must lie in [0, 1], got {fraction}"
            )));
        }
        if self == Algorithm::Lloyd && fraction > 0.0 {
            return Err(ClusterError::InvalidConfig(
                "lloyd requires complete data; use --algo mm with missing elements".into(),
            ));
        }
        Ok(())
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Lloyd => "lloyd",
            Algorithm::Mm => "mm",
        })
    }
}

impl FromStr for Algorithm {
    type Err = ClusterError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lloyd" | "kmeans" | "k-means" => Ok(Algorithm::Lloyd),
            "mm" | "mm-kmeans" => Ok(Algorithm::Mm),
            other => Err(ClusterError::InvalidConfig(format!(
                "unknown algorithm '{other}'"
            ))),
        }
    }
}

/// Fits `data` with the chosen solver; `mask` must be all-observed for Lloyd.
pub fn fit(
    algorithm: Algorithm,
    data: &Dataset<f64>,
    mask: &ObservationMask,
    cfg: &RunConfig,
    n_init: usize,
) -> Result<LloydResult<f64>> {
    match algorithm {
        Algorithm::Lloyd => {
            if !mask.is_all_observed() {
                return Err(ClusterError::InvalidConfig(
                    "lloyd requires complete data".into(),
                ));
            }
            run_lloyd_restarts(data, cfg, n_init)
        }
        Algorithm::Mm => run_mm_restarts(data, mask, cfg, n_init),
    }
}

/// Scores a fitted model against the labelled source data.
///
/// The scored partition is each true point's nearest centroid, so samples whose elements were
/// hidden from the solver are judged by where their real coordinates fall. For complete data at
/// convergence this is the solver's own assignment.
pub fn score(data: &Dataset<f64>, model: &ClusterModel<f64>, time_seconds: f64) -> Result<MetricReport> {
    let truth = data
        .labels()
        .ok_or_else(|| ClusterError::Integrity("dataset has no ground-truth labels".into()))?;
    let pred = assign_step(data, model)?;
    MetricReport::compute(data, truth, pred.as_slice(), time_seconds)
}

/// One (algorithm, missing fraction) pair run on every dataset of a plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arm {
    pub algorithm: Algorithm,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub families: Vec<Family>,
    /// Independent replicates per family; each gets its own dataset, mask and solver seeds.
    pub replicates: usize,
    pub master_seed: u64,
    pub arms: Vec<Arm>,
    pub n: usize,
    pub noise: f64,
    pub standardize: bool,
    pub epsilon: f64,
    pub max_iter: usize,
    pub n_init: usize,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentPlan {
    /// Five families, 500 samples, noise 0.05, K-means on complete data and MM K-means at
    /// 10/30/50% missing, 100 iterations.
    fn default() -> Self {
        ExperimentPlan {
            families: Family::ALL.to_vec(),
            replicates: 1,
            master_seed: 0,
            arms: vec![
                Arm { algorithm: Algorithm::Lloyd, fraction: 0.0 },
                Arm { algorithm: Algorithm::Mm, fraction: 0.1 },
                Arm { algorithm: Algorithm::Mm, fraction: 0.3 },
                Arm { algorithm: Algorithm::Mm, fraction: 0.5 },
            ],
            n: DatasetSpec::DEFAULT_N,
            noise: DatasetSpec::DEFAULT_NOISE,
            standardize: true,
            epsilon: RunConfig::DEFAULT_EPSILON,
            max_iter: RunConfig::DEFAULT_MAX_ITER,
            n_init: 10,
            out_dir: None,
        }
    }
}

/// Identifies one experiment cell and the seeds it owns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub family: Family,
    pub replicate: usize,
    pub arm: Arm,
    pub dataset_seed: u64,
    pub mask_seed: u64,
    pub solver_seed: u64,
}

impl Cell {
    pub fn name(&self) -> String {
        format!(
            "{}_r{}_{}_{:03}",
            self.family.name(),
            self.replicate,
            self.arm.algorithm,
            (self.arm.fraction * 100.0).round() as u32
        )
    }
}

#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub cell: Cell,
    pub dataset: Dataset<f64>,
    pub mask: ObservationMask,
    pub fit: LloydResult<f64>,
    pub report: MetricReport,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() || self.arms.is_empty() || self.replicates == 0 {
            return Err(ClusterError::InvalidConfig(
                "plan needs at least one family, arm and replicate".into(),
            ));
        }
        for arm in &self.arms {
            arm.algorithm.check_fraction(arm.fraction)?;
        }
        if self.n_init == 0 {
            return Err(ClusterError::InvalidConfig("n_init must be at least 1".into()));
        }
        Ok(())
    }

    pub fn dataset_spec(&self, family: Family, replicate: usize) -> DatasetSpec {
        DatasetSpec {
            family,
            n: self.n,
            noise: self.noise,
            seed: derive_seed(self.master_seed, &[family as u64, replicate as u64]),
        }
    }

    pub fn run_config(&self, family: Family, seed: u64) -> RunConfig {
        RunConfig::new(family.k_true(), seed)
            .with_epsilon(self.epsilon)
            .with_max_iter(self.max_iter)
    }

    /// Cells in family, replicate, arm order.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &family in &self.families {
            for replicate in 0..self.replicates {
                let base = [family as u64, replicate as u64];
                for &arm in &self.arms {
                    cells.push(Cell {
                        family,
                        replicate,
                        arm,
                        dataset_seed: self.dataset_spec(family, replicate).seed,
                        mask_seed: derive_seed(
                            self.master_seed,
                            &[base[0], base[1], 1, arm.fraction.to_bits()],
                        ),
                        // shared by every arm so zero-missing arms line up exactly
                        solver_seed: derive_seed(self.master_seed, &[base[0], base[1], 2]),
                    });
                }
            }
        }
        cells
    }

    /// The dataset a cell clusters (standardized when the plan says so).
    pub fn dataset(&self, family: Family, replicate: usize) -> Result<Dataset<f64>> {
        let raw = generate(&self.dataset_spec(family, replicate))?;
        if self.standardize {
            standardize(&raw)
        } else {
            Ok(raw)
        }
    }

    pub fn run_cell(&self, cell: &Cell) -> Result<CellOutcome> {
        let dataset = self.dataset(cell.family, cell.replicate)?;
        let mask = inject_missing(&dataset, cell.arm.fraction, &mut rng_from_seed(cell.mask_seed))?;
        let cfg = self.run_config(cell.family, cell.solver_seed);
        let fit = fit(cell.arm.algorithm, &dataset, &mask, &cfg, self.n_init)?;
        let report = score(&dataset, &fit.model, fit.trace.elapsed)?;
        Ok(CellOutcome {
            cell: *cell,
            dataset,
            mask,
            fit,
            report,
        })
    }

    /// Runs every cell; cells are independent and run in parallel, results keep cell order.
    pub fn run(&self) -> Result<Vec<CellOutcome>> {
        self.validate()?;
        self.cells().par_iter().map(|c| self.run_cell(c)).collect()
    }

    /// Writes dataset, mask and result files for each outcome plus `report.csv`
    /// into `out_dir`, returning the report rows.
    pub fn write_outputs(&self, outcomes: &[CellOutcome], out_dir: &Path) -> Result<Vec<ReportRow>> {
        let mut rows = Vec::with_capacity(outcomes.len());
        for o in outcomes {
            let data_path = out_dir
                .join("datasets")
                .join(format!("{}_r{}.csv", o.cell.family.name(), o.cell.replicate));
            if !data_path.exists() {
                io::write_dataset_csv(&data_path, &o.dataset)?;
            }
            let mask_path = (o.cell.arm.fraction > 0.0).then(|| {
                out_dir.join("masks").join(format!("{}.csv", o.cell.name()))
            });
            if let Some(p) = &mask_path {
                io::write_mask_csv(p, &o.mask)?;
            }
            let cfg = self.run_config(o.cell.family, o.cell.solver_seed);
            let result = ResultFile::from_fit(
                &o.fit,
                &cfg,
                ResultConfig {
                    algorithm: o.cell.arm.algorithm,
                    k: cfg.k,
                    epsilon: cfg.epsilon,
                    max_iter: cfg.max_iter,
                    n_init: self.n_init,
                    missing_fraction: o.cell.arm.fraction,
                    dataset_name: o.cell.family.display_name().to_string(),
                    dataset: data_path.display().to_string(),
                    mask: mask_path.map(|p| p.display().to_string()),
                },
            );
            result.write(&out_dir.join("results").join(format!("{}.json", o.cell.name())))?;
            rows.push(ReportRow {
                dataset: o.cell.family.display_name().to_string(),
                algorithm: o.cell.arm.algorithm.label().to_string(),
                missing: o.cell.arm.fraction,
                report: o.report,
            });
        }
        report::write_report_csv(&out_dir.join("report.csv"), &rows)?;
        Ok(rows)
    }
}

/// Median of a sample (mean of the middle pair for even lengths).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
