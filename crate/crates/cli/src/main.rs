//! `mmkmeans` command-line tool.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mmkmeans::harness::io::{
    read_dataset_csv, read_mask_csv, write_dataset_csv, write_mask_csv, ResultConfig, ResultFile,
};
use mmkmeans::harness::plot::write_plot_files;
use mmkmeans::harness::report::{rows_from_files, write_report_csv};
use mmkmeans::harness::{fit, Algorithm, ExperimentPlan};
use mmkmeans::rng::{derive_seed, rng_from_seed};
use mmkmeans::synth::{generate, inject_missing, standardize, DatasetSpec, Family};
use mmkmeans::{ClusterError, ObservationMask, Result, RunConfig};

#[derive(Parser)]
#[command(name = "mmkmeans", version, about = "K-means and MM K-means on data with missing elements")]
struct Cli {
    /// Master random seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labelled synthetic dataset.
    Gen(GenArgs),
    /// Fit one dataset, optionally hiding a fraction of its elements first.
    Run(RunArgs),
    /// Score result files into a CSV table.
    Report(ReportArgs),
    /// Write a points CSV and an SVG scatter for a 2-D result.
    Plot(PlotArgs),
    /// Run the full benchmark grid and write every artifact.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GenArgs {
    /// circles, moons, blobs, varied or aniso.
    #[arg(long)]
    family: Family,
    #[arg(long, default_value_t = DatasetSpec::DEFAULT_N)]
    n: usize,
    #[arg(long, default_value_t = DatasetSpec::DEFAULT_NOISE)]
    noise: f64,
    /// Keep raw generator coordinates instead of z-scoring each feature.
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    data: PathBuf,
    /// lloyd or mm.
    #[arg(long, default_value = "mm")]
    algo: Algorithm,
    /// Fraction of elements to hide, in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    missing: f64,
    /// Number of clusters; defaults to the number of labels in the dataset.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = RunConfig::DEFAULT_MAX_ITER)]
    iters: usize,
    #[arg(long, default_value_t = RunConfig::DEFAULT_EPSILON)]
    eps: f64,
    /// Independent restarts; the lowest final objective wins.
    #[arg(long, default_value_t = 10)]
    n_init: usize,
    #[arg(long)]
    out: PathBuf,
    /// Where to write the mask CSV (default: next to the result, `.mask.csv`).
    #[arg(long)]
    mask_out: Option<PathBuf>,
    /// Dataset name shown in reports (default: the data file stem).
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    /// Result JSON files.
    #[arg(required = true)]
    results: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Add an "original dataset" row before each dataset's first result.
    #[arg(long)]
    with_truth: bool,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    result: PathBuf,
    /// Dataset CSV (default: the one recorded in the result).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Mask CSV (default: the one recorded in the result, else all observed).
    #[arg(long)]
    mask: Option<PathBuf>,
    #[arg(long)]
    out_csv: PathBuf,
    #[arg(long)]
    out_svg: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, default_value_t = 1)]
    replicates: usize,
    #[arg(long, default_value_t = 10)]
    n_init: usize,
    #[arg(long, default_value_t = DatasetSpec::DEFAULT_N)]
    n: usize,
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    out: PathBuf,
}

fn gen(seed: u64, args: GenArgs) -> Result<()> {
    let spec = DatasetSpec::new(args.family, seed)
        .with_n(args.n)
        .with_noise(args.noise);
    let mut data = generate(&spec)?;
    if !args.raw {
        data = standardize(&data)?;
    }
    write_dataset_csv(&args.out, &data)
}

fn run(seed: u64, args: RunArgs) -> Result<()> {
    args.algo.check_fraction(args.missing)?;
    if args.n_init == 0 {
        return Err(ClusterError::InvalidConfig("--n-init must be at least 1".into()));
    }
    let data = read_dataset_csv(&args.data)?;
    let k = match args.k {
        Some(k) => k,
        None => data.num_classes().ok_or_else(|| {
            ClusterError::InvalidConfig("--k is required for unlabelled data".into())
        })?,
    };
    let cfg = RunConfig::new(k, seed)
        .with_epsilon(args.eps)
        .with_max_iter(args.iters);
    cfg.validate(data.m())?;

    let mask = inject_missing(&data, args.missing, &mut rng_from_seed(derive_seed(seed, &[1])))?;
    let mask_path = if mask.is_all_observed() {
        None
    } else {
        let path = args
            .mask_out
            .clone()
            .unwrap_or_else(|| args.out.with_extension("mask.csv"));
        write_mask_csv(&path, &mask)?;
        Some(path.display().to_string())
    };
    let fitted = fit(args.algo, &data, &mask, &cfg, args.n_init)?;
    let name = args.name.unwrap_or_else(|| file_stem(&args.data));
    let result = ResultFile::from_fit(
        &fitted,
        &cfg,
        ResultConfig {
            algorithm: args.algo,
            k,
            epsilon: cfg.epsilon,
            max_iter: cfg.max_iter,
            n_init: args.n_init,
            missing_fraction: args.missing,
            dataset_name: name,
            dataset: args.data.display().to_string(),
            mask: mask_path,
        },
    );
    result.write(&args.out)
}

fn report(args: ReportArgs) -> Result<()> {
    let rows = rows_from_files(&args.results, args.with_truth)?;
    write_report_csv(&args.out, &rows)
}

fn plot(args: PlotArgs) -> Result<()> {
    let result = ResultFile::read(&args.result)?;
    let data_path = args
        .data
        .unwrap_or_else(|| PathBuf::from(&result.config.dataset));
    let data = read_dataset_csv(&data_path)?;
    let mask = match args.mask.or_else(|| result.config.mask.as_ref().map(PathBuf::from)) {
        Some(p) => read_mask_csv(&p)?,
        None => ObservationMask::all_observed(data.m(), data.d()),
    };
    let title = format!(
        "{} on {} ({:.0}% missing)",
        result.config.algorithm.label(),
        result.config.dataset_name,
        result.config.missing_fraction * 100.0
    );
    let csv = mmkmeans::harness::plot::points_csv(&data, &result.assignment, &mask)?;
    let svg = mmkmeans::harness::plot::render_svg(
        &data,
        &result.assignment,
        &result.centroids,
        &mask,
        &title,
    )?;
    write_text(&args.out_csv, &csv)?;
    write_text(&args.out_svg, &svg)
}

fn experiment(seed: u64, args: ExperimentArgs) -> Result<()> {
    let plan = ExperimentPlan {
        replicates: args.replicates,
        master_seed: seed,
        n: args.n,
        n_init: args.n_init,
        standardize: !args.raw,
        out_dir: Some(args.out.clone()),
        ..ExperimentPlan::default()
    };
    let outcomes = plan.run()?;
    plan.write_outputs(&outcomes, &args.out)?;
    for o in outcomes.iter().filter(|o| o.cell.replicate == 0) {
        let stem = args.out.join("plots").join(o.cell.name());
        write_plot_files(
            &stem,
            &o.dataset,
            o.fit.assignment.as_slice(),
            &o.fit.model.to_rows(),
            &o.mask,
            &format!("{} on {}", o.cell.arm.algorithm.label(), o.cell.family.display_name()),
        )?;
    }
    println!("wrote {}", args.out.join("report.csv").display());
    Ok(())
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| ClusterError::Io {
            path: parent.display().to_string(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| ClusterError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(a) => gen(cli.seed, a),
        Command::Run(a) => run(cli.seed, a),
        Command::Report(a) => report(a),
        Command::Plot(a) => plot(a),
        Command::Experiment(a) => experiment(cli.seed, a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                ClusterError::InvalidConfig(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
