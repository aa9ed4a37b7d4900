use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mogp_core::experiments::{resolved_config, run_experiment_full, ExperimentOutput, EXPERIMENTS};
use serde_json::{json, Map, Value};

const VERSION: &str = env!("MOGP_VERSION");

#[derive(Parser)]
#[command(name = "mogp", version = VERSION, about = "Simulation experiments for wide networks with scale-mixture Gaussian weights")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Output histograms and survival curves per variance model.
    #[command(after_help = "CSV files:\n  histogram.csv  model,source,bin_center,density\n  tail.csv       model,source,u,survival\n  (source is `finite` or `limit`)")]
    OutputDist(Common),
    /// Correlation of squared outputs across widths.
    #[command(after_help = "CSV files:\n  output_corr.csv  model,width,corr,corr_se,rb_corr,rb_corr_se\n  (rb_corr is the correlation implied by the conditional output variance)")]
    OutputCorr(Common),
    /// Empirical CDF of the largest weight against its wide limit.
    #[command(after_help = "CSV files:\n  max_weight_cdf.csv  model,width,w,ecdf,limit_cdf")]
    MaxWeight(Common),
    /// Error of ε-pruning as a function of ε with the analytic bound.
    #[command(after_help = "CSV files:\n  truncation_error.csv  alpha,eps,layer,error,error_se,bound\n  slopes.csv            alpha,layer,slope,slope_se")]
    TruncationError(Common),
    /// Random kernel draws over a grid of input correlations.
    #[command(after_help = "CSV files:\n  kernel_realizations.csv  model,draw,rho,k2,gp_kernel")]
    KernelRealizations(Common),
    /// Mass ratio of the κ-largest variances and relative κ-pruning error.
    #[command(after_help = "CSV files:\n  compressibility.csv  model,width,kappa,lambda_ratio,lambda_ratio_se,norm_ratio,norm_ratio_se,rel_prune_error,rel_prune_error_se")]
    Compressibility(Common),
    /// Convergence conditions for every bundled model plus special-function checks.
    /// Exits with status 1 if any check fails.
    #[command(after_help = "CSV files:\n  verify.csv  suite,label,value,target,tolerance,pass")]
    Verify(Common),
    /// Run any registered experiment by name (see --help for the list).
    #[command(after_help = "Experiments: output_dist, output_corr, max_weight, truncation_error, kernel_realizations,\ncompressibility, verify, special_functions, limit_ks, output_laws, kernel_moments, extremes,\ntail_exponents. Each table is written as <table>.csv with a header row.")]
    Run {
        /// Experiment name.
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// JSON experiment config. Top-level `seed` and `replicates` keys are
    /// accepted; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (required here or in the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Replicate count; defaults to the experiment's own.
    #[arg(long)]
    replicates: Option<usize>,
    /// Worker threads. Results do not depend on this.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Core(#[from] mogp_core::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = match &cli.command {
        Command::OutputDist(c) => ("output_dist", c),
        Command::OutputCorr(c) => ("output_corr", c),
        Command::MaxWeight(c) => ("max_weight", c),
        Command::TruncationError(c) => ("truncation_error", c),
        Command::KernelRealizations(c) => ("kernel_realizations", c),
        Command::Compressibility(c) => ("compressibility", c),
        Command::Verify(c) => ("verify", c),
        Command::Run { name, common } => (name.as_str(), common),
    };
    match run(name, common) {
        Ok(out) => {
            let failed: Vec<_> = out.report.checks.iter().filter(|c| !c.pass).collect();
            for c in &failed {
                eprintln!("check failed: {} (value {}, target {}, tolerance {})", c.label, c.value, c.target, c.tolerance);
            }
            eprintln!("{name}: {} checks, {} failed; output in {}", out.report.checks.len(), failed.len(), common.out.display());
            if name == "verify" && !failed.is_empty() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(name: &str, common: &Common) -> Result<ExperimentOutput, CliError> {
    if !EXPERIMENTS.contains(&name) {
        return Err(CliError::Config(format!("unknown experiment `{name}`")));
    }
    let mut config = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            serde_json::from_str::<Value>(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => Value::Object(Map::new()),
    };
    let obj = config
        .as_object_mut()
        .ok_or_else(|| CliError::Config("config must be a JSON object".into()))?;
    let file_seed = match obj.remove("seed") {
        Some(v) => Some(v.as_u64().ok_or_else(|| CliError::Config("seed must be a nonnegative integer".into()))?),
        None => None,
    };
    let file_reps = match obj.remove("replicates") {
        Some(v) => Some(v.as_u64().ok_or_else(|| CliError::Config("replicates must be a positive integer".into()))? as usize),
        None => None,
    };
    let seed = common
        .seed
        .or(file_seed)
        .ok_or_else(|| CliError::Config("a seed is required (--seed or `seed` in the config)".into()))?;
    let replicates = common.replicates.or(file_reps);
    if replicates == Some(0) {
        return Err(CliError::Config("replicates must be positive".into()));
    }
    if common.workers == 0 {
        return Err(CliError::Config("workers must be positive".into()));
    }
    let resolved = resolved_config(name, &config)?;
    let out = run_experiment_full(name, &config, seed, replicates, common.workers)?;
    write_outputs(name, common, seed, &resolved, &out)?;
    Ok(out)
}

fn write_outputs(name: &str, common: &Common, seed: u64, resolved: &Value, out: &ExperimentOutput) -> Result<(), CliError> {
    let dir = &common.out;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut files = Vec::new();
    match common.format {
        Format::Csv => {
            for t in &out.tables {
                let file = format!("{}.csv", t.name);
                write_atomic(&dir.join(&file), t.to_csv().as_bytes())?;
                files.push(file);
            }
            let file = "report.json".to_string();
            write_atomic(&dir.join(&file), &pretty(&serde_json::to_value(&out.report).expect("report serializes")))?;
            files.push(file);
        }
        Format::Json => {
            let file = format!("{name}.json");
            let body = serde_json::to_value(out).expect("output serializes");
            write_atomic(&dir.join(&file), &pretty(&body))?;
            files.push(file);
        }
    }
    let manifest = json!({
        "command": name,
        "version": VERSION,
        "seed": seed,
        "replicates": out.report.replicate_count,
        "parallel_backend": mogp_core::harness::parallel_enabled(),
        "config": resolved,
        "files": files,
        "checks": out.report.checks.len(),
        "failed_checks": out.report.checks.iter().filter(|c| !c.pass).count(),
    });
    write_atomic(&dir.join("manifest.json"), &pretty(&manifest))
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("JSON value serializes");
    s.push(b'\n');
    s
}

/// Write to a sibling temporary file and rename it into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension(format!("{}.tmp", path.extension().and_then(|e| e.to_str()).unwrap_or("")));
    let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
    f.write_all(bytes).map_err(io_err(&tmp))?;
    f.sync_all().map_err(io_err(&tmp))?;
    drop(f);
    fs::rename(&tmp, path).map_err(io_err(path))
}
