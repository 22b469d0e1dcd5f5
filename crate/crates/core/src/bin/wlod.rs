use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use wlod::error::{Error, Result};
use wlod::experiments::{run, ExperimentConfig, RawConfig};

/// Weighted localized orthogonal decomposition experiments.
///
/// Settings come from an optional key = value config file; every flag below
/// overrides the matching key.
#[derive(Debug, Parser)]
#[command(name = "wlod", version)]
struct Cli {
    /// solve, convergence, decay, interp-check or quad-check
    command: String,
    /// Config file with key = value lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// Accept α and β at the endpoints of their admissible intervals
    #[arg(long)]
    allow_endpoint: bool,
    /// Worker threads (default: WLOD_WORKERS or all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Override any config key, e.g. --set k=global (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    coefficient: Option<String>,
    #[arg(long)]
    value: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    raster: Option<String>,
    #[arg(long)]
    rescale: Option<String>,
    #[arg(long)]
    source: Option<String>,
    #[arg(long = "source_params", alias = "source-params")]
    source_params: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Coarse mesh sizes
    #[arg(long = "H")]
    coarse_h: Option<String>,
    /// Fine mesh size
    #[arg(long = "h")]
    fine_h: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long = "decay_k", alias = "decay-k")]
    decay_k: Option<String>,
    #[arg(long)]
    node: Option<String>,
    #[arg(long = "quad_depth", alias = "quad-depth")]
    quad_depth: Option<String>,
    #[arg(long = "corrector_tol", alias = "corrector-tol")]
    corrector_tol: Option<String>,
    #[arg(long = "reference_tol", alias = "reference-tol")]
    reference_tol: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    output: Option<String>,
}

fn configure(cli: &Cli) -> Result<ExperimentConfig> {
    let mut raw = match &cli.config {
        Some(p) => RawConfig::load(p)?,
        None => RawConfig::default(),
    };
    raw.set("command", &cli.command)?;
    let flags = [
        ("coefficient", &cli.coefficient),
        ("value", &cli.value),
        ("epsilon", &cli.epsilon),
        ("raster", &cli.raster),
        ("rescale", &cli.rescale),
        ("source", &cli.source),
        ("source_params", &cli.source_params),
        ("alpha", &cli.alpha),
        ("beta", &cli.beta),
        ("H", &cli.coarse_h),
        ("h", &cli.fine_h),
        ("k", &cli.k),
        ("decay_k", &cli.decay_k),
        ("node", &cli.node),
        ("quad_depth", &cli.quad_depth),
        ("corrector_tol", &cli.corrector_tol),
        ("reference_tol", &cli.reference_tol),
        ("samples", &cli.samples),
        ("seed", &cli.seed),
        ("output", &cli.output),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            raw.set(key, v)?;
        }
    }
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        raw.set(k.trim(), v.trim())?;
    }
    if cli.allow_endpoint {
        raw.set("allow_endpoint", "true")?;
    }
    ExperimentConfig::from_raw(&raw)
}

fn workers(cli: &Cli) -> Result<Option<usize>> {
    if let Some(n) = cli.workers {
        return Ok(Some(n));
    }
    match std::env::var("WLOD_WORKERS") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::config(format!("WLOD_WORKERS must be a positive integer, got {s:?}"))),
        Err(_) => Ok(None),
    }
}

fn main_inner(cli: &Cli) -> Result<()> {
    let cfg = configure(cli)?;
    if let Some(n) = workers(cli)? {
        if n == 0 {
            return Err(Error::config("worker count must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::config(format!("cannot start {n} workers: {e}")))?;
    }
    let summary = run(&cfg)?;
    for m in &summary.messages {
        println!("{m}");
    }
    println!("wrote {}", cfg.output.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
