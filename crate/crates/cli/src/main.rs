mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use grassmann_rom::bicitsgm::{AnchorPolicy, Calibration};
use grassmann_rom::interp::TangentInterpolator;
use grassmann_rom::itsgm::RefPolicy;
use grassmann_rom::pod::TruncationRule;

use config::{FamilyKind, RunConfig};
use error::CliResult;

/// Parametric reduced-order models by subspace interpolation.
#[derive(Parser)]
#[command(name = "grom", version)]
struct Cli {
    /// Run configuration file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed of the genetic algorithm.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write snapshot matrices of an analytic family and their manifest.
    Gen(GenArgs),
    /// Decompose a snapshot matrix into modes, singular values and temporal basis.
    Pod(PodArgs),
    /// Interpolate a subspace, or with --bi a full field, at a new parameter.
    Interp(InterpArgs),
    /// Identify the parameter of a target field with the reduced genetic algorithm.
    Ga,
    /// Time online queries against from-scratch recomputation.
    Bench,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    family: Option<FamilyKind>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gammas: Option<Vec<f64>>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    timesteps: Option<usize>,
    #[arg(long)]
    width: Option<f64>,
    /// Subspace dimension of the rotating family.
    #[arg(long)]
    rank: Option<usize>,
}

#[derive(Args)]
struct PodArgs {
    /// Snapshot matrix (`.csv` or binary).
    input: PathBuf,
    /// Truncation rule, `rank:<q>` or `energy:<epsilon>`.
    #[arg(long)]
    rule: Option<TruncationRule>,
    /// Subtract the temporal mean first.
    #[arg(long)]
    center: bool,
    /// Output file stem; defaults to the input's.
    #[arg(long)]
    prefix: Option<String>,
}

#[derive(Args)]
struct InterpArgs {
    /// Sample-set manifest.
    manifest: PathBuf,
    /// Query parameter, comma-separated components.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    gamma: Vec<f64>,
    /// `lagrange`, `rbf[:kernel[:shape]]` or `idw[:power]`.
    #[arg(long)]
    method: Option<TangentInterpolator>,
    /// Reference sample index or `nearest`.
    #[arg(long)]
    reference: Option<RefPolicy>,
    /// Reconstruct the snapshot field instead of the spatial subspace.
    #[arg(long)]
    bi: bool,
    #[arg(long)]
    anchor: Option<AnchorPolicy>,
    #[arg(long)]
    calibration: Option<Calibration>,
    /// Basis or field at the query parameter to report the error against.
    #[arg(long)]
    truth: Option<PathBuf>,
}

impl Cli {
    fn resolve_config(&self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.ga.params.rng_seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let mut cfg = cli.resolve_config()?;
    match cli.command {
        Command::Gen(a) => {
            let f = &mut cfg.family;
            f.kind = a.family.unwrap_or(f.kind);
            f.grid_points = a.grid_points.unwrap_or(f.grid_points);
            f.timesteps = a.timesteps.unwrap_or(f.timesteps);
            f.width = a.width.unwrap_or(f.width);
            f.rank = a.rank.unwrap_or(f.rank);
            if let Some(g) = a.gammas {
                cfg.samples.gammas = g;
            }
            commands::gen(&cfg)
        }
        Command::Pod(a) => {
            cfg.pod.rule = a.rule.unwrap_or(cfg.pod.rule);
            cfg.pod.center |= a.center;
            commands::pod(&cfg, &a.input, a.prefix.as_deref())
        }
        Command::Interp(a) => {
            let i = &mut cfg.interpolator;
            i.method = a.method.unwrap_or(i.method);
            i.bi.reference = a.reference.unwrap_or(i.bi.reference);
            i.bi.anchor = a.anchor.unwrap_or(i.bi.anchor);
            i.bi.calibration = a.calibration.unwrap_or(i.bi.calibration);
            let args =
                commands::InterpArgs { manifest: &a.manifest, gamma: &a.gamma, bi: a.bi, truth: a.truth.as_deref() };
            commands::interp(&cfg, &args)
        }
        Command::Ga => commands::ga(&cfg),
        Command::Bench => commands::bench(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("grom: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
