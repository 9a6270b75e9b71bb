use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod error;

use error::CliError;

/// Support vector data description and process capability analysis.
#[derive(Debug, Parser)]
#[command(name = "svddcap", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a description of an in-control process window.
    Train(TrainArgs),
    /// Score rows against a trained model.
    Score(ScoreArgs),
    /// Compute the capability vector [cp, dist, p].
    Capability(CapabilityArgs),
    /// Generate a synthetic process window.
    Generate(GenerateArgs),
    /// Render the inlier map of a two-variable model as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct Hyper {
    /// Gaussian kernel bandwidth; median pairwise distance when omitted.
    #[arg(short = 's', long)]
    bandwidth: Option<f64>,
    /// Target fraction of training outliers, 0 < f <= 1.
    #[arg(short = 'f', long, default_value_t = svddcap::DEFAULT_OUTLIER_FRACTION)]
    outlier_fraction: f64,
    /// Z-score each column with the training statistics.
    #[arg(long)]
    standardize: bool,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Training CSV with a header row.
    data: PathBuf,
    #[command(flatten)]
    hyper: Hyper,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    data: PathBuf,
    #[arg(long)]
    model: PathBuf,
    /// Defaults to stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CapabilityArgs {
    /// Process window CSV.
    data: PathBuf,
    /// Specification limits, one `name,lsl,usl` line per variable.
    #[arg(long)]
    spec: PathBuf,
    /// Reuse a trained model instead of training on `data`.
    #[arg(long, conflicts_with_all = ["bandwidth", "standardize"])]
    model: Option<PathBuf>,
    #[command(flatten)]
    hyper: Hyper,
    #[arg(long, default_value_t = 100_000)]
    n_es: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Work split; does not change the result.
    #[arg(long)]
    partitions: Option<usize>,
    /// Defaults to stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// disk, annulus, boomerang, two_donut or box.
    shape: String,
    #[arg(short)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// TOML file with shape parameters; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    center: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    second_center: Option<Vec<f64>>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    inner_radius: Option<f64>,
    #[arg(long)]
    outer_radius: Option<f64>,
    /// Boomerang angular extent in degrees.
    #[arg(long)]
    extent: Option<f64>,
    /// Boomerang opening direction in degrees.
    #[arg(long, allow_hyphen_values = true)]
    orientation: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    half_widths: Option<Vec<f64>>,
    /// Defaults to stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 200)]
    grid_resolution: usize,
    /// Overlay these observations.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Defaults to stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            let text = text.strip_prefix("error: ").unwrap_or(&text);
            eprint!("error[usage]: {text}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.kind(), e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Train(a) => commands::train(a),
        Command::Score(a) => commands::score(a),
        Command::Capability(a) => commands::capability(a),
        Command::Generate(a) => commands::generate(a),
        Command::Plot(a) => commands::plot(a),
    }
}

/// `SVDDCAP_THREADS` caps the rayon pool.
fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("SVDDCAP_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            CliError::usage(format!(
                "SVDDCAP_THREADS must be a positive integer (got '{value}')"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::usage(format!("cannot configure worker pool: {e}")))
}
