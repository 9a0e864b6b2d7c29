mod commands;
mod config;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

/// Attack-risk bounds for differentially private mechanisms.
#[derive(Parser, Debug)]
#[command(name = "fdp-risk", version, about)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    /// Write output to this file instead of stdout. Relative paths resolve
    /// against the output directory when one is set.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Directory for relative output paths.
    #[arg(long, env = "FDP_RISK_OUT_DIR", global = true)]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit the knots of a trade-off curve.
    Tradeoff(TradeoffArgs),
    /// Risk bounds for a mechanism or scenario file.
    Bound(BoundArgs),
    /// Smallest noise scale meeting a target risk.
    Calibrate(CalibrateArgs),
    /// Query budget of repeated Laplace releases.
    Queries(QueriesArgs),
    /// Run the brute-force oracle corpus.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct MechanismArgs {
    /// Mechanism family: gaussian, laplace or randomized-response.
    #[arg(long)]
    pub mechanism: Option<String>,
    /// σ (Gaussian), b (Laplace) or flip probability (randomized response).
    #[arg(long)]
    pub noise_scale: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub sensitivity: f64,
    #[arg(long, default_value_t = 1)]
    pub compositions: u32,
    /// add-remove or replace-one.
    #[arg(long, default_value = "add-remove")]
    pub neighborhood: String,
}

#[derive(Args, Debug, Clone, Default)]
pub struct CurveArgs {
    #[command(flatten)]
    pub mechanism: MechanismArgs,
    /// Gaussian trade-off curve with this μ.
    #[arg(long)]
    pub gaussian_mu: Option<f64>,
    /// Laplace trade-off curve with this ε.
    #[arg(long)]
    pub laplace_eps: Option<f64>,
    /// Single (ε, δ) curve; needs --delta.
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Privacy profile CSV (`epsilon,delta`).
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Trade-off curve CSV (`alpha,f`).
    #[arg(long)]
    pub curve: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TradeoffArgs {
    #[command(flatten)]
    pub source: CurveArgs,
    /// Evaluate the curve on the default α-grid instead of emitting knots.
    #[arg(long)]
    pub sample: bool,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    /// Scenario file; other source flags are ignored when given.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[command(flatten)]
    pub source: CurveArgs,
    /// Baseline: worst-case, fixed:<b>, pso:<n>:<w>, spso:<w>, bernoulli:<pi>.
    #[arg(long = "baseline")]
    pub baselines: Vec<String>,
    /// Method: fdp, zcdp, rdp, rdp-t<order>, eps-delta[:<δ>].
    #[arg(long = "method")]
    pub methods: Vec<String>,
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub mechanism: MechanismArgs,
    #[arg(long, conflicts_with = "target_success")]
    pub target_adv: Option<f64>,
    #[arg(long)]
    pub target_success: Option<f64>,
    #[arg(long, default_value = "worst-case")]
    pub baseline: String,
    #[arg(long = "method")]
    pub methods: Vec<String>,
    /// Relative tolerance on the noise scale.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Initial bracket `lo,hi` on the noise scale.
    #[arg(long)]
    pub bracket: Option<String>,
}

#[derive(Args, Debug)]
pub struct QueriesArgs {
    /// Laplace scale per query (unit sensitivity).
    #[arg(long, default_value_t = 5.0)]
    pub b: f64,
    #[arg(long, default_value_t = 30)]
    pub k_max: u32,
    #[arg(long, default_value_t = 0.1)]
    pub base: f64,
    #[arg(long, default_value_t = 0.2)]
    pub target_adv: f64,
    /// δ for the optimal-composition path.
    #[arg(long, default_value_t = 1e-9)]
    pub delta_std: f64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Number of random attack instances.
    #[arg(long, default_value_t = 60)]
    pub count: usize,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Extra curve CSV files whose knots are checked for validity.
    #[arg(long = "curve")]
    pub curves: Vec<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = commands::Output::new(cli.format, cli.output, cli.out_dir);
    let result = match cli.command {
        Command::Tradeoff(a) => commands::tradeoff(&a, &out),
        Command::Bound(a) => commands::bound(&a, &out),
        Command::Calibrate(a) => commands::calibrate(&a, &out),
        Command::Queries(a) => commands::queries(&a, &out),
        Command::Verify(a) => commands::verify(&a, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
