use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gravwalk::experiment::{
    emit, run, AngleValue, CoinChoice, EnsembleChoice, ExperimentConfig, ExperimentKind,
    OutputFormat, RawConfig,
};
use gravwalk::{Error, NoiseKind};

#[derive(Parser)]
#[command(
    name = "gravwalk",
    version,
    about = "Gravitationally coupled quantum walk experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Position distribution of a single walker.
    Walk(Common),
    /// Entanglement entropy and negativity versus step count.
    Curve(Common),
    /// Entropy and negativity over a grid of coin angles.
    Sweep(Common),
    /// Negativity with and without flip noise on walker A.
    Noise(Common),
    /// Second central moment of a single walker versus coin angle.
    Moments(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    BitFlip,
    PhaseFlip,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoinArg {
    Rotation,
    Hadamard,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleArg {
    Auto,
    Exact,
    Sampled,
}

#[derive(Args)]
struct Common {
    /// TOML file with default parameters; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Coin angle of walker A, in radians or as e.g. `pi/4`.
    #[arg(long, allow_hyphen_values = true)]
    theta_a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta_b: Option<String>,
    /// up, down, plus, minus, plus-i or minus-i.
    #[arg(long)]
    spin_a: Option<String>,
    #[arg(long)]
    spin_b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    steps: Option<i64>,
    /// Line separation in lattice units.
    #[arg(long, allow_hyphen_values = true)]
    separation: Option<i64>,
    /// Lattice spacing over time step.
    #[arg(long, allow_hyphen_values = true)]
    ratio: Option<f64>,
    #[arg(long, value_enum)]
    noise_kind: Option<Kind>,
    #[arg(long, allow_hyphen_values = true)]
    noise_p: Option<f64>,
    /// Monte Carlo trajectories per step count.
    #[arg(long, allow_hyphen_values = true)]
    samples: Option<i64>,
    #[arg(long, value_enum)]
    ensemble: Option<EnsembleArg>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Coin for `walk`.
    #[arg(long, value_enum)]
    coin: Option<CoinArg>,
    /// Intervals dividing [0, pi/2] for `sweep` and `moments`.
    #[arg(long, allow_hyphen_values = true)]
    grid_n: Option<i64>,
    /// `walk`: print mean and second moment at every step.
    #[arg(long)]
    per_step: bool,
}

impl Common {
    fn overrides(&self) -> RawConfig {
        RawConfig {
            experiment: None,
            theta_a: self.theta_a.clone().map(AngleValue::Expr),
            theta_b: self.theta_b.clone().map(AngleValue::Expr),
            spin_a: self.spin_a.clone(),
            spin_b: self.spin_b.clone(),
            steps: self.steps,
            separation: self.separation,
            step_ratio: self.ratio,
            noise_kind: self.noise_kind.map(|k| match k {
                Kind::BitFlip => NoiseKind::BitFlip,
                Kind::PhaseFlip => NoiseKind::PhaseFlip,
            }),
            noise_p: self.noise_p,
            samples: self.samples,
            ensemble: self.ensemble.map(|e| match e {
                EnsembleArg::Auto => EnsembleChoice::Auto,
                EnsembleArg::Exact => EnsembleChoice::Exact,
                EnsembleArg::Sampled => EnsembleChoice::Sampled,
            }),
            seed: self.seed,
            output_path: self.out.clone(),
            output_format: self.format.map(|f| match f {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            }),
            coin: self.coin.map(|c| match c {
                CoinArg::Rotation => CoinChoice::Rotation,
                CoinArg::Hadamard => CoinChoice::Hadamard,
            }),
            grid_n: self.grid_n,
            per_step: self.per_step.then_some(true),
        }
    }
}

fn execute(kind: ExperimentKind, args: &Common) -> gravwalk::Result<()> {
    let file = match &args.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    let cfg = ExperimentConfig::resolve(kind, &file.merged_with(args.overrides()))?;
    let table = run(&cfg)?;
    emit(&cfg, &table)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Walk(a) => (ExperimentKind::SingleWalk, a),
        Command::Curve(a) => (ExperimentKind::EntanglementCurve, a),
        Command::Sweep(a) => (ExperimentKind::ThetaSweep, a),
        Command::Noise(a) => (ExperimentKind::NoiseCurve, a),
        Command::Moments(a) => (ExperimentKind::MomentAnalysis, a),
    };
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gravwalk: {e}");
            ExitCode::from(match e {
                Error::Config { .. } | Error::InvalidArgument { .. } => 2,
                Error::Numerical(_) | Error::NotHermitian { .. } | Error::Mismatch(_) => 3,
                _ => 1,
            })
        }
    }
}
