use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rksmooth::cli::{self, CliError, Options};
use rksmooth::estimators::EdgeCorrection;
use rksmooth::risk::HoptVariant;

#[derive(Parser)]
#[command(
    name = "rksmooth",
    about = "Nonparametric regression from repeated correlated measurements: projection and classical kernel smoothers, exact risk, bandwidth selection, benchmarks.",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Evaluation grid size on [0, 1].
    #[arg(long, default_value_t = 201)]
    grid: usize,
    /// Edge handling: none | renorm | wsum.
    #[arg(long, default_value = "wsum")]
    boundary: String,
    /// Closed-form bandwidth variant: paper | derived.
    #[arg(long, default_value = "derived", value_name = "VARIANT")]
    hopt_variant: String,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the curve from one simulated dataset.
    Estimate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        method: String,
        /// Bandwidth override (otherwise the scenario's h applies).
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Exact risk report (CSV per point, JSON summary on stdout).
    Risk {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        method: String,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Exact-IMSE optimal bandwidth plus closed-form variants.
    Bandwidth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        method: String,
        #[command(flatten)]
        common: Common,
    },
    /// Reproduce benchmark tables (one CSV row per block/method/m).
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo mean curves per m value.
    Figure {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Asymptotic-normality diagnostic at a point.
    Normality {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        x: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Run the oracle-equivalence selftest suite.
    Selftest {
        #[command(flatten)]
        common: Common,
    },
}

fn options_from(common: &Common) -> Result<Options, CliError> {
    if let Some(threads) = common.threads {
        // Ignore the error when a pool already exists (e.g. repeated calls in
        // tests); the first configuration wins.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let boundary = EdgeCorrection::from_cli_name(&common.boundary).ok_or_else(|| {
        CliError::Config(format!(
            "unknown boundary mode {:?}; expected none, renorm or wsum",
            common.boundary
        ))
    })?;
    let hopt_variant = HoptVariant::from_cli_name(&common.hopt_variant).ok_or_else(|| {
        CliError::Config(format!(
            "unknown hopt variant {:?}; expected paper or derived",
            common.hopt_variant
        ))
    })?;
    Ok(Options {
        seed: common.seed,
        grid: common.grid.max(3),
        boundary,
        hopt_variant,
    })
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Estimate { config, method, h, out, common } => {
            cli::cmd_estimate(&config, &method, h, &out, &options_from(&common)?)
        }
        Command::Risk { config, method, h, out, common } => {
            let summary = cli::cmd_risk(&config, &method, h, &out, &options_from(&common)?)?;
            println!("{summary}");
            Ok(())
        }
        Command::Bandwidth { config, method, common } => {
            let summary = cli::cmd_bandwidth(&config, &method, &options_from(&common)?)?;
            println!("{summary}");
            Ok(())
        }
        Command::Bench { config, out, common } => {
            cli::cmd_bench(&config, &out, &options_from(&common)?)
        }
        Command::Figure { config, out, common } => {
            cli::cmd_figure(&config, &out, &options_from(&common)?)
        }
        Command::Normality { config, x, common } => {
            let summary = cli::cmd_normality(&config, x, &options_from(&common)?)?;
            println!("{summary}");
            Ok(())
        }
        Command::Selftest { common } => {
            let _ = options_from(&common)?;
            let report = cli::cmd_selftest()?;
            print!("{report}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let payload = serde_json::json!({
                "error": {
                    "kind": err.kind(),
                    "message": err.to_string(),
                }
            });
            eprintln!("{payload}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
