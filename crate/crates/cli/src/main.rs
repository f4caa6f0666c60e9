//! `stockcast`: ingest quotes, decode news sentiment, train, forecast,
//! backtest, tune and report.

mod commands;
mod config;
mod error;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Workspace;

#[derive(Debug, Parser)]
#[command(name = "stockcast", version, about = "Stock price forecasting with LSTM, additive+boosting, SARIMA and news sentiment")]
struct Cli {
    /// Run configuration (flat `key = value` file).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed; overrides the config's `seed`.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Workspace directory for series, models, reports and plots.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate OHLCV CSV files (or fetch them) into the workspace.
    Ingest {
        /// CSV files; defaults to `data.files`.
        files: Vec<PathBuf>,
        /// Fetch from this endpoint template instead of reading files.
        #[arg(long, value_name = "TEMPLATE")]
        from_url: Option<String>,
        /// Symbol names, one per file or per fetch.
        #[arg(long = "symbol", value_name = "SYM")]
        symbols: Vec<String>,
    },
    /// Decode news documents into a daily sentiment score file.
    Sentiment,
    /// Fit every configured model on each full ingested series.
    Train,
    /// Forecast the next `window.horizon` bars from the trained models.
    Forecast,
    /// Rolling-origin backtest of every configured model; writes the report
    /// and plots.
    Backtest,
    /// Stepwise (or grid) search over `tune.*` candidates.
    Tune {
        /// Evaluate the full Cartesian product instead.
        #[arg(long)]
        grid: bool,
    },
    /// Rebuild the CSV report from `report.json` and print it.
    Report,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.set("seed", &seed.to_string())?;
    }
    let ws = Workspace::new(cli.out);
    match cli.command {
        Command::Ingest {
            files,
            from_url,
            symbols,
        } => commands::ingest::run(&cfg, &ws, &files, from_url.as_deref(), &symbols),
        Command::Sentiment => commands::sentiment::run(&cfg, &ws),
        Command::Train => commands::train::run(&cfg, &ws),
        Command::Forecast => commands::forecast::run(&cfg, &ws),
        Command::Backtest => commands::backtest::run(&cfg, &ws),
        Command::Tune { grid } => commands::tune::run(&cfg, &ws, grid),
        Command::Report => commands::report::run(&ws),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
