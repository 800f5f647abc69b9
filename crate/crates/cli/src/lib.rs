//! The `fractalmark` command line: ingest prices, run the event study, build
//! α-fractal interpolants, estimate box dimensions and assemble the 2024
//! NIFTY50 reproduction report.
//!
//! Each subcommand accepts `--config <file>` with flat `key = value` lines
//! named after its long flags; flags given on the command line win.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;

use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

pub use error::{CliError, EXIT_COMPUTATION, EXIT_INPUT, EXIT_OK};
pub use output::Outcome;

#[derive(Debug, Parser)]
#[command(name = "fractalmark", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Turn daily open/close price files into intraday return series.
    Ingest(IngestArgs),
    /// Abnormal returns, AAR and CAAR around an event date.
    EventStudy(EventStudyArgs),
    /// Sample an α-fractal interpolation function through 11 grid points.
    Fif(FifArgs),
    /// Box-counting dimension of an `x,y` point cloud.
    Boxdim(BoxdimArgs),
    /// Reproduce the 2024 case study: tables, plots and a dimension comparison.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// `key = value` file keyed by long flag names; flags given here win
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Price CSV with date, open and close columns; repeatable.
    #[arg(long)]
    pub input: Vec<PathBuf>,
    /// Receives `<instrument>/returns.csv` per input [default: out]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EventStudyArgs {
    /// `key = value` file keyed by long flag names; flags given here win
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Precomputed abnormal returns (`relative_day` plus one column per
    /// security); skips the CAPM step.
    #[arg(long)]
    pub ar: Option<PathBuf>,
    /// Market index prices or returns.
    #[arg(long)]
    pub market: Option<PathBuf>,
    /// Security prices or returns; repeatable.
    #[arg(long)]
    pub asset: Vec<PathBuf>,
    /// Event date (YYYY-MM-DD); day 0 is the first trading day on or after it.
    #[arg(long)]
    pub event_date: Option<NaiveDate>,
    /// Daily risk-free rate [default: 0]
    #[arg(long)]
    pub risk_free: Option<f64>,
    /// Use this beta for every security instead of estimating it.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Trading days in the CAPM estimation window [default: 120]
    #[arg(long)]
    pub estimation_days: Option<usize>,
    /// Trading days on each side of day 0 [default: 15]
    #[arg(long)]
    pub window_days: Option<usize>,
    /// [default: out]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FifArgs {
    /// `key = value` file keyed by long flag names; flags given here win
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Interpolation data: `x,y`, the 11-row `x,aar,caar` grid or a 31-row
    /// event-window table. Defaults to the embedded 2024 grid.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Column to use from grid or window tables: aar or caar [default: aar]
    #[arg(long)]
    pub series: Option<String>,
    /// Vertical scaling: one value for every interval, a comma list with
    /// one value per interval, or `mixed` for the 2024 example vector.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Refinement rounds of the attractor [default: 3]
    #[arg(long)]
    pub depth: Option<usize>,
    /// attractor or fixed-point [default: attractor]
    #[arg(long)]
    pub method: Option<String>,
    /// Grid intervals for the fixed-point method [default: 1000 per data interval]
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// Error bound for the fixed-point method [default: 1e-9]
    #[arg(long)]
    pub tol: Option<f64>,
    /// squared-germ or chord [default: squared-germ]
    #[arg(long)]
    pub base: Option<String>,
    /// [default: out]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Stem of the output files [default: derived from data and α]
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct BoxdimArgs {
    /// `key = value` file keyed by long flag names; flags given here win
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Point cloud CSV with x and y columns.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Coarsest level, boxes of side 2^-k [default: 2]
    #[arg(long)]
    pub k_min: Option<u32>,
    /// Finest level [default: 8]
    #[arg(long)]
    pub k_max: Option<u32>,
    /// Levels whose box count exceeds points / this value are dropped [default: 25]
    #[arg(long)]
    pub min_points_per_box: Option<usize>,
    /// Count boxes on the raw coordinates, which must lie in the unit square.
    #[arg(long)]
    pub no_normalize: bool,
    /// JSON report path [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the log-log pairs as CSV.
    #[arg(long)]
    pub curve_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// `key = value` file keyed by long flag names; flags given here win
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// [default: report]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Extra year as `YEAR=event_window.csv` (31-row `relative_day,x,aar,caar`); repeatable.
    #[arg(long)]
    pub year: Vec<String>,
    /// Attractor depth for the plotted samples [default: 3]
    #[arg(long)]
    pub sample_depth: Option<usize>,
    /// Attractor depth for dimension estimates [default: 5]
    #[arg(long)]
    pub depth: Option<usize>,
    /// [default: 2]
    #[arg(long)]
    pub k_min: Option<u32>,
    /// [default: 8]
    #[arg(long)]
    pub k_max: Option<u32>,
    /// [default: 25]
    #[arg(long)]
    pub min_points_per_box: Option<usize>,
    /// squared-germ or chord [default: squared-germ]
    #[arg(long)]
    pub base: Option<String>,
    /// Warn when |computed − published| exceeds this [default: 0.15]
    #[arg(long)]
    pub delta_warning: Option<f64>,
}

/// Runs one parsed command line.
pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Ingest(a) => commands::ingest::run(a),
        Command::EventStudy(a) => commands::event_study::run(a),
        Command::Fif(a) => commands::fif::run(a),
        Command::Boxdim(a) => commands::boxdim::run(a),
        Command::Report(a) => commands::report::run(a),
    }
}
