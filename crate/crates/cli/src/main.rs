mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use banknet::metrics::financial::{AssetBasis, CapitalOwner};
use banknet::{ColorScheme, Mode};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Analyses of bipartite bank-firm credit networks.
#[derive(Debug, Parser)]
#[command(name = "banknet", version, about)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Degree, strength, participation, assortativity and tail statistics.
    Stats(StatsArgs),
    /// One-mode projection onto banks or firms.
    Project(ProjectArgs),
    /// Spanning-forest backbone of a projection.
    Mst(MstArgs),
    /// Hill fit of a power-law tail to one numeric column.
    Fit(FitArgs),
    /// Correlation between two numeric columns.
    Corr(CorrArgs),
    /// Generate a synthetic credit network.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct GraphInput {
    /// Edge list CSV (bank_id, firm_id, short_term, long_term[, total]).
    #[arg(long)]
    edges: PathBuf,

    /// Bank or firm attribute CSV; may be repeated.
    #[arg(long = "attrs")]
    attrs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OutDir {
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct StatsArgs {
    #[command(flatten)]
    #[serde(skip)]
    input: GraphInput,
    #[command(flatten)]
    #[serde(skip)]
    out: OutDir,

    /// Quantile of the sample used as the tail-fit cutoff.
    #[arg(long, default_value_t = 0.5)]
    cutoff_quantile: f64,

    /// Asset figure used for debt-on-asset ratios.
    #[arg(long, default_value = "reported", value_parser = parse::<AssetBasis>)]
    #[serde(serialize_with = "debug_str")]
    asset_basis: AssetBasis,

    /// Whose capital normalizes loan amounts.
    #[arg(long, default_value = "firm", value_parser = parse::<CapitalOwner>)]
    #[serde(serialize_with = "debug_str")]
    capital_owner: CapitalOwner,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Dot,
    Graphml,
}

impl Format {
    fn export(self) -> banknet::io::ExportFormat {
        use banknet::io::ExportFormat;
        match self {
            Format::Csv => ExportFormat::EdgeCsv,
            Format::Dot => ExportFormat::Dot,
            Format::Graphml => ExportFormat::GraphMl,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ProjectArgs {
    #[command(flatten)]
    #[serde(skip)]
    input: GraphInput,
    #[command(flatten)]
    #[serde(skip)]
    out: OutDir,

    /// Which side to keep.
    #[arg(long, value_parser = parse::<Mode>)]
    #[serde(serialize_with = "display_str")]
    mode: Mode,

    /// Keep only firms of this sector group (1-6); needs firm attributes.
    #[arg(long, conflicts_with = "bank_type")]
    sector_group: Option<u8>,

    /// Keep only banks of this type (1-6); needs bank attributes.
    #[arg(long)]
    bank_type: Option<u8>,

    /// Skip counterparties with more selected neighbors than this.
    #[arg(long)]
    degree_cap: Option<usize>,

    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args, Serialize)]
pub struct MstArgs {
    /// Edge list to project first (with --mode).
    #[arg(long, required_unless_present = "projection", requires = "mode")]
    #[serde(skip)]
    edges: Option<PathBuf>,

    /// Projection to use directly (CSV, DOT or GraphML).
    #[arg(long, conflicts_with_all = ["edges", "mode"])]
    #[serde(skip)]
    projection: Option<PathBuf>,

    #[arg(long, value_parser = parse::<Mode>)]
    #[serde(serialize_with = "opt_display_str")]
    mode: Option<Mode>,

    /// Attribute CSV for node colors; may be repeated.
    #[arg(long = "attrs")]
    #[serde(skip)]
    attrs: Vec<PathBuf>,

    /// Bank coloring: bank-type or region. Firms always use sector groups.
    #[arg(long, default_value = "bank-type", value_parser = parse::<ColorScheme>)]
    #[serde(serialize_with = "debug_str")]
    color: ColorScheme,

    /// Number of highest-degree nodes to list.
    #[arg(long, default_value_t = 10)]
    hubs: usize,

    #[command(flatten)]
    #[serde(skip)]
    out: OutDir,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    /// CSV table with a header row.
    #[arg(long)]
    #[serde(skip)]
    input: PathBuf,

    #[arg(long)]
    column: String,

    /// Cutoff at this sample quantile.
    #[arg(long, conflicts_with = "cutoff")]
    cutoff_quantile: Option<f64>,

    /// Explicit cutoff value.
    #[arg(long)]
    cutoff: Option<f64>,

    /// Integer data: put the quantile cutoff half a unit lower.
    #[arg(long, conflicts_with = "cutoff")]
    discrete: bool,

    #[command(flatten)]
    #[serde(skip)]
    out: OutDir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Pearson,
    Kendall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transform {
    None,
    Log,
}

#[derive(Debug, Args, Serialize)]
pub struct CorrArgs {
    #[arg(long)]
    #[serde(skip)]
    input: PathBuf,

    #[arg(long)]
    x: String,

    #[arg(long)]
    y: String,

    #[arg(long, value_enum, default_value = "pearson")]
    method: Method,

    #[arg(long, value_enum, default_value = "none")]
    x_transform: Transform,

    #[arg(long, value_enum, default_value = "none")]
    y_transform: Transform,

    #[command(flatten)]
    #[serde(skip)]
    out: OutDir,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 2004)]
    seed: u64,

    #[arg(long, default_value_t = 190)]
    banks: usize,

    #[arg(long, default_value_t = 2701)]
    firms: usize,

    /// Tail exponent of the firm degree law.
    #[arg(long, default_value_t = 2.6)]
    mu: f64,

    #[arg(long, default_value_t = 8.0)]
    mean_degree: f64,

    /// Tail exponent of the loan amount law.
    #[arg(long, default_value_t = 0.95)]
    weight_exponent: f64,

    /// Smallest loan amount, million yen.
    #[arg(long, default_value_t = 100.0)]
    weight_min: f64,

    /// Fixed short-term fraction instead of a uniform split.
    #[arg(long)]
    short_share: Option<f64>,

    /// Shrink both node counts by this factor.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,

    #[command(flatten)]
    #[serde(skip)]
    out: OutDir,
}

fn parse<T>(s: &str) -> Result<T, String>
where
    T: std::str::FromStr<Err = banknet::Error>,
{
    s.parse().map_err(|e: banknet::Error| e.to_string())
}

fn debug_str<T: std::fmt::Debug, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{v:?}"))
}

fn display_str<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn opt_display_str<T: std::fmt::Display, S: serde::Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .parse_default_env()
        .init();

    let result = match &cli.command {
        Command::Stats(a) => commands::stats(a),
        Command::Project(a) => commands::project(a),
        Command::Mst(a) => commands::mst(a),
        Command::Fit(a) => commands::fit(a),
        Command::Corr(a) => commands::corr(a),
        Command::Synth(a) => commands::synth(a),
    };
    match result {
        Ok(done) => {
            println!("{}", done.summary);
            println!(
                "run {}: {} files in {}",
                done.run_id,
                done.written.len(),
                done.out_dir.display()
            );
            for p in &done.written {
                log::info!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
