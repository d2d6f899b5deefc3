//! Batch efficiency evaluation over production datasets.
//!
//! Subcommands: `eval` (scores and projections), `dual` (prices and gaps),
//! `classify` (efficiency status), and a hidden `oracle` (grid bounds).
//! The `NETPUT_EFF_THREADS` environment variable caps parallelism.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use netput_eff_core::PParameter;

use netput_eff_cli::commands::{
    cmd_classify, cmd_dual, cmd_eval, cmd_oracle, DirectionChoice, RunConfig, TechChoice,
};
use netput_eff_cli::dataset::{load_dataset, CliError};
use netput_eff_cli::report::OutputFormat;

#[derive(Parser)]
#[command(name = "netput-eff", version, about = "Efficiency measurement over production datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate scores, expansions, and projections per unit and order.
    Eval(CommonArgs),
    /// Solve the dual price programs and report gaps and attainment.
    Dual(CommonArgs),
    /// Classify each unit's efficiency status and cross-check scores.
    Classify(CommonArgs),
    /// Brute-force grid bounds (debugging aid).
    #[command(hide = true)]
    Oracle(OracleArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Dataset CSV with header `id,x1..xm,y1..yn`.
    data: PathBuf,

    /// Number of input columns (m).
    #[arg(long)]
    inputs: usize,

    /// Number of output columns (n).
    #[arg(long)]
    outputs: usize,

    /// Technology: `vrs`, `fdh`, or `hrep` (with --hrep or `hrep:<path>`).
    #[arg(long, default_value = "vrs")]
    tech: String,

    /// Halfspace file (one `a1 .. ad <= b` per line) for `--tech hrep`.
    #[arg(long)]
    hrep: Option<PathBuf>,

    /// Mean order; repeatable. Tokens: `-inf`, real literals, `inf`.
    #[arg(long = "p", value_name = "ORDER", allow_hyphen_values = true)]
    p_list: Vec<String>,

    /// Direction: `observed` (g = |z|), `unit`, or `custom:<path>`.
    #[arg(long, default_value = "observed")]
    direction: String,

    /// Tolerance used by consistency cross-checks.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,

    /// Output format: `csv` or `json`.
    #[arg(long, default_value = "csv")]
    format: String,

    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Grid resolution per axis.
    #[arg(long, default_value_t = 501)]
    resolution: usize,
}

fn parse_config(args: &CommonArgs, dual: bool) -> Result<RunConfig, CliError> {
    let technology = match args.tech.as_str() {
        "vrs" => TechChoice::Vrs,
        "fdh" => TechChoice::Fdh,
        other => {
            if other == "hrep" {
                let path = args
                    .hrep
                    .clone()
                    .ok_or_else(|| CliError::Config("--tech hrep needs --hrep <path>".into()))?;
                TechChoice::HRep(path)
            } else if let Some(path) = other.strip_prefix("hrep:") {
                TechChoice::HRep(PathBuf::from(path))
            } else {
                return Err(CliError::Config(format!(
                    "unknown technology {other:?}; use vrs, fdh, or hrep"
                )));
            }
        }
    };
    let direction = match args.direction.as_str() {
        "observed" => DirectionChoice::Observed,
        "unit" => DirectionChoice::Unit,
        other => match other.strip_prefix("custom:") {
            Some(path) => DirectionChoice::Custom(PathBuf::from(path)),
            None => {
                return Err(CliError::Config(format!(
                    "unknown direction {other:?}; use observed, unit, or custom:<path>"
                )))
            }
        },
    };
    let tokens: Vec<String> =
        if args.p_list.is_empty() { vec!["1".to_string()] } else { args.p_list.clone() };
    let mut p_list = Vec::with_capacity(tokens.len());
    for token in &tokens {
        p_list.push(PParameter::from_str(token)?);
    }
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(CliError::Config("tolerance must be positive".into()));
    }
    let format = match args.format.as_str() {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        other => return Err(CliError::Config(format!("unknown format {other:?}"))),
    };
    Ok(RunConfig { technology, p_list, direction, tolerance: args.tol, dual, format })
}

fn apply_thread_cap() {
    if let Ok(raw) = std::env::var("NETPUT_EFF_THREADS") {
        if let Ok(n) = raw.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn write_output(text: &str, out: &Option<PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run() -> Result<i32, CliError> {
    apply_thread_cap();
    let cli = Cli::parse();
    let (args, resolution, is_dual, kind) = match &cli.command {
        Command::Eval(a) => (a, 0usize, false, 0u8),
        Command::Dual(a) => (a, 0, true, 1),
        Command::Classify(a) => (a, 0, false, 2),
        Command::Oracle(o) => (&o.common, o.resolution, false, 3),
    };
    let config = parse_config(args, is_dual)?;
    let dataset = load_dataset(&args.data, args.inputs, args.outputs)?;
    let (report, exit) = match kind {
        0 => cmd_eval(&config, &dataset)?,
        1 => cmd_dual(&config, &dataset)?,
        2 => cmd_classify(&config, &dataset)?,
        _ => cmd_oracle(&config, &dataset, resolution)?,
    };
    write_output(&report.render(config.format), &args.out)?;
    Ok(exit)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
