use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use exponent_lab::{Error, Family, GeneratorSpec, Result};

mod commands;
mod output;

const THREADS_ENV: &str = "EXPONENT_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "exponent-lab", version, about = "Scaling exponents of random walks on networks")]
#[command(args_override_self = true)]
struct Cli {
    /// JSON file whose keys mirror the command-line flags; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads; the EXPONENT_LAB_THREADS environment variable takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a network and write it as JSON.
    Generate(GenerateArgs),
    /// Effective resistance and modulus between a ball and the complement of a larger one.
    Resist(ResistArgs),
    /// Simulate walks from a vertex and record exit times and displacements.
    Walk(WalkArgs),
    /// Build the multiscale stretch weight.
    Stretch(StretchArgs),
    /// Measure and fit every exponent on a generated family.
    Estimate(EstimateArgs),
    /// Check the scaling relations and inequalities of a report.
    Verify(VerifyArgs),
    /// Monte-Carlo mass-transport and reversibility diagnostics.
    MtpCheck(MtpArgs),
    /// Export the scale series of a report as CSV files.
    Csv(CsvArgs),
}

const COMMANDS: &[&str] = &["generate", "resist", "walk", "stretch", "estimate", "verify", "mtp-check", "csv"];

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long)]
    pub family: Family,
    /// Half-width for paths and boxes, vertex count for cycles.
    #[arg(long = "n", alias = "size")]
    pub n: Option<usize>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub level: Option<usize>,
    #[arg(long)]
    pub branching: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Bond retention probability for percolation.
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long)]
    pub vertex_cap: Option<usize>,
}

impl GenArgs {
    pub fn spec(&self, seed: u64) -> GeneratorSpec {
        let mut spec = GeneratorSpec::new(self.family);
        spec.size = self.n;
        spec.dim = self.dim.or((self.family == Family::LatticeZd).then_some(2));
        spec.level = self.level;
        spec.branching = self.branching;
        spec.depth = self.depth;
        spec.gamma = self.gamma;
        spec.p = self.p;
        spec.seed = seed;
        if let Some(cap) = self.vertex_cap {
            spec.vertex_cap = cap;
        }
        spec
    }
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub generator: GenArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ResistArgs {
    #[arg(long)]
    pub net: PathBuf,
    /// Inner radius r.
    #[arg(long)]
    pub inner: usize,
    /// Outer radius R; the far set is the complement of B(center, R).
    #[arg(long)]
    pub outer: usize,
    /// Vertex id or "root".
    #[arg(long, default_value = "root")]
    pub center: String,
    /// Emit JSON instead of a one-line summary.
    #[arg(long)]
    pub json: bool,
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct WalkArgs {
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long, default_value_t = 4096)]
    pub walkers: usize,
    /// Step cap per walker; accepts scientific notation such as 1e6.
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    pub steps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Start vertex; defaults to the root.
    #[arg(long)]
    pub start: Option<usize>,
    /// Largest dyadic radius for exit times; defaults to the root eccentricity.
    #[arg(long)]
    pub r_max: Option<u64>,
    /// Largest dyadic time for displacements; defaults to the step cap.
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Include every walker's samples, not only the summaries.
    #[arg(long)]
    pub raw: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct StretchArgs {
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub eps: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub dstar: f64,
    #[arg(long)]
    pub kmax: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Net intensity; defaults to R^{2ε} at each scale.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub generator: GenArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent environments for random families.
    #[arg(long)]
    pub environments: Option<usize>,
    #[arg(long)]
    pub walkers: Option<usize>,
    /// Radius window as lo,hi.
    #[arg(long, value_delimiter = ',')]
    pub r_window: Option<Vec<u64>>,
    /// Time window as lo,hi.
    #[arg(long, value_delimiter = ',')]
    pub n_window: Option<Vec<u64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    pub max_steps: Option<u64>,
    #[arg(long)]
    pub heat_kernel_cap: Option<usize>,
    /// Also write one CSV per scale series into this directory.
    #[arg(long)]
    pub csv_dir: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub report: PathBuf,
    /// Residual tolerance; defaults to three combined standard errors.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    Neighbor,
    ClusterMass,
}

#[derive(Debug, Args, Serialize)]
pub struct MtpArgs {
    #[command(flatten)]
    pub generator: GenArgs,
    #[arg(long, value_enum, default_value_t = Functional::Neighbor)]
    pub functional: Functional,
    /// Partition scale for the cluster-mass functional.
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub cluster_delta: f64,
    #[arg(long, default_value_t = 1000)]
    pub seeds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also run the root/first-step swap test.
    #[arg(long)]
    pub swap: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CsvArgs {
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < u64::MAX as f64 => Ok(x as u64),
        _ => Err(format!("expected a non-negative integer, got \"{s}\"")),
    }
}

/// Turns the keys of a config file into flags. `command` selects the
/// subcommand when none is given on the command line.
fn config_flags(path: &PathBuf) -> Result<(Option<String>, Vec<String>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read config {}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text)?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::Input("config must be a JSON object".into()))?;
    let scalar = |k: &str, v: &Value| match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(Error::Input(format!("config key \"{k}\" must hold a string, number, boolean or array"))),
    };
    let mut command = None;
    let mut flags = Vec::new();
    for (k, v) in obj {
        if k == "command" {
            command = Some(scalar(k, v)?);
            continue;
        }
        let flag = format!("--{}", k.replace('_', "-"));
        match v {
            Value::Bool(true) => flags.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let parts = items.iter().map(|x| scalar(k, x)).collect::<Result<Vec<_>>>()?;
                flags.push(flag);
                flags.push(parts.join(","));
            }
            other => {
                flags.push(flag);
                flags.push(scalar(k, other)?);
            }
        }
    }
    Ok((command, flags))
}

/// Splices config-file flags in front of the explicit ones so the latter override.
fn merged_args(raw: Vec<String>) -> Result<Vec<String>> {
    let mut args = Vec::with_capacity(raw.len());
    let mut config = None;
    let mut it = raw.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            config = Some(PathBuf::from(
                it.next().ok_or_else(|| Error::Input("--config needs a file".into()))?,
            ));
        } else if let Some(p) = a.strip_prefix("--config=") {
            config = Some(PathBuf::from(p));
        } else {
            args.push(a);
        }
    }
    let Some(path) = config else { return Ok(args) };
    let (command, flags) = config_flags(&path)?;
    match args.iter().position(|a| COMMANDS.contains(&a.as_str())) {
        Some(pos) => {
            args.splice(pos + 1..pos + 1, flags);
        }
        None => {
            let command = command.ok_or_else(|| Error::Input("no subcommand given on the command line or in the config".into()))?;
            let tail = args.split_off(1.min(args.len()));
            args.push(command);
            args.extend(flags);
            args.extend(tail);
        }
    }
    Ok(args)
}

fn init_threads(flag: Option<usize>) -> Result<()> {
    let from_env = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(
            v.parse::<usize>()
                .map_err(|_| Error::Input(format!("{THREADS_ENV} must be a positive integer, got \"{v}\"")))?,
        ),
        Err(_) => None,
    };
    if let Some(n) = from_env.or(flag) {
        if n == 0 {
            return Err(Error::Input("thread count must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
    }
    Ok(())
}

fn run() -> Result<()> {
    let args = merged_args(std::env::args().collect())?;
    let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());
    init_threads(cli.threads)?;
    match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Resist(a) => commands::resist(&a),
        Command::Walk(a) => commands::walk(&a),
        Command::Stretch(a) => commands::stretch(&a),
        Command::Estimate(a) => commands::estimate(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::MtpCheck(a) => commands::mtp_check(&a),
        Command::Csv(a) => commands::csv(&a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
