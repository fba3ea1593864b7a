//! Command-line front end: `betti`, `simulate` and `spectrum`.
//!
//! Each command returns the text it would print, so the binary stays a thin
//! wrapper and the commands can be driven from tests.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::complex::FiltrationContext;
use crate::error::Error;
use crate::geometry::{load_point_cloud, two_squares, Metric, PointFormat};
use crate::operators::{persistent_dirac, persistent_laplacian, Variant};
use crate::qsim::{betti_from_distribution, phase_estimation, sample_counts, Evolution};
use crate::spectral::{betti_table, spectrum, CLUSTER_TOL};

#[derive(Debug, Parser)]
#[command(name = "qpersist", version, about = "Persistent Betti numbers, classical and simulated quantum")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Persistent Betti numbers from Laplacian kernels.
    Betti(BettiArgs),
    /// Simulate phase estimation on the persistent Dirac operator.
    Simulate(SimulateArgs),
    /// Clustered eigenvalues of the Dirac operator or the Laplacian.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Clone, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct Source {
    /// Point cloud file (`.csv` one point per row, `.json` array of arrays).
    #[arg(long, group = "source")]
    pub input: Option<PathBuf>,
    /// Use the built-in two-squares cloud.
    #[arg(long, group = "source")]
    pub two_squares: bool,
    #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
    pub metric: MetricArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MetricArg {
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Euclidean => Metric::Euclidean,
            MetricArg::Manhattan => Metric::Manhattan,
            MetricArg::Chebyshev => Metric::Chebyshev,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Both,
}

impl OutputFormat {
    fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }

    fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }
}

#[derive(Debug, Clone, Args)]
pub struct BettiArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 1)]
    pub k: isize,
    /// Birth scale. Required unless `--scales` is given.
    #[arg(long, conflicts_with = "scales")]
    pub eps: Option<f64>,
    /// Death scale, defaults to `--eps`.
    #[arg(long, requires = "eps")]
    pub eps2: Option<f64>,
    /// Comma-separated ascending scale grid; prints every pair `i <= j`.
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<f64>>,
    #[arg(long, default_value = "chain", value_parser = parse_variant)]
    pub variant: Variant,
    /// Write `betti.json` here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 1)]
    pub k: isize,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub eps2: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub xi: f64,
    #[arg(long, default_value_t = 3)]
    pub l: usize,
    #[arg(long = "M", default_value_t = 16)]
    pub m: usize,
    #[arg(long, default_value = "projected", value_parser = parse_variant)]
    pub variant: Variant,
    #[arg(long)]
    pub drop_isolated: bool,
    #[arg(long, default_value = "exact", value_parser = parse_evolution)]
    pub evolution: Evolution,
    /// Also sample this many measurement outcomes into `counts.csv`.
    #[arg(long, requires = "seed")]
    pub shots: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Both)]
    pub format: OutputFormat,
    /// Also write `distribution.svg`.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorArg {
    Dirac,
    Laplacian,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 1)]
    pub k: isize,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub eps2: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub xi: f64,
    #[arg(long, default_value = "projected", value_parser = parse_variant)]
    pub variant: Variant,
    #[arg(long)]
    pub drop_isolated: bool,
    #[arg(long, value_enum, default_value_t = OperatorArg::Dirac)]
    pub operator: OperatorArg,
    #[arg(long, default_value_t = CLUSTER_TOL)]
    pub tol: f64,
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_evolution(s: &str) -> std::result::Result<Evolution, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failed command, tagged with its exit code.
#[derive(Debug)]
pub enum CliError {
    Config(Error),
    Compute(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(_) => 3,
        }
    }

    pub fn error(&self) -> &Error {
        match self {
            CliError::Config(e) | CliError::Compute(e) => e,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.error().fmt(f)
    }
}

fn config(e: Error) -> CliError {
    CliError::Config(e)
}

fn compute(e: Error) -> CliError {
    match e {
        Error::ScaleOrder { .. }
        | Error::ZeroXi
        | Error::BadM(_)
        | Error::InvalidParameter(_)
        | Error::NonIntegerPeak(_) => CliError::Config(e),
        other => CliError::Compute(other),
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn load(source: &Source) -> CliResult<FiltrationContext> {
    let cloud = match &source.input {
        Some(path) => load_point_cloud(path, PointFormat::from_path(path)).map_err(config)?,
        None if source.two_squares => two_squares(),
        None => return Err(config(Error::InvalidParameter("need --input or --two-squares".into()))),
    };
    let cloud = cloud.with_metric(source.metric.into());
    Ok(FiltrationContext::new(cloud))
}

fn scale_pair(eps: f64, eps2: Option<f64>) -> CliResult<(f64, f64)> {
    let eps2 = eps2.unwrap_or(eps);
    if eps.is_nan() || eps2.is_nan() || eps > eps2 {
        return Err(config(Error::ScaleOrder { eps, eps_prime: eps2 }));
    }
    Ok((eps, eps2))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| config(e.into()))?;
    fs::write(dir.join(name), contents).map_err(|e| config(e.into()))
}

/// Prints the single Betti number for one pair, or one `i j beta` line per
/// pair (one-based scale positions) for a grid.
pub fn cmd_betti(args: &BettiArgs) -> CliResult<String> {
    let ctx = load(&args.source)?;
    let scales = match (&args.scales, args.eps) {
        (Some(grid), _) => grid.clone(),
        (None, Some(eps)) => {
            let (a, b) = scale_pair(eps, args.eps2)?;
            if a == b {
                vec![a]
            } else {
                vec![a, b]
            }
        }
        (None, None) => return Err(config(Error::InvalidParameter("need --eps or --scales".into()))),
    };
    let table = betti_table_for(&ctx, args.k, &scales, args.variant)?;
    let mut text = String::new();
    if args.scales.is_none() {
        let j = scales.len() - 1;
        writeln!(text, "{}", table.get(args.k, 0, j).unwrap_or(0)).unwrap();
    } else {
        for ((k, i, j), beta) in table.iter() {
            if k == args.k {
                writeln!(text, "{} {} {beta}", i + 1, j + 1).unwrap();
            }
        }
    }
    if let Some(dir) = &args.out {
        let json = table.to_json_string(args.k).map_err(config)?;
        write_file(dir, "betti.json", &(json + "\n"))?;
    }
    Ok(text)
}

fn betti_table_for(
    ctx: &FiltrationContext,
    k: isize,
    scales: &[f64],
    variant: Variant,
) -> CliResult<crate::spectral::BettiTable> {
    if k < 0 {
        return Err(config(Error::InvalidParameter("k must be >= 0".into())));
    }
    betti_table(ctx, k, scales, variant).map_err(compute)
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<String> {
    let ctx = load(&args.source)?;
    let (eps, eps2) = scale_pair(args.eps, args.eps2)?;
    let dirac = persistent_dirac(args.k, eps, eps2, args.xi, &ctx, args.variant, args.drop_isolated)
        .map_err(compute)?;
    let dist = phase_estimation(&dirac, args.l, args.m, args.evolution).map_err(compute)?;
    let estimate = betti_from_distribution(&dist).map_err(compute)?;

    if args.format.json() {
        write_file(&args.out, "distribution.json", &(dist.to_json().map_err(config)? + "\n"))?;
    }
    if args.format.csv() {
        write_file(&args.out, "distribution.csv", &dist.to_csv())?;
    }
    if args.svg {
        write_file(&args.out, "distribution.svg", &dist.to_svg())?;
    }
    if let (Some(shots), Some(seed)) = (args.shots, args.seed) {
        let counts = sample_counts(&dist, shots, seed).map_err(compute)?;
        let mut csv = String::from("p,count\n");
        for (p, c) in counts.iter().enumerate() {
            writeln!(csv, "{p},{c}").unwrap();
        }
        write_file(&args.out, "counts.csv", &csv)?;
    }

    let peak = (args.l as f64 * args.xi).round() as usize;
    let mut text = String::new();
    writeln!(text, "N = {}", dist.hilbert_dim).unwrap();
    writeln!(text, "P({peak}) = {:.12}", dist.probs[peak]).unwrap();
    writeln!(text, "N*P({peak}) = {:.12}", estimate.unrounded).unwrap();
    writeln!(text, "beta = {}", estimate.betti).unwrap();
    Ok(text)
}

/// One `eigenvalue multiplicity` line per cluster, ascending.
pub fn cmd_spectrum(args: &SpectrumArgs) -> CliResult<String> {
    let ctx = load(&args.source)?;
    let (eps, eps2) = scale_pair(args.eps, args.eps2)?;
    let spec = match args.operator {
        OperatorArg::Dirac => {
            let b = persistent_dirac(args.k, eps, eps2, args.xi, &ctx, args.variant, args.drop_isolated)
                .map_err(compute)?;
            spectrum(&b, args.tol)
        }
        OperatorArg::Laplacian => {
            let lap = persistent_laplacian(args.k, eps, eps2, &ctx, args.variant).map_err(compute)?;
            spectrum(&lap, args.tol)
        }
    }
    .map_err(compute)?;
    let mut text = String::new();
    for (value, mult) in spec.iter() {
        // print exact zeros without a sign
        let value = if value.abs() < args.tol { 0.0 } else { value };
        writeln!(text, "{value:.10} {mult}").unwrap();
    }
    Ok(text)
}

pub fn execute(command: &Command) -> CliResult<String> {
    match command {
        Command::Betti(a) => cmd_betti(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Spectrum(a) => cmd_spectrum(a),
    }
}

/// Parse `std::env::args`, run, print, and map failures to exit codes
/// (2 for usage and configuration, 3 for computation).
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
