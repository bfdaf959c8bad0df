//! `hartree`: command-line front end for the exponent calculus, the spectral
//! solver, the splitting campaign and the norm probes.
//!
//! Exit codes: 0 success, 1 verification counterexample, 2 usage or domain
//! error, 3 numerical failure at run time.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hartree_lab::exponents::{ExponentError, LebesguePair, ProblemParams, Sign};
use hartree_lab::rational::{parse_rational, Rational};

mod commands;
mod config;
mod manifest;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Counterexample(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Counterexample(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<ExponentError> for CliError {
    fn from(e: ExponentError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("io: {e}"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "hartree", version, about = "Fractional Hartree exponent calculus and spectral experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derived exponents, the interval I, and thresholds at an optional point.
    Derive(DeriveArgs),
    /// Membership table of the admissible region on an n×n lattice.
    Region(RegionArgs),
    /// Exact oracles: region equivalence, case table, vertex bound, identities.
    Verify(VerifyArgs),
    /// Strang-splitting solve from a config file.
    Solve(ConfigArgs),
    /// Rough-data splitting campaign from a config file.
    Split(ConfigArgs),
    /// Space-time and modulation norm probes from a config file.
    Norms(ConfigArgs),
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn pair(s: &str) -> Result<LebesguePair, String> {
    let (x, y) = s.split_once(',').ok_or("expected \"1/r,1/q\"")?;
    Ok(LebesguePair::new(rational(x)?, rational(y)?))
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Space dimension
    #[arg(long)]
    pub d: u32,
    /// Dispersion order, "a/b" with m >= 2
    #[arg(long, value_parser = rational)]
    pub m: Rational,
    /// Riesz kernel exponent in (0, d)
    #[arg(long, value_parser = rational)]
    pub gamma: Rational,
    /// Nonlinearity power
    #[arg(long, value_parser = rational)]
    pub beta: Rational,
    #[arg(long, value_enum, default_value_t = SignArg::Defocusing)]
    pub sign: SignArg,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum SignArg {
    Focusing,
    Defocusing,
}

impl ParamArgs {
    pub fn params(&self) -> Result<ProblemParams, CliError> {
        let sign = match self.sign {
            SignArg::Focusing => Sign::Focusing,
            SignArg::Defocusing => Sign::Defocusing,
        };
        Ok(ProblemParams::new(self.d, self.m, self.gamma, self.beta, sign)?)
    }
}

#[derive(Debug, Args)]
pub struct DeriveArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Point `(1/r, 1/q)` written as "x,y".
    #[arg(long, value_parser = pair)]
    pub point: Option<LebesguePair>,
    /// With `--point`: evaluate the step schedule at this `α`.
    #[arg(long, value_parser = rational, requires = "point")]
    pub alpha: Option<Rational>,
    #[arg(long, value_parser = rational, default_value = "0", allow_hyphen_values = true)]
    pub s: Rational,
    #[arg(long = "n", value_parser = rational, default_value = "2")]
    pub n_param: Rational,
    #[arg(long, value_parser = rational, default_value = "1")]
    pub c0: Rational,
    /// Compact single-line JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
    /// Also write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Replace the region membership test by its negation (harness self-test).
    #[arg(long, hide = true)]
    pub corrupt_region: bool,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `output_dir` from the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Derive(a) => commands::derive(&a),
        Command::Region(a) => commands::region(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Solve(a) => commands::solve(&a),
        Command::Split(a) => commands::split(&a),
        Command::Norms(a) => commands::norms(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
