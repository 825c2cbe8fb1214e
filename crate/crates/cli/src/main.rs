//! `qchannel`: runs protocols, builds bases, sweeps capacities and checks
//! invariants. Exit status 0 on success, 1 when a check fails, 2 on invalid
//! input.

mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "qchannel", version, about = "Exact simulator for GHZ-class quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Teleport an unknown state and report every branch.
    Teleport(TeleportArgs),
    /// Encode messages into a shared channel and decode them.
    Densecode(DensecodeArgs),
    /// Send a diagonal qubit state to two receivers.
    Teleclone(TelecloneArgs),
    /// Emit a measurement basis with its residuals.
    Basis(BasisArgs),
    /// Sweep the per-bit capacity over a grid of channel weights.
    Capacity(CapacityArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Output file; defaults to $QCHANNEL_OUT_DIR/<command>.<ext>, then stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TeleportScheme {
    Tight,
    Ghz,
    Nparty,
    Onebit,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exhaustive,
    Sample,
}

#[derive(Args, Debug)]
pub struct TeleportArgs {
    #[arg(long, value_enum)]
    pub scheme: TeleportScheme,
    /// Amplitude of the first basis term, `re` or `re+imi`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "state", requires = "beta")]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "alpha")]
    pub beta: Option<String>,
    /// `single:a,b`, `epr:a,b`, `ghz:a,b` or `general:a,b,c,d`.
    #[arg(long)]
    pub state: Option<String>,
    /// Channel size for the N-party scheme.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    pub mode: Mode,
    /// Required in sample mode, ignored otherwise.
    #[arg(long, required_if_eq("mode", "sample"))]
    pub seed: Option<u64>,
    /// Correct outcome 0 of the GHZ scheme with the two-qubit network.
    #[arg(long)]
    pub nonlocal_allowed: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DenseScheme {
    Tight,
    Ghz,
    GhzConverted,
    GhzFromEpr,
    Nparty,
    Modified,
}

#[derive(Args, Debug)]
pub struct DensecodeArgs {
    #[arg(long, value_enum)]
    pub scheme: DenseScheme,
    /// Bit string; every message of the scheme when omitted.
    #[arg(long)]
    pub message: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Unentangled qubits of the modified scheme's channel.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Disentangling width of the modified scheme.
    #[arg(long, default_value_t = 2)]
    pub width: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct TelecloneArgs {
    /// Weight of |0⟩⟨0| in the input.
    #[arg(long)]
    pub lambda0: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BasisKind {
    Bell,
    GhzClass,
    PiBell,
    Nparty,
    PiZ,
    Converted,
}

#[derive(Args, Debug)]
pub struct BasisArgs {
    #[arg(long, value_enum)]
    pub kind: BasisKind,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct CapacityArgs {
    /// Channel sizes, repeated or comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [3usize])]
    pub n: Vec<usize>,
    /// Number of evenly spaced |α|² points in [0, 1].
    #[arg(long, default_value_t = 21)]
    pub alpha_grid: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Seed for the randomized checks.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// Invalid arguments or inputs; exit 2.
    Validation(String),
    /// A result check did not hold; exit 1.
    Check(String),
    /// Output could not be written; exit 2.
    Io(String),
}

impl From<qchannel::Error> for Failure {
    fn from(e: qchannel::Error) -> Self {
        match e {
            qchannel::Error::Verification(m) => Failure::Check(m),
            other => Failure::Validation(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Teleport(a) => commands::teleport(&a),
        Command::Densecode(a) => commands::densecode(&a),
        Command::Teleclone(a) => commands::teleclone(&a),
        Command::Basis(a) => commands::basis(&a),
        Command::Capacity(a) => commands::capacity(&a),
        Command::Verify(a) => commands::verify(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
