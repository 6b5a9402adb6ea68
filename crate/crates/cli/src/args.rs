use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ssvqe", version, about = "Subspace-search VQE on an exact statevector simulator")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Master seed; fixes builtin Hamiltonians and every optimizer start.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (a directory for `sweep`); stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Report)]
    pub format: Format,
    /// Worker threads for multistart and sweep entries.
    #[arg(long, global = true, value_parser = positive)]
    pub workers: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub oracle: Option<OracleFlag>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Structured JSON document.
    Report,
    /// Flat CSV.
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleFlag {
    On,
    Off,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantFlag {
    TwoStage,
    WeightedKth,
    WeightedAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EntanglerFlag {
    Chain,
    AllToAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GradientFlag {
    ParameterShift,
    CentralDifference,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random transverse-field Ising Hamiltonian as a Pauli file.
    Generate {
        #[arg(long, short = 'n', value_parser = positive)]
        n_qubits: usize,
    },
    /// Exact spectrum of a Pauli file by dense diagonalization.
    Exact {
        hamiltonian: PathBuf,
        /// Register size, when wider than the highest qubit index used.
        #[arg(long)]
        n_qubits: Option<usize>,
    },
    /// Run one SSVQE variant.
    Run {
        #[command(flatten)]
        run: RunArgs,
        /// Also write the per-iteration trace table here.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Transition matrix element between two optimized output states.
    Transition {
        /// Pauli file for the operator A.
        #[arg(long)]
        operator: PathBuf,
        /// Output position of the bra state.
        #[arg(long)]
        i: usize,
        /// Output position of the ket state.
        #[arg(long)]
        j: usize,
        /// Report of a previous `run`; without it the run is performed inline.
        #[arg(long, conflicts_with = "config")]
        report: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the configured variant on each Hamiltonian file.
    Sweep {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
}

/// Run settings; each flag overrides the matching config file key.
#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// TOML or JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Hamiltonian Pauli file.
    #[arg(long, conflicts_with = "ising")]
    pub hamiltonian: Option<PathBuf>,
    /// Builtin random Ising Hamiltonian on this many qubits.
    #[arg(long)]
    pub ising: Option<usize>,
    /// Seed for the builtin Hamiltonian (default: the master seed).
    #[arg(long)]
    pub ising_seed: Option<u64>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantFlag>,
    /// Target level.
    #[arg(long)]
    pub k: Option<usize>,
    /// Weight of the target term for weighted_kth.
    #[arg(long)]
    pub w: Option<f64>,
    /// Comma-separated weights for weighted_all.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// Input position refined by the second two_stage stage.
    #[arg(long)]
    pub s: Option<usize>,
    /// Search the top of the spectrum (two_stage).
    #[arg(long)]
    pub reflection: bool,
    /// Comma-separated computational basis inputs.
    #[arg(long, value_delimiter = ',')]
    pub inputs: Option<Vec<usize>>,
    #[arg(long)]
    pub d1: Option<usize>,
    #[arg(long)]
    pub d2: Option<usize>,
    #[arg(long, value_enum)]
    pub entangler: Option<EntanglerFlag>,
    /// Comma-separated qubits acted on by the subspace block.
    #[arg(long, value_delimiter = ',')]
    pub subspace_qubits: Option<Vec<usize>>,
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub gradient_tolerance: Option<f64>,
    #[arg(long, value_enum)]
    pub gradient: Option<GradientFlag>,
}

fn positive(text: &str) -> Result<usize, String> {
    match text.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}
