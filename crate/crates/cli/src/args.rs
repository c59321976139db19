use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "qhlat", version, about = "Spectra, exceptional points and metrics of PT-symmetric lattice Hamiltonians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Matrix dimension N (even; N/2 couplings).
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Explicit couplings, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Option<Vec<f64>>,
    /// single:k, alternating or uniform.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Common absolute value of the nonzero preset couplings.
    #[arg(long, global = true)]
    pub mag: Option<f64>,
    /// Relative threshold on max|Im lambda| for a real spectrum.
    #[arg(long = "tol-imag", global = true)]
    pub tol_imag: Option<f64>,
    /// Bracket width for exceptional-point bisection.
    #[arg(long = "tol-param", global = true)]
    pub tol_param: Option<f64>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// How table sizes map to matrix dimensions.
    #[arg(long, global = true, value_enum)]
    pub convention: Option<Convention>,
    /// Flat key = value configuration file.
    #[arg(long, global = true, env = "QHLAT_CONFIG")]
    pub config: Option<PathBuf>,
    /// Also write a run record with a wall-clock timestamp to this path.
    #[arg(long, global = true)]
    pub record: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues and reality verdict for one Hamiltonian.
    Spectrum,
    /// Exceptional point along a preset direction.
    Ep {
        #[arg(long = "p-max")]
        p_max: Option<f64>,
    },
    /// Exceptional points of single-site couplings 1 to 4.
    Table1 {
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
    },
    /// Exceptional points of the alternating and uniform lattices.
    Table2 {
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
    },
    /// Reality map over a plane of two couplings.
    Domain {
        /// 1-based coupling indices for x and y.
        #[arg(long, value_delimiter = ',')]
        axes: Option<Vec<usize>>,
        /// Axis range min,max (both axes).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        range: Option<Vec<f64>>,
        /// Cells per axis.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Canonical pseudometric basis.
    Pseudometrics {
        /// Include the entry-class grids.
        #[arg(long)]
        patterns: bool,
    },
    /// Metric candidate from basis coefficients, optionally a positivity frontier.
    Metric {
        /// Coefficients eps_1..eps_N; default (1, 0, ..., 0).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        eps: Option<Vec<f64>>,
        /// Dense grid over eps_2..eps_N with this many points per axis.
        #[arg(long = "frontier-steps")]
        frontier_steps: Option<usize>,
        /// Coefficient range min,max for frontiers.
        #[arg(long = "frontier-range", value_delimiter = ',', allow_hyphen_values = true)]
        frontier_range: Option<Vec<f64>>,
        /// Random sample of this many coefficient vectors instead of a grid.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Draw eps_1 as well instead of holding it at 1.
        #[arg(long = "free-first")]
        free_first: bool,
        #[arg(long = "pd-tol")]
        pd_tol: Option<f64>,
    },
    /// Entry structure of the alternating model.
    Conjecture {
        /// Second coupling for the parameter-independence check; default mag/2.
        #[arg(long = "alpha-ref", allow_hyphen_values = true)]
        alpha_ref: Option<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Ep { .. } => "ep",
            Command::Table1 { .. } => "table1",
            Command::Table2 { .. } => "table2",
            Command::Domain { .. } => "domain",
            Command::Pseudometrics { .. } => "pseudometrics",
            Command::Metric { .. } => "metric",
            Command::Conjecture { .. } => "conjecture",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    Text,
    Ppm,
}

/// Mapping from a table size `n` to the matrix dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `n` is the lattice size: an `n x n` matrix with `n/2` couplings.
    LatticeSize,
    /// `n` is the coupling count: a `2n x 2n` matrix.
    ParamCount,
}

impl Convention {
    pub fn matrix_dim(self, n: usize) -> usize {
        match self {
            Convention::LatticeSize => n,
            Convention::ParamCount => 2 * n,
        }
    }
}
