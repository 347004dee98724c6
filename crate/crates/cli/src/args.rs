//! Command-line surface.

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "mspectral",
    version,
    about = "Bounds, solvers, and certificates for M-eigenvalues of fourth-order partially symmetric tensors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the primary output to this path instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,

    /// Worker threads for batch commands (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a tensor file: shape, finiteness, partial symmetry, class flags.
    Validate {
        path: std::path::PathBuf,
        /// Symmetrize near-miss input instead of rejecting it.
        #[arg(long)]
        repair: bool,
    },
    /// All applicable spectral-radius bounds as JSON.
    Bounds { path: std::path::PathBuf },
    /// Greatest M-eigenpair by the block improvement method.
    Solve {
        path: std::path::PathBuf,
        /// Shift strategy: wang | li1 | li2 | es | `value:<eta>`.
        #[arg(long, default_value = "es")]
        shift: String,
        /// Initialization: unfold | mes | `random:<seed>`.
        #[arg(long, default_value = "unfold")]
        init: String,
        /// Stop when successive eigenvalue estimates differ by at most this.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// Additionally require small eigen-equation residuals before stopping.
        #[arg(long)]
        residual_stop: bool,
        /// Write one CSV row per iteration (iteration, lambda_shifted, lambda).
        #[arg(long)]
        history_csv: Option<std::path::PathBuf>,
    },
    /// Closed-form eigenpair when a structural class applies (exit 2 if none).
    Exact { path: std::path::PathBuf },
    /// Structural class membership report.
    Structure { path: std::path::PathBuf },
    /// Strong-ellipticity certification for elasticity Z-tensors.
    Certify {
        path: std::path::PathBuf,
        /// Shift parameter (defaults to the max diagonal entry).
        #[arg(long)]
        eta: Option<f64>,
        /// Scan this many eta steps over [floor, 2*floor] and report the
        /// smallest certifying value.
        #[arg(long)]
        scan_eta: Option<usize>,
    },
    /// Reference maximizer: seeded multistart, or a dense grid for tiny modes.
    Oracle {
        path: std::path::PathBuf,
        #[arg(long, default_value_t = 200)]
        restarts: usize,
        #[arg(long)]
        seed: u64,
        /// Use the dense grid method at this angular resolution (m, n <= 3).
        #[arg(long)]
        grid_resolution: Option<usize>,
    },
    /// Emit a tensor from a named generator family.
    Generate(GenerateArgs),
    /// Batch bound/solver comparison as CSV.
    Compare {
        /// Number of random nonnegative 3x3x3x3 tensors to generate.
        #[arg(long, conflicts_with = "dir")]
        count: Option<usize>,
        /// Directory of tensor JSON files to compare instead.
        #[arg(long)]
        dir: Option<std::path::PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Family: delta1 | kron | position | rhombic | figure:1 | figure:4 |
    /// figure:4inv | figure:5 | `fixture:<name>`.
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Family parameter h (figure families).
    #[arg(long)]
    pub h: Option<f64>,
    /// Mode size for the figure families.
    #[arg(long, default_value_t = 10)]
    pub size: usize,
    /// Variant selector for figure:5 (sin | cos).
    #[arg(long)]
    pub variant: Option<String>,
}
