//! Computation, bounds, and certification for M-eigenvalues of fourth-order
//! partially symmetric (elasticity) tensors.

pub mod bim;
pub mod bounds;
pub mod elasticity;
pub mod error;
pub mod exact;
pub mod families;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod mat;
pub mod oracle;
pub mod sampling;
pub mod scalar;
pub mod structure;
pub mod tensor;

pub use bim::{bim_solve, BimConfig, BimResult, InitStrategy, ShiftStrategy};
pub use bounds::{bound_report, BoundReport};
pub use elasticity::{certify_strong_ellipticity, EllipticityCertificate, Verdict};
pub use exact::{exact_from_omega, ExactMethod, ExactSolution};
pub use linalg::{is_psd, svd, sym_eig, Svd, SymEig, Tolerances};
pub use mat::Mat;
pub use oracle::{global_max_multistart, grid_search, OracleResult};
pub use scalar::Real;
pub use structure::{structure_report, StructureReport};
pub use tensor::{ClassFlags, Eigenpair, PsTensor, StructMatrices, Validated};

/// Concrete 64-bit aliases; the CLI and the JSON format work in these.
pub type PsTensor64 = PsTensor<f64>;
pub type Mat64 = Mat<f64>;
pub type Eigenpair64 = Eigenpair<f64>;

/// 32-bit aliases for callers that trade accuracy for footprint.
pub type PsTensor32 = PsTensor<f32>;
pub type Mat32 = Mat<f32>;
