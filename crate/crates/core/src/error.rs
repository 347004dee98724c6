//! Error types. Index quadruples in messages are 1-based to match the JSON
//! exchange format and the usual tensor notation.

use thiserror::Error;

use crate::linalg::LinalgError;

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("expected {expected} entries for a {m}x{n}x{m}x{n} tensor, got {got}")]
    ShapeMismatch { m: usize, n: usize, expected: usize, got: usize },
    #[error(
        "partial symmetry violated at ({i},{j},{k},{l}): |{lhs:e} - {rhs:e}| = {deviation:e} > {allowed:e}"
    )]
    SymmetryViolation {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
        lhs: f64,
        rhs: f64,
        deviation: f64,
        allowed: f64,
    },
    #[error("non-finite entry at ({i},{j},{k},{l})")]
    NonFinite { i: usize, j: usize, k: usize, l: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("bound requires a nonnegative tensor; entry ({i},{j},{k},{l}) = {value:e} is negative")]
    NotNonnegative { i: usize, j: usize, k: usize, l: usize, value: f64 },
    #[error("{bound} is undefined for m=1 or n=1 (the index pair maximum is empty)")]
    DegenerateDimension { bound: &'static str },
}

#[derive(Debug, Error)]
pub enum StructureError {
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("index {index} does not witness the position condition: pair ({j},{l}) fails the PSD test")]
    InvalidWitness { index: usize, j: usize, l: usize },
    #[error("input tensor {which} is not a member of {set}")]
    NotMember { which: &'static str, set: String },
}

#[derive(Debug, Error)]
pub enum BimError {
    #[error("shift strategy {strategy} is unavailable: {reason}")]
    ShiftUnavailable { strategy: &'static str, reason: String },
    #[error("explicit shift must be nonnegative, got {value:e}")]
    NegativeShift { value: f64 },
    #[error("initial vectors have wrong dimensions")]
    BadInit,
}

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("no exact solution applies: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Error)]
pub enum ElasticityError {
    #[error("tensor is not an elasticity Z-tensor: off-diagonal entry ({i},{j},{k},{l}) = {value:e} is positive")]
    NotZTensor { i: usize, j: usize, k: usize, l: usize, value: f64 },
    #[error("eta = {eta:e} is below the admissible floor max diagonal = {floor:e}")]
    EtaTooSmall { eta: f64, floor: f64 },
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("rhombic operations need m = n = 3, got {m}x{n}")]
    NotRhombicShape { m: usize, n: usize },
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("grid search supports m,n <= 3, got {m}x{n}")]
    DimensionTooLarge { m: usize, n: usize },
}
