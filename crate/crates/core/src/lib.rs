//! Entanglement detection for quantum effects via the dual Bell-CHSH inequality.
//!
//! Quantum effects (POVM elements) live in the dual of the state space, and the
//! notion of separability carries over: an effect is separable if it is a
//! nonnegative combination of product positive operators, and entangled
//! otherwise. This crate detects entangled effects through a CHSH-type
//! inequality evaluated on *state* pairs instead of measurement settings:
//!
//! - [`chsh`] builds the D quantity from differences from ignorance, checks the
//!   trace condition, and computes the closed-form two-qubit maximum plus a
//!   general-dimension seesaw maximizer and the 2sqrt(2) upper bound.
//! - [`separability`] classifies bipartite operators (positive / PPT / POPT)
//!   and certifies effects as separable or entangled.
//! - [`experiment`] simulates the shot-based Bell-measurement experiment that
//!   estimates D from counts, with optional depolarizing/readout noise.
//! - [`teleport`] evaluates whether a 4-outcome two-qubit measurement is
//!   useful for teleportation via per-outcome correlation matrices.
//!
//! The CLI binary (`dualbell`) exposes these as subcommands over a JSON
//! operator-file format; see [`fileio`].

pub mod chsh;
pub mod experiment;
pub mod fileio;
pub mod linalg;
pub mod objects;
pub mod separability;
pub mod teleport;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dims_split ({d_a}, {d_b}) inconsistent with total dimension {dim}")]
    BadSplit { d_a: usize, d_b: usize, dim: usize },
    #[error("operator is not Hermitian (max |X - X^dag| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("bipartite split required but not declared")]
    MissingSplit,
    #[error("not a valid state: {0}")]
    InvalidState(String),
    #[error("not a valid effect: {0}")]
    InvalidEffect(String),
    #[error("not a valid POVM: {0}")]
    InvalidPovm(String),
    #[error("expected a qubit (dimension 2), got dimension {0}")]
    NotQubit(usize),
    #[error("expected a two-qubit (2x2) operator, got split {0:?}")]
    NotTwoQubit(Option<(usize, usize)>),
    #[error("Bloch vector norm {0} exceeds 1")]
    BlochNormExceeded(f64),
    #[error("probability {0} outside [0, 1] beyond tolerance")]
    ProbabilityOutOfRange(f64),
    #[error("dimension {0} too small (need d >= 2)")]
    DimTooSmall(usize),
    #[error("effect violates the trace condition: tr(M1) = {tr_plus:.6}, tr(M-1) = {tr_minus:.6}")]
    TraceConditionViolated { tr_plus: f64, tr_minus: f64 },
    #[error("trace budget {0} exceeds 1")]
    BudgetExceeded(f64),
    #[error("counts record is empty (zero shots)")]
    EmptyCounts,
    #[error("measurement not supported by the simulator: {0}")]
    UnsupportedMeasurement(String),
    #[error("POVM has {0} outcomes, expected {1}")]
    WrongOutcomeCount(usize, usize),
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("noise parameter {name} = {value} outside [0, 1]")]
    NoiseOutOfRange { name: &'static str, value: f64 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("operator file error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
