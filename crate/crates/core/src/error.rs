//! Error types shared by all modules.

use crate::superop::SuperOp;

/// Errors produced by construction, evaluation, and propagation routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Shapes of the operands do not match.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An input violates a structural invariant (non-Hermitian Hamiltonian,
    /// negative rate, non-finite entries, malformed grid, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A time argument lies outside the domain of the family being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed to reach its tolerance or did not converge.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The requested computation leaves the representable floating-point range.
    #[error("numerical range error: {0}")]
    NumericalRange(String),

    /// The adaptive integrator underflowed its step size.
    #[error("stiffness detected at t = {t}: step size underflow")]
    Stiffness { t: f64 },

    /// A coefficient function vanished where a quotient is required.
    #[error("singularity: {0}")]
    Singularity(String),

    /// The two evaluation paths of the local-generator formula disagree
    /// beyond the cross-check tolerance. Both results are attached.
    #[error("consistency check failed: quadrature and Fréchet paths differ by {deviation:e}")]
    Consistency {
        deviation: f64,
        quadrature: Box<SuperOp>,
        frechet: Box<SuperOp>,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
