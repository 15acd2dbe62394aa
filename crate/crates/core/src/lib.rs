//! Local-in-time generators of open quantum dynamics.
//!
//! A dynamical map family Λ(t,t₀) = e^{Z(t,t₀)} built from exponents with a
//! Lindblad representation is propagated and certified here. The crate
//! provides:
//!
//! - [`superop`]: dense complex matrix and superoperator algebra under the
//!   column-stacking convention, Choi transforms, matrix exponentials and
//!   their Fréchet derivatives;
//! - [`lindblad`]: generator construction from (H, γ_α, V_α) specifications
//!   and spectral decision procedures for generator / CPT-map validity;
//! - [`generator`]: exponent families Z(t,t₀) and the local generator
//!   L(t,t₀) = ∫₀¹ e^{sZ} X e^{−sZ} ds they induce, with two cross-checked
//!   evaluation paths;
//! - [`propagate`]: the time-ordered solution of dΛ/dt = L(t,t₀)Λ,
//!   composition-law and Markovianity diagnostics, trajectory certification;
//! - [`models`]: the pure-decoherence and two-rate qubit models whose
//!   closed forms serve as oracles for the generic machinery;
//! - [`quad`]: Gauss–Legendre rules and adaptive Gauss–Kronrod quadrature.

pub mod error;
pub mod generator;
pub mod lindblad;
pub mod models;
pub mod propagate;
pub mod quad;
pub mod superop;

pub use error::{Error, Result};
pub use superop::{CMatrix, CVector, DensityMatrix, SuperOp, Tolerances};
