//! Dense complex linear algebra over small Hilbert spaces.
//!
//! Subsystems follow the Kronecker convention: in `A ⊗ B` the index of `A`
//! varies slowest.

mod density;
mod eigen;
mod literal;
mod matrix;

pub use density::{partial_trace, partial_trace_operator, validate_density, DensityMatrix};
pub use eigen::{eig_hermitian, Spectrum, MAX_SWEEPS, OFF_DIAGONAL_THRESHOLD};
pub use literal::{format_matrix_literal, parse_complex, parse_matrix_literal};
pub use matrix::{tensor, ComplexMatrix};

pub use num_complex::Complex64;

/// Max entrywise `|M - M^dagger|` accepted as Hermitian.
pub const TOL_HERMITIAN: f64 = 1e-10;
/// Max `|Tr ρ - 1|` accepted for a state.
pub const TOL_TRACE: f64 = 1e-10;
/// Eigenvalues down to `-TOL_PSD` count as nonnegative.
pub const TOL_PSD: f64 = 1e-10;
