//! Numeric tolerances shared across the crate.

/// Normalization and other invariant checks on constructed values.
pub const INVARIANT: f64 = 1e-12;
/// Residuals of operator equations (completeness, orthogonality, identities).
pub const RESIDUAL: f64 = 1e-10;
/// Convergence of the one-dimensional optimizers.
pub const CONVERGENCE: f64 = 1e-9;
/// Branch amplitudes at or below this are treated as exactly zero.
pub const ZERO_AMPLITUDE: f64 = 1e-12;
/// Relative singular-value cut defining a numerical null space.
pub const NULLSPACE: f64 = 1e-10;
/// Minimum eigenvalue accepted for a positive semidefinite element.
pub const PSD_EIGENVALUE: f64 = -1e-10;
