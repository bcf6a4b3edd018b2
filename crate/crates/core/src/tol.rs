//! Numerical tolerances shared across the crate.

/// Structure checks on integral input data.
pub const STRUCTURE: f64 = 1e-9;
/// Structure checks on derived (LP / averaged) data.
pub const DERIVED: f64 = 1e-7;
/// Objective agreement when comparing representations.
pub const EQUIVALENCE: f64 = 1e-7;
/// Relaxed points may leave `[0, 1]` by this much.
pub const BOX: f64 = 1e-9;
/// Weight sums below this are treated as zero.
pub const WEIGHT_SUM: f64 = 1e-12;
/// Residual tolerance of the PSD factorization check.
pub const PSD: f64 = 1e-8;
/// Largest absolute entry accepted from user input.
pub const MAX_MAGNITUDE: f64 = 1_048_576.0;
/// Largest dimension for exhaustive enumeration.
pub const ENUMERATION_CAP: usize = 25;
