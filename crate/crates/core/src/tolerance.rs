//! Repo-wide numeric tolerances.

/// Pattern residual below which a multivector is accepted as a given versor kind.
pub const CLASSIFY: f64 = 1e-6;

/// Geometric checks: null-cone membership, sandwich equivalence, unit axes.
pub const GEOMETRIC: f64 = 1e-9;

/// Pure algebraic identities (products, reverses, group laws).
pub const ALGEBRAIC: f64 = 1e-12;

/// Versor check used by `apply_versor`: non-scalar part of `v * rev(v)`.
pub const VERSOR: f64 = 1e-6;

/// Minimum `|c . e_inf|` for a conformal point to have a finite Euclidean image.
pub const NULL_WEIGHT: f64 = 1e-12;

/// Blend norm below which interpolation is considered degenerate.
pub const DEGENERATE_BLEND: f64 = 1e-9;

/// Unit-length tolerance for rotation axes.
pub const UNIT_AXIS: f64 = 1e-9;

/// Per-vertex weight normalization tolerance for skin bindings.
pub const WEIGHT_SUM: f64 = 1e-6;

/// Bind offsets and pose motors must satisfy `M * rev(M) = 1` within this.
pub const MOTOR_NORM: f64 = 1e-9;
