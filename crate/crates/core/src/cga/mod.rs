//! Conformal geometric algebra CGA(4,1): dense multivectors, point embedding,
//! versor constructors, sandwich application and type-closed interpolation.

mod multivector;
pub mod text;
mod versor;

pub use multivector::{blade, grade_of, reverse_sign, Multivector, BLADES, METRIC, PRODUCT_SIGN};
pub use versor::{
    apply_versor, classify_versor, compose, dilator, down, interpolate_as, interpolate_versor, normalize_motor,
    pattern_residual, rotor, rotor_from_quaternion, rotor_to_quaternion, translator, up, versor_to_affine, VersorKind,
};

use thiserror::Error;

/// Euclidean point or vector in model units.
pub type Vec3 = nalgebra::Vector3<f64>;

/// Pre-image of a conformal point.
pub type EuclideanPoint = Vec3;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CgaError {
    #[error("point at infinity: |c . e_inf| = {weight:e}")]
    NullWeight { weight: f64 },
    #[error("rotation axis is not unit length (norm {norm})")]
    InvalidAxis { norm: f64 },
    #[error("dilation scale must be finite and positive, got {scale}")]
    InvalidScale { scale: f64 },
    #[error("not a versor: v * rev(v) has non-scalar residual {residual:e}")]
    NotAVersor { residual: f64 },
    #[error("cannot interpolate a {a:?} with a {b:?}")]
    KindMismatch { a: VersorKind, b: VersorKind },
    #[error("interpolation blend collapsed (norm {norm:e}); inputs are antipodal")]
    DegenerateBlend { norm: f64 },
    #[error("multivector matches no versor pattern")]
    Unclassifiable,
}
