//! Conformal geometric algebra motion engine.
//!
//! Everything is built on one value type, [`cga::Multivector`], which houses
//! points, translators, rotors, dilators and motors of CGA(4,1). On top of the
//! algebra sit multivector-only skinning, keyframe reduction with versor
//! interpolation, a quantized snapshot/delta pose protocol over a simulated
//! lossy link, and shape-matching soft bodies with PBD ropes.
// Negated comparisons are how the parameter checks reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments, clippy::needless_range_loop)]

pub mod cga;
pub mod cli;
pub mod codec;
pub mod fixtures;
pub mod format;
pub mod net;
pub mod oracle;
pub mod rope;
pub mod skinning;
pub mod softbody;
pub mod tolerance;
