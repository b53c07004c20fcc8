//! Pose and soft-body synchronization over a simulated lossy link.

mod jitter;
mod link;
mod session;
mod softsync;
pub mod wire;

pub use jitter::JitterBuffer;
pub use link::{link_transmit, Delivery, DeliveryTrace, LinkConfig, SimLink};
pub use session::{
    bandwidth_report, run_session, BandwidthReport, KindStats, SessionConfig, SessionTrace, SyncMode, TickMetrics,
};
pub use softsync::{encode_body, SoftRest};
pub use wire::{
    decode, decode_softbody, encode_ack, encode_delta, encode_delta_mask, encode_snapshot, encode_softbody, Decoded,
    MessageKind, QuantizedMotor, Scales, SoftBodyFrame, WireMessage,
};

use crate::cga::CgaError;
use crate::codec::CodecError;
use crate::skinning::SkinError;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum NetError {
    #[error("bone {bone} is not a unit rigid motor (residual {residual:e})")]
    NotAMotor { bone: usize, residual: f64 },
    #[error("expected {expected} bones, got {got}")]
    BoneCountMismatch { expected: usize, got: usize },
    #[error("{0} bones exceed the u16 bone count field")]
    TooManyBones(usize),
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("delta references snapshot {base_seq}, which is not available")]
    BaseMissing { base_seq: u32 },
    #[error("jitter buffer has no samples")]
    EmptyBuffer,
    #[error("invalid link config: {0}")]
    InvalidLink(String),
    #[error("invalid session config: {0}")]
    InvalidSession(String),
    #[error(transparent)]
    Cga(#[from] CgaError),
    #[error(transparent)]
    Skin(#[from] SkinError),
    #[error(transparent)]
    Codec(#[from] CodecError),
}
