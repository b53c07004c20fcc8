//! Soft-body state as a rigid motor plus sparse residuals.

use super::wire::{decode_softbody, encode_softbody, SoftBodyFrame, WireMessage};
use super::NetError;
use crate::cga::{apply_versor, down, up, Vec3};
use crate::softbody::ParticleBody;

/// Rest-frame data both ends share: rest positions and their mass-weighted
/// centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftRest {
    pub rest: Vec<Vec3>,
    pub centroid: Vec3,
}

impl SoftRest {
    pub fn of(body: &ParticleBody) -> Self {
        let m: f64 = body.particles().iter().map(|p| p.mass).sum();
        let centroid = body.rest().iter().zip(body.particles()).map(|(r, p)| r * p.mass).sum::<Vec3>() / m;
        Self { rest: body.rest().to_vec(), centroid }
    }

    /// Positions predicted by the frame's motor and dilation alone.
    pub fn predict(&self, frame: &SoftBodyFrame) -> Result<Vec<Vec3>, NetError> {
        let s = frame.dilation.unwrap_or(1.0);
        self.rest
            .iter()
            .map(|r| Ok(down(&apply_versor(&frame.motor, &up(self.centroid + (r - self.centroid) * s))?)?))
            .collect()
    }

    /// Predicted positions with the frame's residuals added.
    pub fn reconstruct(&self, frame: &SoftBodyFrame) -> Result<Vec<Vec3>, NetError> {
        let mut out = self.predict(frame)?;
        for &(i, r) in &frame.residuals {
            let slot = out
                .get_mut(i as usize)
                .ok_or_else(|| NetError::Malformed(format!("residual index {i} out of range")))?;
            *slot += r;
        }
        Ok(out)
    }
}

/// Encodes a body as its whole-body rigid fit plus residuals larger than
/// `threshold`. Residuals are taken against the motor as the receiver will
/// decode it, so motor quantization error is not left uncorrected.
pub fn encode_body(
    body: &ParticleBody,
    rest: &SoftRest,
    threshold: f64,
    seq: u32,
    timestamp_ms: u32,
) -> Result<WireMessage, NetError> {
    if body.particle_count() > u16::MAX as usize + 1 {
        return Err(NetError::TooManyBones(body.particle_count()));
    }
    let fit = body.rigid_fit().map_err(|e| NetError::Malformed(e.to_string()))?;
    let bare = SoftBodyFrame { motor: fit.motor(), dilation: fit.scale, residuals: Vec::new() };
    let seen = decode_softbody(&encode_softbody(&bare, seq, timestamp_ms)?)?;
    let predicted = rest.predict(&seen)?;
    let residuals = body
        .particles()
        .iter()
        .zip(&predicted)
        .enumerate()
        .filter_map(|(i, (p, q))| {
            let r = p.position - q;
            (r.norm() > threshold).then_some((i as u16, r))
        })
        .collect();
    encode_softbody(&SoftBodyFrame { residuals, ..bare }, seq, timestamp_ms)
}
