//! Bit-exact message layouts. All multi-byte fields are little-endian.
//!
//! Header (9 bytes): `kind u8, sequence u32, timestamp_ms u32`.
//!
//! A quantized motor is 8 × i16 over `{1, e12, e13, e23, e1∞, e2∞, e3∞, e123∞}`.
//! The first four use the rotor scale, the last four the translation scale.
//! See `docs/wire.md` for the payload tables.

use super::NetError;
use crate::cga::{blade, normalize_motor, Multivector, Vec3};
use crate::skinning::PoseSample;
use crate::tolerance;

pub const HEADER_LEN: usize = 9;
pub const MOTOR_LEN: usize = 16;
pub const SCALES_LEN: usize = 8;
/// Snapshot payload bytes before the motors: count u16, flags u16, two scales.
pub const SNAPSHOT_FIXED_LEN: usize = 4 + SCALES_LEN;
pub const ACK_PAYLOAD_LEN: usize = 5;
/// Baseline cost of one bone per frame: a float32 4×4 matrix.
pub const BASELINE_BONE_BYTES: usize = 64;

pub const ACK_REQUEST_SNAPSHOT: u8 = 0b1;
pub const SOFT_HAS_DILATOR: u8 = 0b1;

const Q_MAX: f64 = 32767.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum MessageKind {
    Snapshot = 1,
    Delta = 2,
    SoftBody = 3,
    Ack = 4,
}

impl MessageKind {
    pub const ALL: [MessageKind; 4] =
        [MessageKind::Snapshot, MessageKind::Delta, MessageKind::SoftBody, MessageKind::Ack];

    pub fn from_u8(v: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|k| *k as u8 == v)
    }

    pub fn name(self) -> &'static str {
        match self {
            MessageKind::Snapshot => "snapshot",
            MessageKind::Delta => "delta",
            MessageKind::SoftBody => "softbody",
            MessageKind::Ack => "ack",
        }
    }
}

/// A framed message: header fields plus the raw kind-specific payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireMessage {
    pub kind: MessageKind,
    pub sequence: u32,
    pub timestamp_ms: u32,
    pub payload: Vec<u8>,
}

impl WireMessage {
    /// Framed size in bytes, header included.
    pub fn wire_len(&self) -> usize {
        HEADER_LEN + self.payload.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.wire_len());
        out.push(self.kind as u8);
        out.extend_from_slice(&self.sequence.to_le_bytes());
        out.extend_from_slice(&self.timestamp_ms.to_le_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, NetError> {
        if bytes.len() < HEADER_LEN {
            return Err(NetError::Malformed(format!("{} bytes is shorter than the header", bytes.len())));
        }
        let kind = MessageKind::from_u8(bytes[0])
            .ok_or_else(|| NetError::Malformed(format!("unknown message kind {}", bytes[0])))?;
        let mut r = Reader::new(&bytes[1..HEADER_LEN]);
        let sequence = r.u32()?;
        let timestamp_ms = r.u32()?;
        Ok(Self { kind, sequence, timestamp_ms, payload: bytes[HEADER_LEN..].to_vec() })
    }

    fn expect(&self, kind: MessageKind) -> Result<(), NetError> {
        if self.kind != kind {
            return Err(NetError::Malformed(format!("expected a {} message, got {}", kind.name(), self.kind.name())));
        }
        Ok(())
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], NetError> {
        if self.pos + n > self.bytes.len() {
            return Err(NetError::Malformed(format!(
                "payload truncated: need {} bytes at offset {}, have {}",
                n,
                self.pos,
                self.bytes.len()
            )));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, NetError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, NetError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn i16(&mut self) -> Result<i16, NetError> {
        Ok(i16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, NetError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> Result<f32, NetError> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn finish(&self) -> Result<(), NetError> {
        if self.pos != self.bytes.len() {
            return Err(NetError::Malformed(format!("{} trailing payload bytes", self.bytes.len() - self.pos)));
        }
        Ok(())
    }
}

/// Quantization steps for the rotor part and the translation part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales {
    pub rotor: f32,
    pub translation: f32,
}

impl Scales {
    /// Rotor step is fixed at 1/32767; the translation step covers the
    /// largest translation-part magnitude without clipping.
    pub fn for_components(motors: &[[f64; 8]]) -> Self {
        let max_t = motors.iter().flat_map(|c| c[4..].iter()).fold(0.0f64, |m, c| m.max(c.abs()));
        Self { rotor: step_for(1.0), translation: step_for(max_t) }
    }

    fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.rotor.to_le_bytes());
        out.extend_from_slice(&self.translation.to_le_bytes());
    }

    fn read(r: &mut Reader) -> Result<Self, NetError> {
        let s = Self { rotor: r.f32()?, translation: r.f32()? };
        for v in [s.rotor, s.translation] {
            if !v.is_finite() || v < 0.0 {
                return Err(NetError::Malformed(format!("bad quantization scale {v}")));
            }
        }
        Ok(s)
    }
}

/// Smallest f32 step `s` with `32767 s >= max_abs`; zero for a zero range.
pub fn step_for(max_abs: f64) -> f32 {
    if max_abs == 0.0 {
        return 0.0;
    }
    let mut s = (max_abs / Q_MAX) as f32;
    while (s as f64) * Q_MAX < max_abs {
        s = f32::from_bits(s.to_bits() + 1);
    }
    s
}

fn quantize(c: f64, step: f32) -> i16 {
    if step == 0.0 {
        return 0;
    }
    (c / step as f64).round().clamp(-Q_MAX, Q_MAX) as i16
}

/// Extracts the 8 motor components, rejecting anything off the rigid-motor
/// pattern or not unit within the versor tolerance.
pub fn motor_components(m: &Multivector) -> Result<[f64; 8], f64> {
    let pairs =
        [(blade::E1P, blade::E1M), (blade::E2P, blade::E2M), (blade::E3P, blade::E3M), (blade::E123P, blade::E123M)];
    let mut used = [false; 32];
    let mut out = [0.0; 8];
    for (k, i) in [blade::SCALAR, blade::E12, blade::E13, blade::E23].into_iter().enumerate() {
        out[k] = m[i];
        used[i] = true;
    }
    let mut off = 0.0;
    for (k, (p, n)) in pairs.into_iter().enumerate() {
        // e_I e∞ = e_I e+ + e_I e-, so both storage coefficients must agree.
        out[4 + k] = 0.5 * (m[p] + m[n]);
        off += (m[p] - m[n]).abs();
        used[p] = true;
        used[n] = true;
    }
    off += m.mass_outside(|i| used[i]);
    let n = m * &m.reverse();
    off += n.mass_outside(|i| i == 0) + (n.scalar_part() - 1.0).abs();
    if off > tolerance::VERSOR {
        return Err(off);
    }
    Ok(out)
}

/// Inverse of [`motor_components`] without normalization.
pub fn motor_from_components(c: &[f64; 8]) -> Multivector {
    let mut m = Multivector::ZERO;
    m[blade::SCALAR] = c[0];
    m[blade::E12] = c[1];
    m[blade::E13] = c[2];
    m[blade::E23] = c[3];
    for (k, (p, n)) in
        [(blade::E1P, blade::E1M), (blade::E2P, blade::E2M), (blade::E3P, blade::E3M), (blade::E123P, blade::E123M)]
            .into_iter()
            .enumerate()
    {
        m[p] = c[4 + k];
        m[n] = c[4 + k];
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantizedMotor(pub [i16; 8]);

impl QuantizedMotor {
    pub fn quantize(components: &[f64; 8], scales: &Scales) -> Self {
        let mut q = [0i16; 8];
        for k in 0..8 {
            let step = if k < 4 { scales.rotor } else { scales.translation };
            q[k] = quantize(components[k], step);
        }
        Self(q)
    }

    /// Dequantized components before renormalization.
    pub fn dequantize(&self, scales: &Scales) -> [f64; 8] {
        let mut c = [0.0; 8];
        for k in 0..8 {
            let step = if k < 4 { scales.rotor } else { scales.translation };
            c[k] = self.0[k] as f64 * step as f64;
        }
        c
    }

    /// Dequantized and renormalized so that `M rev(M) = 1`.
    pub fn to_motor(&self, scales: &Scales) -> Result<Multivector, NetError> {
        normalize_motor(&motor_from_components(&self.dequantize(scales)))
            .map_err(|_| NetError::Malformed("quantized motor has zero rotor part".into()))
    }

    fn write(&self, out: &mut Vec<u8>) {
        for v in self.0 {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }

    fn read(r: &mut Reader) -> Result<Self, NetError> {
        let mut q = [0i16; 8];
        for v in q.iter_mut() {
            *v = r.i16()?;
        }
        Ok(Self(q))
    }
}

fn components_of(motors: &[Multivector], bones: impl Iterator<Item = usize>) -> Result<Vec<[f64; 8]>, NetError> {
    bones.map(|b| motor_components(&motors[b]).map_err(|residual| NetError::NotAMotor { bone: b, residual })).collect()
}

fn write_motors(out: &mut Vec<u8>, comps: &[[f64; 8]]) {
    let scales = Scales::for_components(comps);
    scales.write(out);
    for c in comps {
        QuantizedMotor::quantize(c, &scales).write(out);
    }
}

fn bone_count_u16(n: usize) -> Result<u16, NetError> {
    u16::try_from(n).map_err(|_| NetError::TooManyBones(n))
}

/// SNAPSHOT: `bone_count u16, flags u16 (0), rotor_scale f32,
/// translation_scale f32, bone_count × motor`.
pub fn encode_snapshot(pose: &PoseSample, seq: u32, timestamp_ms: u32) -> Result<WireMessage, NetError> {
    let n = bone_count_u16(pose.bone_count())?;
    let comps = components_of(pose.motors(), 0..pose.bone_count())?;
    let mut payload = Vec::with_capacity(SNAPSHOT_FIXED_LEN + MOTOR_LEN * comps.len());
    payload.extend_from_slice(&n.to_le_bytes());
    payload.extend_from_slice(&0u16.to_le_bytes());
    write_motors(&mut payload, &comps);
    Ok(WireMessage { kind: MessageKind::Snapshot, sequence: seq, timestamp_ms, payload })
}

/// Bones whose sign-insensitive coefficient change exceeds `threshold`.
pub fn changed_bones(prev: &PoseSample, curr: &PoseSample, threshold: f64) -> Result<Vec<bool>, NetError> {
    if prev.bone_count() != curr.bone_count() {
        return Err(NetError::BoneCountMismatch { expected: prev.bone_count(), got: curr.bone_count() });
    }
    Ok(prev.motors().iter().zip(curr.motors()).map(|(a, b)| crate::codec::motor_distance(a, b) > threshold).collect())
}

/// DELTA carrying the bones of `curr` whose change from `prev` exceeds
/// `threshold`.
pub fn encode_delta(
    base_seq: u32,
    prev: &PoseSample,
    curr: &PoseSample,
    threshold: f64,
    seq: u32,
    timestamp_ms: u32,
) -> Result<WireMessage, NetError> {
    let mask = changed_bones(prev, curr, threshold)?;
    encode_delta_mask(base_seq, curr, &mask, seq, timestamp_ms)
}

/// DELTA: `base_seq u32, mask ceil(B/8) bytes` and, when any bit is set,
/// `rotor_scale f32, translation_scale f32, popcount × motor`. Bone `i` is
/// bit `i % 8` of mask byte `i / 8`.
pub fn encode_delta_mask(
    base_seq: u32,
    curr: &PoseSample,
    mask: &[bool],
    seq: u32,
    timestamp_ms: u32,
) -> Result<WireMessage, NetError> {
    bone_count_u16(curr.bone_count())?;
    if mask.len() != curr.bone_count() {
        return Err(NetError::BoneCountMismatch { expected: curr.bone_count(), got: mask.len() });
    }
    let mut payload = Vec::new();
    payload.extend_from_slice(&base_seq.to_le_bytes());
    let mut bits = vec![0u8; mask_len(mask.len())];
    for (i, _) in mask.iter().enumerate().filter(|(_, m)| **m) {
        bits[i / 8] |= 1 << (i % 8);
    }
    payload.extend_from_slice(&bits);
    if mask.iter().any(|m| *m) {
        let comps = components_of(curr.motors(), (0..mask.len()).filter(|&i| mask[i]))?;
        write_motors(&mut payload, &comps);
    }
    Ok(WireMessage { kind: MessageKind::Delta, sequence: seq, timestamp_ms, payload })
}

pub fn mask_len(bones: usize) -> usize {
    bones.div_ceil(8)
}

/// ACK: `ack_seq u32, flags u8`. Flag bit 0 requests a fresh snapshot.
pub fn encode_ack(seq: u32, timestamp_ms: u32, ack_seq: u32, request_snapshot: bool) -> WireMessage {
    let mut payload = Vec::with_capacity(ACK_PAYLOAD_LEN);
    payload.extend_from_slice(&ack_seq.to_le_bytes());
    payload.push(if request_snapshot { ACK_REQUEST_SNAPSHOT } else { 0 });
    WireMessage { kind: MessageKind::Ack, sequence: seq, timestamp_ms, payload }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ack {
    pub ack_seq: u32,
    pub request_snapshot: bool,
}

pub fn decode_ack(msg: &WireMessage) -> Result<Ack, NetError> {
    msg.expect(MessageKind::Ack)?;
    let mut r = Reader::new(&msg.payload);
    let ack_seq = r.u32()?;
    let flags = r.u8()?;
    r.finish()?;
    if flags & !ACK_REQUEST_SNAPSHOT != 0 {
        return Err(NetError::Malformed(format!("unknown ack flags {flags:#x}")));
    }
    Ok(Ack { ack_seq, request_snapshot: flags & ACK_REQUEST_SNAPSHOT != 0 })
}

/// Raw snapshot contents before renormalization.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotPayload {
    pub scales: Scales,
    pub motors: Vec<QuantizedMotor>,
}

pub fn parse_snapshot(msg: &WireMessage) -> Result<SnapshotPayload, NetError> {
    msg.expect(MessageKind::Snapshot)?;
    let mut r = Reader::new(&msg.payload);
    let n = r.u16()? as usize;
    let flags = r.u16()?;
    if flags != 0 {
        return Err(NetError::Malformed(format!("unknown snapshot flags {flags:#x}")));
    }
    let scales = Scales::read(&mut r)?;
    let motors = (0..n).map(|_| QuantizedMotor::read(&mut r)).collect::<Result<Vec<_>, _>>()?;
    r.finish()?;
    Ok(SnapshotPayload { scales, motors })
}

pub fn decode_snapshot(msg: &WireMessage) -> Result<PoseSample, NetError> {
    let p = parse_snapshot(msg)?;
    let motors = p.motors.iter().map(|q| q.to_motor(&p.scales)).collect::<Result<Vec<_>, _>>()?;
    Ok(PoseSample::from_trusted(motors))
}

/// Base sequence of a DELTA, readable without knowing the bone count.
pub fn delta_base_seq(msg: &WireMessage) -> Result<u32, NetError> {
    msg.expect(MessageKind::Delta)?;
    Reader::new(&msg.payload).u32()
}

/// Bones carried by a DELTA, as `(bone, motor)` in bone order.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaUpdate {
    pub base_seq: u32,
    pub bones: Vec<(usize, Multivector)>,
}

/// Parses a DELTA whose base pose has `bone_count` bones.
pub fn parse_delta(msg: &WireMessage, bone_count: usize) -> Result<DeltaUpdate, NetError> {
    msg.expect(MessageKind::Delta)?;
    let mut r = Reader::new(&msg.payload);
    let base_seq = r.u32()?;
    let bits = r.take(mask_len(bone_count))?;
    let carried: Vec<usize> = (0..bone_count).filter(|&i| bits[i / 8] & (1 << (i % 8)) != 0).collect();
    if !bone_count.is_multiple_of(8) {
        let spare = bits[bone_count / 8] >> (bone_count % 8);
        if spare != 0 {
            return Err(NetError::Malformed("delta mask sets bits past the bone count".into()));
        }
    }
    let mut bones = Vec::with_capacity(carried.len());
    if !carried.is_empty() {
        let scales = Scales::read(&mut r)?;
        for &b in &carried {
            bones.push((b, QuantizedMotor::read(&mut r)?.to_motor(&scales)?));
        }
    }
    r.finish()?;
    Ok(DeltaUpdate { base_seq, bones })
}

/// Applies a DELTA to the snapshot it was encoded against.
pub fn decode_delta(msg: &WireMessage, base_seq: u32, base: &PoseSample) -> Result<PoseSample, NetError> {
    let wanted = delta_base_seq(msg)?;
    if wanted != base_seq {
        return Err(NetError::BaseMissing { base_seq: wanted });
    }
    let update = parse_delta(msg, base.bone_count())?;
    let mut motors = base.motors().to_vec();
    for (b, m) in update.bones {
        motors[b] = m;
    }
    Ok(PoseSample::from_trusted(motors))
}

/// Soft-body frame: best-fit motor, optional uniform scale and sparse
/// per-particle residuals from the motor-predicted positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftBodyFrame {
    pub motor: Multivector,
    pub dilation: Option<f64>,
    pub residuals: Vec<(u16, Vec3)>,
}

/// SOFTBODY: `rotor_scale f32, translation_scale f32, motor, flags u8`,
/// `[dilation f32 when flag bit 0]`, `residual_scale f32, count u16`,
/// `count × (index u16, 3 × i16)`.
pub fn encode_softbody(frame: &SoftBodyFrame, seq: u32, timestamp_ms: u32) -> Result<WireMessage, NetError> {
    let comps = motor_components(&frame.motor).map_err(|residual| NetError::NotAMotor { bone: 0, residual })?;
    let count =
        u16::try_from(frame.residuals.len()).map_err(|_| NetError::Malformed("more than 65535 residuals".into()))?;
    let mut payload = Vec::new();
    write_motors(&mut payload, &[comps]);
    match frame.dilation {
        Some(s) => {
            if !(s > 0.0) || !s.is_finite() {
                return Err(NetError::Malformed(format!("dilation must be positive, got {s}")));
            }
            payload.push(SOFT_HAS_DILATOR);
            payload.extend_from_slice(&(s as f32).to_le_bytes());
        }
        None => payload.push(0),
    }
    let max_r = frame.residuals.iter().fold(0.0f64, |m, (_, r)| m.max(r.abs().max()));
    let step = step_for(max_r);
    payload.extend_from_slice(&step.to_le_bytes());
    payload.extend_from_slice(&count.to_le_bytes());
    for (i, r) in &frame.residuals {
        payload.extend_from_slice(&i.to_le_bytes());
        for k in 0..3 {
            payload.extend_from_slice(&quantize(r[k], step).to_le_bytes());
        }
    }
    Ok(WireMessage { kind: MessageKind::SoftBody, sequence: seq, timestamp_ms, payload })
}

pub fn decode_softbody(msg: &WireMessage) -> Result<SoftBodyFrame, NetError> {
    msg.expect(MessageKind::SoftBody)?;
    let mut r = Reader::new(&msg.payload);
    let scales = Scales::read(&mut r)?;
    let motor = QuantizedMotor::read(&mut r)?.to_motor(&scales)?;
    let flags = r.u8()?;
    if flags & !SOFT_HAS_DILATOR != 0 {
        return Err(NetError::Malformed(format!("unknown softbody flags {flags:#x}")));
    }
    let dilation = if flags & SOFT_HAS_DILATOR != 0 {
        let s = r.f32()? as f64;
        if !(s > 0.0) || !s.is_finite() {
            return Err(NetError::Malformed(format!("bad dilation {s}")));
        }
        Some(s)
    } else {
        None
    };
    let step = r.f32()? as f64;
    let count = r.u16()?;
    let mut residuals = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let i = r.u16()?;
        let v = Vec3::new(r.i16()? as f64 * step, r.i16()? as f64 * step, r.i16()? as f64 * step);
        residuals.push((i, v));
    }
    r.finish()?;
    Ok(SoftBodyFrame { motor, dilation, residuals })
}

/// Result of [`decode`].
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Decoded {
    Pose(PoseSample),
    SoftBody(SoftBodyFrame),
    Ack(Ack),
}

/// Decodes any message. A DELTA needs the `(sequence, pose)` of its base
/// snapshot and fails with `BaseMissing` otherwise.
pub fn decode(msg: &WireMessage, base: Option<(u32, &PoseSample)>) -> Result<Decoded, NetError> {
    match msg.kind {
        MessageKind::Snapshot => decode_snapshot(msg).map(Decoded::Pose),
        MessageKind::Delta => match base {
            Some((seq, pose)) => decode_delta(msg, seq, pose).map(Decoded::Pose),
            None => Err(NetError::BaseMissing { base_seq: delta_base_seq(msg)? }),
        },
        MessageKind::SoftBody => decode_softbody(msg).map(Decoded::SoftBody),
        MessageKind::Ack => decode_ack(msg).map(Decoded::Ack),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cga::{rotor, translator};

    fn pose() -> PoseSample {
        let a = translator(Vec3::new(0.5, -1.25, 2.0)) * rotor(Vec3::new(0.0, 0.6, 0.8), 1.1).unwrap();
        let b = rotor(Vec3::x(), -0.4).unwrap();
        PoseSample::new(vec![a, b, Multivector::ONE]).unwrap()
    }

    #[test]
    fn empty_snapshot_payload_is_twelve_bytes() {
        let msg = encode_snapshot(&PoseSample::identity(0), 1, 0).unwrap();
        assert_eq!(msg.payload.len(), 12);
        assert_eq!(msg.to_bytes().len(), HEADER_LEN + 12);
    }

    #[test]
    fn snapshot_round_trip() {
        let p = pose();
        let msg = encode_snapshot(&p, 7, 1234).unwrap();
        assert_eq!(msg.payload.len(), SNAPSHOT_FIXED_LEN + 3 * MOTOR_LEN);
        let back = WireMessage::from_bytes(&msg.to_bytes()).unwrap();
        assert_eq!(back, msg);
        let parsed = parse_snapshot(&back).unwrap();
        for (q, m) in parsed.motors.iter().zip(p.motors()) {
            let raw = q.dequantize(&parsed.scales);
            let truth = motor_components(m).unwrap();
            for k in 0..8 {
                let step = if k < 4 { parsed.scales.rotor } else { parsed.scales.translation } as f64;
                assert!((raw[k] - truth[k]).abs() <= 0.5 * step * (1.0 + 1e-9));
            }
        }
        let decoded = decode_snapshot(&back).unwrap();
        for m in decoded.motors() {
            let n = m * &m.reverse();
            assert!(n.mass_outside(|i| i == 0) + (n.scalar_part() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_layouts() {
        let p = pose();
        let same = encode_delta(3, &p, &p, 1e-9, 4, 0).unwrap();
        assert_eq!(same.payload, vec![3, 0, 0, 0, 0]);
        let mut moved = p.motors().to_vec();
        moved[1] = rotor(Vec3::x(), 0.2).unwrap();
        let curr = PoseSample::new(moved).unwrap();
        let one = encode_delta(3, &p, &curr, 1e-6, 5, 0).unwrap();
        assert_eq!(one.payload[4], 0b010);
        assert_eq!(one.payload.len(), 4 + 1 + SCALES_LEN + MOTOR_LEN);
        let out = decode_delta(&one, 3, &p).unwrap();
        assert!(crate::codec::motor_distance(&out.motors()[1], &curr.motors()[1]) < 1e-4);
        assert_eq!(out.motors()[0], p.motors()[0]);
        assert!(matches!(decode_delta(&one, 2, &p), Err(NetError::BaseMissing { base_seq: 3 })));
    }

    #[test]
    fn truncation_and_garbage_are_malformed() {
        let bytes = encode_snapshot(&pose(), 1, 0).unwrap().to_bytes();
        for cut in [0, 5, HEADER_LEN + 3, bytes.len() - 1] {
            let r = WireMessage::from_bytes(&bytes[..cut]).and_then(|m| decode_snapshot(&m));
            assert!(matches!(r, Err(NetError::Malformed(_))), "cut {cut}");
        }
        let mut bad = bytes.clone();
        bad[0] = 9;
        assert!(WireMessage::from_bytes(&bad).is_err());
    }

    #[test]
    fn non_motor_is_rejected() {
        let d = crate::cga::dilator(2.0).unwrap();
        let p = PoseSample::new(vec![Multivector::ONE, d]).unwrap();
        assert!(matches!(encode_snapshot(&p, 0, 0), Err(NetError::NotAMotor { bone: 1, .. })));
    }

    #[test]
    fn ack_and_softbody_round_trip() {
        let ack = encode_ack(9, 100, 4, true);
        assert_eq!(ack.wire_len(), 14);
        assert_eq!(decode_ack(&ack).unwrap(), Ack { ack_seq: 4, request_snapshot: true });
        let frame = SoftBodyFrame {
            motor: translator(Vec3::new(0.0, 1.0, 0.0)),
            dilation: None,
            residuals: vec![(3, Vec3::new(0.01, -0.02, 0.0))],
        };
        let msg = encode_softbody(&frame, 1, 0).unwrap();
        let back = decode_softbody(&msg).unwrap();
        assert_eq!(back.residuals[0].0, 3);
        assert!((back.residuals[0].1 - frame.residuals[0].1).abs().max() < 1e-6);
        assert!(back.motor.max_abs_diff(&frame.motor) < 1e-4);
    }
}
