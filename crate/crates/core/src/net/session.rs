//! Two-endpoint streaming harness on a shared simulated clock.
//!
//! The sender replays a looped pose track at its frame rate. Every tick:
//! ACKs that have arrived are handled, the sender emits its messages, the
//! receiver consumes everything delivered by now, and the receiver's jitter
//! buffer is rendered and compared with ground truth at the render time.

use super::jitter::JitterBuffer;
use super::link::{LinkConfig, SimLink};
use super::wire::{self, MessageKind, WireMessage, BASELINE_BONE_BYTES, MOTOR_LEN};
use super::NetError;
use crate::cga::{interpolate_as, versor_to_affine, Multivector, VersorKind};
use crate::codec::{Affine, BoneProbes, PoseTrack};
use crate::skinning::{skin_model, PoseSample, SkinnedModel};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyncMode {
    /// A full snapshot every tick.
    SnapshotOnly,
    /// Periodic snapshots plus deltas of bones that changed beyond a threshold.
    SnapshotDelta,
    /// Periodic snapshots plus deltas carrying only online-selected keyframes.
    Gated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    pub mode: SyncMode,
    /// Sender ticks to simulate.
    pub ticks: usize,
    /// Snapshot cadence in ticks (ignored for `SnapshotOnly`).
    pub snapshot_every: usize,
    /// Coefficient change that marks a bone dirty in `SnapshotDelta` mode.
    #[serde(default = "default_threshold")]
    pub delta_threshold: f64,
    /// Max probe displacement tolerated between keys in `Gated` mode.
    #[serde(default = "default_gate")]
    pub gate_epsilon: f64,
    /// Jitter-buffer delay; defaults to two snapshot intervals.
    #[serde(default)]
    pub delay_ms: Option<f64>,
    pub link: LinkConfig,
}

fn default_threshold() -> f64 {
    1e-4
}

fn default_gate() -> f64 {
    2e-3
}

/// Seed offset for the receiver-to-sender direction.
const REVERSE_SEED_XOR: u64 = 0x9e37_79b9_7f4a_7c15;

impl SessionConfig {
    fn validate(&self) -> Result<(), NetError> {
        self.link.validate()?;
        if self.snapshot_every == 0 {
            return Err(NetError::InvalidSession("snapshot_every must be >= 1".into()));
        }
        if !(self.gate_epsilon > 0.0) || !(self.delta_threshold >= 0.0) {
            return Err(NetError::InvalidSession("gate_epsilon must be > 0 and delta_threshold >= 0".into()));
        }
        if let Some(d) = self.delay_ms {
            if !(d >= 0.0) || !d.is_finite() {
                return Err(NetError::InvalidSession(format!("delay_ms {d} must be >= 0")));
            }
        }
        Ok(())
    }

    fn snapshot_interval(&self) -> usize {
        match self.mode {
            SyncMode::SnapshotOnly => 1,
            _ => self.snapshot_every,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MessageRecord {
    pub tick: usize,
    pub kind: MessageKind,
    pub bytes: usize,
    pub motors: usize,
    pub dropped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TickMetrics {
    pub time_ms: u32,
    /// Bytes sent this tick in both directions, headers included.
    pub bytes_protocol: usize,
    /// 64 bytes per bone: one float32 4×4 matrix per bone per frame.
    pub bytes_baseline: usize,
    /// Max skinned-vertex distance from ground truth; `None` before the
    /// render time reaches zero or while the buffer is empty.
    pub rendered_error: Option<f64>,
    pub dropped: usize,
    pub delivered: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SessionTrace {
    pub bone_count: usize,
    pub ticks: Vec<TickMetrics>,
    pub messages: Vec<MessageRecord>,
    pub snapshot_requests: usize,
}

struct InFlight {
    deliver_ms: f64,
    order: u64,
    bytes: Vec<u8>,
}

struct Channel {
    link: SimLink,
    queue: Vec<InFlight>,
    order: u64,
}

impl Channel {
    fn new(config: LinkConfig) -> Result<Self, NetError> {
        Ok(Self { link: SimLink::new(config)?, queue: Vec::new(), order: 0 })
    }

    fn send(&mut self, msg: &WireMessage, now_ms: f64) -> bool {
        let order = self.order;
        self.order += 1;
        match self.link.transmit(now_ms) {
            Some(deliver_ms) => {
                self.queue.push(InFlight { deliver_ms, order, bytes: msg.to_bytes() });
                true
            }
            None => false,
        }
    }

    fn poll(&mut self, now_ms: f64) -> Vec<Vec<u8>> {
        let (mut ready, rest): (Vec<_>, Vec<_>) = self.queue.drain(..).partition(|m| m.deliver_ms <= now_ms);
        self.queue = rest;
        ready.sort_by(|a, b| a.deliver_ms.total_cmp(&b.deliver_ms).then(a.order.cmp(&b.order)));
        ready.into_iter().map(|m| m.bytes).collect()
    }
}

/// Online opening-window key selection per bone. A key is emitted at frame
/// `k - 1` as soon as interpolating from the last key to frame `k` would
/// miss some intermediate frame by more than epsilon.
struct Gate {
    epsilon: f64,
    probes: Vec<BoneProbes>,
    truth: Vec<Vec<Affine>>,
    last_key: Vec<usize>,
}

impl Gate {
    fn new(track: &PoseTrack, model: &SkinnedModel, epsilon: f64) -> Result<Self, NetError> {
        let b = track.bone_count();
        let probes = (0..b).map(|n| BoneProbes::new(model, n)).collect::<Result<Vec<_>, _>>()?;
        let truth = (0..track.frame_count())
            .map(|k| (0..b).map(|n| versor_to_affine(track.motor(k, n))).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { epsilon, probes, truth, last_key: vec![0; b] })
    }

    fn reset(&mut self, k: usize) {
        self.last_key.iter_mut().for_each(|a| *a = k);
    }

    fn check(&mut self, track: &PoseTrack, k: usize) -> Result<Vec<bool>, NetError> {
        let f = track.frame_count();
        let mut mask = vec![false; self.last_key.len()];
        for (bone, flag) in mask.iter_mut().enumerate() {
            let a = self.last_key[bone];
            if k < a + 2 {
                continue;
            }
            let (ma, mk) = (track.motor(a % f, bone), track.motor(k % f, bone));
            for j in a + 1..k {
                let t = (j - a) as f64 / (k - a) as f64;
                let approx = versor_to_affine(&interpolate_as(ma, mk, t, VersorKind::Motor)?)?;
                if self.probes[bone].error_affine(&self.truth[j % f][bone], &approx) > self.epsilon {
                    *flag = true;
                    self.last_key[bone] = k - 1;
                    break;
                }
            }
        }
        Ok(mask)
    }
}

struct Sender {
    seq: u32,
    last_snapshot: u32,
    acked: Option<u32>,
    request: bool,
    last_sent: Vec<Multivector>,
}

impl Sender {
    fn next_seq(&mut self) -> u32 {
        let s = self.seq;
        self.seq += 1;
        s
    }

    fn base(&self) -> u32 {
        self.acked.unwrap_or(self.last_snapshot)
    }

    fn on_ack(&mut self, ack: wire::Ack) {
        if ack.request_snapshot {
            if ack.ack_seq == self.last_snapshot {
                self.request = true;
            }
        } else if ack.ack_seq <= self.last_snapshot {
            self.acked = Some(self.acked.map_or(ack.ack_seq, |a| a.max(ack.ack_seq)));
        }
    }
}

struct Receiver {
    seq: u32,
    snapshots: BTreeSet<u32>,
    requested: BTreeSet<u32>,
    buffer: JitterBuffer,
    ack_snapshots: bool,
}

impl Receiver {
    /// Handles one delivered message and returns ACKs to send back.
    fn receive(&mut self, bytes: &[u8], now_ms: u32, requests: &mut usize) -> Result<Vec<WireMessage>, NetError> {
        let msg = WireMessage::from_bytes(bytes)?;
        let mut out = Vec::new();
        match msg.kind {
            MessageKind::Snapshot => {
                let pose = wire::decode_snapshot(&msg)?;
                self.buffer.insert_pose(msg.timestamp_ms, &pose)?;
                self.snapshots.insert(msg.sequence);
                if self.ack_snapshots {
                    out.push(wire::encode_ack(self.next_seq(), now_ms, msg.sequence, false));
                }
            }
            MessageKind::Delta => {
                let base = wire::delta_base_seq(&msg)?;
                if !self.snapshots.contains(&base) {
                    // BaseMissing: drop the delta, ask once for a new snapshot.
                    if self.requested.insert(base) {
                        *requests += 1;
                        out.push(wire::encode_ack(self.next_seq(), now_ms, base, true));
                    }
                    return Ok(out);
                }
                let update = wire::parse_delta(&msg, self.buffer.bone_count())?;
                for (bone, m) in update.bones {
                    self.buffer.insert_bone(bone, msg.timestamp_ms, m)?;
                }
            }
            other => {
                return Err(NetError::Malformed(format!("receiver got unexpected {}", other.name())));
            }
        }
        Ok(out)
    }

    fn next_seq(&mut self) -> u32 {
        let s = self.seq;
        self.seq += 1;
        s
    }
}

fn timestamp(k: usize, frame_rate: f64) -> u32 {
    (k as f64 * 1000.0 / frame_rate).floor() as u32
}

/// Ground-truth pose at `at_ms` on the looped track's timestamp grid.
fn truth_at(track: &PoseTrack, at_ms: f64) -> Result<PoseSample, NetError> {
    let fr = track.frame_rate();
    let f = track.frame_count();
    let mut j = (at_ms * fr / 1000.0).floor().max(0.0) as usize;
    while j > 0 && timestamp(j, fr) as f64 > at_ms {
        j -= 1;
    }
    while timestamp(j + 1, fr) as f64 <= at_ms {
        j += 1;
    }
    let (ta, tb) = (timestamp(j, fr) as f64, timestamp(j + 1, fr) as f64);
    let a = &track.frames()[j % f];
    if ta == at_ms {
        return Ok(a.clone());
    }
    let b = &track.frames()[(j + 1) % f];
    let t = (at_ms - ta) / (tb - ta);
    let motors = a
        .motors()
        .iter()
        .zip(b.motors())
        .map(|(x, y)| interpolate_as(x, y, t, VersorKind::Motor))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PoseSample::from_trusted(motors))
}

/// Streams `track` (looped) from sender to receiver and records metrics.
pub fn run_session(track: &PoseTrack, model: &SkinnedModel, config: &SessionConfig) -> Result<SessionTrace, NetError> {
    config.validate()?;
    let bones = track.bone_count();
    if model.bone_count() != bones {
        return Err(NetError::BoneCountMismatch { expected: model.bone_count(), got: bones });
    }
    let fr = track.frame_rate();
    let f = track.frame_count();
    let interval = config.snapshot_interval();
    let delay = config.delay_ms.unwrap_or(2.0 * interval as f64 * 1000.0 / fr);

    let mut forward = Channel::new(config.link)?;
    let mut reverse_cfg = config.link;
    reverse_cfg.seed ^= REVERSE_SEED_XOR;
    let mut reverse = Channel::new(reverse_cfg)?;

    let mut sender = Sender { seq: 0, last_snapshot: 0, acked: None, request: false, last_sent: vec![] };
    let mut receiver = Receiver {
        seq: 0,
        snapshots: BTreeSet::new(),
        requested: BTreeSet::new(),
        buffer: JitterBuffer::new(bones, delay),
        ack_snapshots: config.mode != SyncMode::SnapshotOnly,
    };
    let mut gate = match config.mode {
        SyncMode::Gated => Some(Gate::new(track, model, config.gate_epsilon)?),
        _ => None,
    };

    let mut trace = SessionTrace { bone_count: bones, ..Default::default() };
    for k in 0..config.ticks {
        let ts = timestamp(k, fr);
        let now = ts as f64;
        let mut tick = TickMetrics {
            time_ms: ts,
            bytes_protocol: 0,
            bytes_baseline: BASELINE_BONE_BYTES * bones,
            rendered_error: None,
            dropped: 0,
            delivered: 0,
        };
        let record = |trace: &mut SessionTrace, tick: &mut TickMetrics, msg: &WireMessage, motors: usize, ok: bool| {
            tick.bytes_protocol += msg.wire_len();
            tick.dropped += usize::from(!ok);
            trace.messages.push(MessageRecord { tick: k, kind: msg.kind, bytes: msg.wire_len(), motors, dropped: !ok });
        };

        for bytes in reverse.poll(now) {
            tick.delivered += 1;
            sender.on_ack(wire::decode_ack(&WireMessage::from_bytes(&bytes)?)?);
        }

        let pose = &track.frames()[k % f];
        let mut outgoing: Vec<(WireMessage, usize)> = Vec::new();
        let snapshot_tick = k % interval == 0 || sender.request;
        match config.mode {
            SyncMode::SnapshotOnly => {}
            SyncMode::SnapshotDelta => {
                if !snapshot_tick {
                    let mut mask = wire::changed_bones(
                        &PoseSample::from_trusted(sender.last_sent.clone()),
                        pose,
                        config.delta_threshold,
                    )?;
                    if mask.iter().any(|m| *m) {
                        for (b, m) in mask.iter_mut().enumerate() {
                            if *m {
                                sender.last_sent[b] = pose.motors()[b];
                            }
                        }
                        let n = mask.iter().filter(|m| **m).count();
                        let seq = sender.next_seq();
                        outgoing.push((wire::encode_delta_mask(sender.base(), pose, &mask, seq, ts)?, n));
                    }
                }
            }
            SyncMode::Gated => {
                let gate = gate.as_mut().expect("gate exists in gated mode");
                let mask = gate.check(track, k)?;
                if mask.iter().any(|m| *m) {
                    let n = mask.iter().filter(|m| **m).count();
                    let prev = &track.frames()[(k - 1) % f];
                    let seq = sender.next_seq();
                    let msg = wire::encode_delta_mask(sender.base(), prev, &mask, seq, timestamp(k - 1, fr))?;
                    outgoing.push((msg, n));
                }
            }
        }
        if snapshot_tick {
            let seq = sender.next_seq();
            outgoing.push((wire::encode_snapshot(pose, seq, ts)?, bones));
            sender.last_snapshot = seq;
            sender.request = false;
            sender.last_sent = pose.motors().to_vec();
            if let Some(g) = gate.as_mut() {
                g.reset(k);
            }
        }
        for (msg, motors) in &outgoing {
            let ok = forward.send(msg, now);
            record(&mut trace, &mut tick, msg, *motors, ok);
        }

        for bytes in forward.poll(now) {
            tick.delivered += 1;
            let acks = receiver.receive(&bytes, ts, &mut trace.snapshot_requests)?;
            for ack in acks {
                let ok = reverse.send(&ack, now);
                record(&mut trace, &mut tick, &ack, 0, ok);
            }
        }

        let at = now - delay;
        match receiver.buffer.render(now) {
            Ok(rendered) if at >= 0.0 => {
                let truth = truth_at(track, at)?;
                let a = skin_model(model, &rendered)?;
                let b = skin_model(model, &truth)?;
                let err = a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
                tick.rendered_error = Some(err);
            }
            Ok(_) | Err(NetError::EmptyBuffer) => {}
            Err(e) => return Err(e),
        }
        receiver.buffer.prune(now);
        trace.ticks.push(tick);
    }
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct KindStats {
    pub sent: usize,
    pub dropped: usize,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct BandwidthReport {
    pub ticks: usize,
    pub bone_count: usize,
    pub bytes_protocol: usize,
    pub bytes_baseline: usize,
    /// Baseline over every protocol byte (headers, scales, masks, ACKs).
    pub wire_ratio: f64,
    pub motor_payload_bytes: usize,
    /// Baseline over quantized motor bytes only.
    pub motor_payload_ratio: f64,
    pub per_kind: BTreeMap<String, KindStats>,
    pub messages_sent: usize,
    pub messages_dropped: usize,
    pub messages_delivered: usize,
    pub snapshot_requests: usize,
    pub error_samples: usize,
    pub error_max: f64,
    pub error_mean: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn bandwidth_report(trace: &SessionTrace) -> BandwidthReport {
    let mut r = BandwidthReport {
        ticks: trace.ticks.len(),
        bone_count: trace.bone_count,
        snapshot_requests: trace.snapshot_requests,
        ..Default::default()
    };
    for t in &trace.ticks {
        r.bytes_protocol += t.bytes_protocol;
        r.bytes_baseline += t.bytes_baseline;
        r.messages_delivered += t.delivered;
        if let Some(e) = t.rendered_error {
            r.error_samples += 1;
            r.error_max = r.error_max.max(e);
            r.error_mean += e;
        }
    }
    if r.error_samples > 0 {
        r.error_mean /= r.error_samples as f64;
    }
    for m in &trace.messages {
        let k = r.per_kind.entry(m.kind.name().to_string()).or_default();
        k.sent += 1;
        k.bytes += m.bytes;
        k.dropped += usize::from(m.dropped);
        r.messages_sent += 1;
        r.messages_dropped += usize::from(m.dropped);
        r.motor_payload_bytes += MOTOR_LEN * m.motors;
    }
    r.wire_ratio = ratio(r.bytes_baseline, r.bytes_protocol);
    r.motor_payload_ratio = ratio(r.bytes_baseline, r.motor_payload_bytes);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cga::{rotor, Vec3};
    use crate::skinning::{Influence, SkinBinding};

    fn fixture() -> (PoseTrack, SkinnedModel) {
        let rest = vec![Vec3::zeros(), Vec3::x(), Vec3::new(2.0, 0.0, 0.0)];
        let inf = vec![
            vec![Influence { bone: 0, weight: 1.0 }],
            vec![Influence { bone: 0, weight: 0.5 }, Influence { bone: 1, weight: 0.5 }],
            vec![Influence { bone: 1, weight: 1.0 }],
        ];
        let binding = SkinBinding::new(inf, vec![Multivector::ONE; 2]).unwrap();
        let model = SkinnedModel::new(rest, binding, vec![None, Some(0)], vec![]).unwrap();
        let frames = (0..60)
            .map(|k| {
                let a = 0.3 * (k as f64 / 60.0 * std::f64::consts::TAU).sin();
                PoseSample::new(vec![rotor(Vec3::z(), a).unwrap(), rotor(Vec3::y(), -a).unwrap()]).unwrap()
            })
            .collect();
        (PoseTrack::new(60.0, frames).unwrap(), model)
    }

    fn config(mode: SyncMode, loss: f64) -> SessionConfig {
        SessionConfig {
            mode,
            ticks: 240,
            snapshot_every: 30,
            delta_threshold: 1e-4,
            gate_epsilon: 2e-3,
            delay_ms: None,
            link: LinkConfig { latency_ms: 40.0, jitter_ms: 10.0, loss_probability: loss, seed: 3 },
        }
    }

    #[test]
    fn empty_session_reports_zeros() {
        let r = bandwidth_report(&SessionTrace::default());
        assert_eq!(r, BandwidthReport::default());
    }

    #[test]
    fn snapshot_only_payload_ratio_is_four() {
        let (track, model) = fixture();
        let trace = run_session(&track, &model, &config(SyncMode::SnapshotOnly, 0.0)).unwrap();
        let r = bandwidth_report(&trace);
        assert_eq!(r.motor_payload_ratio, 4.0);
        assert_eq!(r.per_kind.get("ack"), None);
    }

    #[test]
    fn gated_session_tracks_truth() {
        let (track, model) = fixture();
        let trace = run_session(&track, &model, &config(SyncMode::Gated, 0.1)).unwrap();
        let r = bandwidth_report(&trace);
        assert!(r.error_samples > 0);
        assert!(r.error_max < 5e-2, "{r:?}");
        let again = run_session(&track, &model, &config(SyncMode::Gated, 0.1)).unwrap();
        assert_eq!(trace, again);
    }

    #[test]
    fn lossless_delta_session_is_accurate() {
        let (track, model) = fixture();
        let trace = run_session(&track, &model, &config(SyncMode::SnapshotDelta, 0.0)).unwrap();
        let r = bandwidth_report(&trace);
        assert!(r.error_max < 1e-3, "{r:?}");
        assert_eq!(r.snapshot_requests, 0);
    }
}
