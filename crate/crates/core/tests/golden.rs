mod common;

use cgamotion::cga::{blade, Multivector};
use cgamotion::codec::file::load_track;
use cgamotion::fixtures::{catalog, from_hex, golden_messages, GOLDEN_FRAME};
use cgamotion::net::WireMessage;
use common::*;

const Q: f64 = 32767.0;

fn step(max: f64) -> f32 {
    if max == 0.0 {
        return 0.0;
    }
    let mut s = (max / Q) as f32;
    while (s as f64) * Q < max {
        s = f32::from_bits(s.to_bits() + 1);
    }
    s
}

fn components(m: &Multivector) -> [f64; 8] {
    use blade::*;
    let t = |p, n| 0.5 * (m[p] + m[n]);
    [m[SCALAR], m[E12], m[E13], m[E23], t(E1P, E1M), t(E2P, E2M), t(E3P, E3M), t(E123P, E123M)]
}

fn header(kind: u8, seq: u32, ts: u32) -> Vec<u8> {
    let mut out = vec![kind];
    out.extend_from_slice(&seq.to_le_bytes());
    out.extend_from_slice(&ts.to_le_bytes());
    out
}

/// Straight from the layout: header, u16 count, u16 flags, two f32 steps,
/// then eight i16 per motor.
fn snapshot_bytes(motors: &[Multivector], seq: u32, ts: u32) -> Vec<u8> {
    let comps: Vec<[f64; 8]> = motors.iter().map(components).collect();
    let max_t = comps.iter().flat_map(|c| c[4..].to_vec()).fold(0.0f64, |m, c| m.max(c.abs()));
    let (rs, ts_step) = (step(1.0), step(max_t));
    let mut out = header(1, seq, ts);
    out.extend_from_slice(&(motors.len() as u16).to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&rs.to_le_bytes());
    out.extend_from_slice(&ts_step.to_le_bytes());
    for c in &comps {
        for (k, v) in c.iter().enumerate() {
            let s = if k < 4 { rs } else { ts_step } as f64;
            let q = if s == 0.0 { 0 } else { (v / s).round().clamp(-Q, Q) as i16 };
            out.extend_from_slice(&q.to_le_bytes());
        }
    }
    out
}

fn committed(name: &str) -> Vec<u8> {
    let text = std::fs::read_to_string(fixture_path(&format!("wire/{name}.hex"))).unwrap();
    from_hex(&text).unwrap()
}

#[test]
fn committed_fixtures_match_the_generators() {
    for f in catalog() {
        let path = fixture_path(&f.path);
        let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(on_disk == f.contents, "{} is stale; rerun `cgamotion fixtures write`", f.path);
    }
}

#[test]
fn wire_files_decode_to_the_golden_messages() {
    for (stem, _, msg) in golden_messages() {
        let bytes = committed(stem);
        assert_eq!(bytes, msg.to_bytes(), "{stem}");
        assert_eq!(WireMessage::from_bytes(&bytes).unwrap(), msg, "{stem}");
    }
}

#[test]
fn arm_snapshot_matches_a_hand_encoding() {
    let track = load_track(&fixture_path("arm/track.toml")).unwrap();
    let pose = &track.frames()[GOLDEN_FRAME];
    assert_eq!(committed("snapshot_arm"), snapshot_bytes(pose.motors(), 1, 250));
}

#[test]
fn small_messages_match_hand_encodings() {
    assert_eq!(committed("snapshot_empty"), snapshot_bytes(&[], 0, 0));
    let mut ack = header(4, 5, 310);
    ack.extend_from_slice(&2u32.to_le_bytes());
    ack.push(1);
    assert_eq!(committed("ack_request"), ack);
    // Two bones, nothing changed: base seq and a one-byte empty mask.
    let mut delta = header(2, 3, 283);
    delta.extend_from_slice(&1u32.to_le_bytes());
    delta.push(0);
    assert_eq!(committed("delta_arm_unchanged"), delta);
}
