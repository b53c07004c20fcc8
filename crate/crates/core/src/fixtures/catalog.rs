use super::{arm, bar, crossing_ropes, hanging_rope, jello, smooth, trefoil, walk, SkeletalFixture};
use crate::cga::{compose, rotor, translator, Vec3};
use crate::codec::file::track_to_toml;
use crate::net::{encode_ack, encode_body, encode_delta, encode_snapshot, SoftRest, WireMessage};
use crate::rope::file::rope_to_toml;
use crate::skinning::file::model_to_toml;
use crate::skinning::PoseSample;
use crate::softbody::file::body_to_toml;

/// A generated fixture file, path relative to the fixture root.
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureFile {
    pub path: String,
    pub description: &'static str,
    pub contents: String,
}

/// Bytes as lowercase hex, 16 bytes per line.
pub fn to_hex(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2 + bytes.len() / 16 + 1);
    for chunk in bytes.chunks(16) {
        out.push_str(&hex::encode(chunk));
        out.push('\n');
    }
    out
}

/// Parses hex text, ignoring whitespace and `#` comments.
pub fn from_hex(text: &str) -> Result<Vec<u8>, hex::FromHexError> {
    let digits: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.chars().filter(|c| !c.is_whitespace()))
        .collect();
    hex::decode(digits)
}

/// Frame of the arm track encoded in the golden snapshot.
pub const GOLDEN_FRAME: usize = 15;

/// The messages behind the `wire/` golden files, by file stem.
pub fn golden_messages() -> Vec<(&'static str, &'static str, WireMessage)> {
    let track = arm().track;
    let a = &track.frames()[GOLDEN_FRAME];
    let b = &track.frames()[GOLDEN_FRAME + 1];
    let mut body = jello();
    let rest = SoftRest::of(&body);
    let motor = compose(&translator(Vec3::new(0.1, 0.0, -0.05)), &rotor(Vec3::y(), 0.3).expect("unit axis"));
    body.transform(&motor, false).expect("rigid motor");
    let p = body.particles()[0].position;
    body.set_position(0, p + Vec3::new(0.0, 0.05, 0.0)).expect("particle 0 exists");
    let msg = |r: Result<WireMessage, crate::net::NetError>| r.expect("fixture encodes");
    vec![
        ("snapshot_empty", "SNAPSHOT of a 0-bone pose", msg(encode_snapshot(&PoseSample::identity(0), 0, 0))),
        ("snapshot_arm", "SNAPSHOT of arm frame 15, seq 1, t 250 ms", msg(encode_snapshot(a, 1, 250))),
        (
            "delta_arm",
            "DELTA arm frame 15 -> 16 on base 1, threshold 1e-4, seq 2, t 267 ms",
            msg(encode_delta(1, a, b, 1e-4, 2, 267)),
        ),
        ("delta_arm_unchanged", "DELTA of an unchanged arm pose on base 1", msg(encode_delta(1, a, a, 1e-4, 3, 283))),
        (
            "softbody_jello",
            "SOFTBODY of the jello moved rigidly with particle 0 pinched, threshold 1e-3",
            msg(encode_body(&body, &rest, 1e-3, 4, 300)),
        ),
        ("ack_request", "ACK of seq 2 requesting a snapshot", encode_ack(5, 310, 2, true)),
    ]
}

fn skeletal(name: &str, f: SkeletalFixture, out: &mut Vec<FixtureFile>) {
    out.push(FixtureFile {
        path: format!("{name}/model.toml"),
        description: "skinned model",
        contents: model_to_toml(&f.model, Some(&f.bone_names)).expect("fixture model serializes"),
    });
    out.push(FixtureFile {
        path: format!("{name}/track.toml"),
        description: "pose track",
        contents: track_to_toml(&f.track).expect("fixture track serializes"),
    });
}

/// Every shipped fixture file.
pub fn catalog() -> Vec<FixtureFile> {
    let mut out = Vec::new();
    skeletal("arm", arm(), &mut out);
    skeletal("smooth", smooth(), &mut out);
    skeletal("walk", walk(), &mut out);
    let body = |path: &str, description, b| FixtureFile {
        path: path.into(),
        description,
        contents: body_to_toml(&b).expect("fixture body serializes"),
    };
    out.push(body("soft/jello.toml", "4x4x4 jello cube above the ground", jello()));
    out.push(body("soft/bar.toml", "12x2x2 bar of overlapping slab-pair clusters", bar()));
    let rope = |path: &str, description, r| FixtureFile {
        path: path.into(),
        description,
        contents: rope_to_toml(&r).expect("fixture rope serializes"),
    };
    let mut hang = hanging_rope();
    hang.set_pinned(0, true).expect("node 0 exists");
    out.push(rope("rope/hanging.toml", "30-node horizontal rope pinned at node 0", hang));
    out.push(rope("rope/trefoil.toml", "pre-threaded open trefoil knot with straight tails", trefoil().rope));
    let (a, b) = crossing_ropes();
    out.push(rope("rope/crossing_a.toml", "crossing rope along x, above", a));
    out.push(rope("rope/crossing_b.toml", "crossing rope along z, below", b));
    for (stem, description, m) in golden_messages() {
        out.push(FixtureFile { path: format!("wire/{stem}.hex"), description, contents: to_hex(&m.to_bytes()) });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trips() {
        let bytes: Vec<u8> = (0..=40).collect();
        let text = to_hex(&bytes);
        assert_eq!(text.lines().count(), 3);
        assert_eq!(from_hex(&format!("# header\n{text}")).unwrap(), bytes);
    }

    #[test]
    fn catalog_paths_are_unique() {
        let files = catalog();
        let mut paths: Vec<_> = files.iter().map(|f| f.path.as_str()).collect();
        paths.sort_unstable();
        paths.dedup();
        assert_eq!(paths.len(), files.len());
    }
}
