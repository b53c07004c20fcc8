//! Self-checks run by `cgamotion verify <suite>`.
//!
//! Each check compares one measured number against a fixed limit. Suites are
//! deterministic apart from their runtime checks.

use super::{drills, CliError};
use crate::cga::{
    apply_versor, classify_versor, dilator, down, interpolate_as, pattern_residual, rotor_from_quaternion, translator,
    up, Multivector, Vec3, VersorKind, BLADES,
};
use crate::codec::{codec_report, reduce_keyframes};
use crate::fixtures;
use crate::net::wire::{decode_snapshot, motor_components, parse_snapshot, BASELINE_BONE_BYTES, MOTOR_LEN};
use crate::net::{bandwidth_report, encode_snapshot, link_transmit, run_session, LinkConfig, SessionConfig, SyncMode};
use crate::oracle::{blade_product, matrix_lbs, random_isometry, random_rotation, random_vector};
use crate::rope::Rope;
use crate::skinning::{skin_model, Influence, PoseSample, SkinBinding, SkinnedModel};
use nalgebra::Isometry3;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;

pub const SUITES: [&str; 5] = ["algebra", "skinning", "codec", "net", "physics"];

/// Seed shared by every randomized check.
pub const VERIFY_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Le,
    Lt,
    Ge,
    Eq,
}

impl Relation {
    fn holds(self, measured: f64, limit: f64) -> bool {
        match self {
            Relation::Le => measured <= limit,
            Relation::Lt => measured < limit,
            Relation::Ge => measured >= limit,
            Relation::Eq => measured == limit,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Ge => ">=",
            Relation::Eq => "==",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub relation: Relation,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    pub fn line(&self) -> String {
        format!(
            "{} {}/{}: {:.6e} {} {:.6e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.measured,
            self.relation.symbol(),
            self.limit
        )
    }
}

struct Suite {
    name: &'static str,
    checks: Vec<Check>,
    started: Instant,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self { name, checks: Vec::new(), started: Instant::now() }
    }

    fn check(&mut self, name: impl Into<String>, measured: f64, relation: Relation, limit: f64) {
        let pass = relation.holds(measured, limit);
        self.checks.push(Check { suite: self.name, name: name.into(), measured, relation, limit, pass });
    }

    fn finish(mut self, budget_s: Option<f64>) -> Vec<Check> {
        if let Some(b) = budget_s {
            let elapsed = self.started.elapsed().as_secs_f64();
            self.check("runtime_s", elapsed, Relation::Lt, b);
        }
        self.checks
    }
}

/// Runs one suite by name, or every suite for `"all"`.
pub fn run_suite(name: &str) -> Result<Vec<Check>, CliError> {
    match name {
        "algebra" => algebra(),
        "skinning" => skinning(),
        "codec" => codec(),
        "net" => net(),
        "physics" => physics(),
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(run_suite(s)?);
            }
            Ok(out)
        }
        other => Err(CliError::UnknownSuite(other.to_string())),
    }
}

/// `ChecksFailed` when any check failed.
pub fn outcome(checks: &[Check]) -> Result<(), CliError> {
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::ChecksFailed { failed, total: checks.len() })
    }
}

fn motor_of(iso: &Isometry3<f64>) -> Multivector {
    translator(iso.translation.vector) * rotor_from_quaternion(&iso.rotation)
}

/// Random unit versor of the given kind.
pub fn random_versor(rng: &mut ChaCha8Rng, kind: VersorKind) -> Result<Multivector, CliError> {
    Ok(match kind {
        VersorKind::Point => up(random_vector(rng, 5.0)),
        VersorKind::Translator => translator(random_vector(rng, 5.0)),
        VersorKind::Rotor => rotor_from_quaternion(&random_rotation(rng)),
        VersorKind::Dilator => dilator(rng.random_range(-1.0f64..1.0).exp())?,
        VersorKind::Motor => motor_of(&random_isometry(rng, 5.0)),
    })
}

fn algebra() -> Result<Vec<Check>, CliError> {
    let mut s = Suite::new("algebra");
    let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED);

    let mut mismatches = 0;
    for a in 0..BLADES {
        for b in 0..BLADES {
            let (sign, blade) = blade_product(a, b);
            let mut expected = Multivector::ZERO;
            expected[blade] = sign;
            if Multivector::basis(a) * Multivector::basis(b) != expected {
                mismatches += 1;
            }
        }
    }
    s.check("cayley_table_mismatches", mismatches as f64, Relation::Eq, 0.0);

    let kinds = [VersorKind::Translator, VersorKind::Rotor, VersorKind::Dilator, VersorKind::Motor];
    let (mut cone, mut round_trip) = (0.0f64, 0.0f64);
    for i in 0..10_000 {
        let v = random_versor(&mut rng, kinds[i % kinds.len()])?;
        let p = random_vector(&mut rng, 10.0);
        let x = (v * up(p)) * v.reverse();
        // x^2 is the scalar x.x for a grade-1 x; any other part is also a defect.
        let sq = x * x;
        cone = cone.max(sq.max_abs() / x.max_abs().powi(2).max(1.0));
        round_trip = round_trip.max((down(&up(p))? - p).norm() / p.norm().max(1.0));
    }
    s.check("null_cone_residual", cone, Relation::Le, 1e-9);
    s.check("up_down_round_trip", round_trip, Relation::Le, 1e-12);

    let ts = [0.0, 0.25, 0.5, 0.75, 1.0];
    for kind in kinds {
        let (mut wrong, mut mass) = (0, 0.0f64);
        for _ in 0..1000 {
            let a = random_versor(&mut rng, kind)?;
            let b = random_versor(&mut rng, kind)?;
            for t in ts {
                let m = interpolate_as(&a, &b, t, kind)?;
                if classify_versor(&m).ok() != Some(kind) {
                    wrong += 1;
                }
                mass = mass.max(pattern_residual(&m, kind));
            }
        }
        let label = format!("{kind:?}").to_lowercase();
        s.check(format!("interpolation_{label}_misclassified"), wrong as f64, Relation::Eq, 0.0);
        s.check(format!("interpolation_{label}_off_pattern"), mass, Relation::Le, 1e-6);
    }
    Ok(s.finish(Some(10.0)))
}

/// Random forest with vertices carrying one to four weighted influences.
pub struct RandomRig {
    pub model: SkinnedModel,
    pub bind: Vec<Isometry3<f64>>,
    pub weights: Vec<Vec<(usize, f64)>>,
}

pub fn random_rig(rng: &mut ChaCha8Rng, vertices: usize, bones: usize) -> Result<RandomRig, CliError> {
    let bind: Vec<_> = (0..bones).map(|_| random_isometry(rng, 2.0)).collect();
    let parents = (0..bones).map(|b| if b == 0 { None } else { Some(rng.random_range(0..b)) }).collect();
    let mut rest = Vec::with_capacity(vertices);
    let mut weights = Vec::with_capacity(vertices);
    for _ in 0..vertices {
        rest.push(random_vector(rng, 2.0));
        let n = rng.random_range(1..=bones.min(4));
        let mut picked: Vec<usize> = (0..bones).collect();
        for i in 0..n {
            let j = rng.random_range(i..bones);
            picked.swap(i, j);
        }
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        weights.push(picked[..n].iter().zip(&raw).map(|(&b, &w)| (b, w / total)).collect::<Vec<_>>());
    }
    let influences =
        weights.iter().map(|w| w.iter().map(|&(bone, weight)| Influence { bone, weight }).collect()).collect();
    let offsets = bind.iter().map(|b| motor_of(b).reverse()).collect();
    let model = SkinnedModel::new(rest, SkinBinding::new(influences, offsets)?, parents, Vec::new())?;
    Ok(RandomRig { model, bind, weights })
}

fn max_distance(a: &[Vec3], b: &[Vec3]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}

fn skinning() -> Result<Vec<Check>, CliError> {
    let mut s = Suite::new("skinning");
    let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED);
    let rig = random_rig(&mut rng, 200, 4)?;
    let mut worst = 0.0f64;
    for _ in 0..60 {
        let pose: Vec<_> = (0..4).map(|_| random_isometry(&mut rng, 3.0)).collect();
        let motors = PoseSample::new(pose.iter().map(motor_of).collect())?;
        let got = skin_model(&rig.model, &motors)?;
        let want = matrix_lbs(rig.model.rest(), &rig.weights, &rig.bind, &pose);
        worst = worst.max(max_distance(&got, &want));
    }
    s.check("lbs_max_deviation", worst, Relation::Le, 1e-6);
    let bind_pose = PoseSample::new(rig.bind.iter().map(motor_of).collect())?;
    let at_bind = skin_model(&rig.model, &bind_pose)?;
    s.check("bind_pose_deviation", max_distance(&at_bind, rig.model.rest()), Relation::Le, 1e-9);
    Ok(s.finish(Some(5.0)))
}

fn codec() -> Result<Vec<Check>, CliError> {
    let mut s = Suite::new("codec");
    let smooth = fixtures::smooth();
    let keys = reduce_keyframes(&smooth.track, &smooth.model, 1e-3)?;
    let report = codec_report(&smooth.track, &keys, Some(&smooth.model))?;
    s.check("smooth_max_vertex_error", report.max_vertex_error.unwrap_or(f64::INFINITY), Relation::Le, 1e-3);
    let frames = smooth.track.frame_count() as f64;
    let densest = keys.bones().iter().map(Vec::len).max().unwrap_or(0);
    s.check("smooth_key_fraction", densest as f64 / frames, Relation::Le, 0.5);

    let epsilons = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
    let mut counts = Vec::new();
    for eps in epsilons {
        counts.push(reduce_keyframes(&smooth.track, &smooth.model, eps)?.key_count());
    }
    let drops = counts.windows(2).filter(|w| w[1] < w[0]).count();
    s.check("key_count_decreases_with_epsilon", drops as f64, Relation::Eq, 0.0);

    let walk = fixtures::walk();
    let keys = reduce_keyframes(&walk.track, &walk.model, 1e-3)?;
    let report = codec_report(&walk.track, &keys, Some(&walk.model))?;
    s.check("walk_compression_ratio", report.compression_ratio, Relation::Ge, 2.0);
    Ok(s.finish(None))
}

pub fn walk_session(mode: SyncMode, loss: f64, seed: u64) -> SessionConfig {
    SessionConfig {
        mode,
        ticks: 600,
        snapshot_every: 30,
        delta_threshold: 1e-4,
        gate_epsilon: 2e-3,
        delay_ms: None,
        link: LinkConfig { latency_ms: 40.0, jitter_ms: 10.0, loss_probability: loss, seed },
    }
}

fn net() -> Result<Vec<Check>, CliError> {
    let mut s = Suite::new("net");
    let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED);
    s.check("snapshot_payload_ratio", BASELINE_BONE_BYTES as f64 / MOTOR_LEN as f64, Relation::Eq, 4.0);

    let walk = fixtures::walk();
    let only = bandwidth_report(&run_session(&walk.track, &walk.model, &walk_session(SyncMode::SnapshotOnly, 0.0, 7))?);
    s.check("snapshot_only_motor_payload_ratio", only.motor_payload_ratio, Relation::Eq, 4.0);

    let probes = [Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::z()];
    let (mut raw_err, mut probe_err, mut unit) = (0.0f64, 0.0f64, 0.0f64);
    for seq in 0..625 {
        let motors: Vec<_> = (0..16).map(|_| motor_of(&random_isometry(&mut rng, 5.0))).collect();
        let pose = PoseSample::new(motors)?;
        let msg = encode_snapshot(&pose, seq, seq * 16)?;
        let payload = parse_snapshot(&msg)?;
        let decoded = decode_snapshot(&msg)?;
        let steps = [payload.scales.rotor as f64, payload.scales.translation as f64];
        for ((m, q), d) in pose.motors().iter().zip(&payload.motors).zip(decoded.motors()) {
            let want = motor_components(m).map_err(|r| CliError::Format(format!("sample is not a motor ({r})")))?;
            let raw = q.dequantize(&payload.scales);
            for k in 0..8 {
                raw_err = raw_err.max((raw[k] - want[k]).abs() / steps[k / 4]);
            }
            for p in probes {
                let a = down(&apply_versor(m, &up(p))?)?;
                let b = down(&apply_versor(d, &up(p))?)?;
                probe_err = probe_err.max((a - b).norm());
            }
            let n = d * &d.reverse();
            unit = unit.max(n.mass_outside(|i| i == 0) + (n.scalar_part() - 1.0).abs());
        }
    }
    s.check("quantized_error_in_steps", raw_err, Relation::Le, 0.5);
    s.check("decoded_probe_displacement", probe_err, Relation::Le, 1e-2);
    s.check("decoded_unit_defect", unit, Relation::Le, 1e-6);

    let gated = bandwidth_report(&run_session(&walk.track, &walk.model, &walk_session(SyncMode::Gated, 0.1, 7))?);
    s.check("gated_wire_ratio", gated.wire_ratio, Relation::Ge, 4.0);
    s.check("gated_rendered_error", gated.error_max, Relation::Le, 5e-2);
    let mean = |k: &str| gated.per_kind.get(k).map_or(0.0, |st| st.bytes as f64 / st.sent.max(1) as f64);
    s.check("mean_delta_over_snapshot", mean("delta") / mean("snapshot"), Relation::Lt, 1.0 / 3.0);

    let n = 10_000;
    let p = 0.1;
    let config = LinkConfig { latency_ms: 40.0, jitter_ms: 10.0, loss_probability: p, seed: VERIFY_SEED };
    let sends: Vec<f64> = (0..n).map(|i| i as f64 * 1000.0 / 60.0).collect();
    let trace = link_transmit(&config, &sends)?;
    let sigma = (n as f64 * p * (1.0 - p)).sqrt();
    let z = (trace.dropped.len() as f64 - n as f64 * p).abs() / sigma;
    s.check("link_loss_z_score", z, Relation::Le, 3.0);
    let spread =
        trace.delivered.iter().map(|d| (d.deliver_ms - d.send_ms - config.latency_ms).abs()).fold(0.0, f64::max);
    s.check("link_jitter_bound_ms", spread, Relation::Le, config.jitter_ms);
    Ok(s.finish(Some(30.0)))
}

fn physics() -> Result<Vec<Check>, CliError> {
    let mut s = Suite::new("physics");
    let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED);

    let mut invariance = 0.0f64;
    for _ in 0..100 {
        let mut body = fixtures::jello();
        body.transform(&motor_of(&random_isometry(&mut rng, 3.0)), false)?;
        invariance = invariance.max(body.goal_corrections()?.iter().map(|c| c.norm()).fold(0.0, f64::max));
    }
    s.check("rigid_motion_corrections", invariance, Relation::Le, 1e-9);

    let rows = drills::perturb(fixtures::cube(0.5, 0.5), 0.05, VERIFY_SEED, 200, 1.0 / 60.0)?;
    s.check("perturbation_after_200_steps", rows[200].max_goal_distance, Relation::Lt, 1e-3);

    let target = Vec3::new(1.0, 0.5, 0.0);
    let rows = drills::steer(fixtures::cube(1.0, 0.0), target, 10.0, 240, 1.0 / 60.0)?;
    let energy = rows.iter().map(|r| r.deformation_energy).fold(0.0, f64::max);
    s.check("center_handle_deformation_energy", energy, Relation::Le, 1e-9);
    let last = rows.last().expect("steps > 0");
    let miss = (Vec3::new(last.centroid_x, last.centroid_y, last.centroid_z) - target).norm();
    s.check("center_handle_final_distance", miss, Relation::Le, 1e-3);

    let rows = drills::drop_body(fixtures::jello(), 240, 1.0 / 60.0, 1e-2)?;
    let sent: usize = rows.iter().map(|r| r.softbody_bytes).sum();
    let raw: usize = rows.iter().map(|r| r.raw_bytes).sum();
    s.check("jello_stream_fraction", sent as f64 / raw as f64, Relation::Le, 0.25);

    let nx = fixtures::BAR_DIMS[0];
    let (_, bar) = drills::stretch_bar(
        fixtures::bar(),
        &fixtures::bar_slab(0),
        &fixtures::bar_slab(nx - 1),
        1.0,
        [5.0, 20.0],
        1.5,
        240,
        1.0 / 60.0,
    )?;
    s.check("bar_tear_pieces", bar.pieces().len() as f64, Relation::Eq, 2.0);

    let rows = drills::hang(fixtures::hanging_rope(), 600, 1.0 / 120.0)?;
    s.check("hanging_rope_strain", rows.last().map_or(f64::INFINITY, |r| r.max_strain), Relation::Le, 0.01);

    let knot = fixtures::trefoil();
    let radius = knot.rope.radius();
    let run = drills::pull_knot(knot, 1000, 1.0 / 120.0, 0.1, 5.0)?;
    let worst = run.monitor.worst.and_then(|w| w.min_distance).unwrap_or(f64::INFINITY);
    s.check("trefoil_min_segment_distance", worst, Relation::Ge, radius);

    let rows = drills::suture(fixtures::jello(), 0, 20, 0.05, 0.0, 0.3, 240, 1.0 / 120.0)?;
    s.check("suture_separation", rows.iter().map(|r| r.separation).fold(0.0, f64::max), Relation::Le, 1e-3);

    let (a, b): (Rope, Rope) = fixtures::crossing_ropes();
    let contact = a.radius() + b.radius();
    let rows = drills::cross(a, b, 0.05, 240, 1.0 / 120.0)?;
    let closest = rows.iter().map(|r| r.separation).fold(f64::INFINITY, f64::min);
    s.check("crossing_separation", closest, Relation::Ge, contact * (1.0 - 1e-6));
    Ok(s.finish(None))
}
