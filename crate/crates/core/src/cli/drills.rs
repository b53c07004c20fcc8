//! Fixed simulation procedures shared by `run`, `verify` and the tests.

use super::CliError;
use crate::cga::Vec3;
use crate::fixtures::TrefoilFixture;
use crate::net::{decode_softbody, encode_body, SoftRest};
use crate::rope::{closest_points, AttachTarget, KnotMonitor, KnotReport, Rope, RopeError, SutureScene};
use crate::softbody::ParticleBody;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const GRAVITY: Vec3 = Vec3::new(0.0, -9.81, 0.0);

/// Displacement that ramps linearly at `speed` for `ramp_s` seconds, then
/// holds.
fn ramp(step: usize, dt: f64, speed: f64, ramp_s: f64) -> f64 {
    speed * ((step + 1) as f64 * dt).min(ramp_s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HangRow {
    pub step: usize,
    pub time_s: f64,
    pub max_strain: f64,
    pub tip_x: f64,
    pub tip_y: f64,
    pub tip_z: f64,
    /// Largest horizontal distance of any node from the pin.
    pub sway: f64,
}

/// Steps a rope pinned at node 0 under gravity.
pub fn hang(mut rope: Rope, steps: usize, dt: f64) -> Result<Vec<HangRow>, CliError> {
    rope.set_pinned(0, true)?;
    let pin = rope.nodes()[0].position;
    let mut rows = Vec::with_capacity(steps);
    for step in 0..steps {
        rope.step(dt, GRAVITY, &[], None)?;
        let tip = rope.nodes()[rope.node_count() - 1].position;
        let sway = rope
            .nodes()
            .iter()
            .map(|n| {
                let d = n.position - pin;
                d.x.hypot(d.z)
            })
            .fold(0.0, f64::max);
        rows.push(HangRow {
            step,
            time_s: (step + 1) as f64 * dt,
            max_strain: rope.max_strain(),
            tip_x: tip.x,
            tip_y: tip.y,
            tip_z: tip.z,
            sway,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KnotRow {
    pub step: usize,
    pub time_s: f64,
    pub min_distance: Option<f64>,
    pub segment_a: Option<usize>,
    pub segment_b: Option<usize>,
    pub max_strain: f64,
    pub end_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnotRun {
    pub rows: Vec<KnotRow>,
    pub monitor: KnotMonitor,
    #[serde(skip)]
    pub final_rope: Rope,
}

/// Pins both ends of the knot and drives them apart along the tail
/// directions at `speed` for `ramp_s` seconds, then holds, without gravity.
pub fn pull_knot(fixture: TrefoilFixture, steps: usize, dt: f64, speed: f64, ramp_s: f64) -> Result<KnotRun, CliError> {
    let mut rope = fixture.rope;
    let last = rope.node_count() - 1;
    rope.set_pinned(0, true)?;
    rope.set_pinned(last, true)?;
    let (a0, b0) = (rope.nodes()[0].position, rope.nodes()[last].position);
    let mut monitor = KnotMonitor::default();
    let mut rows = Vec::with_capacity(steps);
    for step in 0..steps {
        let d = ramp(step, dt, speed, ramp_s);
        rope.drive(0, a0 + fixture.pull[0] * d)?;
        rope.drive(last, b0 + fixture.pull[1] * d)?;
        rope.step(dt, Vec3::zeros(), &[], None)?;
        let KnotReport { min_distance, closest_pair, .. } = monitor.observe(&rope);
        rows.push(KnotRow {
            step,
            time_s: (step + 1) as f64 * dt,
            min_distance,
            segment_a: closest_pair.map(|p| p.0),
            segment_b: closest_pair.map(|p| p.1),
            max_strain: rope.max_strain(),
            end_gap: (rope.nodes()[0].position - rope.nodes()[last].position).norm(),
        });
    }
    Ok(KnotRun { rows, monitor, final_rope: rope })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SutureRow {
    pub step: usize,
    pub time_s: f64,
    pub separation: f64,
    pub particle_displacement: f64,
    pub body_centroid_x: f64,
    pub body_centroid_y: f64,
    pub body_centroid_z: f64,
    pub rope_max_strain: f64,
}

/// Ties node 0 of a straight rope to body particle `particle` (compliance
/// `compliance`), pins the far end and drives it `distance` further away
/// along the rope over one second. Gravity is off.
pub fn suture(
    body: ParticleBody,
    particle: usize,
    nodes: usize,
    spacing: f64,
    compliance: f64,
    distance: f64,
    steps: usize,
    dt: f64,
) -> Result<Vec<SutureRow>, CliError> {
    let p0 = body
        .particles()
        .get(particle)
        .ok_or(RopeError::IndexOutOfRange { index: particle, count: body.particle_count() })?
        .position;
    let away = (p0 - body.centroid()).try_normalize(1e-12).unwrap_or_else(|| -Vec3::x());
    let rope = Rope::straight(p0, away, nodes, spacing, 0.01)?;
    let far = nodes - 1;
    let mut scene = SutureScene::new(vec![rope], Some(body), Vec3::zeros());
    let id = scene.tie_attachment(0, 0, AttachTarget::Particle(particle), compliance)?;
    scene.ropes[0].set_pinned(far, true)?;
    let e0 = scene.ropes[0].nodes()[far].position;
    let mut rows = Vec::with_capacity(steps);
    for step in 0..steps {
        scene.ropes[0].drive(far, e0 + away * ramp(step, dt, distance, 1.0))?;
        scene.step(dt)?;
        let body = scene.body.as_ref().expect("scene has a body");
        let c = body.centroid();
        rows.push(SutureRow {
            step,
            time_s: (step + 1) as f64 * dt,
            separation: scene.separation(id).expect("attachment exists"),
            particle_displacement: (body.particles()[particle].position - p0).norm(),
            body_centroid_x: c.x,
            body_centroid_y: c.y,
            body_centroid_z: c.z,
            rope_max_strain: scene.ropes[0].max_strain(),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingRow {
    pub step: usize,
    pub time_s: f64,
    /// Smallest distance between any segment of one rope and any of the other.
    pub separation: f64,
    pub upper_mid_y: f64,
    pub lower_mid_y: f64,
}

fn rope_separation(a: &Rope, b: &Rope) -> f64 {
    let (na, nb) = (a.nodes(), b.nodes());
    let mut best = f64::INFINITY;
    for i in 0..a.segment_count() {
        for j in 0..b.segment_count() {
            let (_, _, p, q) = closest_points(na[i].position, na[i + 1].position, nb[j].position, nb[j + 1].position);
            best = best.min((p - q).norm());
        }
    }
    best
}

/// Pins all four ends and drives the upper rope's ends down by `depth` over
/// one second, forcing it through the lower rope. Gravity is off.
pub fn cross(upper: Rope, lower: Rope, depth: f64, steps: usize, dt: f64) -> Result<Vec<CrossingRow>, CliError> {
    let mut ropes = vec![upper, lower];
    for r in &mut ropes {
        let last = r.node_count() - 1;
        r.set_pinned(0, true)?;
        r.set_pinned(last, true)?;
    }
    let last = ropes[0].node_count() - 1;
    let (s0, s1) = (ropes[0].nodes()[0].position, ropes[0].nodes()[last].position);
    let mut scene = SutureScene::new(ropes, None, Vec3::zeros());
    let mut rows = Vec::with_capacity(steps);
    for step in 0..steps {
        let down = Vec3::new(0.0, -ramp(step, dt, depth, 1.0), 0.0);
        scene.ropes[0].drive(0, s0 + down)?;
        scene.ropes[0].drive(last, s1 + down)?;
        scene.step(dt)?;
        let (a, b) = (&scene.ropes[0], &scene.ropes[1]);
        rows.push(CrossingRow {
            step,
            time_s: (step + 1) as f64 * dt,
            separation: rope_separation(a, b),
            upper_mid_y: a.nodes()[a.node_count() / 2].position.y,
            lower_mid_y: b.nodes()[b.node_count() / 2].position.y,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SoftRow {
    pub step: usize,
    pub time_s: f64,
    pub centroid_x: f64,
    pub centroid_y: f64,
    pub centroid_z: f64,
    pub kinetic_energy: f64,
    pub deformation_energy: f64,
    /// Largest distance from a particle to its shape-matching goal.
    pub max_goal_distance: f64,
    pub softbody_bytes: usize,
    pub raw_bytes: usize,
    pub residuals: usize,
    /// Largest receiver-side position error after decoding.
    pub sync_error: f64,
}

impl SoftRow {
    fn measure(step: usize, dt: f64, body: &ParticleBody, sync: Option<(&SoftRest, f64)>) -> Result<Self, CliError> {
        let c = body.centroid();
        let corr = body.goal_corrections()?;
        let (mut softbody_bytes, mut residuals, mut sync_error) = (0, 0, 0.0f64);
        if let Some((rest, threshold)) = sync {
            let msg = encode_body(body, rest, threshold, step as u32, (step as f64 * dt * 1000.0) as u32)?;
            softbody_bytes = msg.wire_len();
            let frame = decode_softbody(&msg)?;
            residuals = frame.residuals.len();
            let got = rest.reconstruct(&frame)?;
            sync_error = body.particles().iter().zip(&got).map(|(p, q)| (p.position - q).norm()).fold(0.0, f64::max);
        }
        Ok(Self {
            step,
            time_s: (step + 1) as f64 * dt,
            centroid_x: c.x,
            centroid_y: c.y,
            centroid_z: c.z,
            kinetic_energy: body.kinetic_energy(),
            deformation_energy: corr.iter().zip(body.particles()).map(|(d, p)| 0.5 * p.mass * d.norm_squared()).sum(),
            max_goal_distance: corr.iter().map(|d| d.norm()).fold(0.0, f64::max),
            softbody_bytes,
            raw_bytes: 12 * body.particle_count(),
            residuals,
            sync_error,
        })
    }
}

/// Drops a body under gravity and streams it each step as SOFTBODY messages
/// with residual threshold `threshold`.
pub fn drop_body(mut body: ParticleBody, steps: usize, dt: f64, threshold: f64) -> Result<Vec<SoftRow>, CliError> {
    let rest = SoftRest::of(&body);
    let mut rows = Vec::with_capacity(steps);
    for step in 0..steps {
        body.step(dt, GRAVITY)?;
        rows.push(SoftRow::measure(step, dt, &body, Some((&rest, threshold)))?);
    }
    Ok(rows)
}

/// Displaces every particle by a seeded uniform offset in
/// `[-amplitude, amplitude]³` and lets the body recover without gravity.
pub fn perturb(
    mut body: ParticleBody,
    amplitude: f64,
    seed: u64,
    steps: usize,
    dt: f64,
) -> Result<Vec<SoftRow>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..body.particle_count() {
        let p = body.particles()[i].position;
        let d = Vec3::from_fn(|_, _| rng.random_range(-amplitude..=amplitude));
        body.set_position(i, p + d)?;
    }
    let mut rows = vec![SoftRow::measure(0, 0.0, &body, None)?];
    rows[0].time_s = 0.0;
    for step in 1..=steps {
        body.step(dt, Vec3::zeros())?;
        let mut row = SoftRow::measure(step, dt, &body, None)?;
        row.time_s = step as f64 * dt;
        rows.push(row);
    }
    Ok(rows)
}

/// Drives a free body's centre to `target` with the centre handle, without
/// gravity.
pub fn steer(
    mut body: ParticleBody,
    target: Vec3,
    strength: f64,
    steps: usize,
    dt: f64,
) -> Result<Vec<SoftRow>, CliError> {
    body.set_center_target(target, strength)?;
    let mut rows = Vec::with_capacity(steps);
    for step in 0..steps {
        body.step(dt, Vec3::zeros())?;
        rows.push(SoftRow::measure(step, dt, &body, None)?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TearRow {
    pub step: usize,
    pub time_s: f64,
    pub clusters: usize,
    pub pieces: usize,
    pub detached: usize,
    pub length: f64,
}

/// Grabs the two end slabs of a bar and pulls them apart, tearing with
/// `threshold` after every step.
pub fn stretch_bar(
    mut body: ParticleBody,
    left: &[usize],
    right: &[usize],
    pull: f64,
    strength: [f64; 2],
    threshold: f64,
    steps: usize,
    dt: f64,
) -> Result<(Vec<TearRow>, ParticleBody), CliError> {
    for (side, dir, k) in [(left, -1.0, strength[0]), (right, 1.0, strength[1])] {
        for &i in side {
            let p = body.particles()[i].position;
            body.grab_particle(i, p + Vec3::new(dir * pull, 0.0, 0.0), k)?;
        }
    }
    let mut rows = Vec::with_capacity(steps);
    let mut detached = 0;
    for step in 0..steps {
        body.step(dt, Vec3::zeros())?;
        detached += body.tear(threshold)?.detached.len();
        let xs = body.particles().iter().map(|p| p.position.x);
        let length = xs.clone().fold(f64::NEG_INFINITY, f64::max) - xs.fold(f64::INFINITY, f64::min);
        rows.push(TearRow {
            step,
            time_s: (step + 1) as f64 * dt,
            clusters: body.clusters().len(),
            pieces: body.pieces().len(),
            detached,
            length,
        });
    }
    Ok((rows, body))
}
