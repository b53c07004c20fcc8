//! `run`: executes one scenario and produces its metric files.

use super::drills;
use super::scenario::{
    CodecParams, KnotParams, NetMode, NetParams, Params, RopeDrill, RopeParams, Scenario, SkinParams, SoftDrill,
    SoftParams,
};
use super::sources;
use super::{render_rows, to_json_pretty, write_file, CliError, OutputFormat};
use crate::cga::Vec3;
use crate::codec::{codec_report, reduce_keyframes};
use crate::fixtures::TrefoilFixture;
use crate::net::{bandwidth_report, run_session, LinkConfig, SessionConfig};
use crate::rope::Rope;
use crate::skinning::{skin_model, PoseSample};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;

/// Files produced by a run, plus the summary echoed on stdout.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub summary: Value,
    pub files: Vec<(PathBuf, Vec<u8>)>,
}

impl RunOutput {
    pub fn write(&self) -> Result<(), CliError> {
        for (path, bytes) in &self.files {
            write_file(path, bytes)?;
        }
        Ok(())
    }
}

struct Builder<'a> {
    scenario: &'a Scenario,
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Builder<'_> {
    fn table<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<(), CliError> {
        let f: OutputFormat = self.scenario.format;
        let path = self.scenario.out.join(format!("{name}.{}", f.extension()));
        self.files.push((path, render_rows(rows, f)?));
        Ok(())
    }

    fn finish(mut self, params: Value, results: Value) -> Result<RunOutput, CliError> {
        let summary = json!({
            "kind": self.scenario.params.kind().name(),
            "seed": self.scenario.seed,
            "params": params,
            "results": results,
        });
        self.files.push((self.scenario.out.join("summary.json"), to_json_pretty(&summary)?.into_bytes()));
        Ok(RunOutput { summary, files: self.files })
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Format(format!("json: {e}")))
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be finite and positive, got {v}")))
    }
}

fn nonnegative(name: &str, v: f64) -> Result<f64, CliError> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be finite and >= 0, got {v}")))
    }
}

fn at_least_one(name: &str, v: usize) -> Result<usize, CliError> {
    if v >= 1 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be >= 1")))
    }
}

pub fn run(scenario: &Scenario) -> Result<RunOutput, CliError> {
    let b = Builder { scenario, files: Vec::new() };
    match &scenario.params {
        Params::Skin(p) => skin(b, p),
        Params::Codec(p) => codec(b, p),
        Params::Net(p) => net(b, p, scenario.seed),
        Params::Soft(p) => soft(b, p, scenario.seed),
        Params::Rope(p) => rope(b, p),
        Params::Knot(p) => knot(b, p),
    }
}

#[derive(Serialize)]
struct VertexRow {
    vertex: usize,
    x: f64,
    y: f64,
    z: f64,
    displacement: f64,
}

fn skin(mut b: Builder, p: &SkinParams) -> Result<RunOutput, CliError> {
    let model_arg = p.model.clone().unwrap_or_else(|| "arm".into());
    let pose_arg = p.pose.clone().unwrap_or_else(|| "identity".into());
    let model = sources::model(&model_arg)?;
    let pose =
        if pose_arg == "identity" {
            PoseSample::new(model.binding().offsets().iter().map(|o| o.reverse()).collect())?
        } else if let Some(k) = pose_arg.strip_prefix("frame:") {
            let k: usize = k.parse().map_err(|_| CliError::Config(format!("bad frame index in pose {pose_arg:?}")))?;
            let (track, _) = sources::track(p.track.as_deref().unwrap_or(&model_arg))?;
            track.frames().get(k).cloned().ok_or_else(|| {
                CliError::Config(format!("pose frame {k} out of range ({} frames)", track.frame_count()))
            })?
        } else {
            return Err(CliError::Config(format!("pose must be `identity` or `frame:K`, got {pose_arg:?}")));
        };
    let verts = skin_model(&model, &pose)?;
    let rows: Vec<VertexRow> = verts
        .iter()
        .zip(model.rest())
        .enumerate()
        .map(|(vertex, (v, r))| VertexRow { vertex, x: v.x, y: v.y, z: v.z, displacement: (v - r).norm() })
        .collect();
    let max_displacement = rows.iter().map(|r| r.displacement).fold(0.0, f64::max);
    b.table("vertices", &rows)?;
    b.finish(
        json!({ "model": model_arg, "pose": pose_arg, "track": p.track }),
        json!({ "vertices": verts.len(), "bones": model.bone_count(), "max_displacement": max_displacement }),
    )
}

#[derive(Serialize)]
struct BoneKeysRow {
    bone: usize,
    keys: usize,
    frames: usize,
}

fn codec(mut b: Builder, p: &CodecParams) -> Result<RunOutput, CliError> {
    let track_arg = p.track.clone().unwrap_or_else(|| "walk".into());
    let epsilon = positive("epsilon", p.epsilon.unwrap_or(1e-3))?;
    let (track, sibling) = sources::track(&track_arg)?;
    let model = match &p.model {
        Some(m) => sources::model(m)?,
        None => {
            sibling.ok_or_else(|| CliError::Config(format!("no model next to track {track_arg:?}; pass --model")))?
        }
    };
    let keys = reduce_keyframes(&track, &model, epsilon)?;
    let report = codec_report(&track, &keys, Some(&model))?;
    let rows: Vec<BoneKeysRow> = keys
        .bones()
        .iter()
        .enumerate()
        .map(|(bone, k)| BoneKeysRow { bone, keys: k.len(), frames: track.frame_count() })
        .collect();
    b.table("keys", &rows)?;
    b.finish(json!({ "track": track_arg, "model": p.model, "epsilon": epsilon }), to_value(&report)?)
}

fn net(mut b: Builder, p: &NetParams, seed: u64) -> Result<RunOutput, CliError> {
    let fixture = p.fixture.clone().unwrap_or_else(|| "walk".into());
    let (track, model) = sources::track(&fixture)?;
    let model = model.ok_or_else(|| CliError::Config(format!("fixture {fixture:?} has no model.toml")))?;
    let config = SessionConfig {
        mode: p.mode.unwrap_or(NetMode::Gated).into(),
        ticks: at_least_one("ticks", p.ticks.unwrap_or(600))?,
        snapshot_every: at_least_one("snapshot_every", p.snapshot_every.unwrap_or(30))?,
        delta_threshold: p.delta_threshold.unwrap_or(1e-4),
        gate_epsilon: p.gate_epsilon.unwrap_or(2e-3),
        delay_ms: p.delay_ms,
        link: LinkConfig {
            latency_ms: p.latency_ms.unwrap_or(40.0),
            jitter_ms: p.jitter_ms.unwrap_or(10.0),
            loss_probability: p.loss.unwrap_or(0.0),
            seed,
        },
    };
    let trace = run_session(&track, &model, &config)?;
    let report = bandwidth_report(&trace);
    b.table("ticks", &trace.ticks)?;
    b.finish(json!({ "fixture": fixture, "session": to_value(&config)? }), to_value(&report)?)
}

fn parse_target(v: &Option<Vec<f64>>) -> Result<Vec3, CliError> {
    match v.as_deref() {
        None => Ok(Vec3::new(1.0, 0.5, 0.0)),
        Some([x, y, z]) if [x, y, z].iter().all(|c| c.is_finite()) => Ok(Vec3::new(*x, *y, *z)),
        Some(other) => Err(CliError::Config(format!("target needs three finite numbers, got {other:?}"))),
    }
}

fn soft(mut b: Builder, p: &SoftParams, seed: u64) -> Result<RunOutput, CliError> {
    let drill = p.drill.unwrap_or(SoftDrill::Drop);
    let default_body = if drill == SoftDrill::Tear { "bar" } else { "jello" };
    let body_arg = p.body.clone().unwrap_or_else(|| default_body.into());
    let body = sources::body(&body_arg)?;
    let steps = p.steps.unwrap_or(240);
    let dt = positive("dt", p.dt.unwrap_or(1.0 / 60.0))?;
    let params = |extra: Value| {
        let mut v = json!({ "drill": drill, "body": body_arg, "steps": steps, "dt": dt });
        if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
            m.extend(e);
        }
        v
    };
    match drill {
        SoftDrill::Drop => {
            let threshold = nonnegative("threshold", p.threshold.unwrap_or(1e-2))?;
            let rows = drills::drop_body(body, steps, dt, threshold)?;
            let bytes: usize = rows.iter().map(|r| r.softbody_bytes).sum();
            let raw: usize = rows.iter().map(|r| r.raw_bytes).sum();
            let results = json!({
                "softbody_bytes": bytes,
                "raw_bytes": raw,
                "byte_fraction": if raw == 0 { 0.0 } else { bytes as f64 / raw as f64 },
                "max_sync_error": rows.iter().map(|r| r.sync_error).fold(0.0, f64::max),
                "final_centroid_y": rows.last().map(|r| r.centroid_y),
            });
            b.table("steps", &rows)?;
            b.finish(params(json!({ "threshold": threshold })), results)
        }
        SoftDrill::Perturb => {
            let amplitude = nonnegative("amplitude", p.amplitude.unwrap_or(0.1))?;
            let rows = drills::perturb(body, amplitude, seed, steps, dt)?;
            let settled = rows.iter().find(|r| r.max_goal_distance < 1e-3).map(|r| r.step);
            let results = json!({
                "initial_goal_distance": rows[0].max_goal_distance,
                "final_goal_distance": rows.last().map(|r| r.max_goal_distance),
                "first_step_below_1e-3": settled,
            });
            b.table("steps", &rows)?;
            b.finish(params(json!({ "amplitude": amplitude })), results)
        }
        SoftDrill::Steer => {
            let target = parse_target(&p.target)?;
            let strength = positive("strength", p.strength.unwrap_or(10.0))?;
            let rows = drills::steer(body, target, strength, steps, dt)?;
            let last = rows.last();
            let results = json!({
                "final_distance": last.map(|r| (Vec3::new(r.centroid_x, r.centroid_y, r.centroid_z) - target).norm()),
                "max_deformation_energy": rows.iter().map(|r| r.deformation_energy).fold(0.0, f64::max),
            });
            b.table("steps", &rows)?;
            b.finish(params(json!({ "target": [target.x, target.y, target.z], "strength": strength })), results)
        }
        SoftDrill::Tear => {
            let threshold = p.tear_threshold.unwrap_or(1.5);
            let pull = positive("pull", p.pull.unwrap_or(1.0))?;
            let strength = p.strength.unwrap_or(20.0);
            let (nx, ny, nz) =
                (crate::fixtures::BAR_DIMS[0], crate::fixtures::BAR_DIMS[1], crate::fixtures::BAR_DIMS[2]);
            if body.particle_count() != nx * ny * nz {
                return Err(CliError::Config("tear drill needs the 12x2x2 bar layout".into()));
            }
            let (left, right) = (crate::fixtures::bar_slab(0), crate::fixtures::bar_slab(nx - 1));
            let (rows, end) = drills::stretch_bar(body, &left, &right, pull, [5.0, strength], threshold, steps, dt)?;
            let results = json!({
                "pieces": end.pieces(),
                "clusters": end.clusters().len(),
                "first_split_step": rows.iter().find(|r| r.pieces > 1).map(|r| r.step),
            });
            b.table("steps", &rows)?;
            b.finish(params(json!({ "tear_threshold": threshold, "pull": pull, "strength": strength })), results)
        }
    }
}

fn rope(mut b: Builder, p: &RopeParams) -> Result<RunOutput, CliError> {
    let drill = p.drill.unwrap_or(RopeDrill::Hang);
    let dt = positive("dt", p.dt.unwrap_or(1.0 / 120.0))?;
    let steps = p.steps.unwrap_or(if drill == RopeDrill::Hang { 600 } else { 240 });
    match drill {
        RopeDrill::Hang => {
            let rope_arg = p.rope.clone().unwrap_or_else(|| "hanging".into());
            let rows = drills::hang(sources::rope(&rope_arg)?, steps, dt)?;
            let results = json!({
                "final_max_strain": rows.last().map(|r| r.max_strain),
                "final_sway": rows.last().map(|r| r.sway),
            });
            b.table("steps", &rows)?;
            b.finish(json!({ "drill": drill, "rope": rope_arg, "steps": steps, "dt": dt }), results)
        }
        RopeDrill::Suture => {
            let body_arg = p.body.clone().unwrap_or_else(|| "jello".into());
            let particle = p.particle.unwrap_or(0);
            let compliance = nonnegative("compliance", p.compliance.unwrap_or(0.0))?;
            let distance = nonnegative("distance", p.distance.unwrap_or(0.3))?;
            let rows = drills::suture(sources::body(&body_arg)?, particle, 20, 0.05, compliance, distance, steps, dt)?;
            let results = json!({
                "max_separation": rows.iter().map(|r| r.separation).fold(0.0, f64::max),
                "final_particle_displacement": rows.last().map(|r| r.particle_displacement),
            });
            b.table("steps", &rows)?;
            b.finish(
                json!({
                    "drill": drill, "body": body_arg, "particle": particle, "compliance": compliance,
                    "distance": distance, "steps": steps, "dt": dt,
                }),
                results,
            )
        }
        RopeDrill::Cross => {
            let upper_arg = p.rope.clone().unwrap_or_else(|| "crossing_a".into());
            let lower_arg = p.other.clone().unwrap_or_else(|| "crossing_b".into());
            let depth = nonnegative("depth", p.depth.unwrap_or(0.05))?;
            let (upper, lower) = (sources::rope(&upper_arg)?, sources::rope(&lower_arg)?);
            let contact = upper.radius() + lower.radius();
            let rows = drills::cross(upper, lower, depth, steps, dt)?;
            let results = json!({
                "min_separation": rows.iter().map(|r| r.separation).fold(f64::INFINITY, f64::min),
                "contact_distance": contact,
            });
            b.table("steps", &rows)?;
            b.finish(
                json!({ "drill": drill, "rope": upper_arg, "other": lower_arg, "depth": depth, "steps": steps, "dt": dt }),
                results,
            )
        }
    }
}

/// Tail directions of an open knot: outward along its first and last
/// segments.
fn knot_fixture(rope: Rope) -> Result<TrefoilFixture, CliError> {
    let n = rope.nodes();
    if n.len() < 3 {
        return Err(CliError::Config("knot rope needs at least 3 nodes".into()));
    }
    let out = |a: Vec3, b: Vec3| {
        (a - b).try_normalize(1e-12).ok_or_else(|| CliError::Config("knot rope has a zero-length end segment".into()))
    };
    let pull = [out(n[0].position, n[1].position)?, out(n[n.len() - 1].position, n[n.len() - 2].position)?];
    Ok(TrefoilFixture { rope, pull })
}

fn knot(mut b: Builder, p: &KnotParams) -> Result<RunOutput, CliError> {
    let rope_arg = p.rope.clone().unwrap_or_else(|| "trefoil".into());
    let steps = p.steps.unwrap_or(1000);
    let dt = positive("dt", p.dt.unwrap_or(1.0 / 120.0))?;
    let speed = nonnegative("speed", p.speed.unwrap_or(0.1))?;
    let ramp_s = nonnegative("ramp_s", p.ramp_s.unwrap_or(5.0))?;
    let fixture = knot_fixture(sources::rope(&rope_arg)?)?;
    let run = drills::pull_knot(fixture, steps, dt, speed, ramp_s)?;
    let results = json!({
        "pass": run.monitor.pass(),
        "worst": to_value(&run.monitor.worst)?,
        "max_strain": run.rows.iter().map(|r| r.max_strain).fold(0.0, f64::max),
        "final_end_gap": run.rows.last().map(|r| r.end_gap),
    });
    b.table("steps", &run.rows)?;
    b.finish(json!({ "rope": rope_arg, "steps": steps, "dt": dt, "speed": speed, "ramp_s": ramp_s }), results)
}
