//! C ABI over the cgamotion engine.
//!
//! Every fallible function returns a [`CgmStatus`]. On failure the message is
//! kept per thread and read back with [`cgm_last_error_message`]. Objects are
//! opaque handles released with the matching `*_free`. Multivectors cross the
//! boundary as 32 doubles indexed by blade bitmask over e1, e2, e3, e+, e-;
//! Euclidean points as 3 doubles.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use cgamotion::cga::{self, Multivector, Vec3, BLADES};
use cgamotion::cli::CliError;
use cgamotion::codec::file::load_track;
use cgamotion::codec::{reconstruct, reduce_keyframes, KeyframeTrack, PoseTrack};
use cgamotion::net::wire::decode_snapshot;
use cgamotion::net::{encode_snapshot, WireMessage};
use cgamotion::rope::file::load_rope;
use cgamotion::rope::{knot_integrity_check, Rope};
use cgamotion::skinning::file::load_model;
use cgamotion::skinning::{skin_model, PoseSample, SkinnedModel};
use cgamotion::softbody::file::load_body;
use cgamotion::softbody::ParticleBody;
use nalgebra::{Quaternion, UnitQuaternion};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

/// Number of coefficients in a multivector.
pub const CGM_BLADES: usize = 32;

/// Result of every fallible call. Engine codes match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgmStatus {
    Ok = 0,
    Config = 3,
    Io = 4,
    Format = 5,
    Algebra = 10,
    Skinning = 11,
    Codec = 12,
    Net = 13,
    Softbody = 14,
    Rope = 15,
    NullPointer = 20,
    InvalidArgument = 21,
    BufferTooSmall = 22,
    Panic = 23,
}

/// Versor classes reported by [`cgm_classify_versor`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgmVersorKind {
    Point = 0,
    Translator = 1,
    Rotor = 2,
    Dilator = 3,
    Motor = 4,
}

impl From<cga::VersorKind> for CgmVersorKind {
    fn from(k: cga::VersorKind) -> Self {
        match k {
            cga::VersorKind::Point => Self::Point,
            cga::VersorKind::Translator => Self::Translator,
            cga::VersorKind::Rotor => Self::Rotor,
            cga::VersorKind::Dilator => Self::Dilator,
            cga::VersorKind::Motor => Self::Motor,
        }
    }
}

/// Skinned model handle.
pub struct CgmModel(SkinnedModel);
/// Pose track handle.
pub struct CgmTrack(PoseTrack);
/// Reduced keyframe track handle.
pub struct CgmKeys(KeyframeTrack);
/// Soft body handle.
pub struct CgmBody(ParticleBody);
/// Rope handle.
pub struct CgmRope(Rope);

struct Failure {
    status: CgmStatus,
    message: String,
}

impl Failure {
    fn new(status: CgmStatus, message: impl Into<String>) -> Self {
        Self { status, message: message.into() }
    }
}

impl<E: Into<CliError>> From<E> for Failure {
    fn from(e: E) -> Self {
        let e = e.into();
        let status = match e.exit_code() {
            3 => CgmStatus::Config,
            4 => CgmStatus::Io,
            10 => CgmStatus::Algebra,
            11 => CgmStatus::Skinning,
            12 => CgmStatus::Codec,
            13 => CgmStatus::Net,
            14 => CgmStatus::Softbody,
            15 => CgmStatus::Rope,
            _ => CgmStatus::Format,
        };
        Self { status, message: e.to_string() }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, turning errors and panics into a status plus the thread's last
/// error message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CgmStatus {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|panic| {
        let text = panic
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| panic.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        Err(Failure::new(CgmStatus::Panic, format!("panic: {text}")))
    });
    match outcome {
        Ok(()) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CgmStatus::Ok
        }
        Err(f) => {
            set_last_error(&f.message);
            f.status
        }
    }
}

fn null() -> Failure {
    Failure::new(CgmStatus::NullPointer, "null pointer argument")
}

unsafe fn slice<'a, T>(ptr: *const T, len: usize) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn slice_mut<'a, T>(ptr: *mut T, len: usize) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

unsafe fn get<'a, T>(ptr: *const T) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(null)
}

unsafe fn get_mut<'a, T>(ptr: *mut T) -> Result<&'a mut T, Failure> {
    ptr.as_mut().ok_or_else(null)
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, Failure> {
    if p.is_null() {
        return Err(null());
    }
    let s =
        CStr::from_ptr(p).to_str().map_err(|_| Failure::new(CgmStatus::InvalidArgument, "path is not valid UTF-8"))?;
    Ok(Path::new(s))
}

unsafe fn multivector(p: *const f64) -> Result<Multivector, Failure> {
    let s = slice(p, BLADES)?;
    Multivector::from_slice(s)
        .ok_or_else(|| Failure::new(CgmStatus::InvalidArgument, "multivector needs 32 coefficients"))
}

unsafe fn write_multivector(out: *mut f64, m: &Multivector) -> Result<(), Failure> {
    slice_mut(out, BLADES)?.copy_from_slice(m.coeffs());
    Ok(())
}

unsafe fn vec3(p: *const f64) -> Result<Vec3, Failure> {
    let s = slice(p, 3)?;
    Ok(Vec3::new(s[0], s[1], s[2]))
}

unsafe fn pose(motors: *const f64, bones: usize) -> Result<PoseSample, Failure> {
    let s = slice(motors, bones * BLADES)?;
    let motors = s.chunks_exact(BLADES).map(|c| Multivector::from_slice(c).expect("chunk of 32")).collect();
    Ok(PoseSample::new(motors)?)
}

unsafe fn write_pose(out: *mut f64, capacity: usize, pose: &PoseSample) -> Result<(), Failure> {
    let need = pose.bone_count() * BLADES;
    if capacity < need {
        return Err(Failure::new(CgmStatus::BufferTooSmall, format!("need {need} doubles, got {capacity}")));
    }
    let out = slice_mut(out, need)?;
    for (chunk, m) in out.chunks_exact_mut(BLADES).zip(pose.motors()) {
        chunk.copy_from_slice(m.coeffs());
    }
    Ok(())
}

unsafe fn write_points(out: *mut f64, capacity: usize, points: &[Vec3]) -> Result<(), Failure> {
    let need = points.len() * 3;
    if capacity < need {
        return Err(Failure::new(CgmStatus::BufferTooSmall, format!("need {need} doubles, got {capacity}")));
    }
    let out = slice_mut(out, need)?;
    for (chunk, p) in out.chunks_exact_mut(3).zip(points) {
        chunk.copy_from_slice(p.as_slice());
    }
    Ok(())
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cgm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cgm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `out = a b`.
///
/// # Safety
/// `a`, `b` and `out` point to 32 doubles each.
#[no_mangle]
pub unsafe extern "C" fn cgm_geometric_product(a: *const f64, b: *const f64, out: *mut f64) -> CgmStatus {
    guard(|| {
        let m = multivector(a)?.geometric_product(&multivector(b)?);
        write_multivector(out, &m)
    })
}

/// Conformal embedding of a Euclidean point.
///
/// # Safety
/// `point` points to 3 doubles, `out` to 32.
#[no_mangle]
pub unsafe extern "C" fn cgm_up(point: *const f64, out: *mut f64) -> CgmStatus {
    guard(|| write_multivector(out, &cga::up(vec3(point)?)))
}

/// Euclidean point of a conformal point.
///
/// # Safety
/// `c` points to 32 doubles, `out` to 3.
#[no_mangle]
pub unsafe extern "C" fn cgm_down(c: *const f64, out: *mut f64) -> CgmStatus {
    guard(|| {
        let p = cga::down(&multivector(c)?)?;
        write_points(out, 3, &[p])
    })
}

/// Motor that rotates by the unit quaternion `(w, x, y, z)` and then
/// translates by `t`.
///
/// # Safety
/// `quaternion` points to 4 doubles, `translation` to 3, `out` to 32.
#[no_mangle]
pub unsafe extern "C" fn cgm_motor(quaternion: *const f64, translation: *const f64, out: *mut f64) -> CgmStatus {
    guard(|| {
        let q = slice(quaternion, 4)?;
        let raw = Quaternion::new(q[0], q[1], q[2], q[3]);
        if !(raw.norm() > 0.0) || !raw.norm().is_finite() {
            return Err(Failure::new(CgmStatus::InvalidArgument, "quaternion must be finite and nonzero"));
        }
        let r = cga::rotor_from_quaternion(&UnitQuaternion::from_quaternion(raw));
        write_multivector(out, &(cga::translator(vec3(translation)?) * r))
    })
}

/// `out = v x ~v`.
///
/// # Safety
/// `versor`, `x` and `out` point to 32 doubles each.
#[no_mangle]
pub unsafe extern "C" fn cgm_apply_versor(versor: *const f64, x: *const f64, out: *mut f64) -> CgmStatus {
    guard(|| write_multivector(out, &cga::apply_versor(&multivector(versor)?, &multivector(x)?)?))
}

/// Blend of two versors of the same kind at `t` in [0, 1]; the result keeps
/// the kind.
///
/// # Safety
/// `a`, `b` and `out` point to 32 doubles each.
#[no_mangle]
pub unsafe extern "C" fn cgm_interpolate_versor(a: *const f64, b: *const f64, t: f64, out: *mut f64) -> CgmStatus {
    guard(|| write_multivector(out, &cga::interpolate_versor(&multivector(a)?, &multivector(b)?, t)?))
}

/// # Safety
/// `m` points to 32 doubles; `kind` is writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_classify_versor(m: *const f64, kind: *mut CgmVersorKind) -> CgmStatus {
    guard(|| put(kind, cga::classify_versor(&multivector(m)?)?.into()))
}

/// Loads a model file.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_model_load(path: *const c_char, out: *mut *mut CgmModel) -> CgmStatus {
    guard(|| {
        let model = load_model(path_arg(path)?)?;
        put(out, boxed(CgmModel(model)))
    })
}

/// # Safety
/// `model` is NULL or a handle from [`cgm_model_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cgm_model_free(model: *mut CgmModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Vertex count, or 0 for NULL.
///
/// # Safety
/// `model` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cgm_model_vertex_count(model: *const CgmModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.vertex_count())
}

/// Bone count, or 0 for NULL.
///
/// # Safety
/// `model` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cgm_model_bone_count(model: *const CgmModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.bone_count())
}

/// Skins the model in a pose of `bones` model-space motors (32 doubles
/// each) and writes 3 doubles per vertex.
///
/// # Safety
/// `motors` holds `bones * 32` doubles; `out` has room for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn cgm_skin(
    model: *const CgmModel,
    motors: *const f64,
    bones: usize,
    out: *mut f64,
    capacity: usize,
) -> CgmStatus {
    guard(|| {
        let model = &get(model)?.0;
        let skinned = skin_model(model, &pose(motors, bones)?)?;
        write_points(out, capacity, &skinned)
    })
}

/// Loads a track file.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_track_load(path: *const c_char, out: *mut *mut CgmTrack) -> CgmStatus {
    guard(|| {
        let track = load_track(path_arg(path)?)?;
        put(out, boxed(CgmTrack(track)))
    })
}

/// # Safety
/// `track` is NULL or a handle from [`cgm_track_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cgm_track_free(track: *mut CgmTrack) {
    if !track.is_null() {
        drop(Box::from_raw(track));
    }
}

/// Frame count, or 0 for NULL.
///
/// # Safety
/// `track` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cgm_track_frame_count(track: *const CgmTrack) -> usize {
    track.as_ref().map_or(0, |t| t.0.frame_count())
}

/// Bone count, or 0 for NULL.
///
/// # Safety
/// `track` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cgm_track_bone_count(track: *const CgmTrack) -> usize {
    track.as_ref().map_or(0, |t| t.0.bone_count())
}

/// Copies frame `frame` as `bones * 32` doubles.
///
/// # Safety
/// `out` has room for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn cgm_track_frame(
    track: *const CgmTrack,
    frame: usize,
    out: *mut f64,
    capacity: usize,
) -> CgmStatus {
    guard(|| {
        let track = &get(track)?.0;
        let pose = track.frames().get(frame).ok_or_else(|| {
            Failure::new(CgmStatus::InvalidArgument, format!("frame {frame} of {}", track.frame_count()))
        })?;
        write_pose(out, capacity, pose)
    })
}

/// Reduces a track to keyframes with max skinned-vertex error `epsilon`.
///
/// # Safety
/// `track` and `model` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_keys_reduce(
    track: *const CgmTrack,
    model: *const CgmModel,
    epsilon: f64,
    out: *mut *mut CgmKeys,
) -> CgmStatus {
    guard(|| {
        let keys = reduce_keyframes(&get(track)?.0, &get(model)?.0, epsilon)?;
        put(out, boxed(CgmKeys(keys)))
    })
}

/// # Safety
/// `keys` is NULL or a handle from [`cgm_keys_reduce`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cgm_keys_free(keys: *mut CgmKeys) {
    if !keys.is_null() {
        drop(Box::from_raw(keys));
    }
}

/// Total keys over all bones, or 0 for NULL.
///
/// # Safety
/// `keys` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cgm_keys_count(keys: *const CgmKeys) -> usize {
    keys.as_ref().map_or(0, |k| k.0.key_count())
}

/// Reconstructed pose at source frame `frame`.
///
/// # Safety
/// `out` has room for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn cgm_keys_sample(
    keys: *const CgmKeys,
    frame: usize,
    out: *mut f64,
    capacity: usize,
) -> CgmStatus {
    guard(|| {
        let pose = reconstruct(&get(keys)?.0, frame)?;
        write_pose(out, capacity, &pose)
    })
}

/// Encodes a pose as a SNAPSHOT message. `written` receives the message
/// length; when `capacity` is too small nothing is copied and the status is
/// `BufferTooSmall` with `written` set to the required length.
///
/// # Safety
/// `motors` holds `bones * 32` doubles; `out` has room for `capacity` bytes.
#[no_mangle]
pub unsafe extern "C" fn cgm_encode_snapshot(
    motors: *const f64,
    bones: usize,
    seq: u32,
    timestamp_ms: u32,
    out: *mut u8,
    capacity: usize,
    written: *mut usize,
) -> CgmStatus {
    guard(|| {
        let bytes = encode_snapshot(&pose(motors, bones)?, seq, timestamp_ms)?.to_bytes();
        put(written, bytes.len())?;
        if capacity < bytes.len() {
            return Err(Failure::new(CgmStatus::BufferTooSmall, format!("need {} bytes, got {capacity}", bytes.len())));
        }
        slice_mut(out, bytes.len())?.copy_from_slice(&bytes);
        Ok(())
    })
}

/// Decodes a SNAPSHOT message into `bones * 32` doubles; `bones` receives
/// the bone count.
///
/// # Safety
/// `bytes` holds `len` bytes; `out` has room for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn cgm_decode_snapshot(
    bytes: *const u8,
    len: usize,
    out: *mut f64,
    capacity: usize,
    bones: *mut usize,
) -> CgmStatus {
    guard(|| {
        let msg = WireMessage::from_bytes(slice(bytes, len)?)?;
        let pose = decode_snapshot(&msg)?;
        put(bones, pose.bone_count())?;
        write_pose(out, capacity, &pose)
    })
}

/// Loads a soft-body file.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_body_load(path: *const c_char, out: *mut *mut CgmBody) -> CgmStatus {
    guard(|| {
        let body = load_body(path_arg(path)?)?;
        put(out, boxed(CgmBody(body)))
    })
}

/// # Safety
/// `body` is NULL or a handle from [`cgm_body_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cgm_body_free(body: *mut CgmBody) {
    if !body.is_null() {
        drop(Box::from_raw(body));
    }
}

/// Particle count, or 0 for NULL.
///
/// # Safety
/// `body` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cgm_body_particle_count(body: *const CgmBody) -> usize {
    body.as_ref().map_or(0, |b| b.0.particle_count())
}

/// One step of `dt` seconds under `gravity`.
///
/// # Safety
/// `gravity` points to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn cgm_body_step(body: *mut CgmBody, dt: f64, gravity: *const f64) -> CgmStatus {
    guard(|| {
        let g = vec3(gravity)?;
        Ok(get_mut(body)?.0.step(dt, g)?)
    })
}

/// Drives the body centre toward `target` with servo `strength` (1/s).
///
/// # Safety
/// `target` points to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn cgm_body_set_center_target(
    body: *mut CgmBody,
    target: *const f64,
    strength: f64,
) -> CgmStatus {
    guard(|| {
        let t = vec3(target)?;
        Ok(get_mut(body)?.0.set_center_target(t, strength)?)
    })
}

/// Writes 3 doubles per particle.
///
/// # Safety
/// `out` has room for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn cgm_body_positions(body: *const CgmBody, out: *mut f64, capacity: usize) -> CgmStatus {
    guard(|| write_points(out, capacity, &get(body)?.0.positions()))
}

/// `½ Σ m |goal - x|²` at the current positions.
///
/// # Safety
/// `energy` is writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_body_deformation_energy(body: *const CgmBody, energy: *mut f64) -> CgmStatus {
    guard(|| {
        let e = get(body)?.0.deformation_energy()?;
        put(energy, e)
    })
}

/// Loads a rope file.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_rope_load(path: *const c_char, out: *mut *mut CgmRope) -> CgmStatus {
    guard(|| {
        let rope = load_rope(path_arg(path)?)?;
        put(out, boxed(CgmRope(rope)))
    })
}

/// Straight rope of `nodes` nodes from `start` along `direction`.
///
/// # Safety
/// `start` and `direction` point to 3 doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_rope_straight(
    start: *const f64,
    direction: *const f64,
    nodes: usize,
    rest_length: f64,
    radius: f64,
    out: *mut *mut CgmRope,
) -> CgmStatus {
    guard(|| {
        let (s, d) = (vec3(start)?, vec3(direction)?);
        if !(d.norm() > 0.0) {
            return Err(Failure::new(CgmStatus::InvalidArgument, "direction must be nonzero"));
        }
        put(out, boxed(CgmRope(Rope::straight(s, d, nodes, rest_length, radius)?)))
    })
}

/// # Safety
/// `rope` is NULL or a handle from a `cgm_rope_*` constructor not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cgm_rope_free(rope: *mut CgmRope) {
    if !rope.is_null() {
        drop(Box::from_raw(rope));
    }
}

/// Node count, or 0 for NULL.
///
/// # Safety
/// `rope` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cgm_rope_node_count(rope: *const CgmRope) -> usize {
    rope.as_ref().map_or(0, |r| r.0.node_count())
}

/// # Safety
/// `rope` is a live handle.
#[no_mangle]
pub unsafe extern "C" fn cgm_rope_set_pinned(rope: *mut CgmRope, node: usize, pinned: bool) -> CgmStatus {
    guard(|| Ok(get_mut(rope)?.0.set_pinned(node, pinned)?))
}

/// Moves a pinned node to `position` over the next step.
///
/// # Safety
/// `position` points to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn cgm_rope_drive(rope: *mut CgmRope, node: usize, position: *const f64) -> CgmStatus {
    guard(|| {
        let p = vec3(position)?;
        Ok(get_mut(rope)?.0.drive(node, p)?)
    })
}

/// One step of `dt` seconds under `gravity`, no obstacles.
///
/// # Safety
/// `gravity` points to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn cgm_rope_step(rope: *mut CgmRope, dt: f64, gravity: *const f64) -> CgmStatus {
    guard(|| {
        let g = vec3(gravity)?;
        Ok(get_mut(rope)?.0.step(dt, g, &[], None)?)
    })
}

/// Writes 3 doubles per node.
///
/// # Safety
/// `out` has room for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn cgm_rope_positions(rope: *const CgmRope, out: *mut f64, capacity: usize) -> CgmStatus {
    guard(|| write_points(out, capacity, &get(rope)?.0.positions()))
}

/// Largest relative segment stretch.
///
/// # Safety
/// `strain` is writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_rope_max_strain(rope: *const CgmRope, strain: *mut f64) -> CgmStatus {
    guard(|| {
        let s = get(rope)?.0.max_strain();
        put(strain, s)
    })
}

/// Closest approach of non-adjacent segments; infinity when the rope is too
/// short to have such a pair.
///
/// # Safety
/// `distance` is writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_rope_min_segment_distance(rope: *const CgmRope, distance: *mut f64) -> CgmStatus {
    guard(|| {
        let d = knot_integrity_check(&get(rope)?.0).min_distance.unwrap_or(f64::INFINITY);
        put(distance, d)
    })
}
