use cgamotion_ffi::*;
use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::ptr;

fn fixture(rel: &str) -> CString {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel);
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    let p = cgm_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn basis(i: usize) -> [f64; 32] {
    let mut m = [0.0; 32];
    m[i] = 1.0;
    m
}

#[test]
fn products_follow_the_metric() {
    let mut out = [0.0; 32];
    unsafe {
        // e- squares to -1, e+ to +1, and e1 e2 = -e2 e1.
        assert_eq!(cgm_geometric_product(basis(16).as_ptr(), basis(16).as_ptr(), out.as_mut_ptr()), CgmStatus::Ok);
        assert_eq!(out, {
            let mut s = [0.0; 32];
            s[0] = -1.0;
            s
        });
        cgm_geometric_product(basis(8).as_ptr(), basis(8).as_ptr(), out.as_mut_ptr());
        assert_eq!(out[0], 1.0);
        cgm_geometric_product(basis(2).as_ptr(), basis(1).as_ptr(), out.as_mut_ptr());
        assert_eq!(out[3], -1.0);
    }
    assert!(cgm_last_error_message().is_null());
}

#[test]
fn motors_move_points() {
    let half = std::f64::consts::FRAC_1_SQRT_2;
    // Quarter turn about z, then shift by x.
    let q = [half, 0.0, 0.0, half];
    let t = [1.0, 0.0, 0.0];
    let (mut m, mut p, mut moved, mut back) = ([0.0; 32], [0.0; 32], [0.0; 32], [0.0; 3]);
    let mut kind = CgmVersorKind::Point;
    unsafe {
        assert_eq!(cgm_motor(q.as_ptr(), t.as_ptr(), m.as_mut_ptr()), CgmStatus::Ok);
        assert_eq!(cgm_classify_versor(m.as_ptr(), &mut kind), CgmStatus::Ok);
        assert_eq!(cgm_up([1.0, 0.0, 0.0].as_ptr(), p.as_mut_ptr()), CgmStatus::Ok);
        assert_eq!(cgm_apply_versor(m.as_ptr(), p.as_ptr(), moved.as_mut_ptr()), CgmStatus::Ok);
        assert_eq!(cgm_down(moved.as_ptr(), back.as_mut_ptr()), CgmStatus::Ok);
    }
    assert_eq!(kind, CgmVersorKind::Motor);
    for (got, want) in back.iter().zip([1.0, 1.0, 0.0]) {
        assert!((got - want).abs() < 1e-12, "{back:?}");
    }
}

#[test]
fn interpolated_translators_stay_translators() {
    let id = [1.0, 0.0, 0.0, 0.0];
    let (mut a, mut b, mut mid) = ([0.0; 32], [0.0; 32], [0.0; 32]);
    let mut kind = CgmVersorKind::Point;
    unsafe {
        cgm_motor(id.as_ptr(), [0.0, 4.0, 0.0].as_ptr(), a.as_mut_ptr());
        cgm_motor(id.as_ptr(), [2.0, 0.0, 0.0].as_ptr(), b.as_mut_ptr());
        assert_eq!(cgm_interpolate_versor(a.as_ptr(), b.as_ptr(), 0.5, mid.as_mut_ptr()), CgmStatus::Ok);
        assert_eq!(cgm_classify_versor(mid.as_ptr(), &mut kind), CgmStatus::Ok);
    }
    assert_eq!(kind, CgmVersorKind::Translator);
}

#[test]
fn errors_set_status_and_message() {
    let mut out = [0.0; 32];
    unsafe {
        assert_eq!(cgm_geometric_product(ptr::null(), basis(0).as_ptr(), out.as_mut_ptr()), CgmStatus::NullPointer);
        assert!(last_error().contains("null"));
        // A null vector has no Euclidean pre-image.
        let mut e = [0.0; 32];
        e[8] = 1.0;
        e[16] = 1.0;
        let mut p = [0.0; 3];
        assert_eq!(cgm_down(e.as_ptr(), p.as_mut_ptr()), CgmStatus::Algebra);
        assert!(!last_error().is_empty());
        let mut model = ptr::null_mut();
        let missing = CString::new("/nonexistent/model.toml").unwrap();
        assert_eq!(cgm_model_load(missing.as_ptr(), &mut model), CgmStatus::Io);
        assert!(model.is_null());
        assert!(last_error().contains("nonexistent"));
        cgm_model_free(ptr::null_mut());
    }
}

#[test]
fn skin_track_frames_and_round_trip_the_wire() {
    unsafe {
        let (mut model, mut track) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(cgm_model_load(fixture("arm/model.toml").as_ptr(), &mut model), CgmStatus::Ok);
        assert_eq!(cgm_track_load(fixture("arm/track.toml").as_ptr(), &mut track), CgmStatus::Ok);
        let bones = cgm_model_bone_count(model);
        assert_eq!(bones, cgm_track_bone_count(track));
        let verts = cgm_model_vertex_count(model);
        let mut pose = vec![0.0; bones * 32];
        assert_eq!(cgm_track_frame(track, 15, pose.as_mut_ptr(), pose.len()), CgmStatus::Ok);
        let mut skinned = vec![0.0; verts * 3];
        assert_eq!(cgm_skin(model, pose.as_ptr(), bones, skinned.as_mut_ptr(), skinned.len()), CgmStatus::Ok);
        assert_eq!(
            cgm_skin(model, pose.as_ptr(), bones, skinned.as_mut_ptr(), skinned.len() - 1),
            CgmStatus::BufferTooSmall
        );

        let mut written = 0;
        assert_eq!(
            cgm_encode_snapshot(pose.as_ptr(), bones, 1, 250, ptr::null_mut(), 0, &mut written),
            CgmStatus::BufferTooSmall
        );
        let mut bytes = vec![0u8; written];
        assert_eq!(
            cgm_encode_snapshot(pose.as_ptr(), bones, 1, 250, bytes.as_mut_ptr(), bytes.len(), &mut written),
            CgmStatus::Ok
        );
        let hex: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
        let golden =
            std::fs::read_to_string(PathBuf::from(fixture("wire/snapshot_arm.hex").to_str().unwrap())).unwrap();
        assert_eq!(hex, golden.split_whitespace().collect::<String>());

        let mut decoded = vec![0.0; bones * 32];
        let mut n = 0;
        assert_eq!(
            cgm_decode_snapshot(bytes.as_ptr(), bytes.len(), decoded.as_mut_ptr(), decoded.len(), &mut n),
            CgmStatus::Ok
        );
        assert_eq!(n, bones);
        let mut again = vec![0.0; verts * 3];
        assert_eq!(cgm_skin(model, decoded.as_ptr(), bones, again.as_mut_ptr(), again.len()), CgmStatus::Ok);
        let worst = skinned.iter().zip(&again).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-2, "{worst}");

        let mut keys = ptr::null_mut();
        assert_eq!(cgm_keys_reduce(track, model, 1e-3, &mut keys), CgmStatus::Ok);
        assert!(cgm_keys_count(keys) <= bones * cgm_track_frame_count(track));
        let mut sampled = vec![0.0; bones * 32];
        assert_eq!(cgm_keys_sample(keys, 15, sampled.as_mut_ptr(), sampled.len()), CgmStatus::Ok);
        assert_eq!(cgm_keys_sample(keys, 100_000, sampled.as_mut_ptr(), sampled.len()), CgmStatus::Codec);

        cgm_keys_free(keys);
        cgm_track_free(track);
        cgm_model_free(model);
    }
}

#[test]
fn soft_body_steers_rigidly() {
    unsafe {
        let mut body = ptr::null_mut();
        assert_eq!(cgm_body_load(fixture("soft/jello.toml").as_ptr(), &mut body), CgmStatus::Ok);
        let n = cgm_body_particle_count(body);
        assert_eq!(n, 64);
        let target = [0.5, 1.0, 0.0];
        assert_eq!(cgm_body_set_center_target(body, target.as_ptr(), 10.0), CgmStatus::Ok);
        for _ in 0..120 {
            assert_eq!(cgm_body_step(body, 1.0 / 60.0, [0.0; 3].as_ptr()), CgmStatus::Ok);
        }
        let mut energy = 1.0;
        assert_eq!(cgm_body_deformation_energy(body, &mut energy), CgmStatus::Ok);
        assert!(energy <= 1e-9, "{energy}");
        let mut pos = vec![0.0; n * 3];
        assert_eq!(cgm_body_positions(body, pos.as_mut_ptr(), pos.len()), CgmStatus::Ok);
        let mean_y = pos.chunks(3).map(|p| p[1]).sum::<f64>() / n as f64;
        assert!((mean_y - 1.0).abs() < 1e-2, "{mean_y}");
        assert_eq!(cgm_body_step(body, -1.0, [0.0; 3].as_ptr()), CgmStatus::Softbody);
        cgm_body_free(body);
    }
}

#[test]
fn rope_hangs_and_reports_distances() {
    unsafe {
        let mut rope = ptr::null_mut();
        assert_eq!(
            cgm_rope_straight([0.0, 2.0, 0.0].as_ptr(), [1.0, 0.0, 0.0].as_ptr(), 20, 0.1, 0.01, &mut rope),
            CgmStatus::Ok
        );
        assert_eq!(cgm_rope_node_count(rope), 20);
        assert_eq!(cgm_rope_set_pinned(rope, 0, true), CgmStatus::Ok);
        assert_eq!(cgm_rope_set_pinned(rope, 99, true), CgmStatus::Rope);
        for _ in 0..240 {
            assert_eq!(cgm_rope_step(rope, 1.0 / 120.0, [0.0, -9.81, 0.0].as_ptr()), CgmStatus::Ok);
        }
        let mut pos = vec![0.0; 60];
        assert_eq!(cgm_rope_positions(rope, pos.as_mut_ptr(), pos.len()), CgmStatus::Ok);
        assert_eq!(&pos[..3], &[0.0, 2.0, 0.0]);
        // The free end has dropped.
        assert!(pos[19 * 3 + 1] < 2.0);
        let (mut strain, mut dist) = (1.0, 0.0);
        assert_eq!(cgm_rope_max_strain(rope, &mut strain), CgmStatus::Ok);
        assert!(strain < 0.05, "{strain}");
        assert_eq!(cgm_rope_min_segment_distance(rope, &mut dist), CgmStatus::Ok);
        assert!(dist >= 0.01, "{dist}");
        cgm_rope_free(rope);
    }
}

#[test]
fn c_program_links_against_the_header() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // Tests run from target/<profile>/deps, next to the freshly built archive.
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let lib = [deps.join("libcgamotion_ffi.a"), deps.join("../libcgamotion_ffi.a")]
        .into_iter()
        .find(|p| p.exists())
        .expect("static library is built alongside the tests");
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = std::process::Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .expect("C compiler runs");
    assert!(status.success());
    let out = std::process::Command::new(&exe).arg(manifest.join("../../fixtures")).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.starts_with("ok "), "{stdout}");
}
