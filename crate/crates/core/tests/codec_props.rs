mod common;

use cgamotion::codec::file::load_track;
use cgamotion::codec::{reconstruct, reduce_keyframes, PoseTrack};
use cgamotion::fixtures;
use cgamotion::skinning::file::load_model;
use cgamotion::skinning::{skin_model, SkinnedModel};
use common::*;
use proptest::prelude::*;

fn vertex_error(track: &PoseTrack, model: &SkinnedModel, eps: f64) -> (usize, f64) {
    let keys = reduce_keyframes(track, model, eps).unwrap();
    let mut worst = 0.0f64;
    for k in 0..track.frame_count() {
        let want = skin_model(model, &track.frames()[k]).unwrap();
        let got = skin_model(model, &reconstruct(&keys, k).unwrap()).unwrap();
        worst = worst.max(max_distance(&got, &want));
    }
    (keys.key_count(), worst)
}

#[test]
fn shipped_smooth_fixture_meets_the_budget() {
    let track = load_track(&fixture_path("smooth/track.toml")).unwrap();
    let model = load_model(&fixture_path("smooth/model.toml")).unwrap();
    let keys = reduce_keyframes(&track, &model, 1e-3).unwrap();
    let (_, err) = vertex_error(&track, &model, 1e-3);
    assert!(err <= 1e-3, "max vertex error {err}");
    for bone in keys.bones() {
        assert!(bone.len() * 2 <= track.frame_count(), "{} keys of {}", bone.len(), track.frame_count());
    }
}

#[test]
fn endpoints_are_exact() {
    let f = fixtures::arm();
    let keys = reduce_keyframes(&f.track, &f.model, 1e-2).unwrap();
    let last = f.track.frame_count() - 1;
    for k in [0, last] {
        assert_eq!(reconstruct(&keys, k).unwrap().motors(), f.track.frames()[k].motors());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn error_stays_within_epsilon(log_eps in -4.0..-1.0f64, which in 0usize..2) {
        let f = if which == 0 { fixtures::arm() } else { fixtures::smooth() };
        let eps = 10f64.powf(log_eps);
        let (_, err) = vertex_error(&f.track, &f.model, eps);
        prop_assert!(err <= eps, "error {err} > {eps}");
    }

    #[test]
    fn smaller_epsilon_never_drops_keys(a in -4.0..-1.0f64, b in -4.0..-1.0f64) {
        let f = fixtures::arm();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let fine = reduce_keyframes(&f.track, &f.model, 10f64.powf(lo)).unwrap();
        let coarse = reduce_keyframes(&f.track, &f.model, 10f64.powf(hi)).unwrap();
        prop_assert!(fine.key_count() >= coarse.key_count());
    }

    #[test]
    fn reduction_is_deterministic(log_eps in -4.0..-1.0f64) {
        let f = fixtures::smooth();
        let eps = 10f64.powf(log_eps);
        prop_assert_eq!(
            reduce_keyframes(&f.track, &f.model, eps).unwrap(),
            reduce_keyframes(&f.track, &f.model, eps).unwrap()
        );
    }
}

#[test]
fn walk_fixture_stays_within_epsilon() {
    let f = fixtures::walk();
    let (keys, err) = vertex_error(&f.track, &f.model, 1e-3);
    assert!(err <= 1e-3, "error {err}");
    assert!(keys < f.track.frame_count() * f.track.bone_count());
}
