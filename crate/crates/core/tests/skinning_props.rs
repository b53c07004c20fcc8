mod common;

use cgamotion::cga::{apply_versor, down, up, Vec3};
use cgamotion::skinning::{skin_model, Influence, PoseSample, SkinBinding, SkinError, SkinnedModel};
use common::*;
use nalgebra::{Matrix4, UnitQuaternion};
use proptest::prelude::*;

type Rigid = (UnitQuaternion<f64>, Vec3);

#[derive(Debug, Clone)]
struct Case {
    bind: Vec<Rigid>,
    pose: Vec<Rigid>,
    rest: Vec<Vec3>,
    weights: Vec<Vec<(usize, f64)>>,
}

fn arb_case() -> impl Strategy<Value = Case> {
    (1usize..=4).prop_flat_map(|bones| {
        let vertex = (arb_vec3(2.0), prop::collection::vec((0..bones, 0.05..1.0f64), 1..=4));
        (
            prop::collection::vec(arb_motor(2.0), bones),
            prop::collection::vec(arb_motor(3.0), bones),
            prop::collection::vec(vertex, 1..40),
        )
            .prop_map(|(bind, pose, verts)| {
                let (rest, raw): (Vec<_>, Vec<_>) = verts.into_iter().unzip();
                let weights = raw
                    .into_iter()
                    .map(|w: Vec<(usize, f64)>| {
                        let total: f64 = w.iter().map(|p| p.1).sum();
                        w.into_iter().map(|(b, x)| (b, x / total)).collect()
                    })
                    .collect();
                Case { bind, pose, rest, weights }
            })
    })
}

fn model(c: &Case) -> SkinnedModel {
    let influences =
        c.weights.iter().map(|w| w.iter().map(|&(bone, weight)| Influence { bone, weight }).collect()).collect();
    let offsets = c.bind.iter().map(|(q, t)| motor(q, *t).reverse()).collect();
    let parents = vec![None; c.bind.len()];
    SkinnedModel::new(c.rest.clone(), SkinBinding::new(influences, offsets).unwrap(), parents, vec![]).unwrap()
}

fn pose(motors: &[Rigid]) -> PoseSample {
    PoseSample::new(motors.iter().map(|(q, t)| motor(q, *t)).collect()).unwrap()
}

fn matrices(motors: &[Rigid]) -> Vec<Matrix4<f64>> {
    motors.iter().map(|(q, t)| homogeneous(q, *t, 1.0)).collect()
}

proptest! {
    #[test]
    fn matches_matrix_lbs(c in arb_case()) {
        let got = skin_model(&model(&c), &pose(&c.pose)).unwrap();
        let want = lbs(&c.rest, &c.weights, &matrices(&c.bind), &matrices(&c.pose));
        prop_assert!(max_distance(&got, &want) <= 1e-6);
    }

    #[test]
    fn bind_pose_reproduces_rest(c in arb_case()) {
        let got = skin_model(&model(&c), &pose(&c.bind)).unwrap();
        prop_assert!(max_distance(&got, &c.rest) <= 1e-9);
    }

    #[test]
    fn global_motion_is_equivariant(c in arb_case(), (q, t) in arb_motor(4.0)) {
        let m = model(&c);
        let v = motor(&q, t);
        let base = skin_model(&m, &pose(&c.pose)).unwrap();
        let moved = skin_model(&m, &pose(&c.pose).premultiplied(&v)).unwrap();
        let want: Vec<Vec3> = base.iter().map(|p| down(&apply_versor(&v, &up(*p)).unwrap()).unwrap()).collect();
        prop_assert!(max_distance(&moved, &want) <= 1e-9);
    }

    #[test]
    fn weight_sums_are_enforced(w in 0.0..1.0f64, drift in prop_oneof![-1e-3..-2e-6, 2e-6..1e-3]) {
        let offsets = vec![cgamotion::cga::Multivector::ONE; 2];
        let ok = vec![vec![Influence { bone: 0, weight: w }, Influence { bone: 1, weight: 1.0 - w }]];
        prop_assert!(SkinBinding::new(ok, offsets.clone()).is_ok());
        let bad = vec![vec![Influence { bone: 0, weight: w }, Influence { bone: 1, weight: 1.0 - w + drift }]];
        let is_weight_sum = matches!(SkinBinding::new(bad, offsets), Err(SkinError::WeightSum { .. }));
        prop_assert!(is_weight_sum);
    }
}
