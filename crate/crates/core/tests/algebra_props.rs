mod common;

use cgamotion::cga::{
    apply_versor, classify_versor, dilator, down, interpolate_versor, pattern_residual, rotor_from_quaternion,
    rotor_to_quaternion, translator, up, Multivector, VersorKind, BLADES,
};
use common::*;
use proptest::prelude::*;

fn unit_defect(m: &Multivector) -> f64 {
    let n = m * &m.reverse();
    n.mass_outside(|i| i == 0) + (n.scalar_part() - 1.0).abs()
}

#[test]
fn cayley_table_matches_word_expansion() {
    for a in 0..BLADES {
        for b in 0..BLADES {
            let (sign, blade) = blade_mul(a, b);
            let got = Multivector::basis(a) * Multivector::basis(b);
            for k in 0..BLADES {
                let want = if k == blade { sign } else { 0.0 };
                assert_eq!(got[k], want, "e{a:05b} * e{b:05b}, blade {k:05b}");
            }
        }
    }
}

#[test]
fn oracle_agrees_on_known_products() {
    // e+^2 = 1, e-^2 = -1, e1 e2 = -e2 e1.
    assert_eq!(blade_mul(0b01000, 0b01000), (1.0, 0));
    assert_eq!(blade_mul(0b10000, 0b10000), (-1.0, 0));
    assert_eq!(blade_mul(0b00010, 0b00001), (-1.0, 0b00011));
}

fn arb_versor() -> impl Strategy<Value = Multivector> {
    (arb_motor(5.0), -1.0..1.0f64, any::<bool>()).prop_map(|((q, t), ln_s, scale)| {
        let m = motor(&q, t);
        if scale {
            m * dilator(ln_s.exp()).unwrap()
        } else {
            m
        }
    })
}

fn arb_kind_pair() -> impl Strategy<Value = (VersorKind, Multivector, Multivector)> {
    let kind = prop_oneof![
        Just(VersorKind::Translator),
        Just(VersorKind::Rotor),
        Just(VersorKind::Dilator),
        Just(VersorKind::Motor)
    ];
    (kind, arb_motor(5.0), arb_motor(5.0), -1.0..1.0f64, -1.0..1.0f64).prop_map(|(k, (qa, ta), (qb, tb), sa, sb)| {
        let make = |q: &nalgebra::UnitQuaternion<f64>, t, s: f64| match k {
            VersorKind::Translator => translator(t),
            VersorKind::Rotor => rotor_from_quaternion(q),
            VersorKind::Dilator => dilator(s.exp()).unwrap(),
            _ => motor(q, t),
        };
        (k, make(&qa, ta, sa), make(&qb, tb, sb))
    })
}

proptest! {
    #[test]
    fn sandwich_preserves_null_cone(v in arb_versor(), p in arb_vec3(10.0)) {
        let x = apply_versor(&v, &up(p)).unwrap();
        let sq = x * x;
        prop_assert!(sq.max_abs() <= 1e-9 * x.max_abs().powi(2).max(1.0), "x^2 = {sq}");
        prop_assert!(x.mass_outside(|i| i.count_ones() == 1) <= 1e-9 * x.max_abs().max(1.0));
    }

    #[test]
    fn versors_and_products_are_unit((qa, ta) in arb_motor(5.0), (qb, tb) in arb_motor(5.0), ln_s in -1.0..1.0f64) {
        let parts = [
            rotor_from_quaternion(&qa),
            translator(ta),
            dilator(ln_s.exp()).unwrap(),
            motor(&qa, ta) * motor(&qb, tb),
            translator(tb) * rotor_from_quaternion(&qb) * dilator(ln_s.exp()).unwrap(),
        ];
        for m in parts {
            prop_assert!(unit_defect(&m) <= 1e-12 * m.max_abs().powi(2).max(1.0), "defect {}", unit_defect(&m));
        }
    }

    #[test]
    fn interpolation_is_type_closed((kind, a, b) in arb_kind_pair(), ti in 0usize..5) {
        let t = ti as f64 / 4.0;
        let m = interpolate_versor(&a, &b, t).unwrap();
        prop_assert_eq!(classify_versor(&m).unwrap(), kind);
        prop_assert!(pattern_residual(&m, kind) <= 1e-6);
    }

    #[test]
    fn trd_action_matches_homogeneous_matrices((q, t) in arb_motor(5.0), ln_s in -1.0..1.0f64, p in arb_vec3(3.0)) {
        let s = ln_s.exp();
        let v = translator(t) * rotor_from_quaternion(&q) * dilator(s).unwrap();
        let got = down(&apply_versor(&v, &up(p)).unwrap()).unwrap();
        let want = apply_h(&homogeneous(&q, t, s), p);
        for k in 0..3 {
            prop_assert!((got[k] - want[k]).abs() <= 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn rotor_midpoint_is_the_slerp_midpoint(qa in arb_rotation(), qb in arb_rotation()) {
        prop_assume!(qa.angle_to(&qb) < 3.0);
        let m = interpolate_versor(&rotor_from_quaternion(&qa), &rotor_from_quaternion(&qb), 0.5).unwrap();
        let got = rotor_to_quaternion(&m);
        let want = qa.slerp(&qb, 0.5);
        prop_assert!(got.angle_to(&want) <= 1e-9);
    }

    #[test]
    fn up_down_round_trip(p in arb_vec3(100.0)) {
        prop_assert!((down(&up(p)).unwrap() - p).norm() <= 1e-12 * p.norm().max(1.0));
    }
}
