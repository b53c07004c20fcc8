//! Independent reference implementations and generators shared by the
//! integration tests.
#![allow(dead_code)]

use cgamotion::cga::{rotor_from_quaternion, translator, Multivector, Vec3};
use nalgebra::{Matrix4, Quaternion, UnitQuaternion};
use proptest::prelude::*;
use std::path::PathBuf;

/// e1, e2, e3, e+, e-.
pub const SIGNATURE: [f64; 5] = [1.0, 1.0, 1.0, 1.0, -1.0];

/// Basis blade product by inserting each vector of `b` into the word of `a`
/// from the right. Returns (sign, result mask).
pub fn blade_mul(a: usize, b: usize) -> (f64, usize) {
    let mut word: Vec<usize> = (0..5).filter(|i| a >> i & 1 == 1).collect();
    let mut sign = 1.0;
    for v in (0..5).filter(|i| b >> i & 1 == 1) {
        // v travels left past every larger index at the end of the word.
        let mut pos = word.len();
        while pos > 0 && word[pos - 1] > v {
            pos -= 1;
            sign = -sign;
        }
        if pos > 0 && word[pos - 1] == v {
            sign *= SIGNATURE[v];
            word.remove(pos - 1);
        } else {
            word.insert(pos, v);
        }
    }
    (sign, word.iter().map(|&v| 1usize << v).sum())
}

pub fn homogeneous(rotation: &UnitQuaternion<f64>, translation: Vec3, scale: f64) -> Matrix4<f64> {
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&(rotation.to_rotation_matrix().matrix() * scale));
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(&translation);
    m
}

pub fn apply_h(m: &Matrix4<f64>, p: Vec3) -> Vec3 {
    let h = m * p.push(1.0);
    Vec3::new(h.x, h.y, h.z) / h.w
}

/// Matrix linear blend skinning: `v' = Σ w (P B⁻¹) v`.
pub fn lbs(rest: &[Vec3], weights: &[Vec<(usize, f64)>], bind: &[Matrix4<f64>], pose: &[Matrix4<f64>]) -> Vec<Vec3> {
    let skin: Vec<Matrix4<f64>> =
        bind.iter().zip(pose).map(|(b, p)| p * b.try_inverse().expect("bind matrix is invertible")).collect();
    rest.iter()
        .zip(weights)
        .map(|(v, w)| w.iter().fold(Vec3::zeros(), |acc, &(n, wt)| acc + apply_h(&skin[n], *v) * wt))
        .collect()
}

/// Motor of "rotate by q, then translate by t".
pub fn motor(q: &UnitQuaternion<f64>, t: Vec3) -> Multivector {
    translator(t) * rotor_from_quaternion(q)
}

pub fn quat_from_uniform(u1: f64, u2: f64, u3: f64) -> UnitQuaternion<f64> {
    let tau = std::f64::consts::TAU;
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    UnitQuaternion::from_quaternion(Quaternion::new(
        b * (tau * u3).cos(),
        a * (tau * u2).sin(),
        a * (tau * u2).cos(),
        b * (tau * u3).sin(),
    ))
}

pub fn arb_vec3(r: f64) -> impl Strategy<Value = Vec3> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

pub fn arb_rotation() -> impl Strategy<Value = UnitQuaternion<f64>> {
    (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64).prop_map(|(a, b, c)| quat_from_uniform(a, b, c))
}

pub fn arb_motor(reach: f64) -> impl Strategy<Value = (UnitQuaternion<f64>, Vec3)> {
    (arb_rotation(), arb_vec3(reach))
}

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture_path(rel: &str) -> PathBuf {
    workspace_root().join("fixtures").join(rel)
}

pub fn max_distance(a: &[Vec3], b: &[Vec3]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}
