//! Reference computations for `verify`, written without the multivector
//! engine: blade products by explicit word expansion, matrix skinning and
//! seeded random rigid transforms.

use crate::cga::Vec3;
use nalgebra::{Isometry3, Translation3, UnitQuaternion};
use rand::{Rng, RngExt};

/// Squares of e1, e2, e3, e+, e-.
const SQUARES: [f64; 5] = [1.0, 1.0, 1.0, 1.0, -1.0];

/// Product of basis blades given as bitmasks (bit i = basis vector i):
/// concatenates the two words, bubble-sorts them counting swaps and
/// contracts equal neighbours with their square.
pub fn blade_product(a: usize, b: usize) -> (f64, usize) {
    let bits = |m: usize| (0..5).filter(move |i| m >> i & 1 == 1);
    let mut word: Vec<usize> = bits(a).chain(bits(b)).collect();
    let mut sign = 1.0;
    let mut changed = true;
    while changed {
        changed = false;
        let mut i = 0;
        while i + 1 < word.len() {
            if word[i] > word[i + 1] {
                word.swap(i, i + 1);
                sign = -sign;
                changed = true;
            } else if word[i] == word[i + 1] {
                sign *= SQUARES[word[i]];
                word.drain(i..i + 2);
                changed = true;
                continue;
            }
            i += 1;
        }
    }
    (sign, word.iter().fold(0, |m, &v| m | 1 << v))
}

/// Uniform random unit quaternion (Shoemake).
pub fn random_rotation(rng: &mut impl Rng) -> UnitQuaternion<f64> {
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let tau = std::f64::consts::TAU;
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(
        b * (tau * u3).cos(),
        a * (tau * u2).sin(),
        a * (tau * u2).cos(),
        b * (tau * u3).sin(),
    ))
}

pub fn random_vector(rng: &mut impl Rng, half_width: f64) -> Vec3 {
    Vec3::from_fn(|_, _| rng.random_range(-half_width..=half_width))
}

/// Rotation followed by translation.
pub fn random_isometry(rng: &mut impl Rng, reach: f64) -> Isometry3<f64> {
    let q = random_rotation(rng);
    let t = random_vector(rng, reach);
    Isometry3::from_parts(Translation3::from(t), q)
}

/// Linear blend skinning with 4×4 homogeneous matrices:
/// `v' = Σ w_n (P_n Bind_n⁻¹) v`.
pub fn matrix_lbs(
    rest: &[Vec3],
    weights: &[Vec<(usize, f64)>],
    bind: &[Isometry3<f64>],
    pose: &[Isometry3<f64>],
) -> Vec<Vec3> {
    let skin: Vec<nalgebra::Matrix4<f64>> =
        bind.iter().zip(pose).map(|(b, p)| p.to_homogeneous() * b.inverse().to_homogeneous()).collect();
    rest.iter()
        .zip(weights)
        .map(|(v, w)| {
            let h = v.push(1.0);
            let sum: nalgebra::Vector4<f64> = w.iter().map(|&(n, wt)| skin[n] * h * wt).sum();
            Vec3::new(sum.x, sum.y, sum.z) / sum.w
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anticommuting_vectors() {
        assert_eq!(blade_product(0b1, 0b10), (1.0, 0b11));
        assert_eq!(blade_product(0b10, 0b1), (-1.0, 0b11));
        assert_eq!(blade_product(0b10000, 0b10000), (-1.0, 0));
        // (e1 e2)^2 = -1
        assert_eq!(blade_product(0b11, 0b11), (-1.0, 0));
    }
}
