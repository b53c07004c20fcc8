use super::multivector::{blade, grade_of, Multivector};
use super::{CgaError, Vec3};
use crate::tolerance;
use nalgebra::{Matrix3, Quaternion, UnitQuaternion};
use serde::{Deserialize, Serialize};

/// Conformal embedding `p + ½|p|² e∞ + e0`.
pub fn up(p: Vec3) -> Multivector {
    let half_sq = 0.5 * p.norm_squared();
    let mut c = Multivector::vector(p.x, p.y, p.z);
    // e∞ contributes (1, 1) on (e+, e-), e0 contributes (-½, ½).
    c[blade::EP] = half_sq - 0.5;
    c[blade::EM] = half_sq + 0.5;
    c
}

/// `-(c · e∞)` for the grade-1 part of `c`.
fn point_weight(c: &Multivector) -> f64 {
    // c · e∞ = c+ (e+·e+) + c- (e-·e-) = c+ - c-
    c[blade::EM] - c[blade::EP]
}

/// Inverse embedding: normalizes by `-(c · e∞)` and reads the e1, e2, e3 part.
pub fn down(c: &Multivector) -> Result<Vec3, CgaError> {
    let weight = point_weight(c);
    if weight.abs() < tolerance::NULL_WEIGHT {
        return Err(CgaError::NullWeight { weight });
    }
    Ok(Vec3::new(c[blade::E1], c[blade::E2], c[blade::E3]) / weight)
}

/// Translator `1 - ½ t e∞`.
pub fn translator(t: Vec3) -> Multivector {
    let mut m = Multivector::ONE;
    // t_i e_i e∞ = t_i (e_i e+ + e_i e-)
    for (k, (bp, bm)) in
        [(blade::E1P, blade::E1M), (blade::E2P, blade::E2M), (blade::E3P, blade::E3M)].into_iter().enumerate()
    {
        m[bp] = -0.5 * t[k];
        m[bm] = -0.5 * t[k];
    }
    m
}

/// Rotor `cos(θ/2) - sin(θ/2) B` with `B` the unit bivector dual to `axis`.
/// Positive angles turn counter-clockwise when looking down the axis.
pub fn rotor(axis: Vec3, angle: f64) -> Result<Multivector, CgaError> {
    let norm = axis.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > tolerance::UNIT_AXIS {
        return Err(CgaError::InvalidAxis { norm });
    }
    let (s, c) = (0.5 * angle).sin_cos();
    let mut m = Multivector::scalar(c);
    // B = n e123 = n1 e23 - n2 e13 + n3 e12
    m[blade::E23] = -s * axis.x;
    m[blade::E13] = s * axis.y;
    m[blade::E12] = -s * axis.z;
    Ok(m)
}

/// Dilator `exp(-(ln s / 2) E)` with `E = e∞ ∧ e0`; scales points about the origin by `scale`.
pub fn dilator(scale: f64) -> Result<Multivector, CgaError> {
    if !scale.is_finite() || scale <= 0.0 {
        return Err(CgaError::InvalidScale { scale });
    }
    let gamma = -0.5 * scale.ln();
    let mut m = Multivector::scalar(gamma.cosh());
    // E² = 1, so exp(γE) = cosh γ + sinh γ E.
    m[blade::EPM] = gamma.sinh();
    Ok(m)
}

/// Converts a unit quaternion into the equivalent rotor.
pub fn rotor_from_quaternion(q: &UnitQuaternion<f64>) -> Multivector {
    let mut m = Multivector::scalar(q.w);
    m[blade::E23] = -q.i;
    m[blade::E13] = q.j;
    m[blade::E12] = -q.k;
    m
}

/// Reads the rotor part `{1, e12, e13, e23}` back as a quaternion.
pub fn rotor_to_quaternion(m: &Multivector) -> UnitQuaternion<f64> {
    UnitQuaternion::from_quaternion(Quaternion::new(m[blade::SCALAR], -m[blade::E23], m[blade::E13], -m[blade::E12]))
}

/// Composition `a b` (apply `b` first, then `a`).
pub fn compose(a: &Multivector, b: &Multivector) -> Multivector {
    a * b
}

/// Sandwich `v x rev(v)`.
pub fn apply_versor(v: &Multivector, x: &Multivector) -> Result<Multivector, CgaError> {
    let vv = v * &v.reverse();
    let s = vv.scalar_part();
    let residual = vv.mass_outside(|i| i == 0);
    if s.abs() < tolerance::VERSOR || residual > tolerance::VERSOR * s.abs().max(1.0) {
        return Err(CgaError::NotAVersor { residual });
    }
    Ok((v * x) * v.reverse())
}

/// Affine map `p -> linear p + translation` induced on points by a versor
/// that preserves points at infinity (rigid motions and similarities).
pub fn versor_to_affine(v: &Multivector) -> Result<(Matrix3<f64>, Vec3), CgaError> {
    let image = |p: Vec3| -> Result<Vec3, CgaError> { down(&apply_versor(v, &up(p))?) };
    let o = image(Vec3::zeros())?;
    let mut linear = Matrix3::zeros();
    for (k, axis) in [Vec3::x(), Vec3::y(), Vec3::z()].into_iter().enumerate() {
        linear.set_column(k, &(image(axis)? - o));
    }
    Ok((linear, o))
}

/// Versor families distinguished by grade support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VersorKind {
    Point,
    Translator,
    Rotor,
    Dilator,
    Motor,
}

impl VersorKind {
    pub const ALL: [VersorKind; 5] =
        [VersorKind::Point, VersorKind::Translator, VersorKind::Rotor, VersorKind::Dilator, VersorKind::Motor];
}

fn is_rotor_blade(i: usize) -> bool {
    matches!(i, blade::SCALAR | blade::E12 | blade::E13 | blade::E23)
}

fn is_translator_blade(i: usize) -> bool {
    matches!(i, blade::SCALAR | blade::E1P | blade::E2P | blade::E3P | blade::E1M | blade::E2M | blade::E3M)
}

fn is_even(i: usize) -> bool {
    grade_of(i).is_multiple_of(2)
}

/// Deviation of `m * rev(m)` from 1: non-scalar mass plus `|scalar - 1|`.
fn unit_versor_defect(m: &Multivector) -> f64 {
    let n = m * &m.reverse();
    n.mass_outside(|i| i == 0) + (n.scalar_part() - 1.0).abs()
}

/// Off-pattern coefficient mass of `m` relative to `kind`, scaled by
/// `max(1, max|coeff|)`. Zero means `m` is exactly of that kind.
pub fn pattern_residual(m: &Multivector, kind: VersorKind) -> f64 {
    let scale = m.max_abs().max(1.0);
    let raw = match kind {
        VersorKind::Point => {
            let off = m.mass_outside(|i| grade_of(i) == 1);
            let v = m.grade(1);
            let sq = v.scalar_product(&v).abs();
            let weight = point_weight(m);
            if weight.abs() < tolerance::NULL_WEIGHT {
                f64::INFINITY
            } else {
                // |c²| grows with |p|², compare against the squared scale.
                off + sq / scale
            }
        }
        VersorKind::Translator => {
            let off = m.mass_outside(is_translator_blade);
            let skew = (m[blade::E1P] - m[blade::E1M]).abs()
                + (m[blade::E2P] - m[blade::E2M]).abs()
                + (m[blade::E3P] - m[blade::E3M]).abs();
            off + skew + (m.scalar_part() * m.scalar_part() - 1.0).abs()
        }
        VersorKind::Rotor => m.mass_outside(is_rotor_blade) + unit_versor_defect(m),
        VersorKind::Dilator => {
            let off = m.mass_outside(|i| i == blade::SCALAR || i == blade::EPM);
            let norm = m.scalar_part().powi(2) - m[blade::EPM].powi(2);
            off + (norm - 1.0).abs() + if m.scalar_part() > 0.0 { 0.0 } else { 1.0 }
        }
        VersorKind::Motor => m.mass_outside(is_even) + unit_versor_defect(m),
    };
    raw / scale
}

/// Classifies by grade-support pattern, trying Point, Translator, Rotor,
/// Dilator, Motor in that order. The identity therefore reports `Translator`.
pub fn classify_versor(m: &Multivector) -> Result<VersorKind, CgaError> {
    VersorKind::ALL.into_iter().find(|k| pattern_residual(m, *k) <= tolerance::CLASSIFY).ok_or(CgaError::Unclassifiable)
}

fn matches_kind(m: &Multivector, kind: VersorKind) -> bool {
    pattern_residual(m, kind) <= tolerance::CLASSIFY
}

/// Normalizes a blended rigid motor so that `M rev(M) = 1`.
///
/// For an even element over `{1, e12, e13, e23, e_i∞, e123∞}`, `M rev(M)` is
/// `s + p e123∞` with `e123∞` central and nilpotent, so multiplying by
/// `s^{-1/2} (1 - p/(2s) e123∞)` is exact. Any other non-scalar part is left
/// alone and only the scalar normalization applies.
pub fn normalize_motor(m: &Multivector) -> Result<Multivector, CgaError> {
    let n = m * &m.reverse();
    let s = n.scalar_part();
    if !(s.abs().sqrt() >= tolerance::DEGENERATE_BLEND) {
        return Err(CgaError::DegenerateBlend { norm: s.abs().sqrt() });
    }
    // e123∞ = e123+ + e123-; in M rev(M) the coefficients on both blades are equal.
    let p = 0.5 * (n[blade::E123P] + n[blade::E123M]);
    let inv_sqrt = 1.0 / s.abs().sqrt();
    if p == 0.0 {
        return Ok(*m * inv_sqrt);
    }
    let mut correction = Multivector::scalar(inv_sqrt);
    let k = -inv_sqrt * p / (2.0 * s);
    correction[blade::E123P] = k;
    correction[blade::E123M] = k;
    Ok(m * &correction)
}

fn blend(a: &Multivector, b: &Multivector, t: f64) -> Multivector {
    *a * (1.0 - t) + *b * t
}

/// Normalized-linear interpolation treating both inputs as `kind`.
///
/// No kind check is made on the inputs; callers that need one should use
/// [`interpolate_versor`].
pub fn interpolate_as(a: &Multivector, b: &Multivector, t: f64, kind: VersorKind) -> Result<Multivector, CgaError> {
    if t == 0.0 {
        return Ok(*a);
    }
    if t == 1.0 {
        return Ok(*b);
    }
    match kind {
        VersorKind::Point => {
            let pa = down(a)?;
            let pb = down(b)?;
            Ok(up(pa * (1.0 - t) + pb * t))
        }
        VersorKind::Translator | VersorKind::Dilator => {
            let m = blend(a, b, t);
            let norm = m.norm_squared().abs().sqrt();
            if norm < tolerance::DEGENERATE_BLEND {
                return Err(CgaError::DegenerateBlend { norm });
            }
            Ok(m * (1.0 / norm))
        }
        VersorKind::Rotor => {
            let b = hemisphere_aligned(a, b);
            let m = blend(a, &b, t);
            let norm = m.norm_squared().abs().sqrt();
            if norm < tolerance::DEGENERATE_BLEND {
                return Err(CgaError::DegenerateBlend { norm });
            }
            Ok(m * (1.0 / norm))
        }
        VersorKind::Motor => {
            let b = hemisphere_aligned(a, b);
            normalize_motor(&blend(a, &b, t))
        }
    }
}

/// Flips `b` when `scalar(a rev(b)) < 0` so the blend takes the short way.
fn hemisphere_aligned(a: &Multivector, b: &Multivector) -> Multivector {
    if a.scalar_product(&b.reverse()) < 0.0 {
        -*b
    } else {
        *b
    }
}

/// Type-closed interpolation between two versors of the same kind.
///
/// `t = 0` and `t = 1` return the inputs unchanged. When the two inputs
/// classify differently but one of them also fits the other's pattern (the
/// identity fits every kind, a rotor fits `Motor`) the wider kind is used.
pub fn interpolate_versor(a: &Multivector, b: &Multivector, t: f64) -> Result<Multivector, CgaError> {
    let ka = classify_versor(a)?;
    let kb = classify_versor(b)?;
    let kind = if ka == kb {
        ka
    } else if matches_kind(a, kb) {
        kb
    } else if matches_kind(b, ka) {
        ka
    } else {
        return Err(CgaError::KindMismatch { a: ka, b: kb });
    };
    interpolate_as(a, b, t, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        (a - b).abs().max() <= tol
    }

    #[test]
    fn up_embeds_origin_and_unit_x() {
        assert_eq!(up(Vec3::zeros()), Multivector::e0());
        let expected = Multivector::vector(1.0, 0.0, 0.0) + Multivector::einf() * 0.5 + Multivector::e0();
        assert_eq!(up(Vec3::new(1.0, 0.0, 0.0)), expected);
    }

    #[test]
    fn up_is_null() {
        for p in [Vec3::new(1.5, -2.0, 0.25), Vec3::new(100.0, 3.0, -7.0)] {
            let c = up(p);
            assert!((c * c).max_abs() < 1e-10 * p.norm_squared().max(1.0));
        }
    }

    #[test]
    fn down_inverts_up_and_is_scale_invariant() {
        assert_eq!(down(&Multivector::e0()).unwrap(), Vec3::zeros());
        let p = Vec3::new(3.0, -1.0, 2.0);
        assert!(close(down(&(up(p) * 2.0)).unwrap(), p, 1e-15));
        assert!(matches!(down(&Multivector::einf()), Err(CgaError::NullWeight { .. })));
    }

    #[test]
    fn translator_moves_origin() {
        assert_eq!(translator(Vec3::zeros()), Multivector::ONE);
        let t = translator(Vec3::new(1.0, 2.0, 3.0));
        let moved = apply_versor(&t, &up(Vec3::zeros())).unwrap();
        assert!(close(down(&moved).unwrap(), Vec3::new(1.0, 2.0, 3.0), 1e-12));
    }

    #[test]
    fn translators_compose_additively() {
        let a = Vec3::new(0.5, -1.0, 2.0);
        let b = Vec3::new(-3.0, 0.25, 1.0);
        let ab = translator(a) * translator(b);
        assert!(ab.max_abs_diff(&translator(a + b)) <= 1e-12);
    }

    #[test]
    fn quarter_turn_about_z() {
        assert_eq!(rotor(Vec3::z(), 0.0).unwrap(), Multivector::ONE);
        let r = rotor(Vec3::z(), FRAC_PI_2).unwrap();
        let x = apply_versor(&r, &up(Vec3::x())).unwrap();
        assert!(x.max_abs_diff(&up(Vec3::y())) <= 1e-10);
    }

    #[test]
    fn rotor_rejects_non_unit_axis() {
        assert!(matches!(rotor(Vec3::new(1.0, 1.0, 0.0), 0.3), Err(CgaError::InvalidAxis { .. })));
    }

    #[test]
    fn dilator_scales_about_origin() {
        assert!(dilator(1.0).unwrap().max_abs_diff(&Multivector::ONE) == 0.0);
        let d = dilator(2.0).unwrap();
        let p = apply_versor(&d, &up(Vec3::x())).unwrap();
        assert!(close(down(&p).unwrap(), Vec3::new(2.0, 0.0, 0.0), 1e-12));
        let ab = dilator(1.5).unwrap() * dilator(3.0).unwrap();
        assert!(ab.max_abs_diff(&dilator(4.5).unwrap()) <= 1e-12);
        assert!(matches!(dilator(0.0), Err(CgaError::InvalidScale { .. })));
        assert!(matches!(dilator(f64::NAN), Err(CgaError::InvalidScale { .. })));
    }

    #[test]
    fn quaternion_round_trip_matches_rotor() {
        let axis = Vec3::new(1.0, 2.0, -0.5).normalize();
        let r = rotor(axis, 0.8).unwrap();
        let q = UnitQuaternion::from_axis_angle(&nalgebra::Unit::new_normalize(axis), 0.8);
        assert!(rotor_from_quaternion(&q).max_abs_diff(&r) < 1e-15);
        assert!((rotor_to_quaternion(&r).angle_to(&q)).abs() < 1e-12);
    }

    #[test]
    fn apply_rejects_non_versor() {
        let v = Multivector::ONE + Multivector::basis(blade::E1);
        assert!(matches!(apply_versor(&v, &up(Vec3::x())), Err(CgaError::NotAVersor { .. })));
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_versor(&up(Vec3::new(1.0, 2.0, 3.0))).unwrap(), VersorKind::Point);
        assert_eq!(classify_versor(&translator(Vec3::x())).unwrap(), VersorKind::Translator);
        let r = rotor(Vec3::z(), 0.3).unwrap();
        assert_eq!(classify_versor(&r).unwrap(), VersorKind::Rotor);
        assert_eq!(classify_versor(&dilator(2.5).unwrap()).unwrap(), VersorKind::Dilator);
        let m = r * translator(Vec3::x());
        assert_eq!(classify_versor(&m).unwrap(), VersorKind::Motor);
        let junk = Multivector::basis(blade::E1) + Multivector::basis(blade::E12);
        assert_eq!(classify_versor(&junk), Err(CgaError::Unclassifiable));
    }

    #[test]
    fn interpolation_endpoints_are_exact() {
        let a = rotor(Vec3::z(), 0.2).unwrap() * translator(Vec3::new(1.0, 0.0, 0.5));
        let b = rotor(Vec3::x(), -0.7).unwrap() * translator(Vec3::new(0.0, 2.0, 0.0));
        assert_eq!(interpolate_versor(&a, &b, 0.0).unwrap(), a);
        assert_eq!(interpolate_versor(&a, &b, 1.0).unwrap(), b);
    }

    #[test]
    fn translators_blend_linearly() {
        let a = translator(Vec3::zeros());
        let b = translator(Vec3::new(2.0, 0.0, 0.0));
        let mid = interpolate_versor(&a, &b, 0.5).unwrap();
        assert!(mid.max_abs_diff(&translator(Vec3::x())) <= 1e-12);
    }

    #[test]
    fn rotor_midpoint_halves_angle() {
        let a = rotor(Vec3::y(), 0.0).unwrap();
        let b = rotor(Vec3::y(), FRAC_PI_2).unwrap();
        let mid = interpolate_versor(&a, &b, 0.5).unwrap();
        assert!(mid.max_abs_diff(&rotor(Vec3::y(), FRAC_PI_4).unwrap()) <= 1e-9);
    }

    #[test]
    fn mismatched_kinds_are_rejected() {
        let t = translator(Vec3::x());
        let r = rotor(Vec3::z(), 0.4).unwrap();
        assert!(matches!(interpolate_versor(&t, &r, 0.5), Err(CgaError::KindMismatch { .. })));
    }

    #[test]
    fn antipodal_dilator_blend_is_degenerate() {
        let a = Multivector::scalar(1.0);
        let b = -a;
        assert!(matches!(interpolate_as(&a, &b, 0.5, VersorKind::Translator), Err(CgaError::DegenerateBlend { .. })));
    }

    #[test]
    fn motor_blend_is_unit() {
        let a = rotor(Vec3::z(), 0.2).unwrap() * translator(Vec3::new(1.0, 0.0, 0.5));
        let b = rotor(Vec3::x(), -0.9).unwrap() * translator(Vec3::new(-1.0, 2.0, 0.0));
        for t in [0.1, 0.5, 0.9] {
            let m = interpolate_versor(&a, &b, t).unwrap();
            assert!(pattern_residual(&m, VersorKind::Motor) < 1e-12);
        }
    }

    #[test]
    fn rotor_hemisphere_flip_takes_short_path() {
        let a = rotor(Vec3::z(), 0.1).unwrap();
        let b = -rotor(Vec3::z(), 0.3).unwrap();
        let mid = interpolate_versor(&a, &b, 0.5).unwrap();
        assert!(mid.max_abs_diff(&rotor(Vec3::z(), 0.2).unwrap()) < 1e-12);
    }

    #[test]
    fn point_blend_stays_on_null_cone() {
        let a = up(Vec3::new(1.0, 0.0, 0.0));
        let b = up(Vec3::new(3.0, 2.0, 0.0));
        let m = interpolate_versor(&a, &b, 0.5).unwrap();
        assert_eq!(classify_versor(&m).unwrap(), VersorKind::Point);
        assert!(close(down(&m).unwrap(), Vec3::new(2.0, 1.0, 0.0), 1e-12));
    }
}
