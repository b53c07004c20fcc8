//! Dense multivectors of the conformal algebra CGA(4,1).
//!
//! Coefficients are stored over the orthonormal basis `{e1, e2, e3, e+, e-}`
//! with `e1² = e2² = e3² = e+² = 1` and `e-² = -1`. A blade is addressed by a
//! 5-bit mask (bit 0 = e1, bit 1 = e2, bit 2 = e3, bit 3 = e+, bit 4 = e-), so
//! index `0b00011` is `e1∧e2` and basis vectors inside a blade are always in
//! ascending order.
//!
//! The null basis used for points is `e0 = (e- - e+)/2`, `e∞ = e- + e+`, which
//! gives `e0·e∞ = -1`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

/// Number of basis blades in CGA(4,1).
pub const BLADES: usize = 32;

/// Squares of the five basis vectors, indexed by bit position.
pub const METRIC: [f64; 5] = [1.0, 1.0, 1.0, 1.0, -1.0];

/// Blade indices for the components that show up throughout the crate.
pub mod blade {
    pub const SCALAR: usize = 0;
    pub const E1: usize = 0b00001;
    pub const E2: usize = 0b00010;
    pub const E3: usize = 0b00100;
    pub const EP: usize = 0b01000;
    pub const EM: usize = 0b10000;
    pub const E12: usize = 0b00011;
    pub const E13: usize = 0b00101;
    pub const E23: usize = 0b00110;
    pub const E123: usize = 0b00111;
    pub const E1P: usize = 0b01001;
    pub const E2P: usize = 0b01010;
    pub const E3P: usize = 0b01100;
    pub const E1M: usize = 0b10001;
    pub const E2M: usize = 0b10010;
    pub const E3M: usize = 0b10100;
    /// `e+ ∧ e-`, equal to `e∞ ∧ e0`.
    pub const EPM: usize = 0b11000;
    pub const E123P: usize = 0b01111;
    pub const E123M: usize = 0b10111;
}

const fn reorder_sign(a: usize, b: usize) -> i8 {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

const fn metric_sign(common: usize) -> i8 {
    // Only e- squares to -1.
    if common & blade::EM != 0 {
        -1
    } else {
        1
    }
}

const fn build_sign_table() -> [[i8; BLADES]; BLADES] {
    let mut table = [[0i8; BLADES]; BLADES];
    let mut a = 0;
    while a < BLADES {
        let mut b = 0;
        while b < BLADES {
            table[a][b] = reorder_sign(a, b) * metric_sign(a & b);
            b += 1;
        }
        a += 1;
    }
    table
}

/// Sign of `blade(a) * blade(b)`; the result blade is always `a ^ b`.
pub static PRODUCT_SIGN: [[i8; BLADES]; BLADES] = build_sign_table();

/// Grade (number of basis vectors) of a blade index.
#[inline]
pub const fn grade_of(index: usize) -> u32 {
    (index as u32).count_ones()
}

/// Sign applied to a grade-`k` blade under reversion.
#[inline]
pub const fn reverse_sign(index: usize) -> f64 {
    match grade_of(index) % 4 {
        0 | 1 => 1.0,
        _ => -1.0,
    }
}

/// A general element of CGA(4,1).
#[derive(Clone, Copy, PartialEq)]
pub struct Multivector {
    coeffs: [f64; BLADES],
}

impl Default for Multivector {
    fn default() -> Self {
        Self::ZERO
    }
}

impl Multivector {
    pub const ZERO: Multivector = Multivector { coeffs: [0.0; BLADES] };

    pub const ONE: Multivector = {
        let mut coeffs = [0.0; BLADES];
        coeffs[0] = 1.0;
        Multivector { coeffs }
    };

    pub const fn from_coeffs(coeffs: [f64; BLADES]) -> Self {
        Self { coeffs }
    }

    /// Builds a multivector from a possibly shorter coefficient list; missing
    /// trailing entries are zero. Returns `None` for more than 32 entries.
    pub fn from_slice(values: &[f64]) -> Option<Self> {
        if values.len() > BLADES {
            return None;
        }
        let mut coeffs = [0.0; BLADES];
        coeffs[..values.len()].copy_from_slice(values);
        Some(Self { coeffs })
    }

    pub fn scalar(s: f64) -> Self {
        let mut m = Self::ZERO;
        m.coeffs[0] = s;
        m
    }

    /// Unit basis blade at `index`.
    pub fn basis(index: usize) -> Self {
        let mut m = Self::ZERO;
        m.coeffs[index] = 1.0;
        m
    }

    /// Grade-1 element `x e1 + y e2 + z e3`.
    pub fn vector(x: f64, y: f64, z: f64) -> Self {
        let mut m = Self::ZERO;
        m.coeffs[blade::E1] = x;
        m.coeffs[blade::E2] = y;
        m.coeffs[blade::E3] = z;
        m
    }

    /// Origin null vector `e0 = (e- - e+)/2`.
    pub fn e0() -> Self {
        let mut m = Self::ZERO;
        m.coeffs[blade::EM] = 0.5;
        m.coeffs[blade::EP] = -0.5;
        m
    }

    /// Infinity null vector `e∞ = e- + e+`.
    pub fn einf() -> Self {
        let mut m = Self::ZERO;
        m.coeffs[blade::EM] = 1.0;
        m.coeffs[blade::EP] = 1.0;
        m
    }

    #[inline]
    pub fn coeffs(&self) -> &[f64; BLADES] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [f64; BLADES] {
        &mut self.coeffs
    }

    #[inline]
    pub fn get(&self, index: usize) -> f64 {
        self.coeffs[index]
    }

    #[inline]
    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Geometric product via the precomputed sign table. Zero coefficients are
    /// skipped, which keeps sparse operands (points, motors) cheap.
    pub fn geometric_product(&self, rhs: &Multivector) -> Multivector {
        let mut out = [0.0; BLADES];
        let rhs_nonzero = sparse::nonzero(&rhs.coeffs);
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let signs = &PRODUCT_SIGN[i];
            for &j in rhs_nonzero.as_slice() {
                let b = rhs.coeffs[j];
                out[i ^ j] += f64::from(signs[j]) * a * b;
            }
        }
        Multivector { coeffs: out }
    }

    /// Reversion: grade-k part scaled by `(-1)^{k(k-1)/2}`.
    pub fn reverse(&self) -> Multivector {
        let mut out = self.coeffs;
        for (i, c) in out.iter_mut().enumerate() {
            *c *= reverse_sign(i);
        }
        Multivector { coeffs: out }
    }

    /// Grade-k projection.
    pub fn grade(&self, k: u32) -> Multivector {
        let mut out = [0.0; BLADES];
        for (i, c) in self.coeffs.iter().enumerate() {
            if grade_of(i) == k {
                out[i] = *c;
            }
        }
        Multivector { coeffs: out }
    }

    /// Scalar part of `self * rhs`, computed without forming the full product.
    pub fn scalar_product(&self, rhs: &Multivector) -> f64 {
        // blade(i) * blade(j) is scalar only when i == j.
        self.coeffs
            .iter()
            .zip(rhs.coeffs.iter())
            .enumerate()
            .map(|(i, (a, b))| f64::from(PRODUCT_SIGN[i][i]) * a * b)
            .sum()
    }

    /// `scalar(self * rev(self))`.
    pub fn norm_squared(&self) -> f64 {
        self.scalar_product(&self.reverse())
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Largest absolute coefficient difference.
    pub fn max_abs_diff(&self, other: &Multivector) -> f64 {
        self.coeffs.iter().zip(other.coeffs.iter()).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Sum of absolute values of the coefficients at blades where `keep` is false.
    pub fn mass_outside(&self, keep: impl Fn(usize) -> bool) -> f64 {
        self.coeffs.iter().enumerate().filter(|(i, _)| !keep(*i)).map(|(_, c)| c.abs()).sum()
    }

    /// Length of the coefficient list once trailing zeros are dropped.
    pub fn trimmed_len(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != 0.0).map_or(0, |p| p + 1)
    }
}

// Small fixed-capacity index list so the product loop never allocates.
mod sparse {
    use super::BLADES;

    pub struct Indices {
        idx: [usize; BLADES],
        len: usize,
    }

    impl Indices {
        #[inline]
        pub fn as_slice(&self) -> &[usize] {
            &self.idx[..self.len]
        }
    }

    #[inline]
    pub fn nonzero(coeffs: &[f64; BLADES]) -> Indices {
        let mut out = Indices { idx: [0; BLADES], len: 0 };
        for (j, c) in coeffs.iter().enumerate() {
            if *c != 0.0 {
                out.idx[out.len] = j;
                out.len += 1;
            }
        }
        out
    }
}

impl Index<usize> for Multivector {
    type Output = f64;
    fn index(&self, index: usize) -> &f64 {
        &self.coeffs[index]
    }
}

impl IndexMut<usize> for Multivector {
    fn index_mut(&mut self, index: usize) -> &mut f64 {
        &mut self.coeffs[index]
    }
}

impl Add for Multivector {
    type Output = Multivector;
    fn add(mut self, rhs: Multivector) -> Multivector {
        self += rhs;
        self
    }
}

impl AddAssign for Multivector {
    fn add_assign(&mut self, rhs: Multivector) {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *a += b;
        }
    }
}

impl Sub for Multivector {
    type Output = Multivector;
    fn sub(mut self, rhs: Multivector) -> Multivector {
        self -= rhs;
        self
    }
}

impl SubAssign for Multivector {
    fn sub_assign(&mut self, rhs: Multivector) {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *a -= b;
        }
    }
}

impl Neg for Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self * -1.0
    }
}

impl Mul for Multivector {
    type Output = Multivector;
    fn mul(self, rhs: Multivector) -> Multivector {
        self.geometric_product(&rhs)
    }
}

impl Mul<&Multivector> for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: &Multivector) -> Multivector {
        self.geometric_product(rhs)
    }
}

impl Mul<f64> for Multivector {
    type Output = Multivector;
    fn mul(mut self, rhs: f64) -> Multivector {
        for c in self.coeffs.iter_mut() {
            *c *= rhs;
        }
        self
    }
}

impl Mul<Multivector> for f64 {
    type Output = Multivector;
    fn mul(self, rhs: Multivector) -> Multivector {
        rhs * self
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multivector({self})")
    }
}

/// Null-basis text form, e.g. `1:1.0 e1inf:-0.5`. See [`super::text`].
impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::text::to_text(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_axioms() {
        for (bit, sq) in METRIC.iter().enumerate() {
            let e = Multivector::basis(1 << bit);
            assert_eq!((e * e).scalar_part(), *sq);
            assert_eq!((e * e).grade(0), Multivector::scalar(*sq));
        }
    }

    #[test]
    fn orthogonal_vectors_anticommute() {
        let e1 = Multivector::basis(blade::E1);
        let e2 = Multivector::basis(blade::E2);
        let e12 = e1 * e2;
        assert_eq!(e12, Multivector::basis(blade::E12));
        assert_eq!(e2 * e1, -Multivector::basis(blade::E12));
    }

    #[test]
    fn null_basis_products() {
        let e0 = Multivector::e0();
        let ei = Multivector::einf();
        assert_eq!((e0 * e0), Multivector::ZERO);
        assert_eq!((ei * ei), Multivector::ZERO);
        let sym = (e0 * ei + ei * e0) * 0.5;
        assert_eq!(sym, Multivector::scalar(-1.0));
        // e∞ ∧ e0 is e+ e-
        let wedge = (ei * e0 - e0 * ei) * 0.5;
        assert_eq!(wedge, Multivector::basis(blade::EPM));
    }

    #[test]
    fn reverse_signs_by_grade() {
        assert_eq!(Multivector::ONE.reverse(), Multivector::ONE);
        let e12 = Multivector::basis(blade::E12);
        assert_eq!(e12.reverse(), -e12);
        let e123 = Multivector::basis(blade::E123);
        assert_eq!(e123.reverse(), -e123);
        let e123p = Multivector::basis(blade::E123P);
        assert_eq!(e123p.reverse(), e123p);
    }

    #[test]
    fn scalar_product_matches_full_product() {
        let mut a = Multivector::ZERO;
        let mut b = Multivector::ZERO;
        for i in 0..BLADES {
            a[i] = (i as f64 * 0.37).sin();
            b[i] = (i as f64 * 0.91).cos();
        }
        let full = (a * b).scalar_part();
        assert!((full - a.scalar_product(&b)).abs() < 1e-12);
    }

    #[test]
    fn trimmed_len_counts_to_last_nonzero() {
        assert_eq!(Multivector::ZERO.trimmed_len(), 0);
        assert_eq!(Multivector::ONE.trimmed_len(), 1);
        assert_eq!(Multivector::basis(blade::E123M).trimmed_len(), 24);
    }
}
