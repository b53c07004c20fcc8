//! Deterministic `blade:coeff` text form over the null basis `{e1, e2, e3, o, inf}`.
//!
//! Blades are named by their Euclidean factors followed by `o` (e0) and `inf`
//! (e∞), e.g. `e12`, `e1inf`, `e3o`, `oinf`, `e123oinf`; the scalar is `1`.
//! Terms are ordered by null-basis blade index (bit 3 = o, bit 4 = inf) and
//! zero terms are omitted. The zero multivector prints as `0`. Coefficients use
//! Rust's shortest round-trip float form, so parsing gives back identical bits
//! whenever the null-basis coefficients are exactly representable.

use super::multivector::{blade, Multivector, BLADES};
use thiserror::Error;

const O_BIT: usize = 0b01000;
const INF_BIT: usize = 0b10000;

#[derive(Debug, Error, PartialEq)]
pub enum TextError {
    #[error("unknown blade name `{0}`")]
    UnknownBlade(String),
    #[error("bad term `{0}`, expected blade:coeff")]
    BadTerm(String),
    #[error("blade `{0}` appears twice")]
    Duplicate(String),
}

/// Converts storage (e+/e-) coefficients into null-basis coefficients.
pub fn to_null_basis(m: &Multivector) -> [f64; BLADES] {
    let mut out = [0.0; BLADES];
    for (i, &c) in m.coeffs().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let euclid = i & blade::E123;
        match (i & blade::EP != 0, i & blade::EM != 0) {
            (false, false) => out[i] += c,
            // e+ = e∞/2 - e0
            (true, false) => {
                out[euclid | INF_BIT] += 0.5 * c;
                out[euclid | O_BIT] -= c;
            }
            // e- = e∞/2 + e0
            (false, true) => {
                out[euclid | INF_BIT] += 0.5 * c;
                out[euclid | O_BIT] += c;
            }
            // e+ ∧ e- = -(e0 ∧ e∞)
            (true, true) => out[euclid | O_BIT | INF_BIT] -= c,
        }
    }
    out
}

/// Inverse of [`to_null_basis`].
pub fn from_null_basis(null: &[f64; BLADES]) -> Multivector {
    let mut m = Multivector::ZERO;
    for (i, &c) in null.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let euclid = i & blade::E123;
        match (i & O_BIT != 0, i & INF_BIT != 0) {
            (false, false) => m[i] += c,
            // e0 = (e- - e+)/2
            (true, false) => {
                m[euclid | blade::EM] += 0.5 * c;
                m[euclid | blade::EP] -= 0.5 * c;
            }
            // e∞ = e- + e+
            (false, true) => {
                m[euclid | blade::EM] += c;
                m[euclid | blade::EP] += c;
            }
            (true, true) => m[euclid | blade::EPM] -= c,
        }
    }
    m
}

/// Name of a null-basis blade index.
pub fn blade_name(index: usize) -> String {
    if index == 0 {
        return "1".to_string();
    }
    let mut name = String::new();
    let euclid = index & blade::E123;
    if euclid != 0 {
        name.push('e');
        for (bit, digit) in [(blade::E1, '1'), (blade::E2, '2'), (blade::E3, '3')] {
            if euclid & bit != 0 {
                name.push(digit);
            }
        }
    }
    if index & O_BIT != 0 {
        name.push('o');
    }
    if index & INF_BIT != 0 {
        name.push_str("inf");
    }
    name
}

fn parse_blade(name: &str) -> Option<usize> {
    (0..BLADES).find(|&i| blade_name(i) == name)
}

pub fn to_text(m: &Multivector) -> String {
    let null = to_null_basis(m);
    let terms: Vec<String> = null
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, c)| format!("{}:{:?}", blade_name(i), c))
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" ")
    }
}

pub fn from_text(text: &str) -> Result<Multivector, TextError> {
    let mut null = [0.0; BLADES];
    let mut seen = [false; BLADES];
    for term in text.split_whitespace() {
        if term == "0" {
            continue;
        }
        let (name, value) = term.split_once(':').ok_or_else(|| TextError::BadTerm(term.to_string()))?;
        let index = parse_blade(name).ok_or_else(|| TextError::UnknownBlade(name.to_string()))?;
        let value: f64 = value.parse().map_err(|_| TextError::BadTerm(term.to_string()))?;
        if seen[index] {
            return Err(TextError::Duplicate(name.to_string()));
        }
        seen[index] = true;
        null[index] = value;
    }
    Ok(from_null_basis(&null))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_cover_every_blade_once() {
        let mut names: Vec<String> = (0..BLADES).map(blade_name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), BLADES);
    }

    #[test]
    fn null_vectors_print_by_name() {
        assert_eq!(to_text(&Multivector::e0()), "o:1.0");
        assert_eq!(to_text(&Multivector::einf()), "inf:1.0");
        assert_eq!(to_text(&Multivector::ZERO), "0");
        let e12 = Multivector::basis(blade::E12) * -0.5;
        assert_eq!(to_text(&e12), "e12:-0.5");
    }

    #[test]
    fn text_round_trip() {
        let m = from_text("1:0.25 e12:-0.5 e1inf:1.0 e3o:2.0 oinf:-3.0").unwrap();
        assert_eq!(to_text(&m), "1:0.25 e12:-0.5 e3o:2.0 e1inf:1.0 oinf:-3.0");
        assert_eq!(from_text(&to_text(&m)).unwrap(), m);
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(from_text("e9:1"), Err(TextError::UnknownBlade(_))));
        assert!(matches!(from_text("e1"), Err(TextError::BadTerm(_))));
        assert!(matches!(from_text("e1:1 e1:2"), Err(TextError::Duplicate(_))));
    }
}
