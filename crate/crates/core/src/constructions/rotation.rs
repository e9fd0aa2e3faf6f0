//! Rotation-based machines: planar MCQFAs and the rational free-group GPFA.

use crate::automata::{Alphabet, Gpfa, Mcqfa};
use crate::numeric::{ratio, Matrix, Rational};

use super::ConstructionError;

fn planar_rotation(theta: f64) -> Matrix<f64> {
    let (s, c) = theta.sin_cos();
    Matrix::from_rows(vec![vec![c, -s], vec![s, c]]).expect("2x2")
}

/// Two-state MCQFA over `{a}` rotating by `π/m` per symbol; state 1 accepts,
/// so `aⁱ` is accepted with probability `sin²(iπ/m)`.
pub fn rotation_mcqfa(m: u32) -> Result<Mcqfa<f64>, ConstructionError> {
    if m < 2 {
        return Err(ConstructionError::InvalidParameter(format!(
            "rotation machine needs m >= 2, got {m}"
        )));
    }
    let a = planar_rotation(std::f64::consts::PI / f64::from(m));
    Ok(Mcqfa::without_markers(Alphabet::chars("a"), vec![a], &[1])?)
}

/// Two-state MCQFA over `{a, b}`: `a` rotates by `θ`, `b` by `−θ`. The
/// acceptance probability is `sin²((|w|_a − |w|_b)·θ)`, nonzero exactly off
/// the balanced words when `θ/π` is irrational.
pub fn neq_mcqfa(theta: f64) -> Mcqfa<f64> {
    Mcqfa::without_markers(
        Alphabet::chars("ab"),
        vec![planar_rotation(theta), planar_rotation(-theta)],
        &[1],
    )
    .expect("rotations are orthogonal")
}

/// Rotation by `arccos(3/5)` about coordinate axis `axis` (0, 1 or 2).
pub fn rational_axis_rotation(axis: usize) -> Matrix<Rational> {
    let (c, s) = (ratio(3, 5), ratio(4, 5));
    let (p, q) = match axis {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    };
    let mut m = Matrix::identity(3);
    m[(p, p)] = c.clone();
    m[(q, q)] = c;
    m[(p, q)] = -s.clone();
    m[(q, p)] = s;
    m
}

/// Symbols `g1…gk, G1…Gk`; uppercase is the inverse generator.
pub fn generator_alphabet(k: usize) -> Alphabet {
    let lower = (1..=k).map(|i| format!("g{i}"));
    let upper = (1..=k).map(|i| format!("G{i}"));
    Alphabet::new(lower.chain(upper)).expect("distinct generator names")
}

/// Free generators `g_i = Rᵃ^{i} · Rᵇ · Rᵃ^{−i}` for `i = 0..k`, where `Rᵃ`
/// turns about the first axis and `Rᵇ` about the third.
pub fn free_generators(k: usize) -> Vec<Matrix<Rational>> {
    let ra = rational_axis_rotation(0);
    let ra_inv = ra.transpose();
    let rb = rational_axis_rotation(2);
    let mut conj = Matrix::identity(3);
    let mut conj_inv = Matrix::identity(3);
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        out.push(
            conj.mul(&rb)
                .and_then(|m| m.mul(&conj_inv))
                .expect("3x3"),
        );
        conj = conj.mul(&ra).expect("3x3");
        conj_inv = ra_inv.mul(&conj_inv).expect("3x3");
    }
    out
}

/// Rational three-state GPFA over `g1…gk, G1…Gk` whose value on `w` is the
/// `(0, 0)` entry of the product of the generators spelled by `w`; it equals
/// 1 exactly when that product is the identity.
///
/// The first axis is fixed only by powers of `Rᵃ`, and the subgroup spanned
/// by the generators contains none of them except the identity, so the value
/// 1 certifies the identity.
pub fn word_problem_gpfa(k: usize) -> Result<Gpfa<Rational>, ConstructionError> {
    if k < 2 {
        return Err(ConstructionError::InvalidParameter(format!(
            "word-problem machine needs rank k >= 2, got {k}"
        )));
    }
    let gens = free_generators(k);
    let inverses: Vec<_> = gens.iter().map(Matrix::transpose).collect();
    let mut e1 = vec![ratio(0, 1); 3];
    e1[0] = ratio(1, 1);
    Ok(Gpfa::new(
        generator_alphabet(k),
        gens.into_iter().chain(inverses).collect(),
        e1.clone(),
        e1,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Automaton;
    use crate::numeric::is_unitary_within;

    #[test]
    fn rotation_examples() {
        let m2 = rotation_mcqfa(2).unwrap();
        assert!((m2.evaluate(&[0]).unwrap() - 1.0).abs() < 1e-12);
        assert!(m2.evaluate(&[0, 0]).unwrap().abs() < 1e-12);
        let m3 = rotation_mcqfa(3).unwrap();
        assert!(m3.evaluate(&[0, 0, 0]).unwrap().abs() < 1e-12);
        let m5 = rotation_mcqfa(5).unwrap();
        let expected = (2.0 * std::f64::consts::PI / 5.0).sin().powi(2);
        assert!((m5.evaluate(&[0, 0]).unwrap() - expected).abs() < 1e-9);
        assert!((expected - 0.9045).abs() < 1e-4);
        assert!(rotation_mcqfa(1).is_err());
        assert_eq!(m5.n(), 2);
    }

    #[test]
    fn neq_examples() {
        let m = neq_mcqfa(1.0);
        assert!(m.evaluate_str("ab").unwrap().abs() < 1e-12);
        assert!(m.evaluate_str("aabb").unwrap().abs() < 1e-12);
        let v = m.evaluate_str("a").unwrap();
        assert!((v - 1f64.sin().powi(2)).abs() < 1e-9);
        assert!((v - 0.7081).abs() < 1e-4);
    }

    #[test]
    fn rational_rotations_are_orthogonal() {
        for axis in 0..3 {
            let r = rational_axis_rotation(axis);
            assert_eq!(r.mul(&r.transpose()).unwrap(), Matrix::identity(3));
        }
        for g in free_generators(3) {
            assert!(is_unitary_within(&g, 0.0));
        }
    }

    #[test]
    fn word_problem_examples() {
        let g = word_problem_gpfa(2).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.evaluate_str("").unwrap(), ratio(1, 1));
        assert_eq!(g.evaluate_str("g1G1").unwrap(), ratio(1, 1));
        // g1 = Rᵇ turns about the third axis: its (0, 0) entry is the cosine
        assert_eq!(g.evaluate_str("g1").unwrap(), ratio(3, 5));
        assert_ne!(g.evaluate_str("g1g2").unwrap(), ratio(1, 1));
        assert!(word_problem_gpfa(1).is_err());
    }
}
