//! PFA with cutpoint ½ → Kondacs–Watrous QFA recognising the `≠ ½` language
//! with cutpoint 0.
//!
//! The pipeline has three stages:
//!
//! 1. [`extend_pfa`] adds three states so that, on `¢w$`, the exact final
//!    vector is `(0…0 | (2f(w)−1)/4, (3−2f(w))/4, 0)`.
//! 2. [`unitary_complete`] embeds each extended matrix `A'_σ`, scaled by
//!    `c_σ`, as the top-left block of an orthogonal matrix `U_σᵀ` of three
//!    times the size.
//! 3. [`pfa_to_nqfa`] assembles the KWQFA: state `n` accepts, state `n+1`
//!    and every completion state reject.

use num_traits::{One, Signed, Zero};

use crate::automata::{Alphabet, Automaton, Kwqfa, Pfa, LEFT_MARKER, RIGHT_MARKER};
use crate::numeric::{dot, rational_to_f64, ratio, vec_mat, Matrix, Rational};

use super::ConstructionError;

/// Residual norm below which a Gram–Schmidt candidate is considered
/// dependent and skipped.
pub const DEPENDENCE_THRESHOLD: f64 = 1e-9;

/// Affine coefficients `(a, b)` such that `a·λ + b = ½`.
pub fn shift_coefficients(lambda: &Rational) -> Result<(Rational, Rational), ConstructionError> {
    let zero = Rational::zero();
    let one = Rational::one();
    if *lambda <= zero || *lambda >= one {
        return Err(ConstructionError::CutpointOutOfRange(lambda.to_string()));
    }
    let half = ratio(1, 2);
    let two = ratio(2, 1);
    if *lambda <= half {
        let denom = two.clone() * (one.clone() - lambda);
        let a = one.clone() / &denom;
        let b = (one - two * lambda) / denom;
        Ok((a, b))
    } else {
        Ok((one / (two * lambda), zero))
    }
}

/// PFA whose value is `a·f_P(w) + b`, so its three-way split around ½
/// matches that of `P` around `λ`.
///
/// Two sink states are appended (index `n` accepts, `n+1` rejects); the left
/// marker branches from the start state into `P` with probability `a`, into
/// the accepting sink with probability `b`, and into the rejecting sink with
/// the remainder.
pub fn shift_cutpoint(p: &Pfa, lambda: &Rational) -> Result<Pfa, ConstructionError> {
    let (a, b) = shift_coefficients(lambda)?;
    let n = p.n();
    let rest = Rational::one() - &a - &b;

    let mut left = Matrix::zeros(n + 2, n + 2);
    left.set_block(0, 0, p.left_marker());
    for j in 0..n {
        left[(0, j)] = p.left_marker()[(0, j)].clone() * &a;
    }
    left[(0, n)] = b;
    left[(0, n + 1)] = rest;
    left[(n, n)] = Rational::one();
    left[(n + 1, n + 1)] = Rational::one();

    let sinks = Matrix::identity(2);
    let trans = p
        .transitions()
        .iter()
        .map(|m| m.direct_sum(&sinks))
        .collect();
    let right = p.right_marker().direct_sum(&sinks);
    let mut accepting = p.accepting().to_vec();
    accepting.push(n);
    Ok(Pfa::new(p.alphabet().clone(), left, trans, right, &accepting)?)
}

/// The `(n+3)`-state rational machine that imitates a PFA and exposes
/// `f(w) − ½` in coordinate `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedMachine {
    alphabet: Alphabet,
    original_states: usize,
    left: Matrix<Rational>,
    trans: Vec<Matrix<Rational>>,
    right: Matrix<Rational>,
}

impl ExtendedMachine {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// `n + 3`.
    pub fn state_count(&self) -> usize {
        self.original_states + 3
    }

    pub fn original_states(&self) -> usize {
        self.original_states
    }

    pub fn left_marker(&self) -> &Matrix<Rational> {
        &self.left
    }

    pub fn right_marker(&self) -> &Matrix<Rational> {
        &self.right
    }

    pub fn transition(&self, symbol: usize) -> &Matrix<Rational> {
        &self.trans[symbol]
    }

    /// `(name, A'_σ)` for `¢`, each input symbol, then `$`.
    pub fn matrices(&self) -> impl Iterator<Item = (&str, &Matrix<Rational>)> {
        std::iter::once((LEFT_MARKER, &self.left))
            .chain(
                self.trans
                    .iter()
                    .enumerate()
                    .map(|(i, m)| (self.alphabet.symbol(i), m)),
            )
            .chain(std::iter::once((RIGHT_MARKER, &self.right)))
    }

    /// Row vectors `v'` after `¢`, after each symbol of `w`, and after `$`.
    pub fn trace(&self, word: &[usize]) -> Result<Vec<Vec<Rational>>, ConstructionError> {
        self.alphabet.check_word(word)?;
        let mut v = self.left.row(0).to_vec();
        let mut out = vec![v.clone()];
        for &s in word {
            v = vec_mat(&v, &self.trans[s])?;
            out.push(v.clone());
        }
        v = vec_mat(&v, &self.right)?;
        out.push(v);
        Ok(out)
    }

    /// Final vector `v'_{|w|}` on `¢w$`.
    pub fn final_vector(&self, word: &[usize]) -> Result<Vec<Rational>, ConstructionError> {
        Ok(self.trace(word)?.pop().expect("trace is never empty"))
    }
}

/// Builds the extended machine of a PFA.
pub fn extend_pfa(p: &Pfa) -> ExtendedMachine {
    let n = p.n();
    let d = n + 3;
    let half = ratio(1, 2);

    let mut left = Matrix::zeros(d, d);
    for j in 0..n {
        left[(0, j)] = p.left_marker()[(0, j)].clone() * &half;
    }
    left[(0, n + 2)] = half.clone();
    for i in 1..d {
        left[(i, 0)] = Rational::one();
    }

    let tail = Matrix::identity(3);
    let trans = p
        .transitions()
        .iter()
        .map(|m| m.direct_sum(&tail))
        .collect();

    // routes the PFA's final distribution into the two readout coordinates
    let mut readout = Matrix::zeros(d, d);
    for i in 0..n {
        if p.accepting().contains(&i) {
            readout[(i, n)] = Rational::one();
        } else {
            readout[(i, n + 1)] = Rational::one();
        }
    }
    readout[(n, n)] = Rational::one();
    readout[(n + 1, n + 1)] = Rational::one();
    readout[(n + 2, n)] = -half.clone();
    readout[(n + 2, n + 1)] = half;
    let right = p
        .right_marker()
        .direct_sum(&tail)
        .mul(&readout)
        .expect("square blocks of equal size");

    ExtendedMachine {
        alphabet: p.alphabet().clone(),
        original_states: n,
        left,
        trans,
        right,
    }
}

/// Completion data for one symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolCompletion {
    /// `U_σ`, acting on column kets.
    pub unitary: Matrix<f64>,
    /// `c_σ = 1 / l_max`.
    pub scale: f64,
    /// Lower-triangular `B_σ`, exact.
    pub lower: Matrix<Rational>,
    /// Squared row lengths `l_i²` of `(A'_σ | B_σ)`, exact.
    pub squared_lengths: Vec<Rational>,
}

impl SymbolCompletion {
    /// Top-left `block_dim × block_dim` block of `U_σᵀ`; equals `c_σ·A'_σ`.
    pub fn transposed_top_block(&self, block_dim: usize) -> Matrix<f64> {
        self.unitary.transpose().block(0, 0, block_dim, block_dim)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionResult {
    /// `n + 3`; every unitary is `3·block_dim` square.
    pub block_dim: usize,
    pub left: SymbolCompletion,
    pub trans: Vec<SymbolCompletion>,
    pub right: SymbolCompletion,
}

impl CompletionResult {
    /// `(name, completion)` for `¢`, each input symbol, then `$`.
    pub fn symbols<'a>(
        &'a self,
        alphabet: &'a Alphabet,
    ) -> impl Iterator<Item = (&'a str, &'a SymbolCompletion)> {
        std::iter::once((LEFT_MARKER, &self.left))
            .chain(
                self.trans
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (alphabet.symbol(i), c)),
            )
            .chain(std::iter::once((RIGHT_MARKER, &self.right)))
    }
}

/// Runs the completion procedure on every matrix of `e`.
pub fn unitary_complete(e: &ExtendedMachine) -> CompletionResult {
    CompletionResult {
        block_dim: e.state_count(),
        left: complete_matrix(&e.left),
        trans: e.trans.iter().map(complete_matrix).collect(),
        right: complete_matrix(&e.right),
    }
}

/// Embeds a square rational matrix `A` (scaled) in an orthogonal matrix.
///
/// `B` is built exactly: for each `i` below the last row, `b_ii = 1` and
/// every later row `j` gets `b_ji` chosen to make rows `i` and `j` of
/// `(A | B)` orthogonal. Row `i` of `B` has no entries right of column `i`,
/// so later updates never disturb earlier orthogonality. `C` pads every row
/// to the longest length `l_max`, and the remaining `2d` rows come from
/// Gram–Schmidt against the standard basis.
pub fn complete_matrix(a: &Matrix<Rational>) -> SymbolCompletion {
    let d = a.rows();
    let mut lower = Matrix::<Rational>::zeros(d, d);
    for i in 0..d.saturating_sub(1) {
        lower[(i, i)] = Rational::one();
        for j in i + 1..d {
            let mut overlap = dot(a.row(i), a.row(j));
            for k in 0..i {
                overlap = overlap + &(lower[(i, k)].clone() * &lower[(j, k)]);
            }
            lower[(j, i)] = -overlap;
        }
    }

    let squared_lengths: Vec<Rational> = (0..d)
        .map(|i| dot(a.row(i), a.row(i)) + &dot(lower.row(i), lower.row(i)))
        .collect();
    let max_sq = squared_lengths
        .iter()
        .max()
        .cloned()
        .unwrap_or_else(Rational::one);
    let l_max = rational_to_f64(&max_sq).sqrt();
    let scale = 1.0 / l_max;

    let width = 3 * d;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(width);
    for i in 0..d {
        let pad_sq = rational_to_f64(&(max_sq.clone() - &squared_lengths[i]).abs());
        let mut row = vec![0.0; width];
        for j in 0..d {
            row[j] = rational_to_f64(&a[(i, j)]) * scale;
            row[d + j] = rational_to_f64(&lower[(i, j)]) * scale;
        }
        row[2 * d + i] = pad_sq.sqrt() * scale;
        rows.push(row);
    }

    for candidate in 0..width {
        if rows.len() == width {
            break;
        }
        let mut v = vec![0.0; width];
        v[candidate] = 1.0;
        // two passes of modified Gram–Schmidt keep the defect near machine precision
        for _ in 0..2 {
            for r in &rows {
                let proj: f64 = r.iter().zip(&v).map(|(x, y)| x * y).sum();
                for (vi, ri) in v.iter_mut().zip(r) {
                    *vi -= proj * ri;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < DEPENDENCE_THRESHOLD {
            continue;
        }
        rows.push(v.into_iter().map(|x| x / norm).collect());
    }
    debug_assert_eq!(rows.len(), width, "standard basis spans the space");

    let transposed = Matrix::from_rows(rows).expect("rectangular by construction");
    SymbolCompletion {
        unitary: transposed.transpose(),
        scale,
        lower,
        squared_lengths,
    }
}

/// All intermediate artefacts of the PFA → KWQFA pipeline.
#[derive(Debug, Clone)]
pub struct NqfaPipeline {
    pub extended: ExtendedMachine,
    pub completion: CompletionResult,
    pub machine: Kwqfa<f64>,
}

/// KWQFA accepting with nonzero probability exactly the words on which
/// `p`'s value differs from ½.
pub fn pfa_to_nqfa(p: &Pfa) -> Result<Kwqfa<f64>, ConstructionError> {
    Ok(pfa_to_nqfa_pipeline(p)?.machine)
}

pub fn pfa_to_nqfa_pipeline(p: &Pfa) -> Result<NqfaPipeline, ConstructionError> {
    let extended = extend_pfa(p);
    let completion = unitary_complete(&extended);
    let n = p.n();
    let d = extended.state_count();
    let rejecting: Vec<usize> = std::iter::once(n + 1).chain(d..3 * d).collect();
    let machine = Kwqfa::new(
        p.alphabet().clone(),
        completion.left.unitary.clone(),
        completion
            .trans
            .iter()
            .map(|c| c.unitary.clone())
            .collect(),
        completion.right.unitary.clone(),
        &[n],
        &rejecting,
    )?;
    Ok(NqfaPipeline {
        extended,
        completion,
        machine,
    })
}

/// Exact readout `(2f(w) − 1)/4` of the extended machine: zero iff the
/// PFA's value on `w` is ½.
pub fn extended_readout(e: &ExtendedMachine, word: &[usize]) -> Result<Rational, ConstructionError> {
    Ok(e.final_vector(word)?[e.original_states()].clone())
}

impl Automaton for ExtendedMachine {
    type Value = Rational;
    type State = Vec<Rational>;

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn initial(&self) -> Vec<Rational> {
        self.left.row(0).to_vec()
    }

    fn advance(&self, state: &Vec<Rational>, symbol: usize) -> Vec<Rational> {
        vec_mat(state, &self.trans[symbol]).expect("validated dimensions")
    }

    /// Readout coordinate `n` of the final vector.
    fn finish(&self, state: &Vec<Rational>) -> Rational {
        vec_mat(state, &self.right).expect("validated dimensions")[self.original_states].clone()
    }

    fn state_count(&self) -> usize {
        self.original_states + 3
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::is_unitary_within;

    fn coin_pfa() -> Pfa {
        let a = Matrix::from_rows(vec![
            vec![ratio(1, 2), ratio(1, 2)],
            vec![ratio(0, 1), ratio(1, 1)],
        ])
        .unwrap();
        Pfa::without_markers(Alphabet::chars("a"), vec![a], &[1]).unwrap()
    }

    #[test]
    fn shift_coefficient_examples() {
        assert_eq!(shift_coefficients(&ratio(1, 2)).unwrap(), (ratio(1, 1), ratio(0, 1)));
        assert_eq!(shift_coefficients(&ratio(1, 4)).unwrap(), (ratio(2, 3), ratio(1, 3)));
        assert_eq!(shift_coefficients(&ratio(3, 4)).unwrap(), (ratio(2, 3), ratio(0, 1)));
        assert!(shift_coefficients(&ratio(0, 1)).is_err());
        assert!(shift_coefficients(&ratio(1, 1)).is_err());
    }

    #[test]
    fn shifted_machine_is_affine_image() {
        let p = coin_pfa();
        for lambda in [ratio(1, 4), ratio(1, 2), ratio(3, 4)] {
            let (a, b) = shift_coefficients(&lambda).unwrap();
            let q = shift_cutpoint(&p, &lambda).unwrap();
            assert_eq!(q.n(), p.n() + 2);
            for len in 0..5 {
                let w = vec![0; len];
                let expected = a.clone() * &p.evaluate(&w).unwrap() + &b;
                assert_eq!(q.evaluate(&w).unwrap(), expected);
            }
        }
        let (a, b) = shift_coefficients(&ratio(1, 4)).unwrap();
        assert_eq!(a * &ratio(1, 4) + &b, ratio(1, 2));
    }

    #[test]
    fn extended_final_vector_examples() {
        let e = extend_pfa(&coin_pfa());
        let n = 2;
        assert_eq!(e.state_count(), 5);
        // f(a) = 1/2
        assert_eq!(e.final_vector(&[0]).unwrap()[n], ratio(0, 1));
        // f(ε) = 0
        let v = e.final_vector(&[]).unwrap();
        assert_eq!(v[n], ratio(-1, 4));
        assert_eq!(v[n + 1], ratio(3, 4));
        // f(aa) = 3/4
        assert_eq!(e.final_vector(&[0, 0]).unwrap()[n], ratio(1, 8));
        assert!(v[..n].iter().all(Zero::is_zero));
        assert!(v[n + 2].is_zero());
    }

    #[test]
    fn identity_completion_trace() {
        let c = complete_matrix(&Matrix::identity(4));
        assert!((c.scale - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(c.lower, {
            let mut b = Matrix::<Rational>::identity(4);
            b[(3, 3)] = Rational::zero();
            b
        });
        assert_eq!(
            c.squared_lengths,
            vec![ratio(2, 1), ratio(2, 1), ratio(2, 1), ratio(1, 1)]
        );
        let ut = c.unitary.transpose();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == 3 && j == 3 { c.scale } else { 0.0 };
                assert!((ut[(i, 8 + j)] - expected).abs() < 1e-12);
            }
        }
        assert!(is_unitary_within(&c.unitary, 1e-9));
    }

    #[test]
    fn coin_pipeline_shape_and_signs() {
        let pipe = pfa_to_nqfa_pipeline(&coin_pfa()).unwrap();
        assert_eq!(pipe.machine.n(), 15);
        assert_eq!(pipe.machine.accepting(), &[2]);
        assert_eq!(pipe.machine.rejecting().len(), 1 + 10);
        let at_half = pipe.machine.run(&[0]).unwrap();
        assert!(at_half.accept_prob <= 1e-12);
        let at_zero = pipe.machine.run(&[]).unwrap();
        assert!(at_zero.accept_prob > 1e-9);
    }
}
