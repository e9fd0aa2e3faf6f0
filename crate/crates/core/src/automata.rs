//! The four machine types and their acceptance semantics.
//!
//! Probabilistic machines ([`Pfa`], [`Gpfa`]) use the row-vector convention:
//! a state distribution `v` evolves as `v · A_σ`. Quantum machines
//! ([`Kwqfa`], [`Mcqfa`]) use the column convention: a ket `ψ` evolves as
//! `U_σ · ψ`, so `U_σ[(j, i)]` is the amplitude from state `i` to state `j`.
//! States are indexed from 0 and the start state is always 0.

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::numeric::{
    dot, first_non_stochastic_row, mat_vec, unitarity_defect, vec_mat, Field,
    Matrix, NumericError, Rational, DEFAULT_EPSILON,
};

/// Reserved name of the left end-marker in diagnostics and documents.
pub const LEFT_MARKER: &str = "cent";
/// Reserved name of the right end-marker in diagnostics and documents.
pub const RIGHT_MARKER: &str = "dollar";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AutomatonError {
    #[error("symbol {0:?} is not in the alphabet")]
    UnknownSymbol(String),
    #[error("symbol index {0} is out of range")]
    SymbolIndex(usize),
    #[error("duplicate alphabet symbol {0:?}")]
    DuplicateSymbol(String),
    #[error("invalid alphabet symbol {0:?}")]
    InvalidSymbol(String),
    #[error("expected {expected} transition matrices, found {found}")]
    TransitionCount { expected: usize, found: usize },
    #[error("matrix for {symbol:?} is {rows}x{cols}, expected {n}x{n}")]
    MatrixShape {
        symbol: String,
        rows: usize,
        cols: usize,
        n: usize,
    },
    #[error("{name} has length {found}, expected {expected}")]
    VectorLength {
        name: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("matrix for {symbol:?} is not stochastic: row {row} fails")]
    NotStochastic { symbol: String, row: usize },
    #[error("matrix for {symbol:?} is not unitary (defect {defect:e} exceeds {tol:e})")]
    NotUnitary { symbol: String, defect: f64, tol: f64 },
    #[error("state index {index} out of range for {n} states")]
    StateOutOfRange { index: usize, n: usize },
    #[error("state {0} is both accepting and rejecting")]
    OverlappingHaltSets(usize),
    #[error("machine must have at least one state")]
    NoStates,
    #[error("cannot parse word {0:?}")]
    WordParse(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Ordered set of input symbols; a word is a sequence of indices into it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self, AutomatonError> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            let bad = s.is_empty()
                || s == LEFT_MARKER
                || s == RIGHT_MARKER
                || s.chars().any(|c| c.is_whitespace() || c == ',' || c == '=');
            if bad {
                return Err(AutomatonError::InvalidSymbol(s.clone()));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(AutomatonError::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    /// Alphabet of single-character symbols, e.g. `Alphabet::chars("ab")`.
    pub fn chars(s: &str) -> Self {
        Self::new(s.chars().map(String::from)).expect("valid character alphabet")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, i: usize) -> &str {
        &self.symbols[i]
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.index.contains_key(symbol)
    }

    /// Same symbols, ignoring order.
    pub fn same_symbols(&self, other: &Alphabet) -> bool {
        self.len() == other.len() && self.symbols.iter().all(|s| other.contains(s))
    }

    /// Parses a word. Whitespace- or comma-separated input is read token by
    /// token; otherwise symbols are matched greedily, longest first. `""`
    /// and `"ε"` denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Vec<usize>, AutomatonError> {
        let t = text.trim();
        if t.is_empty() || t == "ε" {
            return Ok(Vec::new());
        }
        if t.contains(|c: char| c.is_whitespace() || c == ',') {
            return t
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    self.index_of(s)
                        .ok_or_else(|| AutomatonError::UnknownSymbol(s.to_string()))
                })
                .collect();
        }
        let mut out = Vec::new();
        let mut rest = t;
        while !rest.is_empty() {
            let best = self
                .symbols
                .iter()
                .enumerate()
                .filter(|(_, s)| rest.starts_with(s.as_str()))
                .max_by_key(|(_, s)| s.len());
            match best {
                Some((i, s)) => {
                    out.push(i);
                    rest = &rest[s.len()..];
                }
                None => return Err(AutomatonError::WordParse(text.to_string())),
            }
        }
        Ok(out)
    }

    /// Concatenated symbol names; `ε` for the empty word.
    pub fn render(&self, word: &[usize]) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        word.iter().map(|&i| self.symbols[i].as_str()).collect()
    }

    pub fn check_word(&self, word: &[usize]) -> Result<(), AutomatonError> {
        match word.iter().find(|&&i| i >= self.len()) {
            Some(&i) => Err(AutomatonError::SymbolIndex(i)),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.symbols.join(","))
    }
}

/// A machine that reads words left to right and produces a value.
///
/// The split into `initial`/`advance`/`finish` lets enumeration share work
/// between words with a common prefix.
pub trait Automaton {
    type Value: Field;
    type State: Clone;

    fn alphabet(&self) -> &Alphabet;

    /// Configuration before the first input symbol (after the left marker,
    /// for machines that have one).
    fn initial(&self) -> Self::State;

    fn advance(&self, state: &Self::State, symbol: usize) -> Self::State;

    /// Acceptance value of the word that led to `state`.
    fn finish(&self, state: &Self::State) -> Self::Value;

    fn state_count(&self) -> usize;

    fn evaluate(&self, word: &[usize]) -> Result<Self::Value, AutomatonError> {
        self.alphabet().check_word(word)?;
        let state = word
            .iter()
            .fold(self.initial(), |s, &sym| self.advance(&s, sym));
        Ok(self.finish(&state))
    }

    fn evaluate_str(&self, word: &str) -> Result<Self::Value, AutomatonError> {
        let w = self.alphabet().parse_word(word)?;
        self.evaluate(&w)
    }
}

fn check_square<T: Field>(symbol: &str, m: &Matrix<T>, n: usize) -> Result<(), AutomatonError> {
    if m.rows() != n || m.cols() != n {
        return Err(AutomatonError::MatrixShape {
            symbol: symbol.to_string(),
            rows: m.rows(),
            cols: m.cols(),
            n,
        });
    }
    Ok(())
}

fn check_states(indices: &[usize], n: usize) -> Result<Vec<usize>, AutomatonError> {
    let mut out = indices.to_vec();
    out.sort_unstable();
    out.dedup();
    if let Some(&bad) = out.iter().find(|&&i| i >= n) {
        return Err(AutomatonError::StateOutOfRange { index: bad, n });
    }
    Ok(out)
}

fn basis<T: Field>(n: usize, i: usize) -> Vec<T> {
    let mut v = vec![T::zero(); n];
    v[i] = T::one();
    v
}

/// One-way probabilistic automaton with end-markers and stochastic rational
/// matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Pfa {
    alphabet: Alphabet,
    left: Matrix<Rational>,
    trans: Vec<Matrix<Rational>>,
    right: Matrix<Rational>,
    accepting: Vec<usize>,
}

impl Pfa {
    pub fn new(
        alphabet: Alphabet,
        left: Matrix<Rational>,
        trans: Vec<Matrix<Rational>>,
        right: Matrix<Rational>,
        accepting: &[usize],
    ) -> Result<Self, AutomatonError> {
        let n = left.rows();
        if n == 0 {
            return Err(AutomatonError::NoStates);
        }
        if trans.len() != alphabet.len() {
            return Err(AutomatonError::TransitionCount {
                expected: alphabet.len(),
                found: trans.len(),
            });
        }
        let named = std::iter::once((LEFT_MARKER, &left))
            .chain(trans.iter().enumerate().map(|(i, m)| (alphabet.symbol(i), m)))
            .chain(std::iter::once((RIGHT_MARKER, &right)));
        for (symbol, m) in named {
            check_square(symbol, m, n)?;
            if let Some(row) = first_non_stochastic_row(m) {
                return Err(AutomatonError::NotStochastic {
                    symbol: symbol.to_string(),
                    row,
                });
            }
        }
        let accepting = check_states(accepting, n)?;
        Ok(Pfa {
            alphabet,
            left,
            trans,
            right,
            accepting,
        })
    }

    /// Machine whose end-marker matrices are identities.
    pub fn without_markers(
        alphabet: Alphabet,
        trans: Vec<Matrix<Rational>>,
        accepting: &[usize],
    ) -> Result<Self, AutomatonError> {
        let n = trans.first().map_or(0, Matrix::rows);
        let id = Matrix::identity(n.max(1));
        Self::new(alphabet, id.clone(), trans, id, accepting)
    }

    pub fn n(&self) -> usize {
        self.left.rows()
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

    pub fn transitions(&self) -> &[Matrix<Rational>] {
        &self.trans
    }

    pub fn accepting(&self) -> &[usize] {
        &self.accepting
    }

    /// `v₀ A_¢ A_{w₁} ⋯ A_{w_n} A_$` summed over accepting states.
    pub fn accept_prob(&self, word: &[usize]) -> Result<Rational, AutomatonError> {
        self.evaluate(word)
    }
}

impl Automaton for Pfa {
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

    fn finish(&self, state: &Vec<Rational>) -> Rational {
        let last = vec_mat(state, &self.right).expect("validated dimensions");
        self.accepting
            .iter()
            .fold(Rational::zero(), |acc, &i| acc + &last[i])
    }

    fn state_count(&self) -> usize {
        self.n()
    }
}

/// Generalized probabilistic automaton: arbitrary matrices, initial row
/// vector and final column vector, no end-markers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gpfa<T> {
    alphabet: Alphabet,
    trans: Vec<Matrix<T>>,
    v0: Vec<T>,
    f: Vec<T>,
}

impl<T: Field> Gpfa<T> {
    pub fn new(
        alphabet: Alphabet,
        trans: Vec<Matrix<T>>,
        v0: Vec<T>,
        f: Vec<T>,
    ) -> Result<Self, AutomatonError> {
        let n = v0.len();
        if n == 0 {
            return Err(AutomatonError::NoStates);
        }
        if f.len() != n {
            return Err(AutomatonError::VectorLength {
                name: "f",
                expected: n,
                found: f.len(),
            });
        }
        if trans.len() != alphabet.len() {
            return Err(AutomatonError::TransitionCount {
                expected: alphabet.len(),
                found: trans.len(),
            });
        }
        for (i, m) in trans.iter().enumerate() {
            check_square(alphabet.symbol(i), m, n)?;
        }
        Ok(Gpfa {
            alphabet,
            trans,
            v0,
            f,
        })
    }

    pub fn n(&self) -> usize {
        self.v0.len()
    }

    pub fn transition(&self, symbol: usize) -> &Matrix<T> {
        &self.trans[symbol]
    }

    /// Transition matrix looked up by symbol name.
    pub fn transition_named(&self, symbol: &str) -> Option<&Matrix<T>> {
        self.alphabet.index_of(symbol).map(|i| &self.trans[i])
    }

    pub fn transitions(&self) -> &[Matrix<T>] {
        &self.trans
    }

    pub fn initial_vector(&self) -> &[T] {
        &self.v0
    }

    pub fn final_vector(&self) -> &[T] {
        &self.f
    }

    /// `v₀ A_{w₁} ⋯ A_{w_n} f`.
    pub fn value(&self, word: &[usize]) -> Result<T, AutomatonError> {
        self.evaluate(word)
    }

    /// Product `A_{w₁} ⋯ A_{w_n}` (identity for the empty word).
    pub fn word_matrix(&self, word: &[usize]) -> Result<Matrix<T>, AutomatonError> {
        self.alphabet.check_word(word)?;
        let mut acc = Matrix::identity(self.n());
        for &s in word {
            acc = acc.mul(&self.trans[s])?;
        }
        Ok(acc)
    }
}

impl<T: Field> Automaton for Gpfa<T> {
    type Value = T;
    type State = Vec<T>;

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn initial(&self) -> Vec<T> {
        self.v0.clone()
    }

    fn advance(&self, state: &Vec<T>, symbol: usize) -> Vec<T> {
        vec_mat(state, &self.trans[symbol]).expect("validated dimensions")
    }

    fn finish(&self, state: &Vec<T>) -> T {
        dot(state, &self.f)
    }

    fn state_count(&self) -> usize {
        self.n()
    }
}

fn check_unitary<T: Field>(symbol: &str, m: &Matrix<T>, n: usize, tol: f64) -> Result<(), AutomatonError> {
    check_square(symbol, m, n)?;
    let defect = unitarity_defect(m);
    if defect > tol {
        return Err(AutomatonError::NotUnitary {
            symbol: symbol.to_string(),
            defect,
            tol,
        });
    }
    Ok(())
}

/// Unitary transitions for `¢`, every input symbol and `$`.
#[derive(Debug, Clone, PartialEq)]
struct UnitaryFamily<T> {
    left: Matrix<T>,
    trans: Vec<Matrix<T>>,
    right: Matrix<T>,
}

impl<T: Field> UnitaryFamily<T> {
    fn validate(
        alphabet: &Alphabet,
        left: Matrix<T>,
        trans: Vec<Matrix<T>>,
        right: Matrix<T>,
        tol: f64,
    ) -> Result<Self, AutomatonError> {
        let n = left.rows();
        if n == 0 {
            return Err(AutomatonError::NoStates);
        }
        if trans.len() != alphabet.len() {
            return Err(AutomatonError::TransitionCount {
                expected: alphabet.len(),
                found: trans.len(),
            });
        }
        check_unitary(LEFT_MARKER, &left, n, tol)?;
        for (i, m) in trans.iter().enumerate() {
            check_unitary(alphabet.symbol(i), m, n, tol)?;
        }
        check_unitary(RIGHT_MARKER, &right, n, tol)?;
        Ok(UnitaryFamily { left, trans, right })
    }

    fn n(&self) -> usize {
        self.left.rows()
    }
}

/// Per-step record of a Kondacs–Watrous run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace<T> {
    pub accept_prob: T,
    pub reject_prob: T,
    /// Non-halting part of the ket after each measurement, one entry per
    /// symbol of `¢w$`.
    pub vectors: Vec<Vec<T>>,
}

/// Configuration of a Kondacs–Watrous machine between symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct KwState<T> {
    pub ket: Vec<T>,
    pub accept_prob: T,
    pub reject_prob: T,
}

/// Kondacs–Watrous QFA: measured after every symbol, accepting and
/// rejecting states halt and drop out of the ket.
#[derive(Debug, Clone, PartialEq)]
pub struct Kwqfa<T> {
    alphabet: Alphabet,
    unitaries: UnitaryFamily<T>,
    accepting: Vec<usize>,
    rejecting: Vec<usize>,
}

impl<T: Field> Kwqfa<T> {
    pub fn new(
        alphabet: Alphabet,
        left: Matrix<T>,
        trans: Vec<Matrix<T>>,
        right: Matrix<T>,
        accepting: &[usize],
        rejecting: &[usize],
    ) -> Result<Self, AutomatonError> {
        Self::with_tolerance(alphabet, left, trans, right, accepting, rejecting, DEFAULT_EPSILON)
    }

    pub fn with_tolerance(
        alphabet: Alphabet,
        left: Matrix<T>,
        trans: Vec<Matrix<T>>,
        right: Matrix<T>,
        accepting: &[usize],
        rejecting: &[usize],
        tol: f64,
    ) -> Result<Self, AutomatonError> {
        let unitaries = UnitaryFamily::validate(&alphabet, left, trans, right, tol)?;
        let n = unitaries.n();
        let accepting = check_states(accepting, n)?;
        let rejecting = check_states(rejecting, n)?;
        if let Some(&q) = accepting.iter().find(|q| rejecting.contains(q)) {
            return Err(AutomatonError::OverlappingHaltSets(q));
        }
        Ok(Kwqfa {
            alphabet,
            unitaries,
            accepting,
            rejecting,
        })
    }

    pub fn n(&self) -> usize {
        self.unitaries.n()
    }

    pub fn left_marker(&self) -> &Matrix<T> {
        &self.unitaries.left
    }

    pub fn right_marker(&self) -> &Matrix<T> {
        &self.unitaries.right
    }

    pub fn transition(&self, symbol: usize) -> &Matrix<T> {
        &self.unitaries.trans[symbol]
    }

    pub fn transitions(&self) -> &[Matrix<T>] {
        &self.unitaries.trans
    }

    pub fn accepting(&self) -> &[usize] {
        &self.accepting
    }

    pub fn rejecting(&self) -> &[usize] {
        &self.rejecting
    }

    fn step(&self, state: &KwState<T>, u: &Matrix<T>) -> KwState<T> {
        let mut ket = mat_vec(u, &state.ket).expect("validated dimensions");
        let mut accept_prob = state.accept_prob.clone();
        let mut reject_prob = state.reject_prob.clone();
        for &q in &self.accepting {
            accept_prob = accept_prob + &(ket[q].clone() * &ket[q]);
            ket[q] = T::zero();
        }
        for &q in &self.rejecting {
            reject_prob = reject_prob + &(ket[q].clone() * &ket[q]);
            ket[q] = T::zero();
        }
        KwState {
            ket,
            accept_prob,
            reject_prob,
        }
    }

    fn start(&self) -> KwState<T> {
        KwState {
            ket: basis(self.n(), 0),
            accept_prob: T::zero(),
            reject_prob: T::zero(),
        }
    }

    /// Runs on `¢w$`, recording the surviving ket after every measurement.
    pub fn run(&self, word: &[usize]) -> Result<RunTrace<T>, AutomatonError> {
        self.alphabet.check_word(word)?;
        let mut state = self.step(&self.start(), &self.unitaries.left);
        let mut vectors = vec![state.ket.clone()];
        for &s in word {
            state = self.step(&state, &self.unitaries.trans[s]);
            vectors.push(state.ket.clone());
        }
        state = self.step(&state, &self.unitaries.right);
        vectors.push(state.ket.clone());
        Ok(RunTrace {
            accept_prob: state.accept_prob,
            reject_prob: state.reject_prob,
            vectors,
        })
    }
}

impl<T: Field> Automaton for Kwqfa<T> {
    type Value = T;
    type State = KwState<T>;

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn initial(&self) -> KwState<T> {
        self.step(&self.start(), &self.unitaries.left)
    }

    fn advance(&self, state: &KwState<T>, symbol: usize) -> KwState<T> {
        self.step(state, &self.unitaries.trans[symbol])
    }

    fn finish(&self, state: &KwState<T>) -> T {
        self.step(state, &self.unitaries.right).accept_prob
    }

    fn state_count(&self) -> usize {
        self.n()
    }
}

/// Moore–Crutchfield QFA: unitary evolution on `¢w$`, one measurement at
/// the end.
#[derive(Debug, Clone, PartialEq)]
pub struct Mcqfa<T> {
    alphabet: Alphabet,
    unitaries: UnitaryFamily<T>,
    accepting: Vec<usize>,
}

impl<T: Field> Mcqfa<T> {
    pub fn new(
        alphabet: Alphabet,
        left: Matrix<T>,
        trans: Vec<Matrix<T>>,
        right: Matrix<T>,
        accepting: &[usize],
    ) -> Result<Self, AutomatonError> {
        Self::with_tolerance(alphabet, left, trans, right, accepting, DEFAULT_EPSILON)
    }

    pub fn with_tolerance(
        alphabet: Alphabet,
        left: Matrix<T>,
        trans: Vec<Matrix<T>>,
        right: Matrix<T>,
        accepting: &[usize],
        tol: f64,
    ) -> Result<Self, AutomatonError> {
        let unitaries = UnitaryFamily::validate(&alphabet, left, trans, right, tol)?;
        let accepting = check_states(accepting, unitaries.n())?;
        Ok(Mcqfa {
            alphabet,
            unitaries,
            accepting,
        })
    }

    /// Machine with identity end-marker matrices.
    pub fn without_markers(
        alphabet: Alphabet,
        trans: Vec<Matrix<T>>,
        accepting: &[usize],
    ) -> Result<Self, AutomatonError> {
        let n = trans.first().map_or(1, Matrix::rows);
        let id = Matrix::identity(n);
        Self::new(alphabet, id.clone(), trans, id, accepting)
    }

    pub fn n(&self) -> usize {
        self.unitaries.n()
    }

    pub fn left_marker(&self) -> &Matrix<T> {
        &self.unitaries.left
    }

    pub fn right_marker(&self) -> &Matrix<T> {
        &self.unitaries.right
    }

    pub fn transition(&self, symbol: usize) -> &Matrix<T> {
        &self.unitaries.trans[symbol]
    }

    pub fn transitions(&self) -> &[Matrix<T>] {
        &self.unitaries.trans
    }

    pub fn accepting(&self) -> &[usize] {
        &self.accepting
    }

    pub fn accept_prob(&self, word: &[usize]) -> Result<T, AutomatonError> {
        self.evaluate(word)
    }
}

impl<T: Field> Automaton for Mcqfa<T> {
    type Value = T;
    type State = Vec<T>;

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn initial(&self) -> Vec<T> {
        self.unitaries.left.column(0)
    }

    fn advance(&self, state: &Vec<T>, symbol: usize) -> Vec<T> {
        mat_vec(&self.unitaries.trans[symbol], state).expect("validated dimensions")
    }

    fn finish(&self, state: &Vec<T>) -> T {
        let last = mat_vec(&self.unitaries.right, state).expect("validated dimensions");
        self.accepting
            .iter()
            .fold(T::zero(), |acc, &q| acc + &(last[q].clone() * &last[q]))
    }

    fn state_count(&self) -> usize {
        self.n()
    }
}
