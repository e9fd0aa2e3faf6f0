//! Cutpoint classification and bounded language comparisons.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::automata::{Automaton, AutomatonError, Gpfa};
use crate::enumerate;
use crate::numeric::{Field, NumericError, Scalar};

/// Default enumeration bound for equivalence checks.
pub const DEFAULT_MAXLEN: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CutpointError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("cutpoint {0} outside [0, 1] for a probabilistic or quantum machine")]
    OutOfRange(String),
    #[error("unknown relation {0:?} (expected less, equal, greater or not-equal)")]
    UnknownRelation(String),
    #[error("machines have different alphabets")]
    AlphabetMismatch,
}

/// Which side of the cutpoint a value falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Less,
    Equal,
    Greater,
}

impl From<Ordering> for Cell {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => Cell::Less,
            Ordering::Equal => Cell::Equal,
            Ordering::Greater => Cell::Greater,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cell::Less => "less",
            Cell::Equal => "equal",
            Cell::Greater => "greater",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Less,
    Equal,
    Greater,
    NotEqual,
}

impl Relation {
    pub fn holds(self, cell: Cell) -> bool {
        match self {
            Relation::Less => cell == Cell::Less,
            Relation::Equal => cell == Cell::Equal,
            Relation::Greater => cell == Cell::Greater,
            Relation::NotEqual => cell != Cell::Equal,
        }
    }
}

impl FromStr for Relation {
    type Err = CutpointError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "less" | "lt" | "<" => Ok(Relation::Less),
            "equal" | "eq" | "=" => Ok(Relation::Equal),
            "greater" | "gt" | ">" => Ok(Relation::Greater),
            "not-equal" | "ne" | "!=" => Ok(Relation::NotEqual),
            other => Err(CutpointError::UnknownRelation(other.to_string())),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Less => "less",
            Relation::Equal => "equal",
            Relation::Greater => "greater",
            Relation::NotEqual => "not-equal",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutpointSpec {
    pub lambda: Scalar,
    pub relation: Relation,
}

impl CutpointSpec {
    pub fn new(lambda: Scalar, relation: Relation) -> Self {
        CutpointSpec { lambda, relation }
    }

    /// Recognition with cutpoint λ, i.e. the `> λ` class.
    pub fn greater(lambda: Scalar) -> Self {
        Self::new(lambda, Relation::Greater)
    }

    fn lambda_as<T: Field>(&self) -> Result<T, CutpointError> {
        Ok(T::from_scalar(&self.lambda)?)
    }

    fn check_unit_interval(&self) -> Result<(), CutpointError> {
        let x = self.lambda.to_f64();
        if (0.0..=1.0).contains(&x) {
            Ok(())
        } else {
            Err(CutpointError::OutOfRange(self.lambda.to_string()))
        }
    }
}

/// Three-way comparison of `v` against `lambda`; floats within `eps` are
/// equal, rationals compare exactly.
pub fn cell_of<T: Field>(v: &T, lambda: &T, eps: f64) -> Cell {
    v.compare_within(lambda, eps).into()
}

/// Cell of a runtime scalar; mixed kinds are rejected.
pub fn cell_of_scalar(v: &Scalar, lambda: &Scalar, eps: f64) -> Result<Cell, CutpointError> {
    match (v, lambda) {
        (Scalar::Rational(a), Scalar::Rational(b)) => Ok(cell_of(a, b, eps)),
        (Scalar::Float(a), Scalar::Float(b)) => Ok(cell_of(a, b, eps)),
        (a, b) => Err(NumericError::KindMismatch(a.kind(), b.kind()).into()),
    }
}

/// True iff `v` stands in `spec.relation` to `spec.lambda`.
pub fn classify_value(v: &Scalar, spec: &CutpointSpec, eps: f64) -> Result<bool, CutpointError> {
    Ok(spec.relation.holds(cell_of_scalar(v, &spec.lambda, eps)?))
}

/// Machines whose values are probabilities, so cutpoints must lie in
/// `[0, 1]`. GPFA values are unrestricted.
pub trait CutpointDomain {
    fn unit_interval(&self) -> bool {
        true
    }
}

impl CutpointDomain for crate::automata::Pfa {}
impl<T> CutpointDomain for crate::automata::Kwqfa<T> {}
impl<T> CutpointDomain for crate::automata::Mcqfa<T> {}
impl<T> CutpointDomain for Gpfa<T> {
    fn unit_interval(&self) -> bool {
        false
    }
}

/// Evaluates the machine on `word` and classifies the value. Kondacs–Watrous
/// machines classify their acceptance probability.
pub fn member_at_cutpoint<A: Automaton + CutpointDomain>(
    machine: &A,
    spec: &CutpointSpec,
    word: &[usize],
    eps: f64,
) -> Result<bool, CutpointError> {
    if machine.unit_interval() {
        spec.check_unit_interval()?;
    }
    let lambda: A::Value = spec.lambda_as()?;
    let v = machine.evaluate(word)?;
    Ok(spec.relation.holds(cell_of(&v, &lambda, eps)))
}

/// Bounded audit that `g` recognises its language with one-sided cutpoint
/// 0: returns the first word up to `maxlen` with a negative value.
pub fn one_sided_zero_check<T: Field>(g: &Gpfa<T>, maxlen: usize) -> Option<Vec<usize>> {
    let zero = T::zero();
    enumerate::find_first(g, maxlen, |_, v| *v < zero)
}

/// Bounded check of equivalence under cutpoint separation: every word up to
/// `maxlen` must fall in the same cell for `(a1, λ1)` and `(a2, λ2)`.
/// Returns the first word where the cells differ.
pub fn equivalent_under_separation_bounded<A1, A2>(
    a1: &A1,
    lambda1: &Scalar,
    a2: &A2,
    lambda2: &Scalar,
    maxlen: usize,
    eps: f64,
) -> Result<Option<Vec<usize>>, CutpointError>
where
    A1: Automaton,
    A2: Automaton,
{
    if a1.alphabet() != a2.alphabet() {
        return Err(CutpointError::AlphabetMismatch);
    }
    let l1 = A1::Value::from_scalar(lambda1)?;
    let l2 = A2::Value::from_scalar(lambda2)?;
    Ok(enumerate::search(
        a1.alphabet().len(),
        maxlen,
        (a1.initial(), a2.initial()),
        |(s1, s2), sym| (a1.advance(s1, sym), a2.advance(s2, sym)),
        |_, (s1, s2)| cell_of(&a1.finish(s1), &l1, eps) != cell_of(&a2.finish(s2), &l2, eps),
    ))
}
