//! JSON machine documents.
//!
//! ```json
//! {
//!   "kind": "pfa",
//!   "scalar": "rational",
//!   "alphabet": ["a", "b"],
//!   "n": 2,
//!   "matrices": {
//!     "cent": [["1", "0"], ["0", "1"]],
//!     "a": [["1/2", "1/2"], ["0", "1"]],
//!     "b": [["1", "0"], ["0", "1"]],
//!     "dollar": [["1", "0"], ["0", "1"]]
//!   },
//!   "accepting": [1]
//! }
//! ```
//!
//! Rational entries are `"p/q"` strings (plain JSON integers are accepted on
//! input); float entries are JSON numbers. Marker matrices default to the
//! identity when omitted. GPFA documents carry `v0` and `f` instead of
//! halting sets.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::automata::{Alphabet, Automaton, AutomatonError, Gpfa, Kwqfa, Mcqfa, Pfa, LEFT_MARKER, RIGHT_MARKER};
use crate::cutpoint::{member_at_cutpoint, CutpointDomain, CutpointError, CutpointSpec};
use crate::languages::LanguageOracle;
use crate::numeric::{format_rational, Field, Matrix, Rational, Scalar, ScalarKind, DEFAULT_EPSILON};
use crate::verify::{enumerate_agreement, AgreementReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Syntax(String),
    #[error("{field}: {reason}")]
    Field { field: String, reason: String },
    #[error("invalid {kind} machine: {source}")]
    Invalid {
        kind: MachineKind,
        #[source]
        source: AutomatonError,
    },
}

fn field_error(field: impl Into<String>, reason: impl Into<String>) -> DocumentError {
    DocumentError::Field {
        field: field.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MachineKind {
    Pfa,
    Gpfa,
    Kwqfa,
    Mcqfa,
}

impl std::fmt::Display for MachineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MachineKind::Pfa => "pfa",
            MachineKind::Gpfa => "gpfa",
            MachineKind::Kwqfa => "kwqfa",
            MachineKind::Mcqfa => "mcqfa",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ScalarTag {
    Rational,
    Float,
}

type Grid = Vec<Vec<Value>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    kind: MachineKind,
    scalar: ScalarTag,
    alphabet: Vec<String>,
    n: usize,
    matrices: BTreeMap<String, Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    accepting: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rejecting: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v0: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    f: Option<Vec<Value>>,
}

/// Any machine a document can describe.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMachine {
    Pfa(Pfa),
    Gpfa(Gpfa<Rational>),
    GpfaFloat(Gpfa<f64>),
    Kwqfa(Kwqfa<Rational>),
    KwqfaFloat(Kwqfa<f64>),
    Mcqfa(Mcqfa<Rational>),
    McqfaFloat(Mcqfa<f64>),
}

macro_rules! any_machine_from {
    ($($variant:ident($ty:ty)),* $(,)?) => {
        $(impl From<$ty> for AnyMachine {
            fn from(m: $ty) -> Self {
                AnyMachine::$variant(m)
            }
        })*
    };
}

any_machine_from!(
    Pfa(Pfa),
    Gpfa(Gpfa<Rational>),
    GpfaFloat(Gpfa<f64>),
    Kwqfa(Kwqfa<Rational>),
    KwqfaFloat(Kwqfa<f64>),
    Mcqfa(Mcqfa<Rational>),
    McqfaFloat(Mcqfa<f64>),
);

/// Runs `$body` with `$m` bound to the inner machine, whatever its type.
macro_rules! with_machine {
    ($any:expr, $m:ident => $body:expr) => {
        match $any {
            AnyMachine::Pfa($m) => $body,
            AnyMachine::Gpfa($m) => $body,
            AnyMachine::GpfaFloat($m) => $body,
            AnyMachine::Kwqfa($m) => $body,
            AnyMachine::KwqfaFloat($m) => $body,
            AnyMachine::Mcqfa($m) => $body,
            AnyMachine::McqfaFloat($m) => $body,
        }
    };
}

impl AnyMachine {
    pub fn kind(&self) -> MachineKind {
        match self {
            AnyMachine::Pfa(_) => MachineKind::Pfa,
            AnyMachine::Gpfa(_) | AnyMachine::GpfaFloat(_) => MachineKind::Gpfa,
            AnyMachine::Kwqfa(_) | AnyMachine::KwqfaFloat(_) => MachineKind::Kwqfa,
            AnyMachine::Mcqfa(_) | AnyMachine::McqfaFloat(_) => MachineKind::Mcqfa,
        }
    }

    pub fn scalar_kind(&self) -> ScalarKind {
        match self {
            AnyMachine::GpfaFloat(_) | AnyMachine::KwqfaFloat(_) | AnyMachine::McqfaFloat(_) => {
                ScalarKind::Float
            }
            _ => ScalarKind::Rational,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        with_machine!(self, m => m.alphabet())
    }

    pub fn state_count(&self) -> usize {
        with_machine!(self, m => m.state_count())
    }

    pub fn unit_interval(&self) -> bool {
        with_machine!(self, m => m.unit_interval())
    }

    /// Acceptance value (probability, or GPFA value) of `word`.
    pub fn evaluate(&self, word: &[usize]) -> Result<Scalar, AutomatonError> {
        with_machine!(self, m => Ok(m.evaluate(word)?.into_scalar()))
    }

    pub fn evaluate_str(&self, word: &str) -> Result<Scalar, AutomatonError> {
        self.evaluate(&self.alphabet().parse_word(word)?)
    }

    /// Whether `word` is in the machine's language at `spec`.
    pub fn member(&self, spec: &CutpointSpec, word: &[usize], eps: f64) -> Result<bool, CutpointError> {
        with_machine!(self, m => member_at_cutpoint(m, spec, word, eps))
    }

    /// Bounded comparison of the cutpoint language with `oracle`.
    pub fn agreement(
        &self,
        spec: &CutpointSpec,
        oracle: &LanguageOracle,
        maxlen: usize,
        eps: f64,
    ) -> Result<AgreementReport, CutpointError> {
        with_machine!(self, m => enumerate_agreement(m, spec, oracle, maxlen, eps))
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

fn entry<T: Field>(v: &Value, field: &str) -> Result<T, DocumentError> {
    let scalar = match (v, T::KIND) {
        (Value::String(s), kind) => {
            Scalar::parse_as(s, kind).map_err(|e| field_error(field, e.to_string()))?
        }
        (Value::Number(x), ScalarKind::Float) => Scalar::Float(
            x.as_f64()
                .ok_or_else(|| field_error(field, format!("{x} is not a finite number")))?,
        ),
        (Value::Number(x), ScalarKind::Rational) => {
            let i = x.as_i64().ok_or_else(|| {
                field_error(field, format!("rational entry {x} must be an integer or a \"p/q\" string"))
            })?;
            Scalar::Rational(Rational::from_integer(i.into()))
        }
        (other, _) => return Err(field_error(field, format!("{other} is not a number"))),
    };
    T::from_scalar(&scalar).map_err(|e| field_error(field, e.to_string()))
}

fn vector<T: Field>(values: &[Value], field: &str) -> Result<Vec<T>, DocumentError> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| entry(v, &format!("{field}[{i}]")))
        .collect()
}

fn matrix<T: Field>(grid: &Grid, name: &str, n: usize) -> Result<Matrix<T>, DocumentError> {
    let field = format!("matrices.{name}");
    if grid.len() != n || grid.iter().any(|r| r.len() != n) {
        return Err(field_error(&field, format!("must be {n}x{n}")));
    }
    let rows = grid
        .iter()
        .enumerate()
        .map(|(i, r)| vector(r, &format!("{field}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(rows).expect("checked square"))
}

struct Decoded<T> {
    alphabet: Alphabet,
    left: Matrix<T>,
    trans: Vec<Matrix<T>>,
    right: Matrix<T>,
}

fn decode<T: Field>(raw: &RawDocument) -> Result<Decoded<T>, DocumentError> {
    let invalid = |source| DocumentError::Invalid {
        kind: raw.kind,
        source,
    };
    let alphabet = Alphabet::new(raw.alphabet.iter().cloned()).map_err(invalid)?;
    let has_markers = raw.kind != MachineKind::Gpfa;
    for key in raw.matrices.keys() {
        let marker = key == LEFT_MARKER || key == RIGHT_MARKER;
        if !(alphabet.contains(key) || (marker && has_markers)) {
            return Err(field_error(
                format!("matrices.{key}"),
                "not an alphabet symbol of this machine",
            ));
        }
    }
    let n = raw.n;
    if n == 0 {
        return Err(invalid(AutomatonError::NoStates));
    }
    let trans = alphabet
        .symbols()
        .iter()
        .map(|s| {
            let grid = raw
                .matrices
                .get(s)
                .ok_or_else(|| field_error(format!("matrices.{s}"), "missing"))?;
            matrix(grid, s, n)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let marker = |name: &str| match raw.matrices.get(name) {
        Some(grid) => matrix(grid, name, n),
        None => Ok(Matrix::identity(n)),
    };
    Ok(Decoded {
        left: marker(LEFT_MARKER)?,
        right: marker(RIGHT_MARKER)?,
        alphabet,
        trans,
    })
}

fn require<'a, X>(opt: &'a Option<X>, field: &str, kind: MachineKind) -> Result<&'a X, DocumentError> {
    opt.as_ref()
        .ok_or_else(|| field_error(field, format!("required for {kind} documents")))
}

fn forbid<X>(opt: &Option<X>, field: &str, kind: MachineKind) -> Result<(), DocumentError> {
    match opt {
        Some(_) => Err(field_error(field, format!("not allowed in {kind} documents"))),
        None => Ok(()),
    }
}

fn build_gpfa<T: Field>(raw: &RawDocument) -> Result<Gpfa<T>, DocumentError> {
    let d = decode::<T>(raw)?;
    let v0 = vector(require(&raw.v0, "v0", raw.kind)?, "v0")?;
    let f = vector(require(&raw.f, "f", raw.kind)?, "f")?;
    for (name, v) in [("v0", &v0), ("f", &f)] {
        if v.len() != raw.n {
            return Err(field_error(name, format!("must have length {}", raw.n)));
        }
    }
    Gpfa::new(d.alphabet, d.trans, v0, f).map_err(|source| DocumentError::Invalid {
        kind: raw.kind,
        source,
    })
}

fn build_kwqfa<T: Field>(raw: &RawDocument, tol: f64) -> Result<Kwqfa<T>, DocumentError> {
    let d = decode::<T>(raw)?;
    let acc = require(&raw.accepting, "accepting", raw.kind)?;
    let rej = require(&raw.rejecting, "rejecting", raw.kind)?;
    Kwqfa::with_tolerance(d.alphabet, d.left, d.trans, d.right, acc, rej, tol).map_err(|source| {
        DocumentError::Invalid {
            kind: raw.kind,
            source,
        }
    })
}

fn build_mcqfa<T: Field>(raw: &RawDocument, tol: f64) -> Result<Mcqfa<T>, DocumentError> {
    let d = decode::<T>(raw)?;
    let acc = require(&raw.accepting, "accepting", raw.kind)?;
    Mcqfa::with_tolerance(d.alphabet, d.left, d.trans, d.right, acc, tol).map_err(|source| {
        DocumentError::Invalid {
            kind: raw.kind,
            source,
        }
    })
}

/// Parses and validates a document with the default unitarity tolerance.
pub fn parse_document(text: &str) -> Result<AnyMachine, DocumentError> {
    parse_document_with_tolerance(text, DEFAULT_EPSILON)
}

/// Parses and validates a document; `tol` bounds the unitarity defect of
/// float quantum machines.
pub fn parse_document_with_tolerance(text: &str, tol: f64) -> Result<AnyMachine, DocumentError> {
    let raw: RawDocument =
        serde_json::from_str(text).map_err(|e| DocumentError::Syntax(e.to_string()))?;
    let kind = raw.kind;
    match kind {
        MachineKind::Gpfa => {
            forbid(&raw.accepting, "accepting", kind)?;
            forbid(&raw.rejecting, "rejecting", kind)?;
        }
        _ => {
            forbid(&raw.v0, "v0", kind)?;
            forbid(&raw.f, "f", kind)?;
        }
    }
    if kind != MachineKind::Kwqfa {
        forbid(&raw.rejecting, "rejecting", kind)?;
    }
    Ok(match (kind, raw.scalar) {
        (MachineKind::Pfa, ScalarTag::Float) => {
            return Err(field_error("scalar", "pfa documents must be rational"))
        }
        (MachineKind::Pfa, ScalarTag::Rational) => {
            let d = decode::<Rational>(&raw)?;
            let acc = require(&raw.accepting, "accepting", kind)?;
            AnyMachine::Pfa(
                Pfa::new(d.alphabet, d.left, d.trans, d.right, acc)
                    .map_err(|source| DocumentError::Invalid { kind, source })?,
            )
        }
        (MachineKind::Gpfa, ScalarTag::Rational) => AnyMachine::Gpfa(build_gpfa(&raw)?),
        (MachineKind::Gpfa, ScalarTag::Float) => AnyMachine::GpfaFloat(build_gpfa(&raw)?),
        (MachineKind::Kwqfa, ScalarTag::Rational) => AnyMachine::Kwqfa(build_kwqfa(&raw, tol)?),
        (MachineKind::Kwqfa, ScalarTag::Float) => AnyMachine::KwqfaFloat(build_kwqfa(&raw, tol)?),
        (MachineKind::Mcqfa, ScalarTag::Rational) => AnyMachine::Mcqfa(build_mcqfa(&raw, tol)?),
        (MachineKind::Mcqfa, ScalarTag::Float) => AnyMachine::McqfaFloat(build_mcqfa(&raw, tol)?),
    })
}

fn encode_entry<T: Field>(x: &T) -> Value {
    match x.clone().into_scalar() {
        Scalar::Rational(r) => Value::String(format_rational(&r)),
        Scalar::Float(f) => serde_json::json!(f),
    }
}

fn encode_vector<T: Field>(v: &[T]) -> Vec<Value> {
    v.iter().map(encode_entry).collect()
}

fn encode_matrix<T: Field>(m: &Matrix<T>) -> Grid {
    m.to_rows().iter().map(|r| encode_vector(r)).collect()
}

fn tag<T: Field>() -> ScalarTag {
    match T::KIND {
        ScalarKind::Rational => ScalarTag::Rational,
        ScalarKind::Float => ScalarTag::Float,
    }
}

fn raw_with_markers<T: Field>(
    kind: MachineKind,
    alphabet: &Alphabet,
    left: &Matrix<T>,
    trans: &[Matrix<T>],
    right: &Matrix<T>,
    accepting: &[usize],
) -> RawDocument {
    let mut matrices: BTreeMap<String, Grid> = alphabet
        .symbols()
        .iter()
        .zip(trans)
        .map(|(s, m)| (s.clone(), encode_matrix(m)))
        .collect();
    matrices.insert(LEFT_MARKER.into(), encode_matrix(left));
    matrices.insert(RIGHT_MARKER.into(), encode_matrix(right));
    RawDocument {
        kind,
        scalar: tag::<T>(),
        alphabet: alphabet.symbols().to_vec(),
        n: left.rows(),
        matrices,
        accepting: Some(accepting.to_vec()),
        rejecting: None,
        v0: None,
        f: None,
    }
}

fn raw_gpfa<T: Field>(g: &Gpfa<T>) -> RawDocument {
    RawDocument {
        kind: MachineKind::Gpfa,
        scalar: tag::<T>(),
        alphabet: g.alphabet().symbols().to_vec(),
        n: g.n(),
        matrices: g
            .alphabet()
            .symbols()
            .iter()
            .zip(g.transitions())
            .map(|(s, m)| (s.clone(), encode_matrix(m)))
            .collect(),
        accepting: None,
        rejecting: None,
        v0: Some(encode_vector(g.initial_vector())),
        f: Some(encode_vector(g.final_vector())),
    }
}

fn raw_kwqfa<T: Field>(m: &Kwqfa<T>) -> RawDocument {
    let mut raw = raw_with_markers(
        MachineKind::Kwqfa,
        m.alphabet(),
        m.left_marker(),
        m.transitions(),
        m.right_marker(),
        m.accepting(),
    );
    raw.rejecting = Some(m.rejecting().to_vec());
    raw
}

fn raw_mcqfa<T: Field>(m: &Mcqfa<T>) -> RawDocument {
    raw_with_markers(
        MachineKind::Mcqfa,
        m.alphabet(),
        m.left_marker(),
        m.transitions(),
        m.right_marker(),
        m.accepting(),
    )
}

/// Pretty-printed JSON document for `machine`.
pub fn to_json(machine: &AnyMachine) -> String {
    let raw = match machine {
        AnyMachine::Pfa(p) => raw_with_markers(
            MachineKind::Pfa,
            p.alphabet(),
            p.left_marker(),
            p.transitions(),
            p.right_marker(),
            p.accepting(),
        ),
        AnyMachine::Gpfa(g) => raw_gpfa(g),
        AnyMachine::GpfaFloat(g) => raw_gpfa(g),
        AnyMachine::Kwqfa(m) => raw_kwqfa(m),
        AnyMachine::KwqfaFloat(m) => raw_kwqfa(m),
        AnyMachine::Mcqfa(m) => raw_mcqfa(m),
        AnyMachine::McqfaFloat(m) => raw_mcqfa(m),
    };
    let mut text = serde_json::to_string_pretty(&raw).expect("documents serialize");
    text.push('\n');
    text
}
