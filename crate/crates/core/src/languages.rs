//! Membership oracles for the witness languages and free-group reduction.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{Alphabet, AutomatonError};
use crate::constructions::generator_alphabet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LanguageError {
    #[error("unknown language {0:?} (expected eq, neq, mod-<m>, pal, lt, eq-dot-b, eq-prime, wp-<k> or dfa:<file>)")]
    UnknownId(String),
    #[error("invalid parameter for {id}: {reason}")]
    InvalidParameter { id: String, reason: String },
    #[error("malformed generator symbol {0:?}")]
    MalformedGenerator(String),
    #[error("incomplete transition table: state {state} has {found} entries, expected {expected}")]
    IncompleteTable {
        state: usize,
        expected: usize,
        found: usize,
    },
    #[error("transition from state {state} on {symbol:?} targets state {target}, but there are {n} states")]
    TargetOutOfRange {
        state: usize,
        symbol: String,
        target: usize,
        n: usize,
    },
    #[error("state {index} out of range for {n} states")]
    StateOutOfRange { index: usize, n: usize },
    #[error("cannot read automaton file: {0}")]
    Io(String),
    #[error("cannot parse automaton file: {0}")]
    Parse(String),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

type Predicate = Arc<dyn Fn(&[usize]) -> bool + Send + Sync>;

/// A named language over an alphabet, given by its membership predicate.
#[derive(Clone)]
pub struct LanguageOracle {
    name: String,
    alphabet: Alphabet,
    predicate: Predicate,
}

impl fmt::Debug for LanguageOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LanguageOracle")
            .field("name", &self.name)
            .field("alphabet", &self.alphabet)
            .finish_non_exhaustive()
    }
}

impl LanguageOracle {
    pub fn new(
        name: impl Into<String>,
        alphabet: Alphabet,
        predicate: impl Fn(&[usize]) -> bool + Send + Sync + 'static,
    ) -> Self {
        LanguageOracle {
            name: name.into(),
            alphabet,
            predicate: Arc::new(predicate),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn contains(&self, word: &[usize]) -> bool {
        (self.predicate)(word)
    }

    /// Membership of a word given as text.
    pub fn contains_str(&self, word: &str) -> Result<bool, LanguageError> {
        Ok(self.contains(&self.alphabet.parse_word(word)?))
    }

    pub fn complement(&self) -> LanguageOracle {
        let inner = Arc::clone(&self.predicate);
        LanguageOracle {
            name: format!("co-{}", self.name),
            alphabet: self.alphabet.clone(),
            predicate: Arc::new(move |w| !inner(w)),
        }
    }
}

fn count(word: &[usize], symbol: usize) -> usize {
    word.iter().filter(|&&s| s == symbol).count()
}

fn binary(name: &str, p: impl Fn(usize, usize, &[usize]) -> bool + Send + Sync + 'static) -> LanguageOracle {
    LanguageOracle::new(name, Alphabet::chars("ab"), move |w| {
        p(count(w, 0), count(w, 1), w)
    })
}

/// `{w : |w|_a = |w|_b}`.
pub fn eq() -> LanguageOracle {
    binary("eq", |a, b, _| a == b)
}

/// `{w : |w|_a ≠ |w|_b}`.
pub fn neq() -> LanguageOracle {
    binary("neq", |a, b, _| a != b)
}

/// `{w : |w|_a < |w|_b}`.
pub fn lt() -> LanguageOracle {
    binary("lt", |a, b, _| a < b)
}

/// `{w : |w|_a + 1 = |w|_b}`.
pub fn eq_prime() -> LanguageOracle {
    binary("eq-prime", |a, b, _| a + 1 == b)
}

/// Palindromes over `{a, b}`.
pub fn pal() -> LanguageOracle {
    binary("pal", |_, _, w| w.iter().eq(w.iter().rev()))
}

/// `L_eq · b⁺`. Writing `w = x·bʲ` with `x` empty or ending in `a`, `w`
/// belongs iff `j ≥ 1`, `w ∈ L_lt` and `x ∉ L_lt`.
pub fn eq_dot_b() -> LanguageOracle {
    binary("eq-dot-b", |a, b, w| {
        let x_len = w.iter().rposition(|&s| s == 0).map_or(0, |i| i + 1);
        let x = &w[..x_len];
        let ends_with_b = x_len < w.len();
        ends_with_b && a < b && count(x, 0) >= count(x, 1)
    })
}

/// `{aⁱ : i mod m ≠ 0}` over `{a}`.
pub fn mod_m(m: usize) -> Result<LanguageOracle, LanguageError> {
    if m == 0 {
        return Err(LanguageError::InvalidParameter {
            id: "mod-m".into(),
            reason: "m must be positive".into(),
        });
    }
    Ok(LanguageOracle::new(format!("mod-{m}"), Alphabet::chars("a"), move |w| {
        w.len() % m != 0
    }))
}

/// Words over `g1…gk, G1…Gk` whose free reduction is empty.
pub fn wp(k: usize) -> Result<LanguageOracle, LanguageError> {
    if k == 0 {
        return Err(LanguageError::InvalidParameter {
            id: "wp-k".into(),
            reason: "rank must be positive".into(),
        });
    }
    Ok(LanguageOracle::new(format!("wp-{k}"), generator_alphabet(k), move |w| {
        reduce_indices(w, k).is_empty()
    }))
}

/// Free reduction on generator indices: `i < k` is `g_{i+1}` and `i + k` its
/// inverse.
pub fn reduce_indices(word: &[usize], k: usize) -> Vec<usize> {
    let inverse = |s: usize| if s < k { s + k } else { s - k };
    let mut stack: Vec<usize> = Vec::with_capacity(word.len());
    for &s in word {
        if stack.last() == Some(&inverse(s)) {
            stack.pop();
        } else {
            stack.push(s);
        }
    }
    stack
}

/// Free reduction of a word of generator names (`"g2"`, inverse `"G2"`).
pub fn free_reduce<S: AsRef<str>>(word: &[S]) -> Result<Vec<String>, LanguageError> {
    let mut stack: Vec<(bool, u32)> = Vec::with_capacity(word.len());
    for sym in word {
        let sym = sym.as_ref();
        let parsed = sym
            .strip_prefix('g')
            .map(|n| (false, n))
            .or_else(|| sym.strip_prefix('G').map(|n| (true, n)))
            .and_then(|(inv, n)| {
                let idx: u32 = n.parse().ok()?;
                (idx >= 1 && !n.starts_with('0')).then_some((inv, idx))
            })
            .ok_or_else(|| LanguageError::MalformedGenerator(sym.to_string()))?;
        match stack.last() {
            Some(&(inv, idx)) if idx == parsed.1 && inv != parsed.0 => {
                stack.pop();
            }
            _ => stack.push(parsed),
        }
    }
    Ok(stack
        .into_iter()
        .map(|(inv, idx)| format!("{}{idx}", if inv { 'G' } else { 'g' }))
        .collect())
}

/// Complete deterministic automaton; `transitions[q][s]` is the successor of
/// state `q` on symbol `s`, and state 0 is the start.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dfa {
    pub alphabet: Vec<String>,
    pub transitions: Vec<Vec<usize>>,
    pub accepting: Vec<usize>,
}

impl Dfa {
    pub fn validate(&self) -> Result<Alphabet, LanguageError> {
        let alphabet = Alphabet::new(self.alphabet.iter().cloned())?;
        let n = self.transitions.len();
        if n == 0 {
            return Err(LanguageError::Automaton(AutomatonError::NoStates));
        }
        for (q, row) in self.transitions.iter().enumerate() {
            if row.len() != alphabet.len() {
                return Err(LanguageError::IncompleteTable {
                    state: q,
                    expected: alphabet.len(),
                    found: row.len(),
                });
            }
            if let Some((s, &t)) = row.iter().enumerate().find(|(_, &t)| t >= n) {
                return Err(LanguageError::TargetOutOfRange {
                    state: q,
                    symbol: alphabet.symbol(s).to_string(),
                    target: t,
                    n,
                });
            }
        }
        if let Some(&index) = self.accepting.iter().find(|&&q| q >= n) {
            return Err(LanguageError::StateOutOfRange { index, n });
        }
        Ok(alphabet)
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        let end = word.iter().fold(0, |q, &s| self.transitions[q][s]);
        self.accepting.contains(&end)
    }

    /// Same table with accepting and rejecting states swapped.
    pub fn complement(&self) -> Dfa {
        Dfa {
            alphabet: self.alphabet.clone(),
            transitions: self.transitions.clone(),
            accepting: (0..self.transitions.len())
                .filter(|q| !self.accepting.contains(q))
                .collect(),
        }
    }
}

pub fn dfa_oracle(name: impl Into<String>, d: Dfa) -> Result<LanguageOracle, LanguageError> {
    let alphabet = d.validate()?;
    Ok(LanguageOracle::new(name, alphabet, move |w| d.accepts(w)))
}

pub fn load_dfa(path: &Path) -> Result<Dfa, LanguageError> {
    let text = std::fs::read_to_string(path).map_err(|e| LanguageError::Io(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| LanguageError::Parse(e.to_string()))
}

/// Oracle by identifier: `eq`, `neq`, `mod-<m>`, `pal`, `lt`, `eq-dot-b`,
/// `eq-prime`, `wp-<k>` or `dfa:<file>`.
pub fn oracle(id: &str) -> Result<LanguageOracle, LanguageError> {
    let param = |rest: &str| -> Result<usize, LanguageError> {
        rest.parse().map_err(|_| LanguageError::InvalidParameter {
            id: id.to_string(),
            reason: format!("{rest:?} is not a count"),
        })
    };
    match id {
        "eq" => Ok(eq()),
        "neq" => Ok(neq()),
        "pal" => Ok(pal()),
        "lt" => Ok(lt()),
        "eq-dot-b" => Ok(eq_dot_b()),
        "eq-prime" => Ok(eq_prime()),
        _ => {
            if let Some(rest) = id.strip_prefix("mod-") {
                mod_m(param(rest)?)
            } else if let Some(rest) = id.strip_prefix("wp-") {
                wp(param(rest)?)
            } else if let Some(path) = id.strip_prefix("dfa:") {
                dfa_oracle(id, load_dfa(Path::new(path))?)
            } else {
                Err(LanguageError::UnknownId(id.to_string()))
            }
        }
    }
}
