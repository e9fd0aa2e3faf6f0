//! Bounded brute-force verification against oracles.

use serde::Serialize;

use crate::automata::{Alphabet, Automaton, Gpfa};
use crate::cutpoint::{cell_of, CutpointDomain, CutpointError, CutpointSpec};
use crate::enumerate::{count_words, find_first};
use crate::languages::LanguageOracle;
use crate::numeric::Field;

/// Outcome of comparing a machine's cutpoint language with an oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgreementReport {
    /// Number of words compared (all of them when there is no disagreement).
    pub tested: u64,
    /// Order-minimal word where machine and oracle differ, rendered.
    pub first_disagreement: Option<String>,
    pub max_len: usize,
}

impl AgreementReport {
    pub fn agrees(&self) -> bool {
        self.first_disagreement.is_none()
    }
}

/// Compares `member_at_cutpoint` with the oracle on every word up to
/// `maxlen`, in canonical order.
pub fn enumerate_agreement<A: Automaton + CutpointDomain>(
    machine: &A,
    spec: &CutpointSpec,
    oracle: &LanguageOracle,
    maxlen: usize,
    eps: f64,
) -> Result<AgreementReport, CutpointError> {
    let alphabet = machine.alphabet();
    if alphabet.symbols() != oracle.alphabet().symbols() {
        return Err(CutpointError::AlphabetMismatch);
    }
    if machine.unit_interval() {
        // validates the cutpoint range once, up front
        crate::cutpoint::member_at_cutpoint(machine, spec, &[], eps)?;
    }
    let lambda = A::Value::from_scalar(&spec.lambda)?;
    let mut tested = 0u64;
    let hit = find_first(machine, maxlen, |w, v| {
        tested += 1;
        spec.relation.holds(cell_of(v, &lambda, eps)) != oracle.contains(w)
    });
    Ok(match hit {
        Some(w) => AgreementReport {
            tested: position_in_order(alphabet, &w),
            first_disagreement: Some(alphabet.render(&w)),
            max_len: maxlen,
        },
        None => AgreementReport {
            tested: count_words(alphabet.len(), maxlen),
            first_disagreement: None,
            max_len: maxlen,
        },
    })
}

/// 1-based rank of `w` in canonical order.
fn position_in_order(alphabet: &Alphabet, w: &[usize]) -> u64 {
    let k = alphabet.len() as u64;
    let shorter = if w.is_empty() { 0 } else { count_words(alphabet.len(), w.len() - 1) };
    let within = w.iter().fold(0u64, |acc, &s| acc * k + s as u64);
    shorter + within + 1
}

/// Searches for a failure of the Dieu condition at parameter `n`: when
/// `u yⁱ v ∈ L` for all `i < n`, returns the smallest `m` in `n..=m_max` with
/// `u yᵐ v ∉ L`.
pub fn dieu_violation(
    oracle: &LanguageOracle,
    u: &[usize],
    y: &[usize],
    v: &[usize],
    n: usize,
    m_max: usize,
) -> Option<usize> {
    let pumped = |i: usize| -> Vec<usize> {
        let mut w = u.to_vec();
        for _ in 0..i {
            w.extend_from_slice(y);
        }
        w.extend_from_slice(v);
        w
    };
    if !(0..n).all(|i| oracle.contains(&pumped(i))) {
        return None;
    }
    (n..=m_max).find(|&m| !oracle.contains(&pumped(m)))
}

/// First word up to `maxlen` where `g`'s value differs from `reference`.
pub fn check_value_identity<T: Field>(
    g: &Gpfa<T>,
    reference: impl Fn(&[usize]) -> T,
    maxlen: usize,
) -> Option<Vec<usize>> {
    find_first(g, maxlen, |w, v| *v != reference(w))
}
