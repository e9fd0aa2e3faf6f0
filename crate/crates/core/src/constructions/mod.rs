//! Machine-building procedures.

use thiserror::Error;

use crate::automata::{Alphabet, AutomatonError};
use crate::numeric::NumericError;

mod closure;
mod pipeline;
mod rotation;

pub use closure::{
    add_epsilon, gpfa_concat, gpfa_erasing_hom, gpfa_hom, gpfa_intersection, gpfa_inverse_hom,
    gpfa_nonerasing_hom, gpfa_quotient, gpfa_reverse, gpfa_star, gpfa_union, suggest_padding_bound,
    Side,
};
pub use pipeline::{
    complete_matrix, extend_pfa, extended_readout, pfa_to_nqfa, pfa_to_nqfa_pipeline,
    shift_coefficients, shift_cutpoint, unitary_complete, CompletionResult, ExtendedMachine,
    NqfaPipeline, SymbolCompletion, DEPENDENCE_THRESHOLD,
};
pub use rotation::{
    free_generators, generator_alphabet, neq_mcqfa, rational_axis_rotation, rotation_mcqfa,
    word_problem_gpfa,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error("cutpoint {0} must lie strictly between 0 and 1")]
    CutpointOutOfRange(String),
    #[error("{0}")]
    InvalidParameter(String),
    #[error("alphabets differ: {0} against {1}")]
    AlphabetMismatch(String, String),
    #[error("symbol {0:?} is not in the alphabet")]
    UnknownSymbol(String),
    #[error("homomorphism erases {0:?}; use the erasing construction")]
    ErasingImage(String),
    #[error("expected one padding bound per erased symbol ({expected}), got {found}")]
    PaddingBoundCount { expected: usize, found: usize },
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Alphabet map `σ ↦ h(σ)`, images possibly empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Homomorphism {
    source: Alphabet,
    target: Alphabet,
    images: Vec<Vec<usize>>,
}

impl Homomorphism {
    /// `images[i]` is the image of source symbol `i`, as target indices.
    pub fn new(
        source: Alphabet,
        target: Alphabet,
        images: Vec<Vec<usize>>,
    ) -> Result<Self, ConstructionError> {
        if images.len() != source.len() {
            return Err(ConstructionError::InvalidParameter(format!(
                "homomorphism needs {} images, got {}",
                source.len(),
                images.len()
            )));
        }
        for img in &images {
            target.check_word(img)?;
        }
        Ok(Homomorphism {
            source,
            target,
            images,
        })
    }

    /// Builds from `(symbol, image)` pairs; images are parsed as words over
    /// `target`, and every source symbol must appear exactly once.
    pub fn from_pairs(
        source: Alphabet,
        target: Alphabet,
        pairs: &[(&str, &str)],
    ) -> Result<Self, ConstructionError> {
        let mut images: Vec<Option<Vec<usize>>> = vec![None; source.len()];
        for (sym, img) in pairs {
            let i = source
                .index_of(sym)
                .ok_or_else(|| ConstructionError::UnknownSymbol(sym.to_string()))?;
            if images[i].is_some() {
                return Err(ConstructionError::InvalidParameter(format!(
                    "symbol {sym:?} mapped twice"
                )));
            }
            images[i] = Some(target.parse_word(img)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, img)| {
                img.ok_or_else(|| {
                    ConstructionError::InvalidParameter(format!(
                        "no image for symbol {:?}",
                        source.symbol(i)
                    ))
                })
            })
            .collect::<Result<_, _>>()?;
        Self::new(source, target, images)
    }

    pub fn source(&self) -> &Alphabet {
        &self.source
    }

    pub fn target(&self) -> &Alphabet {
        &self.target
    }

    pub fn image(&self, symbol: usize) -> &[usize] {
        &self.images[symbol]
    }

    /// `h(w)`.
    pub fn apply(&self, word: &[usize]) -> Vec<usize> {
        word.iter()
            .flat_map(|&s| self.images[s].iter().copied())
            .collect()
    }

    /// Source symbols mapped to the empty word, in alphabet order.
    pub fn erased(&self) -> Vec<usize> {
        (0..self.source.len())
            .filter(|&i| self.images[i].is_empty())
            .collect()
    }

    pub fn is_erasing(&self) -> bool {
        self.images.iter().any(Vec::is_empty)
    }
}
