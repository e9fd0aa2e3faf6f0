//! Stochastic and quantum finite automata over exact rationals or floats:
//! simulation, cutpoint languages, closure constructions and bounded
//! brute-force verification.

pub mod automata;
pub mod constructions;
pub mod cutpoint;
pub mod document;
pub mod enumerate;
pub mod languages;
pub mod numeric;
pub mod verify;

pub use automata::{Alphabet, Automaton, AutomatonError, Gpfa, Kwqfa, Mcqfa, Pfa};
pub use constructions::{ConstructionError, Homomorphism};
pub use cutpoint::{CutpointError, CutpointSpec, Relation};
pub use document::{parse_document, to_json, AnyMachine, DocumentError};
pub use languages::LanguageOracle;
pub use numeric::{Field, Matrix, Rational, Scalar, DEFAULT_EPSILON};
