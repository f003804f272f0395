//! Exact-rational probabilistic automata, weighted transducers and
//! chain-of-thought augmented neural language models.

pub mod alphabet;
pub mod automata;
pub mod cot;
pub mod dist;
pub mod equiv;
pub mod error;
pub mod json;
pub mod model;
pub mod rational;
pub mod rnn;
pub mod search;
pub mod transduce;
pub mod transformer;

pub use alphabet::{Alphabet, Symbol};
pub use dist::{
    hardmax, lm_string_probability, precision_of, sparsemax, Capped, DistributionTable, LanguageModel,
    NextSymbolDistribution,
};
pub use error::{Error, Result};
pub use rational::{Matrix, Rational, Vector};
