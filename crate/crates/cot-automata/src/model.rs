//! A closed sum over every model kind that can be read from a file.

use crate::automata::{Pfsa, Ppda, Ptm, TwoPda};
use crate::cot::CotLm;
use crate::equiv::StringDistribution;
use crate::error::{Error, Result};
use crate::rnn::ElmanRnnLm;
use crate::search::LmRun;
use crate::transduce::{Fst, Phi, Wfst};
use crate::transformer::TransformerLm;
use crate::Alphabet;

/// A model over Δ wrapped by φ.
#[derive(Clone, Debug)]
pub enum Base {
    Pfsa(Pfsa),
    Ppda(Ppda),
    TwoPda(TwoPda),
    Ptm(Ptm),
    Rnn(ElmanRnnLm),
    Transformer(TransformerLm),
}

impl Base {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            Base::Pfsa(m) => m.alphabet(),
            Base::Ppda(m) => m.alphabet(),
            Base::TwoPda(m) => m.alphabet(),
            Base::Ptm(m) => m.alphabet(),
            Base::Rnn(m) => &m.alphabet,
            Base::Transformer(m) => &m.alphabet,
        }
    }

    pub fn into_model(self) -> Model {
        match self {
            Base::Pfsa(m) => Model::Pfsa(m),
            Base::Ppda(m) => Model::Ppda(m),
            Base::TwoPda(m) => Model::TwoPda(m),
            Base::Ptm(m) => Model::Ptm(m),
            Base::Rnn(m) => Model::Rnn(m),
            Base::Transformer(m) => Model::Transformer(m),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CotModel {
    pub base: Base,
    pub phi: Phi,
}

impl CotModel {
    pub fn new(base: Base, phi: Phi) -> Result<CotModel> {
        if base.alphabet() != phi.input() {
            return Err(Error::AlphabetMismatch("φ must read the base model's alphabet".into()));
        }
        Ok(CotModel { base, phi })
    }
}

#[derive(Clone, Debug)]
pub enum Model {
    Pfsa(Pfsa),
    Ppda(Ppda),
    TwoPda(TwoPda),
    Ptm(Ptm),
    Rnn(ElmanRnnLm),
    Transformer(TransformerLm),
    Cot(Box<CotModel>),
    Fst(Fst),
    Wfst(Wfst),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Pfsa(_) => "pfsa",
            Model::Ppda(_) => "ppda",
            Model::TwoPda(_) => "2pda",
            Model::Ptm(_) => "ptm",
            Model::Rnn(_) => "rnn",
            Model::Transformer(_) => "transformer",
            Model::Cot(_) => "cot",
            Model::Fst(_) => "fst",
            Model::Wfst(_) => "wfst",
        }
    }

    /// Run `f` on the string distribution this model defines.
    pub fn with_distribution<R>(&self, f: impl FnOnce(&dyn StringDistribution) -> Result<R>) -> Result<R> {
        match self {
            Model::Pfsa(m) => f(m),
            Model::Ppda(m) => f(m),
            Model::TwoPda(m) => f(m),
            Model::Ptm(m) => f(m),
            Model::Rnn(m) => f(&LmRun(m)),
            Model::Transformer(m) => f(&LmRun(m)),
            Model::Cot(c) => {
                let phi = c.phi.clone();
                match &c.base {
                    Base::Pfsa(m) => f(&CotLm::new(m, phi)),
                    Base::Ppda(m) => f(&CotLm::new(m, phi)),
                    Base::TwoPda(m) => f(&CotLm::new(m, phi)),
                    Base::Ptm(m) => f(&CotLm::new(m, phi)),
                    Base::Rnn(m) => f(&CotLm::new(LmRun(m), phi)),
                    Base::Transformer(m) => f(&CotLm::new(LmRun(m), phi)),
                }
            }
            Model::Fst(_) | Model::Wfst(_) => {
                Err(Error::Invalid(format!("a {} does not define a string distribution", self.kind())))
            }
        }
    }
}
