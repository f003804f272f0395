//! Symbols and alphabets. Plain symbols are names; augmented symbols are
//! tuples whose components may be empty (ε).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// Reserved component name for the end-of-string marker inside tuples.
pub const EOS: &str = "<eos>";
/// Reserved component name for the beginning-of-string marker inside tuples.
pub const BOS: &str = "<bos>";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Symbol {
    Name(String),
    Tuple(Vec<Option<Symbol>>),
}

impl Symbol {
    pub fn name(s: &str) -> Symbol {
        Symbol::Name(s.to_string())
    }

    pub fn tuple(parts: Vec<Option<Symbol>>) -> Symbol {
        Symbol::Tuple(parts)
    }

    pub fn component(&self, i: usize) -> Option<&Option<Symbol>> {
        match self {
            Symbol::Tuple(parts) => parts.get(i),
            Symbol::Name(_) => None,
        }
    }

    pub fn is_reserved(&self) -> bool {
        matches!(self, Symbol::Name(n) if n == EOS || n == BOS)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Name(n) => write!(f, "{n}"),
            Symbol::Tuple(parts) => {
                write!(f, "(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    match p {
                        Some(s) => write!(f, "{s}")?,
                        None => write!(f, "ε")?,
                    }
                }
                write!(f, ")")
            }
        }
    }
}

/// Ordered set of distinct symbols. Strings over an alphabet are slices of
/// symbol indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
    index: HashMap<Symbol, usize>,
}

impl Alphabet {
    pub fn new(symbols: Vec<Symbol>) -> Result<Alphabet> {
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if s.is_reserved() {
                return Err(Error::InvalidAlphabet(format!("`{s}` is a reserved marker")));
            }
            if let Symbol::Tuple(parts) = s {
                if parts.iter().all(|p| p.is_none()) {
                    return Err(Error::InvalidAlphabet(format!("`{s}` has only empty components")));
                }
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate symbol `{s}`")));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    pub fn from_names(names: &[&str]) -> Result<Alphabet> {
        Alphabet::new(names.iter().map(|n| Symbol::name(n)).collect())
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, id: usize) -> &Symbol {
        &self.symbols[id]
    }

    pub fn id(&self, s: &Symbol) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn id_of(&self, s: &Symbol) -> Result<usize> {
        self.id(s).ok_or_else(|| Error::UnknownSymbol(s.to_string()))
    }

    pub fn id_of_name(&self, n: &str) -> Result<usize> {
        self.id_of(&Symbol::name(n))
    }

    /// Parse a textual string: whitespace-separated symbol names, or a
    /// single token spelled character by character when every character
    /// is a symbol.
    pub fn parse_string(&self, text: &str) -> Result<Vec<usize>> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() == 1 && self.id(&Symbol::name(tokens[0])).is_none() {
            return tokens[0].chars().map(|c| self.id_of_name(&c.to_string())).collect();
        }
        tokens.iter().map(|t| self.id_of_name(t)).collect()
    }

    pub fn render(&self, s: &[usize]) -> String {
        let single = self.symbols.iter().all(|x| matches!(x, Symbol::Name(n) if n.chars().count() == 1));
        let parts: Vec<String> = s.iter().map(|&i| self.symbols[i].to_string()).collect();
        if single {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }
}
