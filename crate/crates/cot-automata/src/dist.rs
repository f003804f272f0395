//! Projections onto the simplex, next-symbol distributions, enumeration
//! tables and the autoregressive LM contract.

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::rational::{format_rational, sum, zero, Rational};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Euclidean projection of `x` onto the probability simplex.
pub fn sparsemax(x: &[Rational]) -> Vec<Rational> {
    assert!(!x.is_empty(), "sparsemax of an empty vector");
    if x.iter().all(|v| !v.is_negative()) && sum(x).is_one() {
        return x.to_vec();
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.cmp(a));
    let mut acc = zero();
    let mut tau = zero();
    for (k, z) in sorted.iter().enumerate() {
        acc += z;
        let kk = Rational::from_integer((k as i64 + 1).into());
        if Rational::one() + &kk * z > acc {
            tau = (&acc - Rational::one()) / kk;
        }
    }
    x.iter().map(|v| if v > &tau { v - &tau } else { zero() }).collect()
}

/// Uniform mass over the argmax set.
pub fn hardmax(x: &[Rational]) -> Vec<Rational> {
    assert!(!x.is_empty(), "hardmax of an empty vector");
    let m = x.iter().max().unwrap();
    let count = x.iter().filter(|v| *v == m).count();
    let share = Rational::new(1.into(), (count as i64).into());
    x.iter().map(|v| if v == m { share.clone() } else { zero() }).collect()
}

fn ceil_log2(n: &num_bigint::BigInt) -> u64 {
    if n <= &num_bigint::BigInt::one() {
        0
    } else {
        (n - num_bigint::BigInt::one()).bits()
    }
}

/// Bits needed for the widest entry: max of ceil(log2 p) + ceil(log2 q).
pub fn precision_of(v: &[Rational]) -> u64 {
    v.iter().map(|r| ceil_log2(&r.numer().abs()) + ceil_log2(r.denom())).max().unwrap_or(0)
}

/// Distribution over Σ̄: `probs[i]` for symbol `i`, plus end-of-string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NextSymbolDistribution {
    pub probs: Vec<Rational>,
    pub eos: Rational,
}

impl NextSymbolDistribution {
    pub fn total(&self) -> Rational {
        sum(&self.probs) + &self.eos
    }

    pub fn validate(&self) -> Result<()> {
        if self.probs.iter().chain(std::iter::once(&self.eos)).any(|p| p.is_negative() || p > &Rational::one()) {
            return Err(Error::Domain("probability outside [0,1]".into()));
        }
        if !self.total().is_one() {
            return Err(Error::Domain(format!("distribution sums to {}", self.total())));
        }
        Ok(())
    }
}

/// Enumerated string probabilities up to a length bound.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DistributionTable {
    pub entries: BTreeMap<Vec<usize>, Rational>,
    /// Mass not assigned to any listed string within the bounds.
    pub residual_mass: Rational,
    /// Set when some mass was cut off by the step cap rather than the
    /// length bound, so listed entries may be lower bounds.
    pub truncated: bool,
}

impl DistributionTable {
    pub fn get(&self, y: &[usize]) -> Rational {
        self.entries.get(y).cloned().unwrap_or_else(zero)
    }

    pub fn add(&mut self, y: Vec<usize>, w: &Rational) {
        if w.is_zero() {
            return;
        }
        *self.entries.entry(y).or_insert_with(zero) += w;
    }

    pub fn total(&self) -> Rational {
        self.entries.values().fold(zero(), |a, b| a + b)
    }

    /// Keys in length-lexicographic order.
    pub fn keys_length_lex(&self) -> Vec<&Vec<usize>> {
        let mut k: Vec<&Vec<usize>> = self.entries.keys().collect();
        k.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        k
    }

    pub fn to_json(&self, sigma: &Alphabet) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .keys_length_lex()
            .into_iter()
            .map(|k| {
                serde_json::json!({
                    "string": k.iter().map(|&i| sigma.symbol(i).clone()).collect::<Vec<_>>(),
                    "p": format_rational(&self.entries[k]),
                })
            })
            .collect();
        serde_json::json!({
            "entries": entries,
            "residual_mass": format_rational(&self.residual_mass),
            "truncated": self.truncated,
        })
    }
}

/// Result of a cap-bounded sum: exact when `saturated` is false.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Capped {
    pub value: Rational,
    pub saturated: bool,
}

/// Autoregressive LM over a finite alphabet. States summarise a
/// BOS-prefixed context.
pub trait LanguageModel {
    type State: Clone;

    fn alphabet(&self) -> &Alphabet;
    fn initial_state(&self) -> Result<Self::State>;
    fn advance(&self, state: &Self::State, symbol: usize) -> Result<Self::State>;
    fn next_distribution(&self, state: &Self::State) -> Result<NextSymbolDistribution>;

    fn context_state(&self, context: &[usize]) -> Result<Self::State> {
        let mut s = self.initial_state()?;
        for &y in context {
            s = self.advance(&s, y)?;
        }
        Ok(s)
    }
}

/// p(EOS | y) times the product of the conditionals along `y`.
impl<L: LanguageModel> LanguageModel for &L {
    type State = L::State;

    fn alphabet(&self) -> &Alphabet {
        (**self).alphabet()
    }
    fn initial_state(&self) -> Result<L::State> {
        (**self).initial_state()
    }
    fn advance(&self, state: &L::State, symbol: usize) -> Result<L::State> {
        (**self).advance(state, symbol)
    }
    fn next_distribution(&self, state: &L::State) -> Result<NextSymbolDistribution> {
        (**self).next_distribution(state)
    }
}

pub fn lm_string_probability<L: LanguageModel>(lm: &L, y: &[usize]) -> Result<Rational> {
    let n = lm.alphabet().len();
    let mut state = lm.initial_state()?;
    let mut p = Rational::one();
    for &sym in y {
        if sym >= n {
            return Err(Error::Domain(format!("symbol index {sym} outside the alphabet")));
        }
        let d = lm.next_distribution(&state)?;
        p *= &d.probs[sym];
        if p.is_zero() {
            return Ok(p);
        }
        state = lm.advance(&state, sym)?;
    }
    Ok(p * lm.next_distribution(&state)?.eos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn sparsemax_examples() {
        assert_eq!(sparsemax(&[rat(1, 2), rat(1, 2), zero()]), vec![rat(1, 2), rat(1, 2), zero()]);
        assert_eq!(sparsemax(&[int(1)]), vec![int(1)]);
        assert_eq!(sparsemax(&[int(2), int(0)]), vec![int(1), int(0)]);
        assert_eq!(sparsemax(&[int(1), int(1)]), vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(sparsemax(&[zero(), zero(), zero()]), vec![rat(1, 3); 3]);
    }

    #[test]
    fn hardmax_examples() {
        assert_eq!(hardmax(&[int(3), int(1), int(3)]), vec![rat(1, 2), zero(), rat(1, 2)]);
        assert_eq!(hardmax(&[zero()]), vec![int(1)]);
        assert_eq!(hardmax(&[int(1), int(2), int(3)]), vec![zero(), zero(), int(1)]);
    }

    #[test]
    fn precision_examples() {
        assert_eq!(precision_of(&[rat(1, 2)]), 1);
        assert_eq!(precision_of(&[rat(3, 4)]), 4);
        assert_eq!(precision_of(&[zero(), int(1)]), 0);
        assert_eq!(precision_of(&[rat(-5, 3)]), 5);
    }
}
