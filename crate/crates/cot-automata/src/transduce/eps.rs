use crate::alphabet::Alphabet;
use crate::automata::{Pfsa, PfsaTransition};
use crate::error::{Error, Result};
use crate::rational::{dot, neumann_inverse, zero, Matrix, Rational};
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EpsArc {
    pub from: usize,
    pub label: Option<usize>,
    pub weight: Rational,
    pub to: usize,
}

/// Weighted automaton that may contain ε-arcs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsWfsa {
    pub alphabet: Alphabet,
    pub states: Vec<String>,
    pub initial: Vec<Rational>,
    pub finals: Vec<Rational>,
    pub arcs: Vec<EpsArc>,
}

impl EpsWfsa {
    pub fn new(
        alphabet: Alphabet,
        states: Vec<String>,
        initial: Vec<Rational>,
        finals: Vec<Rational>,
        arcs: Vec<EpsArc>,
    ) -> Result<EpsWfsa> {
        let n = states.len();
        if initial.len() != n || finals.len() != n {
            return Err(Error::Invalid("weight vectors must have one entry per state".into()));
        }
        for a in &arcs {
            if a.from >= n || a.to >= n || a.label.is_some_and(|y| y >= alphabet.len()) {
                return Err(Error::Invalid("arc refers to an unknown state or symbol".into()));
            }
        }
        if initial.iter().chain(&finals).chain(arcs.iter().map(|a| &a.weight)).any(|w| w.is_negative()) {
            return Err(Error::Invalid("negative weight".into()));
        }
        Ok(EpsWfsa { alphabet, states, initial, finals, arcs })
    }

    pub fn from_pfsa(a: &Pfsa) -> EpsWfsa {
        EpsWfsa {
            alphabet: a.alphabet().clone(),
            states: a.states().to_vec(),
            initial: a.initial().to_vec(),
            finals: a.finals().to_vec(),
            arcs: a
                .transitions()
                .iter()
                .map(|t| EpsArc { from: t.from, label: Some(t.symbol), weight: t.weight.clone(), to: t.to })
                .collect(),
        }
    }

    fn n(&self) -> usize {
        self.states.len()
    }

    /// K = Σ_k E^k for the ε-arc matrix E.
    pub fn eps_closure(&self) -> Result<Matrix> {
        let mut e = Matrix::zeros(self.n(), self.n());
        for a in self.arcs.iter().filter(|a| a.label.is_none()) {
            e.add_at(a.from, a.to, &a.weight);
        }
        neumann_inverse(&e)
    }

    fn symbol_matrix(&self, y: usize) -> Matrix {
        let mut w = Matrix::zeros(self.n(), self.n());
        for a in self.arcs.iter().filter(|a| a.label == Some(y)) {
            w.add_at(a.from, a.to, &a.weight);
        }
        w
    }

    /// Exact stringsum including ε-moves.
    pub fn stringsum(&self, y: &[usize]) -> Result<Rational> {
        let k = self.eps_closure()?;
        let mut alpha = row_times(&self.initial, &k);
        for &sym in y {
            let w = self.symbol_matrix(sym);
            alpha = row_times(&row_times(&alpha, &w), &k);
        }
        Ok(dot(&alpha, &self.finals))
    }

    /// Equivalent automaton without ε-arcs: arcs K·W_y, final weights K·ρ.
    pub fn remove_epsilon(&self) -> Result<EpsWfsa> {
        let k = self.eps_closure()?;
        let n = self.n();
        let mut merged: BTreeMap<(usize, usize, usize), Rational> = BTreeMap::new();
        for a in self.arcs.iter() {
            let Some(y) = a.label else { continue };
            for q in 0..n {
                let kq = k.get(q, a.from);
                if !kq.is_zero() {
                    *merged.entry((q, y, a.to)).or_insert_with(zero) += kq * &a.weight;
                }
            }
        }
        let finals = k.mul_vec(&self.finals)?;
        let arcs =
            merged.into_iter().map(|((from, y, to), weight)| EpsArc { from, label: Some(y), weight, to }).collect();
        Ok(EpsWfsa {
            alphabet: self.alphabet.clone(),
            states: self.states.clone(),
            initial: self.initial.clone(),
            finals,
            arcs,
        })
    }

    /// ε-remove and validate as a locally normalised PFSA.
    pub fn into_pfsa(&self) -> Result<Pfsa> {
        let r = self.remove_epsilon()?;
        let transitions = r
            .arcs
            .iter()
            .map(|a| PfsaTransition { from: a.from, symbol: a.label.unwrap(), weight: a.weight.clone(), to: a.to })
            .collect();
        Pfsa::new(r.alphabet, r.states, r.initial, r.finals, transitions)
    }
}

fn row_times(v: &[Rational], m: &Matrix) -> Vec<Rational> {
    let mut out = vec![zero(); m.cols];
    for (i, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate() {
            let y = m.get(i, j);
            if !y.is_zero() {
                *o += x * y;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::pfsa::reference_a1;
    use crate::rational::{one, rat};

    fn loop_machine(w: Rational) -> EpsWfsa {
        EpsWfsa::new(
            Alphabet::from_names(&["a"]).unwrap(),
            vec!["0".into(), "1".into()],
            vec![one(), zero()],
            vec![zero(), one()],
            vec![
                EpsArc { from: 0, label: None, weight: w, to: 0 },
                EpsArc { from: 0, label: Some(0), weight: rat(1, 2), to: 1 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn geometric_eps_loop() {
        assert_eq!(loop_machine(rat(1, 2)).stringsum(&[0]).unwrap(), one());
        assert!(matches!(loop_machine(one()).stringsum(&[0]), Err(Error::DivergentEpsilon(_))));
    }

    #[test]
    fn no_eps_matches_forward() {
        let a = reference_a1();
        let e = EpsWfsa::from_pfsa(&a);
        for y in [vec![], vec![0], vec![0, 1], vec![0, 0, 1]] {
            assert_eq!(e.stringsum(&y).unwrap(), a.stringsum(&y));
        }
    }

    #[test]
    fn removal_preserves_stringsums() {
        let m = loop_machine(rat(1, 2));
        let r = m.remove_epsilon().unwrap();
        assert!(r.arcs.iter().all(|a| a.label.is_some()));
        for y in [vec![], vec![0], vec![0, 0]] {
            assert_eq!(r.stringsum(&y).unwrap(), m.stringsum(&y).unwrap());
        }
    }
}
