use crate::alphabet::Alphabet;
use crate::dist::{Capped, DistributionTable};
use crate::error::{Error, Result};
use crate::rational::{one, zero, Rational};
use crate::search::{enumerate_runs, run_stringsum, Move, RunSystem};
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;

/// Transition conditioned on (state, top of the first stack). It pops
/// `pop1`/`pop2` (ε when `None`) and then pushes `push1`/`push2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwoPdaTransition {
    pub from: usize,
    pub top: usize,
    pub scan: Option<usize>,
    pub weight: Rational,
    pub to: usize,
    pub pop1: Option<usize>,
    pub pop2: Option<usize>,
    pub push1: Option<usize>,
    pub push2: Option<usize>,
}

impl TwoPdaTransition {
    /// Everything except the weight.
    pub fn shape(&self) -> (usize, usize, Option<usize>, usize, [Option<usize>; 4]) {
        (self.from, self.top, self.scan, self.to, [self.pop1, self.pop2, self.push1, self.push2])
    }
}

/// Probabilistic two-stack pushdown automaton. The first stack starts as
/// [⊥], the second starts empty; reaching the final state accepts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoPda {
    alphabet: Alphabet,
    states: Vec<String>,
    stack_alphabet: Vec<String>,
    bottom: usize,
    transitions: Vec<TwoPdaTransition>,
    initial: usize,
    final_state: usize,
    by_top: HashMap<(usize, usize), Vec<usize>>,
}

impl TwoPda {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alphabet: Alphabet,
        states: Vec<String>,
        stack_alphabet: Vec<String>,
        bottom: usize,
        transitions: Vec<TwoPdaTransition>,
        initial: usize,
        final_state: usize,
    ) -> Result<TwoPda> {
        super::state_index(&states)?;
        super::state_index(&stack_alphabet)?;
        let (n, g) = (states.len(), stack_alphabet.len());
        if initial >= n || final_state >= n || bottom >= g {
            return Err(Error::Invalid("bad initial state, final state or bottom symbol".into()));
        }
        let mut mass: HashMap<(usize, usize), Rational> = HashMap::new();
        for t in &transitions {
            let syms = [t.pop1, t.pop2, t.push1, t.push2];
            if t.from >= n || t.to >= n || t.top >= g || syms.iter().flatten().any(|&x| x >= g) {
                return Err(Error::Invalid("transition refers to an unknown state or stack symbol".into()));
            }
            if t.scan.is_some_and(|y| y >= alphabet.len()) {
                return Err(Error::Invalid("transition scans an unknown symbol".into()));
            }
            if t.pop1.is_some_and(|p| p != t.top) {
                return Err(Error::Invalid("first-stack pop must match the conditioning top".into()));
            }
            if t.weight.is_negative() {
                return Err(Error::Invalid("negative transition weight".into()));
            }
            if t.from == final_state && !t.weight.is_zero() {
                return Err(Error::Invalid("the final state has outgoing transitions".into()));
            }
            *mass.entry((t.from, t.top)).or_insert_with(zero) += &t.weight;
        }
        for ((q, gm), m) in &mass {
            if !m.is_one() && q != &final_state {
                return Err(Error::Invalid(format!(
                    "(state `{}`, top `{}`) has outgoing mass {m}",
                    states[*q], stack_alphabet[*gm]
                )));
            }
        }
        let transitions: Vec<TwoPdaTransition> = transitions.into_iter().filter(|t| !t.weight.is_zero()).collect();
        let mut by_top: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, t) in transitions.iter().enumerate() {
            by_top.entry((t.from, t.top)).or_default().push(i);
        }
        Ok(TwoPda { alphabet, states, stack_alphabet, bottom, transitions, initial, final_state, by_top })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    pub fn states(&self) -> &[String] {
        &self.states
    }
    pub fn stack_alphabet(&self) -> &[String] {
        &self.stack_alphabet
    }
    pub fn bottom(&self) -> usize {
        self.bottom
    }
    pub fn transitions(&self) -> &[TwoPdaTransition] {
        &self.transitions
    }
    pub fn initial(&self) -> usize {
        self.initial
    }
    pub fn final_state(&self) -> usize {
        self.final_state
    }

    /// At most one positive transition per (state, first-stack top, scanned symbol).
    pub fn is_sigma_deterministic(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.transitions.iter().all(|t| seen.insert((t.from, t.top, t.scan)))
    }

    pub fn stringsum(&self, y: &[usize], run_cap: usize) -> Result<Capped> {
        run_stringsum(self, y, run_cap)
    }

    pub fn enumerate(&self, max_len: usize, run_cap: usize) -> Result<DistributionTable> {
        enumerate_runs(self, max_len, run_cap)
    }
}

/// (state, first stack, second stack); tops at the ends.
pub type TwoPdaConfig = (usize, Vec<usize>, Vec<usize>);

impl RunSystem for TwoPda {
    type Config = TwoPdaConfig;
    type Key = TwoPdaConfig;

    fn key(&self, c: &TwoPdaConfig) -> TwoPdaConfig {
        c.clone()
    }
    fn starts(&self) -> Result<Vec<(Rational, TwoPdaConfig)>> {
        Ok(vec![(one(), (self.initial, vec![self.bottom], Vec::new()))])
    }
    fn halting(&self, c: &TwoPdaConfig) -> Result<Rational> {
        Ok(if c.0 == self.final_state { one() } else { zero() })
    }
    fn moves(&self, c: &TwoPdaConfig) -> Result<Vec<Move<TwoPdaConfig>>> {
        let Some(&top) = c.1.last() else { return Ok(Vec::new()) };
        let Some(ids) = self.by_top.get(&(c.0, top)) else { return Ok(Vec::new()) };
        let mut out = Vec::new();
        for &i in ids {
            let t = &self.transitions[i];
            let (mut s1, mut s2) = (c.1.clone(), c.2.clone());
            if t.pop1.is_some() {
                s1.pop();
            }
            if let Some(p) = t.pop2 {
                if s2.last() != Some(&p) {
                    continue;
                }
                s2.pop();
            }
            s1.extend(t.push1);
            s2.extend(t.push2);
            out.push(Move { label: t.scan, weight: t.weight.clone(), next: (t.to, s1, s2) });
        }
        Ok(out)
    }
}
