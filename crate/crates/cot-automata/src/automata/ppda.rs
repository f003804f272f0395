use crate::alphabet::Alphabet;
use crate::dist::{Capped, DistributionTable};
use crate::error::{Error, Result};
use crate::rational::{one, zero, Rational};
use crate::search::{enumerate_runs, run_stringsum, Move, RunSystem};
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;

/// (q, γ) --y/w--> (q', push), where `push[0]` becomes the new top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PpdaTransition {
    pub from: usize,
    pub pop: usize,
    pub scan: Option<usize>,
    pub weight: Rational,
    pub to: usize,
    pub push: Vec<usize>,
}

/// Probabilistic pushdown automaton. Runs start in (S, q_init) and accept
/// in an empty-stack configuration whose state is final.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ppda {
    alphabet: Alphabet,
    states: Vec<String>,
    stack_alphabet: Vec<String>,
    transitions: Vec<PpdaTransition>,
    start_stack: usize,
    initial: usize,
    finals: Vec<usize>,
    by_top: HashMap<(usize, usize), Vec<usize>>,
}

impl Ppda {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alphabet: Alphabet,
        states: Vec<String>,
        stack_alphabet: Vec<String>,
        transitions: Vec<PpdaTransition>,
        start_stack: usize,
        initial: usize,
        finals: Vec<usize>,
    ) -> Result<Ppda> {
        super::state_index(&states)?;
        super::state_index(&stack_alphabet)?;
        let (n, g) = (states.len(), stack_alphabet.len());
        if initial >= n || start_stack >= g || finals.iter().any(|&f| f >= n) || finals.is_empty() {
            return Err(Error::Invalid("bad initial or final configuration".into()));
        }
        let mut mass: HashMap<(usize, usize), Rational> = HashMap::new();
        for t in &transitions {
            if t.from >= n || t.to >= n || t.pop >= g || t.push.iter().any(|&x| x >= g) {
                return Err(Error::Invalid("transition refers to an unknown state or stack symbol".into()));
            }
            if t.scan.is_some_and(|y| y >= alphabet.len()) {
                return Err(Error::Invalid("transition scans an unknown symbol".into()));
            }
            if t.weight.is_negative() {
                return Err(Error::Invalid("negative transition weight".into()));
            }
            *mass.entry((t.from, t.pop)).or_insert_with(zero) += &t.weight;
        }
        for ((q, gm), m) in &mass {
            if !m.is_one() {
                return Err(Error::Invalid(format!(
                    "(state `{}`, top `{}`) has outgoing mass {m}",
                    states[*q], stack_alphabet[*gm]
                )));
            }
        }
        let transitions: Vec<PpdaTransition> = transitions.into_iter().filter(|t| !t.weight.is_zero()).collect();
        let mut by_top: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, t) in transitions.iter().enumerate() {
            by_top.entry((t.from, t.pop)).or_default().push(i);
        }
        Ok(Ppda { alphabet, states, stack_alphabet, transitions, start_stack, initial, finals, by_top })
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
    pub fn transitions(&self) -> &[PpdaTransition] {
        &self.transitions
    }
    pub fn start_stack(&self) -> usize {
        self.start_stack
    }
    pub fn initial(&self) -> usize {
        self.initial
    }
    pub fn finals(&self) -> &[usize] {
        &self.finals
    }

    /// At most one positive transition per (q, γ, y) with y ranging over Σ_ε.
    pub fn is_deterministic(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.transitions.iter().all(|t| seen.insert((t.from, t.pop, t.scan)))
    }

    pub fn stringsum(&self, y: &[usize], run_cap: usize) -> Result<Capped> {
        run_stringsum(self, y, run_cap)
    }

    pub fn enumerate(&self, max_len: usize, run_cap: usize) -> Result<DistributionTable> {
        enumerate_runs(self, max_len, run_cap)
    }
}

/// Configuration: state and stack with the top at the end.
pub type PpdaConfig = (usize, Vec<usize>);

impl RunSystem for Ppda {
    type Config = PpdaConfig;
    type Key = PpdaConfig;

    fn key(&self, c: &PpdaConfig) -> PpdaConfig {
        c.clone()
    }
    fn starts(&self) -> Result<Vec<(Rational, PpdaConfig)>> {
        Ok(vec![(one(), (self.initial, vec![self.start_stack]))])
    }
    fn halting(&self, c: &PpdaConfig) -> Result<Rational> {
        Ok(if c.1.is_empty() && self.finals.contains(&c.0) { one() } else { zero() })
    }
    fn moves(&self, c: &PpdaConfig) -> Result<Vec<Move<PpdaConfig>>> {
        let Some(&top) = c.1.last() else { return Ok(Vec::new()) };
        let Some(ids) = self.by_top.get(&(c.0, top)) else { return Ok(Vec::new()) };
        Ok(ids
            .iter()
            .map(|&i| {
                let t = &self.transitions[i];
                let mut stack = c.1.clone();
                stack.pop();
                stack.extend(t.push.iter().rev());
                Move { label: t.scan, weight: t.weight.clone(), next: (t.to, stack) }
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn sigma() -> Alphabet {
        Alphabet::from_names(&["a", "b"]).unwrap()
    }

    #[test]
    fn one_rule_machine() {
        let p = Ppda::new(
            sigma(),
            vec!["i".into(), "f".into()],
            vec!["S".into()],
            vec![PpdaTransition { from: 0, pop: 0, scan: Some(0), weight: one(), to: 1, push: vec![] }],
            0,
            0,
            vec![1],
        )
        .unwrap();
        assert_eq!(p.stringsum(&[0], 4).unwrap(), Capped { value: one(), saturated: false });
        assert_eq!(p.stringsum(&[1], 4).unwrap().value, zero());
        assert!(p.is_deterministic());
    }

    #[test]
    fn branching_machine() {
        let p = Ppda::new(
            sigma(),
            vec!["i".into(), "m".into(), "f".into()],
            vec!["S".into(), "X".into()],
            vec![
                PpdaTransition { from: 0, pop: 0, scan: Some(0), weight: rat(1, 3), to: 2, push: vec![] },
                PpdaTransition { from: 0, pop: 0, scan: None, weight: rat(2, 3), to: 1, push: vec![1] },
                PpdaTransition { from: 1, pop: 1, scan: Some(0), weight: one(), to: 2, push: vec![] },
            ],
            0,
            0,
            vec![2],
        )
        .unwrap();
        assert_eq!(p.stringsum(&[0], 8).unwrap(), Capped { value: one(), saturated: false });
        let capped = p.stringsum(&[0], 1).unwrap();
        assert_eq!(capped.value, rat(1, 3));
        assert!(capped.saturated);
    }

    #[test]
    fn push_order_puts_first_symbol_on_top() {
        let p = Ppda::new(
            sigma(),
            vec!["i".into(), "f".into()],
            vec!["S".into(), "A".into(), "B".into()],
            vec![
                PpdaTransition { from: 0, pop: 0, scan: None, weight: one(), to: 0, push: vec![1, 2] },
                PpdaTransition { from: 0, pop: 1, scan: Some(0), weight: one(), to: 0, push: vec![] },
                PpdaTransition { from: 0, pop: 2, scan: Some(1), weight: one(), to: 1, push: vec![] },
            ],
            0,
            0,
            vec![1],
        )
        .unwrap();
        assert_eq!(p.stringsum(&[0, 1], 8).unwrap().value, one());
    }
}
