use crate::alphabet::Alphabet;
use crate::dist::{DistributionTable, LanguageModel, NextSymbolDistribution};
use crate::error::{Error, Result};
use crate::rational::{one, sum, zero, Rational};
use crate::search::{sample_index, KeyedLm, Move, RunSystem};
use num_traits::{One, Signed, Zero};
use rand::RngCore;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PfsaTransition {
    pub from: usize,
    pub symbol: usize,
    pub weight: Rational,
    pub to: usize,
}

/// Probabilistic finite-state automaton with locally normalised weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pfsa {
    alphabet: Alphabet,
    states: Vec<String>,
    initial: Vec<Rational>,
    finals: Vec<Rational>,
    transitions: Vec<PfsaTransition>,
    outgoing: Vec<Vec<usize>>,
}

/// A path: start state plus indices into the transition list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub start: usize,
    pub transitions: Vec<usize>,
}

impl Pfsa {
    /// Validates weights and normalisation; zero-weight transitions are dropped.
    pub fn new(
        alphabet: Alphabet,
        states: Vec<String>,
        initial: Vec<Rational>,
        finals: Vec<Rational>,
        transitions: Vec<PfsaTransition>,
    ) -> Result<Pfsa> {
        let n = states.len();
        super::state_index(&states)?;
        if initial.len() != n || finals.len() != n {
            return Err(Error::Invalid("weight vectors must have one entry per state".into()));
        }
        if n == 0 {
            return Err(Error::Invalid("a PFSA needs at least one state".into()));
        }
        let mut mass = finals.clone();
        for t in &transitions {
            if t.from >= n || t.to >= n || t.symbol >= alphabet.len() {
                return Err(Error::Invalid("transition refers to an unknown state or symbol".into()));
            }
            if t.weight.is_negative() {
                return Err(Error::Invalid("negative transition weight".into()));
            }
            mass[t.from] += &t.weight;
        }
        if initial.iter().chain(&finals).any(|w| w.is_negative()) {
            return Err(Error::Invalid("negative initial or final weight".into()));
        }
        if !sum(&initial).is_one() {
            return Err(Error::Invalid(format!("initial weights sum to {}", sum(&initial))));
        }
        for (q, m) in mass.iter().enumerate() {
            if !m.is_one() {
                return Err(Error::Invalid(format!("state `{}` has outgoing mass {m}", states[q])));
            }
        }
        let transitions: Vec<PfsaTransition> = transitions.into_iter().filter(|t| !t.weight.is_zero()).collect();
        let mut outgoing = vec![Vec::new(); n];
        for (i, t) in transitions.iter().enumerate() {
            outgoing[t.from].push(i);
        }
        Ok(Pfsa { alphabet, states, initial, finals, transitions, outgoing })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    pub fn states(&self) -> &[String] {
        &self.states
    }
    pub fn num_states(&self) -> usize {
        self.states.len()
    }
    pub fn initial(&self) -> &[Rational] {
        &self.initial
    }
    pub fn finals(&self) -> &[Rational] {
        &self.finals
    }
    pub fn transitions(&self) -> &[PfsaTransition] {
        &self.transitions
    }
    pub fn outgoing(&self, q: usize) -> impl Iterator<Item = &PfsaTransition> {
        self.outgoing[q].iter().map(move |&i| &self.transitions[i])
    }

    /// Exactly one initial state and at most one positive transition per (q, y).
    pub fn is_deterministic(&self) -> bool {
        self.initial.iter().filter(|w| w.is_positive()).count() == 1 && self.is_transition_deterministic()
    }

    /// The per-(q, y) half of determinism, ignoring the initial weights.
    pub fn is_transition_deterministic(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.transitions.iter().all(|t| seen.insert((t.from, t.symbol)))
    }

    /// Total probability of p(q', y | q) summed over parallel transitions.
    pub fn transition_weight(&self, q: usize, y: usize, q2: usize) -> Rational {
        self.outgoing(q).filter(|t| t.symbol == y && t.to == q2).fold(zero(), |a, t| a + &t.weight)
    }

    /// Forward vector after reading `y` (prefix weights per state).
    pub fn forward(&self, y: &[usize]) -> Vec<Rational> {
        let mut alpha = self.initial.clone();
        for &sym in y {
            alpha = self.step_forward(&alpha, sym);
        }
        alpha
    }

    fn step_forward(&self, alpha: &[Rational], sym: usize) -> Vec<Rational> {
        let mut next = vec![zero(); self.states.len()];
        for (q, a) in alpha.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for t in self.outgoing(q) {
                if t.symbol == sym {
                    next[t.to] += a * &t.weight;
                }
            }
        }
        next
    }

    pub fn stringsum(&self, y: &[usize]) -> Rational {
        let alpha = self.forward(y);
        crate::rational::dot(&alpha, &self.finals)
    }

    /// Exact table of all strings up to `max_len`; the residual is the
    /// mass of longer strings plus any non-halting mass.
    pub fn enumerate(&self, max_len: usize) -> DistributionTable {
        let mut table = DistributionTable::default();
        let mut level: BTreeMap<Vec<usize>, Vec<Rational>> = BTreeMap::new();
        level.insert(Vec::new(), self.initial.clone());
        for len in 0..=max_len {
            let mut next = BTreeMap::new();
            for (y, alpha) in &level {
                table.add(y.clone(), &crate::rational::dot(alpha, &self.finals));
                if len == max_len {
                    table.residual_mass += sum(alpha) - crate::rational::dot(alpha, &self.finals);
                    continue;
                }
                for sym in 0..self.alphabet.len() {
                    let a2 = self.step_forward(alpha, sym);
                    if a2.iter().any(|x| !x.is_zero()) {
                        let mut y2 = y.clone();
                        y2.push(sym);
                        next.insert(y2, a2);
                    }
                }
            }
            level = next;
        }
        table
    }

    pub fn path_yield(&self, p: &Path) -> Vec<usize> {
        p.transitions.iter().map(|&i| self.transitions[i].symbol).collect()
    }

    pub fn path_prefix_weight(&self, p: &Path) -> Rational {
        p.transitions.iter().fold(self.initial[p.start].clone(), |acc, &i| acc * &self.transitions[i].weight)
    }

    pub fn path_weight(&self, p: &Path) -> Rational {
        let last = p.transitions.last().map_or(p.start, |&i| self.transitions[i].to);
        self.path_prefix_weight(p) * &self.finals[last]
    }

    /// Sample a path by drawing 64-bit uniforms against the exact CDF.
    pub fn sample(&self, rng: &mut dyn RngCore, step_cap: usize) -> Result<(Path, Vec<usize>)> {
        let start = sample_index(&self.initial, rng.next_u64()).unwrap_or(self.states.len() - 1);
        let mut path = Path { start, transitions: Vec::new() };
        let mut q = start;
        loop {
            let out: Vec<usize> = self.outgoing[q].clone();
            let mut ws = vec![self.finals[q].clone()];
            ws.extend(out.iter().map(|&i| self.transitions[i].weight.clone()));
            let k = sample_index(&ws, rng.next_u64()).unwrap_or(ws.len() - 1);
            if k == 0 {
                let y = self.path_yield(&path);
                return Ok((path, y));
            }
            if path.transitions.len() == step_cap {
                return Err(Error::Truncated { cap: step_cap, partial: path.transitions });
            }
            let ti = out[k - 1];
            path.transitions.push(ti);
            q = self.transitions[ti].to;
        }
    }

    /// Remove states that no positive path from an initial state reaches.
    pub fn prune_unreachable(&self) -> Pfsa {
        let n = self.states.len();
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&q| self.initial[q].is_positive()).collect();
        for &q in &stack {
            seen[q] = true;
        }
        while let Some(q) = stack.pop() {
            for t in self.outgoing(q) {
                if !seen[t.to] {
                    seen[t.to] = true;
                    stack.push(t.to);
                }
            }
        }
        let map: Vec<Option<usize>> = {
            let mut k = 0;
            seen.iter()
                .map(|&s| {
                    s.then(|| {
                        k += 1;
                        k - 1
                    })
                })
                .collect()
        };
        let keep = |q: usize| map[q];
        let states = (0..n).filter(|&q| seen[q]).map(|q| self.states[q].clone()).collect();
        let initial = (0..n).filter(|&q| seen[q]).map(|q| self.initial[q].clone()).collect();
        let finals = (0..n).filter(|&q| seen[q]).map(|q| self.finals[q].clone()).collect();
        let transitions = self
            .transitions
            .iter()
            .filter_map(|t| {
                Some(PfsaTransition {
                    from: keep(t.from)?,
                    symbol: t.symbol,
                    weight: t.weight.clone(),
                    to: keep(t.to)?,
                })
            })
            .collect();
        Pfsa::new(self.alphabet.clone(), states, initial, finals, transitions).expect("pruning preserves normalisation")
    }
}

impl RunSystem for Pfsa {
    type Config = usize;
    type Key = usize;

    fn key(&self, c: &usize) -> usize {
        *c
    }
    fn starts(&self) -> Result<Vec<(Rational, usize)>> {
        Ok(self.initial.iter().cloned().enumerate().map(|(q, w)| (w, q)).collect())
    }
    fn halting(&self, c: &usize) -> Result<Rational> {
        Ok(self.finals[*c].clone())
    }
    fn moves(&self, c: &usize) -> Result<Vec<Move<usize>>> {
        Ok(self.outgoing(*c).map(|t| Move { label: Some(t.symbol), weight: t.weight.clone(), next: t.to }).collect())
    }
}

/// Conditionals p(y | context) as ratios of forward prefix masses.
impl LanguageModel for Pfsa {
    type State = Vec<Rational>;

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn initial_state(&self) -> Result<Vec<Rational>> {
        Ok(self.initial.clone())
    }
    fn advance(&self, state: &Vec<Rational>, symbol: usize) -> Result<Vec<Rational>> {
        if symbol >= self.alphabet.len() {
            return Err(Error::Domain(format!("symbol index {symbol} outside the alphabet")));
        }
        Ok(self.step_forward(state, symbol))
    }
    fn next_distribution(&self, state: &Vec<Rational>) -> Result<NextSymbolDistribution> {
        let total = sum(state);
        if total.is_zero() {
            return Err(Error::Domain("context has probability zero".into()));
        }
        let mut probs = vec![zero(); self.alphabet.len()];
        for (q, a) in state.iter().enumerate() {
            for t in self.outgoing(q) {
                probs[t.symbol] += a * &t.weight;
            }
        }
        let probs = probs.into_iter().map(|p| p / &total).collect();
        let eos = crate::rational::dot(state, &self.finals) / &total;
        Ok(NextSymbolDistribution { probs, eos })
    }
}

impl KeyedLm for Pfsa {
    type Key = Vec<Rational>;
    fn state_key(&self, s: &Vec<Rational>) -> Vec<Rational> {
        s.clone()
    }
}

/// The two-state reference machine used across the examples and tests.
pub fn reference_a1() -> Pfsa {
    use crate::rational::rat;
    let sigma = Alphabet::from_names(&["a", "b"]).unwrap();
    Pfsa::new(
        sigma,
        vec!["0".into(), "1".into()],
        vec![one(), zero()],
        vec![rat(1, 4), rat(1, 2)],
        vec![
            PfsaTransition { from: 0, symbol: 0, weight: rat(1, 2), to: 0 },
            PfsaTransition { from: 0, symbol: 0, weight: rat(1, 4), to: 1 },
            PfsaTransition { from: 1, symbol: 1, weight: rat(1, 2), to: 1 },
        ],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use rand::SeedableRng;

    #[test]
    fn a1_stringsums() {
        let a = reference_a1();
        assert_eq!(a.stringsum(&[]), rat(1, 4));
        assert_eq!(a.stringsum(&[0]), rat(1, 4));
        assert_eq!(a.stringsum(&[0, 1]), rat(1, 16));
        assert_eq!(a.stringsum(&[0, 0]), rat(1, 8));
        assert_eq!(a.stringsum(&[1]), zero());
        assert!(!a.is_deterministic());
    }

    #[test]
    fn enumeration_accounts_for_all_mass() {
        let a = reference_a1();
        for l in 0..6 {
            let t = a.enumerate(l);
            assert_eq!(t.total() + &t.residual_mass, one());
        }
        let t = a.enumerate(2);
        assert_eq!(t.residual_mass, rat(5, 16));
    }

    #[test]
    fn trivial_machine_is_deterministic() {
        let m = Pfsa::new(Alphabet::from_names(&["a"]).unwrap(), vec!["q".into()], vec![one()], vec![one()], vec![])
            .unwrap();
        assert!(m.is_deterministic());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let (p, y) = m.sample(&mut rng, 10).unwrap();
        assert!(p.transitions.is_empty() && y.is_empty());
    }

    #[test]
    fn rejects_unnormalised() {
        let r =
            Pfsa::new(Alphabet::from_names(&["a"]).unwrap(), vec!["q".into()], vec![one()], vec![rat(1, 2)], vec![]);
        assert!(r.is_err());
    }

    #[test]
    fn zero_weights_are_dropped() {
        let m = Pfsa::new(
            Alphabet::from_names(&["a"]).unwrap(),
            vec!["q".into()],
            vec![one()],
            vec![one()],
            vec![PfsaTransition { from: 0, symbol: 0, weight: zero(), to: 0 }],
        )
        .unwrap();
        assert!(m.transitions().is_empty());
    }
}
