use crate::alphabet::Alphabet;
use crate::dist::DistributionTable;
use crate::error::{Error, Result};
use crate::rational::{one, zero, Rational};
use crate::search::{explore, Bound, Exploration, Identity, Move, RunSystem};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    L,
    R,
}

impl Direction {
    pub fn offset(self) -> i64 {
        match self {
            Direction::L => -1,
            Direction::R => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PtmTransition {
    pub from: usize,
    pub read: usize,
    pub output: Option<usize>,
    pub write: usize,
    pub direction: Direction,
    pub weight: Rational,
    pub to: usize,
}

/// Probabilistic Turing machine with a write-only output tape and a
/// two-way infinite working tape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ptm {
    alphabet: Alphabet,
    states: Vec<String>,
    tape_alphabet: Vec<String>,
    blank: usize,
    bottom: usize,
    initial: usize,
    final_state: usize,
    transitions: Vec<PtmTransition>,
    by_key: HashMap<(usize, usize), Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PtmConfiguration {
    pub state: usize,
    pub tape: BTreeMap<i64, usize>,
    pub head: i64,
    pub output: Vec<usize>,
}

impl Ptm {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alphabet: Alphabet,
        states: Vec<String>,
        tape_alphabet: Vec<String>,
        blank: usize,
        bottom: usize,
        initial: usize,
        final_state: usize,
        transitions: Vec<PtmTransition>,
    ) -> Result<Ptm> {
        super::state_index(&states)?;
        super::state_index(&tape_alphabet)?;
        let (n, g) = (states.len(), tape_alphabet.len());
        if initial >= n || final_state >= n || blank >= g || bottom >= g || blank == bottom {
            return Err(Error::Invalid("bad initial/final state or blank/bottom symbols".into()));
        }
        if initial == final_state {
            return Err(Error::Invalid("initial and final state coincide".into()));
        }
        let mut mass: HashMap<(usize, usize), Rational> = HashMap::new();
        for t in &transitions {
            if t.from >= n || t.to >= n || t.read >= g || t.write >= g {
                return Err(Error::Invalid("transition refers to an unknown state or tape symbol".into()));
            }
            if t.output.is_some_and(|y| y >= alphabet.len()) {
                return Err(Error::Invalid("transition outputs an unknown symbol".into()));
            }
            if t.weight.is_negative() {
                return Err(Error::Invalid("negative transition weight".into()));
            }
            if t.from == final_state && !t.weight.is_zero() {
                return Err(Error::Invalid("the final state has outgoing transitions".into()));
            }
            *mass.entry((t.from, t.read)).or_insert_with(zero) += &t.weight;
        }
        for q in (0..n).filter(|&q| q != final_state) {
            for gm in 0..g {
                let m = mass.get(&(q, gm)).cloned().unwrap_or_else(zero);
                if !m.is_one() {
                    return Err(Error::Invalid(format!(
                        "(state `{}`, symbol `{}`) has outgoing mass {m}",
                        states[q], tape_alphabet[gm]
                    )));
                }
            }
        }
        let transitions: Vec<PtmTransition> = transitions.into_iter().filter(|t| !t.weight.is_zero()).collect();
        let mut by_key: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, t) in transitions.iter().enumerate() {
            by_key.entry((t.from, t.read)).or_default().push(i);
        }
        Ok(Ptm { alphabet, states, tape_alphabet, blank, bottom, initial, final_state, transitions, by_key })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    pub fn states(&self) -> &[String] {
        &self.states
    }
    pub fn tape_alphabet(&self) -> &[String] {
        &self.tape_alphabet
    }
    pub fn blank(&self) -> usize {
        self.blank
    }
    pub fn bottom(&self) -> usize {
        self.bottom
    }
    pub fn initial(&self) -> usize {
        self.initial
    }
    pub fn final_state(&self) -> usize {
        self.final_state
    }
    pub fn transitions(&self) -> &[PtmTransition] {
        &self.transitions
    }

    /// Indices of the transitions applicable from (q, γ).
    pub fn applicable(&self, q: usize, gamma: usize) -> &[usize] {
        self.by_key.get(&(q, gamma)).map_or(&[], |v| v.as_slice())
    }

    pub fn initial_configuration(&self) -> PtmConfiguration {
        let mut tape = BTreeMap::new();
        tape.insert(0, self.bottom);
        PtmConfiguration { state: self.initial, tape, head: 0, output: Vec::new() }
    }

    pub fn read(&self, cfg: &PtmConfiguration) -> usize {
        cfg.tape.get(&cfg.head).copied().unwrap_or(self.blank)
    }

    pub fn choices(&self, cfg: &PtmConfiguration) -> &[usize] {
        self.applicable(cfg.state, self.read(cfg))
    }

    /// Exploration of the computation tree; tables for every cap up to
    /// `step_cap` can be read from the result.
    pub fn explore(&self, step_cap: usize) -> Result<Exploration> {
        explore(self, &Identity(Bound::MaxLen(step_cap)), step_cap)
    }
}

/// Apply one transition to a configuration.
pub fn ptm_step(cfg: &PtmConfiguration, m: &Ptm, choice: usize) -> Result<PtmConfiguration> {
    let t = m.transitions.get(choice).ok_or_else(|| Error::Domain(format!("no transition {choice}")))?;
    if t.from != cfg.state || t.read != m.read(cfg) {
        return Err(Error::Domain("transition is not applicable to the configuration".into()));
    }
    let mut next = cfg.clone();
    next.tape.insert(cfg.head, t.write);
    if let Some(y) = t.output {
        next.output.push(y);
    }
    next.head += t.direction.offset();
    next.state = t.to;
    Ok(next)
}

/// Expand the computation tree to depth `step_cap`; the residual is the
/// mass of branches still running at the cap.
pub fn ptm_truncated_distribution(m: &Ptm, step_cap: usize) -> Result<DistributionTable> {
    Ok(m.explore(step_cap)?.table(step_cap))
}

/// Key used when merging branches: everything but the output.
pub type PtmKey = (usize, BTreeMap<i64, usize>, i64);

impl RunSystem for Ptm {
    type Config = PtmConfiguration;
    type Key = PtmKey;

    fn key(&self, c: &PtmConfiguration) -> PtmKey {
        (c.state, c.tape.clone(), c.head)
    }
    fn starts(&self) -> Result<Vec<(Rational, PtmConfiguration)>> {
        Ok(vec![(one(), self.initial_configuration())])
    }
    fn halting(&self, c: &PtmConfiguration) -> Result<Rational> {
        Ok(if c.state == self.final_state { one() } else { zero() })
    }
    fn moves(&self, c: &PtmConfiguration) -> Result<Vec<Move<PtmConfiguration>>> {
        self.choices(c)
            .iter()
            .map(|&i| {
                let t = &self.transitions[i];
                Ok(Move { label: t.output, weight: t.weight.clone(), next: ptm_step(c, self, i)? })
            })
            .collect()
    }
    fn move_labels(&self, c: &PtmConfiguration) -> Result<Vec<(Option<usize>, Rational)>> {
        Ok(self.choices(c).iter().map(|&i| (self.transitions[i].output, self.transitions[i].weight.clone())).collect())
    }
}

/// The two-state reference machine: emit `a` and continue, or halt, each
/// with probability 1/2.
pub fn reference_m1() -> Ptm {
    use crate::rational::rat;
    let sigma = Alphabet::from_names(&["a"]).unwrap();
    let mut ts = Vec::new();
    for g in 0..2 {
        ts.push(PtmTransition {
            from: 0,
            read: g,
            output: Some(0),
            write: g,
            direction: Direction::R,
            weight: rat(1, 2),
            to: 0,
        });
        ts.push(PtmTransition {
            from: 0,
            read: g,
            output: None,
            write: g,
            direction: Direction::R,
            weight: rat(1, 2),
            to: 1,
        });
    }
    Ptm::new(sigma, vec!["qi".into(), "qf".into()], vec!["⊥".into(), "⊔".into()], 1, 0, 0, 1, ts).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn m1_truncations() {
        let m = reference_m1();
        let t1 = ptm_truncated_distribution(&m, 1).unwrap();
        assert_eq!(t1.entries.len(), 1);
        assert_eq!(t1.get(&[]), rat(1, 2));
        assert_eq!(t1.residual_mass, rat(1, 2));
        let t3 = ptm_truncated_distribution(&m, 3).unwrap();
        assert_eq!(t3.get(&[]), rat(1, 2));
        assert_eq!(t3.get(&[0]), rat(1, 4));
        assert_eq!(t3.get(&[0, 0]), rat(1, 8));
        assert_eq!(t3.residual_mass, rat(1, 8));
        assert!(t3.truncated);
    }

    #[test]
    fn zero_depth_tree() {
        let sigma = Alphabet::from_names(&["a"]).unwrap();
        let ts = (0..2)
            .map(|g| PtmTransition {
                from: 0,
                read: g,
                output: None,
                write: g,
                direction: Direction::R,
                weight: one(),
                to: 1,
            })
            .collect();
        let m = Ptm::new(sigma, vec!["i".into(), "f".into()], vec!["⊥".into(), "⊔".into()], 1, 0, 0, 1, ts).unwrap();
        let t = ptm_truncated_distribution(&m, 0).unwrap();
        assert!(t.entries.is_empty());
        assert_eq!(t.residual_mass, one());
    }

    #[test]
    fn stepping_semantics() {
        let m = reference_m1();
        let c0 = m.initial_configuration();
        assert_eq!(m.read(&c0), m.bottom());
        let c1 = ptm_step(&c0, &m, 0).unwrap();
        assert_eq!((c1.head, c1.output.clone()), (1, vec![0]));
        assert_eq!(m.read(&c1), m.blank());
        let c2 = ptm_step(&c1, &m, 3).unwrap();
        assert_eq!(c2.output, vec![0]);
        assert_eq!(c2.state, 1);
        assert!(ptm_step(&c1, &m, 0).is_err());
    }

    #[test]
    fn left_move_goes_negative() {
        let sigma = Alphabet::from_names(&["a"]).unwrap();
        let ts = (0..2)
            .map(|g| PtmTransition {
                from: 0,
                read: g,
                output: Some(0),
                write: 0,
                direction: Direction::L,
                weight: one(),
                to: 1,
            })
            .collect();
        let m = Ptm::new(sigma, vec!["i".into(), "f".into()], vec!["⊥".into(), "⊔".into()], 1, 0, 0, 1, ts).unwrap();
        let c = ptm_step(&m.initial_configuration(), &m, 0).unwrap();
        assert_eq!(c.head, -1);
        assert_eq!(c.output, vec![0]);
    }
}
