//! Level-synchronous exploration of weighted run trees. Every machine and
//! wrapped model exposes its operational semantics as a [`RunSystem`];
//! a [`YieldTracker`] maps emitted labels to output strings.

use crate::dist::{Capped, DistributionTable, LanguageModel};
use crate::error::{Error, Result};
use crate::rational::{zero, Rational};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::RngCore;
use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

#[derive(Clone, Debug)]
pub struct Move<C> {
    pub label: Option<usize>,
    pub weight: Rational,
    pub next: C,
}

pub trait RunSystem {
    type Config: Clone;
    type Key: Eq + Hash + Clone;

    fn key(&self, c: &Self::Config) -> Self::Key;
    fn starts(&self) -> Result<Vec<(Rational, Self::Config)>>;
    /// Weight of stopping in `c` (ρ, p(EOS), or 1 for accepting configurations).
    fn halting(&self, c: &Self::Config) -> Result<Rational>;
    fn moves(&self, c: &Self::Config) -> Result<Vec<Move<Self::Config>>>;

    /// Labels and weights of the moves without building successors.
    fn move_labels(&self, c: &Self::Config) -> Result<Vec<(Option<usize>, Rational)>> {
        Ok(self.moves(c)?.into_iter().map(|m| (m.label, m.weight)).collect())
    }
}

pub enum Push<S> {
    Keep(S),
    /// The output can never become acceptable.
    Dead,
    /// The output grew past the length bound.
    Overflow,
}

pub trait YieldTracker {
    type State: Clone + Eq + Hash;
    fn start(&self) -> Self::State;
    fn push(&self, s: &Self::State, label: usize) -> Push<Self::State>;
    fn accept(&self, s: &Self::State) -> Option<Vec<usize>>;
}

/// Which output strings an exploration keeps.
#[derive(Clone, Debug)]
pub enum Bound {
    MaxLen(usize),
    Target(Vec<usize>),
}

impl Bound {
    pub fn check(&self, out: &[usize]) -> Push<()> {
        match self {
            Bound::MaxLen(l) if out.len() > *l => Push::Overflow,
            Bound::MaxLen(_) => Push::Keep(()),
            Bound::Target(y) if out.len() <= y.len() && y[..out.len()] == *out => Push::Keep(()),
            Bound::Target(_) => Push::Dead,
        }
    }

    pub fn complete(&self, out: &[usize]) -> bool {
        match self {
            Bound::MaxLen(l) => out.len() <= *l,
            Bound::Target(y) => y == out,
        }
    }
}

/// Labels are the output.
pub struct Identity(pub Bound);

impl YieldTracker for Identity {
    type State = Vec<usize>;
    fn start(&self) -> Vec<usize> {
        Vec::new()
    }
    fn push(&self, s: &Vec<usize>, label: usize) -> Push<Vec<usize>> {
        let mut out = s.clone();
        out.push(label);
        match self.0.check(&out) {
            Push::Keep(()) => Push::Keep(out),
            Push::Dead => Push::Dead,
            Push::Overflow => Push::Overflow,
        }
    }
    fn accept(&self, s: &Vec<usize>) -> Option<Vec<usize>> {
        self.0.complete(s).then(|| s.clone())
    }
}

/// Per-depth record of an exploration, from which tables for every cap up
/// to the explored depth can be read off.
#[derive(Clone, Debug, Default)]
pub struct Exploration {
    pub accepted: Vec<BTreeMap<Vec<usize>, Rational>>,
    /// Mass of non-dead moves leaving depth-d nodes.
    pub live: Vec<Rational>,
    /// Mass of moves leaving depth-d nodes whose output stays within bounds.
    pub live_in_bounds: Vec<Rational>,
    /// Mass that overflowed the length bound on entering depth d.
    pub overflow: Vec<Rational>,
}

impl Exploration {
    pub fn depth(&self) -> usize {
        self.accepted.len() - 1
    }

    pub fn table(&self, cap: usize) -> DistributionTable {
        let cap = cap.min(self.depth());
        let mut t = DistributionTable::default();
        let mut residual = self.live[cap].clone();
        for d in 0..=cap {
            for (y, w) in &self.accepted[d] {
                t.add(y.clone(), w);
            }
            residual += &self.overflow[d];
        }
        t.residual_mass = residual;
        t.truncated = self.live_in_bounds[cap].is_positive();
        t
    }
}

pub fn explore<S: RunSystem, T: YieldTracker>(sys: &S, tracker: &T, step_cap: usize) -> Result<Exploration> {
    let mut ex = Exploration::default();
    let mut frontier: HashMap<(S::Key, T::State), (S::Config, Rational)> = HashMap::new();
    let t0 = tracker.start();
    for (w, c) in sys.starts()? {
        if w.is_zero() {
            continue;
        }
        let k = (sys.key(&c), t0.clone());
        frontier.entry(k).and_modify(|e| e.1 += &w).or_insert((c, w));
    }
    ex.overflow.push(zero());
    for depth in 0..=step_cap {
        let mut accepted = BTreeMap::new();
        let mut live = zero();
        let mut live_in = zero();
        let mut overflow_next = zero();
        let mut next: HashMap<(S::Key, T::State), (S::Config, Rational)> = HashMap::new();
        for ((_, ts), (c, w)) in frontier.drain() {
            let h = sys.halting(&c)?;
            if !h.is_zero() {
                if let Some(y) = tracker.accept(&ts) {
                    *accepted.entry(y).or_insert_with(zero) += &w * &h;
                }
            }
            let moves: Vec<(Option<usize>, Rational, Option<S::Config>)> = if depth < step_cap {
                sys.moves(&c)?.into_iter().map(|m| (m.label, m.weight, Some(m.next))).collect()
            } else {
                sys.move_labels(&c)?.into_iter().map(|(l, w)| (l, w, None)).collect()
            };
            for (label, weight, succ) in moves {
                if weight.is_zero() {
                    continue;
                }
                let mw = &w * &weight;
                let nts = match label {
                    None => Push::Keep(ts.clone()),
                    Some(l) => tracker.push(&ts, l),
                };
                match nts {
                    Push::Dead => {}
                    Push::Overflow => {
                        live += &mw;
                        overflow_next += &mw;
                    }
                    Push::Keep(nts) => {
                        live += &mw;
                        live_in += &mw;
                        if let Some(succ) = succ {
                            let k = (sys.key(&succ), nts);
                            match next.get_mut(&k) {
                                Some(e) => e.1 += &mw,
                                None => {
                                    next.insert(k, (succ, mw));
                                }
                            }
                        }
                    }
                }
            }
        }
        ex.accepted.push(accepted);
        ex.live.push(live);
        ex.live_in_bounds.push(live_in);
        if depth < step_cap {
            ex.overflow.push(overflow_next);
        }
        frontier = next;
    }
    Ok(ex)
}

/// Enumerate output strings of length at most `max_len` over runs of at
/// most `step_cap` moves.
pub fn enumerate_runs<S: RunSystem>(sys: &S, max_len: usize, step_cap: usize) -> Result<DistributionTable> {
    Ok(explore(sys, &Identity(Bound::MaxLen(max_len)), step_cap)?.table(step_cap))
}

/// Total weight of runs of at most `step_cap` moves yielding `y`.
pub fn run_stringsum<S: RunSystem>(sys: &S, y: &[usize], step_cap: usize) -> Result<Capped> {
    let ex = explore(sys, &Identity(Bound::Target(y.to_vec())), step_cap)?;
    let t = ex.table(step_cap);
    Ok(Capped { value: t.get(y), saturated: t.truncated })
}

/// Choose an index by comparing a uniform 64-bit draw with the exact CDF of
/// `weights`; `None` when the draw falls in the deficient remainder.
pub fn sample_index(weights: &[Rational], u: u64) -> Option<usize> {
    let scale = BigInt::from(1u8) << 64;
    let u = BigInt::from(u);
    let mut cdf = zero();
    for (i, w) in weights.iter().enumerate() {
        cdf += w;
        if &u * cdf.denom() < cdf.numer() * &scale {
            return Some(i);
        }
    }
    None
}

/// One sampled run: the chosen move indices and the emitted labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampledRun {
    pub moves: Vec<usize>,
    pub labels: Vec<usize>,
}

pub fn sample_run<S: RunSystem>(sys: &S, rng: &mut dyn RngCore, step_cap: usize) -> Result<SampledRun> {
    let starts = sys.starts()?;
    let sw: Vec<Rational> = starts.iter().map(|s| s.0.clone()).collect();
    let i = sample_index(&sw, rng.next_u64()).ok_or_else(|| Error::Domain("initial mass is deficient".into()))?;
    let mut c = starts[i].1.clone();
    let mut run = SampledRun { moves: Vec::new(), labels: Vec::new() };
    loop {
        let h = sys.halting(&c)?;
        let moves = sys.moves(&c)?;
        let mut ws = vec![h];
        ws.extend(moves.iter().map(|m| m.weight.clone()));
        match sample_index(&ws, rng.next_u64()) {
            Some(0) => return Ok(run),
            Some(k) => {
                if run.moves.len() == step_cap {
                    return Err(Error::Truncated { cap: step_cap, partial: run.moves });
                }
                let m = &moves[k - 1];
                run.moves.push(k - 1);
                if let Some(l) = m.label {
                    run.labels.push(l);
                }
                c = m.next.clone();
            }
            None => return Err(Error::Domain("run entered a deficient configuration".into())),
        }
    }
}

impl<S: RunSystem> RunSystem for &S {
    type Config = S::Config;
    type Key = S::Key;

    fn key(&self, c: &S::Config) -> S::Key {
        (**self).key(c)
    }
    fn starts(&self) -> Result<Vec<(Rational, S::Config)>> {
        (**self).starts()
    }
    fn halting(&self, c: &S::Config) -> Result<Rational> {
        (**self).halting(c)
    }
    fn moves(&self, c: &S::Config) -> Result<Vec<Move<S::Config>>> {
        (**self).moves(c)
    }
    fn move_labels(&self, c: &S::Config) -> Result<Vec<(Option<usize>, Rational)>> {
        (**self).move_labels(c)
    }
}

/// Adapter that explores an autoregressive LM symbol by symbol.
pub struct LmRun<L>(pub L);

pub trait KeyedLm: LanguageModel {
    type Key: Eq + Hash + Clone;
    fn state_key(&self, s: &Self::State) -> Self::Key;
}

impl<L: KeyedLm> KeyedLm for &L {
    type Key = L::Key;
    fn state_key(&self, s: &L::State) -> L::Key {
        (**self).state_key(s)
    }
}

impl<L: KeyedLm> RunSystem for LmRun<L> {
    type Config = L::State;
    type Key = L::Key;

    fn key(&self, c: &L::State) -> L::Key {
        self.0.state_key(c)
    }
    fn starts(&self) -> Result<Vec<(Rational, L::State)>> {
        Ok(vec![(crate::rational::one(), self.0.initial_state()?)])
    }
    fn halting(&self, c: &L::State) -> Result<Rational> {
        Ok(self.0.next_distribution(c)?.eos)
    }
    fn move_labels(&self, c: &L::State) -> Result<Vec<(Option<usize>, Rational)>> {
        let d = self.0.next_distribution(c)?;
        Ok(d.probs.into_iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(i, p)| (Some(i), p)).collect())
    }
    fn moves(&self, c: &L::State) -> Result<Vec<Move<L::State>>> {
        let d = self.0.next_distribution(c)?;
        let mut out = Vec::new();
        for (sym, p) in d.probs.into_iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            out.push(Move { label: Some(sym), weight: p, next: self.0.advance(c, sym)? });
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn sample_index_respects_cdf() {
        let w = vec![rat(1, 4), rat(3, 4)];
        assert_eq!(sample_index(&w, 0), Some(0));
        assert_eq!(sample_index(&w, u64::MAX / 4 - 1), Some(0));
        assert_eq!(sample_index(&w, u64::MAX / 4 + 1), Some(1));
        assert_eq!(sample_index(&w, u64::MAX), Some(1));
        assert_eq!(sample_index(&[rat(1, 2)], u64::MAX), None);
    }
}
