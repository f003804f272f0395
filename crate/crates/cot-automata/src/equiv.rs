//! Weak-equivalence oracles, seeded random machines and the step-level
//! checks of the PTM transformer.

use crate::alphabet::Alphabet;
use crate::automata::{
    ptm_step, Direction, Pfsa, PfsaTransition, Ppda, PpdaTransition, Ptm, PtmConfiguration, PtmTransition, TwoPda,
    TwoPdaTransition,
};
use crate::cot::{augment_ptm_alphabet, cot_probability, CotLm, PtmAlphabet, PtmSymbol, YBar};
use crate::dist::{Capped, DistributionTable, LanguageModel};
use crate::error::{Error, Result};
use crate::rational::{format_rational, one, onehot, rat, zero, zeros, Rational, Vector};
use crate::search::{enumerate_runs, explore, run_stringsum, sample_run, Bound, Identity, KeyedLm, LmRun, RunSystem};
use crate::transformer::{PtmLayout, TfState, TransformerLm};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::cmp::Ordering;
use std::collections::BTreeSet;

/// Outcome of drawing one string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SampleOutcome {
    String(Vec<usize>),
    /// The run was still going at the step cap.
    Truncated,
    /// The draw fell into missing mass or φ is undefined on the sampled run.
    Undefined,
}

/// Anything that assigns probabilities to strings over `sigma`.
pub trait StringDistribution {
    fn sigma(&self) -> &Alphabet;
    fn enumerate_to(&self, max_len: usize, step_cap: usize) -> Result<DistributionTable>;
    fn probability(&self, y: &[usize], step_cap: usize) -> Result<Capped>;
    fn sample(&self, rng: &mut dyn RngCore, step_cap: usize) -> Result<SampleOutcome>;
}

fn sample_labels<S: RunSystem>(sys: &S, rng: &mut dyn RngCore, step_cap: usize) -> Result<SampleOutcome> {
    match sample_run(sys, rng, step_cap) {
        Ok(run) => Ok(SampleOutcome::String(run.labels)),
        Err(Error::Truncated { .. }) => Ok(SampleOutcome::Truncated),
        Err(Error::Domain(_)) => Ok(SampleOutcome::Undefined),
        Err(e) => Err(e),
    }
}

impl StringDistribution for Pfsa {
    fn sigma(&self) -> &Alphabet {
        self.alphabet()
    }
    fn enumerate_to(&self, max_len: usize, _step_cap: usize) -> Result<DistributionTable> {
        Ok(self.enumerate(max_len))
    }
    fn probability(&self, y: &[usize], _step_cap: usize) -> Result<Capped> {
        Ok(Capped { value: self.stringsum(y), saturated: false })
    }
    fn sample(&self, rng: &mut dyn RngCore, step_cap: usize) -> Result<SampleOutcome> {
        sample_labels(self, rng, step_cap)
    }
}

macro_rules! run_system_distribution {
    ($t:ty, $sigma:expr) => {
        impl StringDistribution for $t {
            fn sigma(&self) -> &Alphabet {
                $sigma(self)
            }
            fn enumerate_to(&self, max_len: usize, step_cap: usize) -> Result<DistributionTable> {
                Ok(explore(self, &Identity(Bound::MaxLen(max_len)), step_cap)?.table(step_cap))
            }
            fn probability(&self, y: &[usize], step_cap: usize) -> Result<Capped> {
                run_stringsum(self, y, step_cap)
            }
            fn sample(&self, rng: &mut dyn RngCore, step_cap: usize) -> Result<SampleOutcome> {
                sample_labels(self, rng, step_cap)
            }
        }
    };
}

run_system_distribution!(Ppda, Ppda::alphabet);
run_system_distribution!(TwoPda, TwoPda::alphabet);
run_system_distribution!(Ptm, Ptm::alphabet);

impl<L: KeyedLm> StringDistribution for LmRun<L> {
    fn sigma(&self) -> &Alphabet {
        self.0.alphabet()
    }
    fn enumerate_to(&self, max_len: usize, step_cap: usize) -> Result<DistributionTable> {
        enumerate_runs(self, max_len, step_cap)
    }
    fn probability(&self, y: &[usize], step_cap: usize) -> Result<Capped> {
        run_stringsum(self, y, step_cap)
    }
    fn sample(&self, rng: &mut dyn RngCore, step_cap: usize) -> Result<SampleOutcome> {
        sample_labels(self, rng, step_cap)
    }
}

impl<B: RunSystem> StringDistribution for CotLm<B> {
    fn sigma(&self) -> &Alphabet {
        CotLm::sigma(self)
    }
    fn enumerate_to(&self, max_len: usize, step_cap: usize) -> Result<DistributionTable> {
        self.enumerate(max_len, step_cap)
    }
    fn probability(&self, y: &[usize], step_cap: usize) -> Result<Capped> {
        cot_probability(self, y, step_cap)
    }
    fn sample(&self, rng: &mut dyn RngCore, step_cap: usize) -> Result<SampleOutcome> {
        match sample_labels(&self.base, rng, step_cap)? {
            SampleOutcome::String(x) => Ok(self.phi.apply(&x)?.map_or(SampleOutcome::Undefined, SampleOutcome::String)),
            other => Ok(other),
        }
    }
}

pub fn enumerate_distribution(
    lm: &dyn StringDistribution,
    max_len: usize,
    step_cap: usize,
) -> Result<DistributionTable> {
    lm.enumerate_to(max_len, step_cap)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    ExactEqual,
    EqualUpToTruncation,
    Counterexample { string: Vec<usize>, lhs: Rational, rhs: Rational },
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::ExactEqual => 0,
            Verdict::Counterexample { .. } => 1,
            Verdict::EqualUpToTruncation => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub max_len: usize,
    pub pairs: Vec<(Vec<usize>, Rational, Rational)>,
    pub verdict: Verdict,
}

impl EquivalenceReport {
    pub fn to_json(&self, sigma: &Alphabet) -> Value {
        let pairs: Vec<Value> = self
            .pairs
            .iter()
            .map(|(y, a, b)| json!({"string": sigma.render(y), "lhs": format_rational(a), "rhs": format_rational(b)}))
            .collect();
        let verdict = match &self.verdict {
            Verdict::ExactEqual => json!({"kind": "exact-equal"}),
            Verdict::EqualUpToTruncation => json!({"kind": "equal-up-to-truncation"}),
            Verdict::Counterexample { string, lhs, rhs } => json!({
                "kind": "counterexample",
                "string": sigma.render(string),
                "lhs": format_rational(lhs),
                "rhs": format_rational(rhs),
            }),
        };
        json!({"max_len": self.max_len, "pairs": pairs, "verdict": verdict})
    }
}

pub fn length_lex(a: &[usize], b: &[usize]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Compare two tables string by string. With truncation each value is only
/// known to lie in [value, value + residual]; a counterexample needs
/// disjoint intervals.
pub fn compare_tables(ta: &DistributionTable, tb: &DistributionTable, max_len: usize) -> EquivalenceReport {
    let mut keys: Vec<Vec<usize>> = ta
        .entries
        .keys()
        .chain(tb.entries.keys())
        .filter(|k| k.len() <= max_len)
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    keys.sort_by(|a, b| length_lex(a, b));
    let slack = |t: &DistributionTable| if t.truncated { t.residual_mass.clone() } else { zero() };
    let (ra, rb) = (slack(ta), slack(tb));
    let mut pairs = Vec::with_capacity(keys.len());
    let mut verdict = None;
    let mut inconclusive = ta.truncated || tb.truncated;
    for y in keys {
        let (a, b) = (ta.get(&y), tb.get(&y));
        if a != b && verdict.is_none() {
            let disjoint = &a + &ra < b || &b + &rb < a;
            if disjoint || (ra.is_zero() && rb.is_zero()) {
                verdict = Some(Verdict::Counterexample { string: y.clone(), lhs: a.clone(), rhs: b.clone() });
            } else {
                inconclusive = true;
            }
        }
        pairs.push((y, a, b));
    }
    let verdict = verdict.unwrap_or(if inconclusive { Verdict::EqualUpToTruncation } else { Verdict::ExactEqual });
    EquivalenceReport { max_len, pairs, verdict }
}

pub fn check_weak_equivalence(
    a: &dyn StringDistribution,
    b: &dyn StringDistribution,
    max_len: usize,
    step_cap: usize,
) -> Result<EquivalenceReport> {
    if a.sigma() != b.sigma() {
        return Err(Error::AlphabetMismatch("the two models have different output alphabets".into()));
    }
    Ok(compare_tables(&a.enumerate_to(max_len, step_cap)?, &b.enumerate_to(max_len, step_cap)?, max_len))
}

/// Outcome of replaying one step of a PTM branch through the transformer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepCheck {
    pub t: usize,
    pub configuration: bool,
    pub distribution: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceReport {
    pub steps: Vec<StepCheck>,
    pub first_mismatch: Option<String>,
}

impl TraceReport {
    pub fn all_ok(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// onehot(q_t, s_t, a_{t-1}) and the conditional next-symbol vector
/// predicted by the simulator.
pub fn expected_step(m: &Ptm, pa: &PtmAlphabet, cfg: &PtmConfiguration, previous: i8) -> (Vector, Vector) {
    let lay = PtmLayout::new(pa.num_states, pa.num_tape);
    let s = m.read(cfg);
    let config = onehot(lay.config_size(), lay.config_index(cfg.state, s, previous));
    let mut dist = zeros(pa.augmented.delta.len());
    if cfg.state == m.final_state() {
        let eos = PtmSymbol { state: cfg.state, written: s, output: YBar::Eos, action: 0, previous_action: previous };
        dist[pa.encode(&eos)] = one();
    } else {
        for &t in m.choices(cfg) {
            dist[pa.encode_transition(m, t, previous)] += &m.transitions()[t].weight;
        }
    }
    (config, dist)
}

fn render_vector(v: &[Rational]) -> String {
    let parts: Vec<String> = v
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| format!("{i}:{}", format_rational(x)))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn check_state(
    m: &Ptm,
    tf: &TransformerLm,
    pa: &PtmAlphabet,
    st: &TfState,
    cfg: &PtmConfiguration,
    previous: i8,
) -> Result<(StepCheck, Option<String>)> {
    let t = st.position();
    let (want_cfg, want_dist) = expected_step(m, pa, cfg, previous);
    let got_cfg = tf.enc(st)?;
    let got_dist = tf.head(st)?;
    let check = StepCheck { t, configuration: got_cfg == want_cfg, distribution: got_dist == want_dist };
    let diff = if !check.configuration {
        Some(format!("t={t}: F(z) = {} but the simulator gives {}", render_vector(&got_cfg), render_vector(&want_cfg)))
    } else if !check.distribution {
        Some(format!(
            "t={t}: E·enc = {} but the simulator gives {}",
            render_vector(&got_dist),
            render_vector(&want_dist)
        ))
    } else {
        None
    };
    Ok((check, diff))
}

/// Replay `branch` (transition indices) through the simulator and the
/// compiled transformer, checking every step including t = 0.
pub fn check_transformer_ptm_trace(m: &Ptm, tf: &TransformerLm, branch: &[usize]) -> Result<TraceReport> {
    let pa = augment_ptm_alphabet(m)?;
    let mut cfg = m.initial_configuration();
    let mut st = tf.initial_state()?;
    let mut previous = 0i8;
    let mut steps = Vec::new();
    let mut first_mismatch = None;
    for t in 0..=branch.len() {
        let (check, diff) = check_state(m, tf, &pa, &st, &cfg, previous)?;
        steps.push(check);
        if first_mismatch.is_none() {
            first_mismatch = diff;
        }
        if t == branch.len() {
            break;
        }
        let sym = pa.encode_transition(m, branch[t], previous);
        cfg = ptm_step(&cfg, m, branch[t])?;
        previous = m.transitions()[branch[t]].direction.offset() as i8;
        st = tf.advance(&st, sym)?;
    }
    Ok(TraceReport { steps, first_mismatch })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeReport {
    pub nodes: usize,
    pub first_mismatch: Option<String>,
}

/// Exhaustive walk over every branch of depth ≤ `depth`, checking each node.
pub fn check_transformer_ptm_tree(m: &Ptm, tf: &TransformerLm, depth: usize) -> Result<TreeReport> {
    let pa = augment_ptm_alphabet(m)?;
    let mut report = TreeReport { nodes: 0, first_mismatch: None };
    let mut stack = vec![(tf.initial_state()?, m.initial_configuration(), 0i8)];
    while let Some((st, cfg, previous)) = stack.pop() {
        let (_, diff) = check_state(m, tf, &pa, &st, &cfg, previous)?;
        report.nodes += 1;
        if let Some(d) = diff {
            report.first_mismatch = Some(d);
            return Ok(report);
        }
        if st.position() == depth {
            continue;
        }
        for &t in m.choices(&cfg).iter().rev() {
            let sym = pa.encode_transition(m, t, previous);
            let next = ptm_step(&cfg, m, t)?;
            stack.push((tf.advance(&st, sym)?, next, m.transitions()[t].direction.offset() as i8));
        }
    }
    Ok(report)
}

/// Machine families produced by `random_machine`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MachineKind {
    Pfsa,
    Ppda,
    TwoPda,
    Ptm,
}

#[derive(Clone, Debug)]
pub enum Machine {
    Pfsa(Pfsa),
    Ppda(Ppda),
    TwoPda(TwoPda),
    Ptm(Ptm),
}

/// Upper bounds for random machines. `tape` counts the tape symbols
/// including the blank and the bottom marker.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeBounds {
    pub states: usize,
    pub symbols: usize,
    pub stack: usize,
    pub tape: usize,
}

impl Default for SizeBounds {
    fn default() -> Self {
        SizeBounds { states: 3, symbols: 2, stack: 2, tape: 3 }
    }
}

/// `k` positive weights with a common denominator d ∈ [k, max(k, 16)]
/// summing to one.
pub fn random_weights(rng: &mut impl Rng, k: usize) -> Vec<Rational> {
    let d = rng.gen_range(k..=k.max(16));
    let mut units = vec![1i64; k];
    for _ in k..d {
        units[rng.gen_range(0..k)] += 1;
    }
    units.into_iter().map(|u| rat(u, d as i64)).collect()
}

fn sigma_of(n: usize) -> Alphabet {
    let names: Vec<String> = (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Alphabet::from_names(&refs).expect("distinct plain names")
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn subset<T: Clone>(rng: &mut impl Rng, items: &[T], max: usize) -> Vec<T> {
    let k = rng.gen_range(1..=max.min(items.len()));
    items.choose_multiple(rng, k).cloned().collect()
}

pub fn random_pfsa(rng: &mut impl Rng, b: SizeBounds) -> Pfsa {
    let n = rng.gen_range(1..=b.states);
    let sigma = sigma_of(b.symbols);
    let starts = subset(rng, &(0..n).collect::<Vec<_>>(), n);
    let mut initial = vec![zero(); n];
    for (q, w) in starts.iter().zip(random_weights(rng, starts.len())) {
        initial[*q] = w;
    }
    let mut finals = vec![zero(); n];
    let mut transitions = Vec::new();
    let arcs: Vec<(usize, usize)> = (0..b.symbols).flat_map(|y| (0..n).map(move |q| (y, q))).collect();
    for q in 0..n {
        let k = rng.gen_range(0..=arcs.len().min(3));
        let chosen: Vec<(usize, usize)> = arcs.choose_multiple(rng, k).cloned().collect();
        let mut w = random_weights(rng, chosen.len() + 1);
        finals[q] = w.pop().expect("one weight per outcome");
        for ((y, to), w) in chosen.into_iter().zip(w) {
            transitions.push(PfsaTransition { from: q, symbol: y, weight: w, to });
        }
    }
    Pfsa::new(sigma, names("q", n), initial, finals, transitions).expect("generated PFSA is valid")
}

pub fn random_ppda(rng: &mut impl Rng, b: SizeBounds) -> Ppda {
    let n = rng.gen_range(1..=b.states);
    let g = rng.gen_range(1..=b.stack);
    let sigma = sigma_of(b.symbols);
    let mut transitions = Vec::new();
    for q in 0..n {
        for gm in 0..g {
            let k = rng.gen_range(1..=3);
            for w in random_weights(rng, k) {
                let scan = if rng.gen_bool(0.3) { None } else { Some(rng.gen_range(0..b.symbols)) };
                let push_len = [0, 0, 1, 2][rng.gen_range(0..4)];
                let push = (0..push_len).map(|_| rng.gen_range(0..g)).collect();
                transitions.push(PpdaTransition { from: q, pop: gm, scan, weight: w, to: rng.gen_range(0..n), push });
            }
        }
    }
    let finals = subset(rng, &(0..n).collect::<Vec<_>>(), n);
    Ppda::new(sigma, names("q", n), names("g", g), transitions, 0, 0, finals).expect("generated PPDA is valid")
}

fn stack_op(rng: &mut impl Rng, g: usize, p: f64) -> Option<usize> {
    if !rng.gen_bool(p) {
        None
    } else {
        Some(rng.gen_range(1..g))
    }
}

pub fn random_twopda(rng: &mut impl Rng, b: SizeBounds) -> TwoPda {
    let n = rng.gen_range(2..=b.states.max(2));
    let g = rng.gen_range(1..=b.stack) + 1;
    let sigma = sigma_of(b.symbols);
    let final_state = n - 1;
    let mut transitions = Vec::new();
    for q in 0..final_state {
        for top in 0..g {
            let k = rng.gen_range(1..=3);
            for w in random_weights(rng, k) {
                let scan = if rng.gen_bool(0.3) { None } else { Some(rng.gen_range(0..b.symbols)) };
                let pop1 = if top != 0 && rng.gen_bool(0.4) { Some(top) } else { None };
                transitions.push(TwoPdaTransition {
                    from: q,
                    top,
                    scan,
                    weight: w,
                    to: rng.gen_range(0..n),
                    pop1,
                    pop2: stack_op(rng, g, 0.2),
                    push1: stack_op(rng, g, 0.4),
                    push2: stack_op(rng, g, 0.4),
                });
            }
        }
    }
    let mut stack = vec!["⊥".to_string()];
    stack.extend(names("g", g - 1));
    TwoPda::new(sigma, names("q", n), stack, 0, transitions, 0, final_state).expect("generated 2PDA is valid")
}

/// PTM with tape symbols ⊥ (index 0), ⊔ (index 1) and extra symbols.
pub fn random_ptm(rng: &mut impl Rng, b: SizeBounds) -> Ptm {
    let n = rng.gen_range(2..=b.states.max(2));
    let g = rng.gen_range(2..=b.tape.max(2));
    let ns = rng.gen_range(1..=b.symbols.max(1));
    let sigma = sigma_of(ns);
    let final_state = n - 1;
    let mut tape = vec!["⊥".to_string(), "⊔".to_string()];
    tape.extend(names("t", g - 2));
    let mut transitions = Vec::new();
    for q in 0..final_state {
        for read in 0..g {
            let k = rng.gen_range(1..=3);
            for w in random_weights(rng, k) {
                let output = if rng.gen_bool(0.4) { None } else { Some(rng.gen_range(0..ns)) };
                let direction = if rng.gen_bool(0.5) { Direction::L } else { Direction::R };
                transitions.push(PtmTransition {
                    from: q,
                    read,
                    output,
                    write: rng.gen_range(0..g),
                    direction,
                    weight: w,
                    to: rng.gen_range(0..n),
                });
            }
        }
    }
    Ptm::new(sigma, names("q", n), tape, 1, 0, 0, final_state, transitions).expect("generated PTM is valid")
}

pub fn random_machine(kind: MachineKind, bounds: SizeBounds, seed: u64) -> Machine {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        MachineKind::Pfsa => Machine::Pfsa(random_pfsa(&mut rng, bounds)),
        MachineKind::Ppda => Machine::Ppda(random_ppda(&mut rng, bounds)),
        MachineKind::TwoPda => Machine::TwoPda(random_twopda(&mut rng, bounds)),
        MachineKind::Ptm => Machine::Ptm(random_ptm(&mut rng, bounds)),
    }
}
