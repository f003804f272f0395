//! Elman recurrent LMs over exact rationals with sparsemax heads, together
//! with the PFSA compilation and the finite-state extraction.

use crate::alphabet::{Alphabet, Symbol};
use crate::automata::{Pfsa, PfsaTransition};
use crate::cot::cot_exact_automaton;
use crate::dist::{sparsemax, LanguageModel, NextSymbolDistribution};
use crate::error::{Error, Result};
use crate::rational::{add, one, onehot, zero, zeros, Matrix, Rational, Vector};
use crate::search::KeyedLm;
use crate::transduce::{AugmentedAlphabet, Fst};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, VecDeque};

pub const DEFAULT_STATE_GUARD: usize = 10_000;

/// State guard for extraction, overridable through `COT_AUTOMATA_GUARD`.
pub fn state_guard() -> usize {
    std::env::var("COT_AUTOMATA_GUARD").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_STATE_GUARD)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Heaviside,
    Relu,
}

impl Activation {
    pub fn apply(self, x: &Rational) -> Rational {
        match self {
            Activation::Heaviside => {
                if x > &zero() {
                    one()
                } else {
                    zero()
                }
            }
            Activation::Relu => {
                if x > &zero() {
                    x.clone()
                } else {
                    zero()
                }
            }
        }
    }
}

/// What a row of the output matrix stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Output {
    Emit(usize),
    Eos,
}

/// h₀ = η, hₜ = α(U hₜ₋₁ + V r(yₜ) + b), p(· | context) = sparsemax(E h).
/// Every context is implicitly prefixed by BOS′, whose embedding is `bos`.
#[derive(Clone, Debug, PartialEq)]
pub struct ElmanRnnLm {
    pub alphabet: Alphabet,
    pub u: Matrix,
    pub v: Matrix,
    pub b: Vector,
    pub eta: Vector,
    pub embedding: Vec<Vector>,
    pub bos: Vector,
    pub activation: Activation,
    pub e: Matrix,
    pub outputs: Vec<Output>,
}

impl ElmanRnnLm {
    pub fn hidden_size(&self) -> usize {
        self.eta.len()
    }

    pub fn validate(&self) -> Result<()> {
        let (d, r) = (self.eta.len(), self.v.cols);
        let ok = self.u.rows == d
            && self.u.cols == d
            && self.v.rows == d
            && self.b.len() == d
            && self.bos.len() == r
            && self.embedding.len() == self.alphabet.len()
            && self.embedding.iter().all(|x| x.len() == r)
            && self.e.cols == d
            && self.e.rows == self.outputs.len();
        if !ok {
            return Err(Error::Dimension("inconsistent RNN parameter shapes".into()));
        }
        if self.outputs.iter().any(|o| matches!(o, Output::Emit(i) if *i >= self.alphabet.len())) {
            return Err(Error::Invalid("output row refers to an unknown symbol".into()));
        }
        Ok(())
    }

    fn step_embedded(&self, h: &[Rational], x: &[Rational]) -> Result<Vector> {
        let pre = add(&add(&self.u.mul_vec(h)?, &self.v.mul_vec(x)?), &self.b);
        Ok(pre.iter().map(|z| self.activation.apply(z)).collect())
    }

    pub fn distribution_of(&self, h: &[Rational]) -> Result<NextSymbolDistribution> {
        let p = sparsemax(&self.e.mul_vec(h)?);
        let mut probs = zeros(self.alphabet.len());
        let mut eos = zero();
        for (o, w) in self.outputs.iter().zip(p) {
            match o {
                Output::Emit(i) => probs[*i] += w,
                Output::Eos => eos += w,
            }
        }
        Ok(NextSymbolDistribution { probs, eos })
    }
}

pub fn rnn_step(m: &ElmanRnnLm, h: &[Rational], sym: usize) -> Result<Vector> {
    if h.len() != m.hidden_size() {
        return Err(Error::Dimension(format!("hidden state has {} entries, expected {}", h.len(), m.hidden_size())));
    }
    let x = m.embedding.get(sym).ok_or_else(|| Error::UnknownSymbol(format!("#{sym}")))?;
    m.step_embedded(h, x)
}

pub fn rnn_next_distribution(m: &ElmanRnnLm, context: &[usize]) -> Result<NextSymbolDistribution> {
    let h = m.context_state(context)?;
    m.distribution_of(&h)
}

impl LanguageModel for ElmanRnnLm {
    type State = Vector;

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn initial_state(&self) -> Result<Vector> {
        self.step_embedded(&self.eta, &self.bos)
    }
    fn advance(&self, h: &Vector, symbol: usize) -> Result<Vector> {
        rnn_step(self, h, symbol)
    }
    fn next_distribution(&self, h: &Vector) -> Result<NextSymbolDistribution> {
        self.distribution_of(h)
    }
}

impl KeyedLm for ElmanRnnLm {
    type Key = Vector;
    fn state_key(&self, s: &Vector) -> Vector {
        s.clone()
    }
}

/// Σ_ε × Q pair alphabet used by the neural PFSA constructions; ids are
/// y-major with ε after Σ.
pub fn pair_alphabet(a: &Pfsa) -> Result<AugmentedAlphabet> {
    let mut syms = Vec::new();
    let ys: Vec<Option<Symbol>> =
        a.alphabet().symbols().iter().cloned().map(Some).chain(std::iter::once(None)).collect();
    for y in &ys {
        for q in a.states() {
            syms.push(Symbol::tuple(vec![y.clone(), Some(Symbol::name(q))]));
        }
    }
    AugmentedAlphabet::new(Alphabet::new(syms)?, a.alphabet().clone(), 0)
}

/// Output rows and matrix shared by the RNN and transformer PFSA
/// constructions. Columns are indexed by (y, q) with y ∈ Σ ∪ {ε, BOS},
/// y-major; `bos_column` is (BOS, q₀) with q₀ the first state.
pub(crate) struct PairHead {
    pub e: Matrix,
    pub outputs: Vec<Output>,
    pub bos_column: usize,
    pub columns: usize,
}

pub(crate) fn pair_head(a: &Pfsa) -> PairHead {
    let (ns, nq) = (a.alphabet().len(), a.num_states());
    let columns = (ns + 2) * nq;
    let n_delta = (ns + 1) * nq;
    let mut outputs: Vec<Output> = (0..n_delta).map(Output::Emit).collect();
    outputs.extend(std::iter::repeat(Output::Eos).take(nq));
    let mut e = Matrix::zeros(n_delta + nq, columns);
    let mut merged: BTreeMap<(usize, usize, usize), Rational> = BTreeMap::new();
    for t in a.transitions() {
        *merged.entry((t.from, t.symbol, t.to)).or_insert_with(zero) += &t.weight;
    }
    for y in 0..=ns {
        for q in 0..nq {
            let col = y * nq + q;
            for ((_, y2, q2), w) in merged.range((q, 0, 0)..(q + 1, 0, 0)) {
                e.set(y2 * nq + q2, col, w.clone());
            }
            e.set(n_delta + q, col, a.finals()[q].clone());
        }
    }
    let bos_column = (ns + 1) * nq;
    for q in 0..nq {
        e.set(ns * nq + q, bos_column, a.initial()[q].clone());
    }
    PairHead { e, outputs, bos_column, columns }
}

/// U = 0, V = I, b = 0, η = 0 with one-hot embeddings; the hidden state
/// after reading (y, q) is onehot(y, q).
pub fn compile_rnn_from_pfsa(a: &Pfsa) -> Result<(ElmanRnnLm, AugmentedAlphabet)> {
    let aug = pair_alphabet(a)?;
    let head = pair_head(a);
    let d = head.columns;
    let m = ElmanRnnLm {
        alphabet: aug.delta.clone(),
        u: Matrix::zeros(d, d),
        v: Matrix::identity(d),
        b: zeros(d),
        eta: zeros(d),
        embedding: (0..aug.delta.len()).map(|i| onehot(d, i)).collect(),
        bos: onehot(d, head.bos_column),
        activation: Activation::Heaviside,
        e: head.e,
        outputs: head.outputs,
    };
    m.validate()?;
    Ok((m, aug))
}

/// Breadth-first closure over reachable hidden states: a deterministic
/// PFSA over the RNN's alphabet with one state per hidden vector.
pub fn rnn_to_delta_pfsa(m: &ElmanRnnLm, guard: usize) -> Result<Pfsa> {
    if m.activation != Activation::Heaviside {
        return Err(Error::Invalid("extraction needs a Heaviside RNN".into()));
    }
    let h0 = m.initial_state()?;
    let mut index: HashMap<Vector, usize> = HashMap::new();
    let mut hidden = vec![h0.clone()];
    index.insert(h0, 0);
    let mut queue = VecDeque::from([0usize]);
    let mut transitions = Vec::new();
    let mut finals = Vec::new();
    while let Some(s) = queue.pop_front() {
        let h = hidden[s].clone();
        let d = m.distribution_of(&h)?;
        finals.push((s, d.eos));
        for (sym, p) in d.probs.into_iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let next = rnn_step(m, &h, sym)?;
            let to = match index.get(&next) {
                Some(&t) => t,
                None => {
                    if hidden.len() >= guard {
                        return Err(Error::StateGuard(guard));
                    }
                    let t = hidden.len();
                    index.insert(next.clone(), t);
                    hidden.push(next);
                    queue.push_back(t);
                    t
                }
            };
            transitions.push(PfsaTransition { from: s, symbol: sym, weight: p, to });
        }
    }
    let n = hidden.len();
    let mut rho = vec![zero(); n];
    for (s, w) in finals {
        rho[s] = w;
    }
    let mut lambda = vec![zero(); n];
    lambda[0] = Rational::one();
    let names = (0..n).map(|i| format!("h{i}")).collect();
    Pfsa::new(m.alphabet.clone(), names, lambda, rho, transitions)
}

/// PFSA over Σ weakly equivalent to the CoT LM (m, φ).
pub fn extract_pfsa_from_rnn(m: &ElmanRnnLm, phi: &Fst) -> Result<Pfsa> {
    extract_pfsa_from_rnn_with_guard(m, phi, state_guard())
}

pub fn extract_pfsa_from_rnn_with_guard(m: &ElmanRnnLm, phi: &Fst, guard: usize) -> Result<Pfsa> {
    let delta_machine = rnn_to_delta_pfsa(m, guard)?;
    Ok(cot_exact_automaton(&delta_machine, phi)?.into_pfsa()?.prune_unreachable())
}
