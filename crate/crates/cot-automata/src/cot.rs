//! Chain-of-thought wrappers and the alphabet-augmentation constructions
//! that turn nondeterministic machines into deterministic ones over Δ.

use crate::alphabet::{Alphabet, Symbol, BOS, EOS};
use crate::automata::{Pfsa, PfsaTransition, Ppda, PpdaTransition, Ptm, TwoPda, TwoPdaTransition};
use crate::dist::{Capped, DistributionTable};
use crate::error::Result;
use crate::rational::{zero, Rational};
use crate::search::{explore, Bound, Exploration, RunSystem};
use crate::transduce::{
    make_eraser_fst, pfsa_lift, wfst_compose, wfst_invert, wfst_project_input, AugmentedAlphabet, EpsWfsa, Fst, Phi,
    PhiTracker, Wfst,
};
use num_traits::Zero;
use std::collections::BTreeMap;

/// Base model over Δ whose outputs are mapped to Σ by φ.
#[derive(Clone, Debug)]
pub struct CotLm<B> {
    pub base: B,
    pub phi: Phi,
}

impl<B: RunSystem> CotLm<B> {
    pub fn new(base: B, phi: Phi) -> CotLm<B> {
        CotLm { base, phi }
    }

    pub fn sigma(&self) -> &Alphabet {
        self.phi.output()
    }

    pub fn explore(&self, bound: Bound, step_cap: usize) -> Result<Exploration> {
        explore(&self.base, &PhiTracker { phi: &self.phi, bound }, step_cap)
    }

    pub fn enumerate(&self, max_len: usize, step_cap: usize) -> Result<DistributionTable> {
        Ok(self.explore(Bound::MaxLen(max_len), step_cap)?.table(step_cap))
    }
}

/// Sum of base(x) over preimages x of `y` with |x| ≤ `cap`.
pub fn cot_probability<B: RunSystem>(c: &CotLm<B>, y: &[usize], cap: usize) -> Result<Capped> {
    let t = c.explore(Bound::Target(y.to_vec()), cap)?.table(cap);
    Ok(Capped { value: t.get(y), saturated: t.truncated })
}

/// Exact CoT distribution of a finite-state base: the input projection of
/// lift(base) ∘ φ⁻¹, an automaton over Σ with ε-arcs.
pub fn cot_exact_automaton(base: &Pfsa, phi: &Fst) -> Result<EpsWfsa> {
    let inv = wfst_invert(&Wfst::from_fst(phi));
    let composed = wfst_compose(&pfsa_lift(base), &inv)?;
    Ok(wfst_project_input(&composed))
}

fn tuple(parts: Vec<Option<Symbol>>) -> Symbol {
    Symbol::Tuple(parts)
}

fn name(s: &str) -> Symbol {
    Symbol::name(s)
}

fn merge_pfsa_transitions(a: &Pfsa) -> BTreeMap<(usize, usize, usize), Rational> {
    let mut m = BTreeMap::new();
    for t in a.transitions() {
        *m.entry((t.from, t.symbol, t.to)).or_insert_with(zero) += &t.weight;
    }
    m
}

fn sigma_by_state(a: &Pfsa) -> Result<(Alphabet, Vec<String>)> {
    let (ns, nq) = (a.alphabet().len(), a.num_states());
    let mut syms = Vec::with_capacity(ns * nq);
    let mut names = Vec::with_capacity(ns * nq);
    for y in 0..ns {
        for q in 0..nq {
            syms.push(tuple(vec![Some(a.alphabet().symbol(y).clone()), Some(name(&a.states()[q]))]));
            names.push(format!("({},{})", a.alphabet().symbol(y), a.states()[q]));
        }
    }
    Ok((Alphabet::new(syms)?, names))
}

/// The Σ×Q construction: states and symbols are (y, q) pairs; reading
/// (y', q') always moves to state (y', q'), λ'(y, q) = λ(q)/|Σ| and
/// ρ'(y, q) = ρ(q).
pub fn determinize_pfsa(a: &Pfsa) -> Result<(Pfsa, AugmentedAlphabet)> {
    let (ns, nq) = (a.alphabet().len(), a.num_states());
    let (delta, states) = sigma_by_state(a)?;
    let id = |y: usize, q: usize| y * nq + q;
    let size = Rational::from_integer((ns as i64).into());
    let mut initial = vec![zero(); ns * nq];
    let mut finals = vec![zero(); ns * nq];
    let mut transitions = Vec::new();
    let merged = merge_pfsa_transitions(a);
    for y in 0..ns {
        for q in 0..nq {
            initial[id(y, q)] = &a.initial()[q] / &size;
            finals[id(y, q)] = a.finals()[q].clone();
            for ((from, y2, q2), w) in merged.range((q, 0, 0)..(q + 1, 0, 0)) {
                debug_assert_eq!(*from, q);
                transitions.push(PfsaTransition {
                    from: id(y, q),
                    symbol: id(*y2, *q2),
                    weight: w.clone(),
                    to: id(*y2, *q2),
                });
            }
        }
    }
    let aug = AugmentedAlphabet::new(delta.clone(), a.alphabet().clone(), 0)?;
    Ok((Pfsa::new(delta, states, initial, finals, transitions)?, aug))
}

/// Σ×Q construction with one extra start state that replays the first
/// transition, so the result has a single initial state.
pub fn determinize_pfsa_single_start(a: &Pfsa) -> Result<(Pfsa, AugmentedAlphabet)> {
    let (ns, nq) = (a.alphabet().len(), a.num_states());
    let (delta, mut states) = sigma_by_state(a)?;
    let id = |y: usize, q: usize| y * nq + q;
    let start = ns * nq;
    states.push("start".into());
    let mut initial = vec![zero(); start + 1];
    initial[start] = crate::rational::one();
    let mut finals = vec![zero(); start + 1];
    let merged = merge_pfsa_transitions(a);
    let mut from_start: BTreeMap<usize, Rational> = BTreeMap::new();
    let mut transitions = Vec::new();
    for q in 0..nq {
        finals[start] += &a.initial()[q] * &a.finals()[q];
        for y in 0..ns {
            finals[id(y, q)] = a.finals()[q].clone();
        }
    }
    for ((q, y2, q2), w) in &merged {
        for y in 0..ns {
            transitions.push(PfsaTransition {
                from: id(y, *q),
                symbol: id(*y2, *q2),
                weight: w.clone(),
                to: id(*y2, *q2),
            });
        }
        if !a.initial()[*q].is_zero() {
            *from_start.entry(id(*y2, *q2)).or_insert_with(zero) += &a.initial()[*q] * w;
        }
    }
    for (s, w) in from_start {
        transitions.push(PfsaTransition { from: start, symbol: s, weight: w, to: s });
    }
    let aug = AugmentedAlphabet::new(delta.clone(), a.alphabet().clone(), 0)?;
    Ok((Pfsa::new(delta, states, initial, finals, transitions)?, aug))
}

/// States and symbols are (y, q, γ) triples with y ∈ Σ_ε. A transition
/// (q, γ') --y'--> (q', push) becomes ((y, q, γ), γ') --(y', q', γ')--> ((y', q', γ'), push)
/// for every (y, γ). Runs start in (ε, q_init, S); every (y, q_final, γ) accepts.
pub fn determinize_ppda(p: &Ppda) -> Result<(Ppda, AugmentedAlphabet)> {
    let sigma = p.alphabet();
    let (ns, nq, ng) = (sigma.len() + 1, p.states().len(), p.stack_alphabet().len());
    let ylabel = |y: usize| if y < sigma.len() { Some(sigma.symbol(y).clone()) } else { None };
    let id = |y: usize, q: usize, g: usize| (y * nq + q) * ng + g;
    let mut syms = Vec::new();
    let mut states = Vec::new();
    for y in 0..ns {
        for q in 0..nq {
            for g in 0..ng {
                syms.push(tuple(vec![ylabel(y), Some(name(&p.states()[q])), Some(name(&p.stack_alphabet()[g]))]));
                let yname = ylabel(y).map_or("ε".to_string(), |s| s.to_string());
                states.push(format!("({yname},{},{})", p.states()[q], p.stack_alphabet()[g]));
            }
        }
    }
    let delta = Alphabet::new(syms)?;
    let eps = sigma.len();
    let mut transitions = Vec::new();
    for t in p.transitions() {
        let y2 = t.scan.unwrap_or(eps);
        let target = id(y2, t.to, t.pop);
        for y in 0..ns {
            for g in 0..ng {
                transitions.push(PpdaTransition {
                    from: id(y, t.from, g),
                    pop: t.pop,
                    scan: Some(target),
                    weight: t.weight.clone(),
                    to: target,
                    push: t.push.clone(),
                });
            }
        }
    }
    let mut finals = Vec::new();
    for y in 0..ns {
        for &f in p.finals() {
            for g in 0..ng {
                finals.push(id(y, f, g));
            }
        }
    }
    let out = Ppda::new(
        delta.clone(),
        states,
        p.stack_alphabet().to_vec(),
        transitions,
        p.start_stack(),
        id(eps, p.initial(), p.start_stack()),
        finals,
    )?;
    Ok((out, AugmentedAlphabet::new(delta, sigma.clone(), 0)?))
}

/// Tag alphabet Δ = Q × Γ_ε⁴ × Σ_ε for the two-stack construction.
pub fn twopda_tag_alphabet(p: &TwoPda) -> Result<Alphabet> {
    let sigma = p.alphabet();
    let g: Vec<Option<Symbol>> =
        std::iter::once(None).chain(p.stack_alphabet().iter().map(|s| Some(name(s)))).collect();
    let ys: Vec<Option<Symbol>> = sigma.symbols().iter().cloned().map(Some).chain(std::iter::once(None)).collect();
    let mut syms = Vec::new();
    for q in p.states() {
        for g1 in &g {
            for g2 in &g {
                for g3 in &g {
                    for g4 in &g {
                        for y in &ys {
                            syms.push(tuple(vec![
                                Some(name(q)),
                                g1.clone(),
                                g2.clone(),
                                g3.clone(),
                                g4.clone(),
                                y.clone(),
                            ]));
                        }
                    }
                }
            }
        }
    }
    Alphabet::new(syms)
}

/// Every transition emits a tag recording its target state, stack
/// operations and output, so that (state, top, emitted tag) fixes the
/// transition. Parallel transitions with identical effect are merged first.
pub fn sigma_determinize_twopda(p: &TwoPda) -> Result<(TwoPda, AugmentedAlphabet)> {
    let delta = twopda_tag_alphabet(p)?;
    let (g1, ns) = (p.stack_alphabet().len() + 1, p.alphabet().len() + 1);
    let enc_g = |x: Option<usize>| x.map_or(0, |v| v + 1);
    let tag = |t: &TwoPdaTransition| -> usize {
        let mut i = t.to;
        for x in [t.pop1, t.pop2, t.push1, t.push2] {
            i = i * g1 + enc_g(x);
        }
        i * ns + t.scan.unwrap_or(ns - 1)
    };
    let mut merged: BTreeMap<(usize, usize, Option<usize>, usize, [Option<usize>; 4]), Rational> = BTreeMap::new();
    for t in p.transitions() {
        *merged.entry(t.shape()).or_insert_with(zero) += &t.weight;
    }
    let transitions = merged
        .into_iter()
        .map(|((from, top, scan, to, ops), weight)| {
            let mut t = TwoPdaTransition {
                from,
                top,
                scan,
                weight,
                to,
                pop1: ops[0],
                pop2: ops[1],
                push1: ops[2],
                push2: ops[3],
            };
            t.scan = Some(tag(&t));
            t
        })
        .collect();
    let out = TwoPda::new(
        delta.clone(),
        p.states().to_vec(),
        p.stack_alphabet().to_vec(),
        p.bottom(),
        transitions,
        p.initial(),
        p.final_state(),
    )?;
    Ok((out, AugmentedAlphabet::new(delta, p.alphabet().clone(), 5)?))
}

/// Output component of a PTM-augmented symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum YBar {
    Sym(usize),
    Eps,
    Eos,
}

/// Decoded (q, v, ȳ, a', a) tuple; actions are -1, 0 or 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PtmSymbol {
    pub state: usize,
    pub written: usize,
    pub output: YBar,
    pub action: i8,
    pub previous_action: i8,
}

/// Δ = Q × Γ × Σ̄_ε × A × A with A = {-1, 0, 1}, plus the BOS′ convention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PtmAlphabet {
    pub augmented: AugmentedAlphabet,
    pub bos: PtmSymbol,
    pub num_states: usize,
    pub num_tape: usize,
    pub num_sigma: usize,
}

pub const ACTIONS: [i8; 3] = [-1, 0, 1];

pub fn action_index(a: i8) -> usize {
    (a + 1) as usize
}

impl PtmAlphabet {
    /// Number of ȳ values including BOS (used by the one-hot domain).
    pub fn ybar_slots(&self) -> usize {
        self.num_sigma + 3
    }

    pub fn ybar_index(&self, y: Option<YBar>) -> usize {
        match y {
            Some(YBar::Sym(s)) => s,
            Some(YBar::Eps) => self.num_sigma,
            Some(YBar::Eos) => self.num_sigma + 1,
            None => self.num_sigma + 2,
        }
    }

    fn product_index(&self, q: usize, v: usize, yslot: usize, ys: usize, a1: i8, a2: i8) -> usize {
        (((q * self.num_tape + v) * ys + yslot) * 3 + action_index(a1)) * 3 + action_index(a2)
    }

    pub fn encode(&self, s: &PtmSymbol) -> usize {
        let y = self.ybar_index(Some(s.output));
        self.product_index(s.state, s.written, y, self.num_sigma + 2, s.action, s.previous_action)
    }

    pub fn decode(&self, id: usize) -> PtmSymbol {
        let a2 = ACTIONS[id % 3];
        let a1 = ACTIONS[(id / 3) % 3];
        let rest = id / 9;
        let ys = self.num_sigma + 2;
        let y = rest % ys;
        let rest = rest / ys;
        let output = if y < self.num_sigma {
            YBar::Sym(y)
        } else if y == self.num_sigma {
            YBar::Eps
        } else {
            YBar::Eos
        };
        PtmSymbol {
            state: rest / self.num_tape,
            written: rest % self.num_tape,
            output,
            action: a1,
            previous_action: a2,
        }
    }

    /// Index in the one-hot domain Q × Γ × (Σ̄_ε ∪ {BOS}) × A × A; `None`
    /// stands for BOS′.
    pub fn onehot_index(&self, s: Option<&PtmSymbol>) -> usize {
        let (s, y) = match s {
            Some(s) => (s, self.ybar_index(Some(s.output))),
            None => (&self.bos, self.ybar_index(None)),
        };
        self.product_index(s.state, s.written, y, self.ybar_slots(), s.action, s.previous_action)
    }

    pub fn onehot_size(&self) -> usize {
        self.num_states * self.num_tape * self.ybar_slots() * 9
    }

    /// The symbol emitted when taking transition `t` right after action `previous`.
    pub fn encode_transition(&self, m: &Ptm, t: usize, previous: i8) -> usize {
        let tr = &m.transitions()[t];
        self.encode(&PtmSymbol {
            state: tr.to,
            written: tr.write,
            output: tr.output.map_or(YBar::Eps, YBar::Sym),
            action: tr.direction.offset() as i8,
            previous_action: previous,
        })
    }
}

pub fn augment_ptm_alphabet(m: &Ptm) -> Result<PtmAlphabet> {
    let (nq, ng, ns) = (m.states().len(), m.tape_alphabet().len(), m.alphabet().len());
    let mut syms = Vec::with_capacity(nq * ng * (ns + 2) * 9);
    let ys: Vec<Option<Symbol>> =
        m.alphabet().symbols().iter().cloned().map(Some).chain([None, Some(name(EOS))]).collect();
    for q in m.states() {
        for v in m.tape_alphabet() {
            for y in &ys {
                for a1 in ACTIONS {
                    for a2 in ACTIONS {
                        syms.push(tuple(vec![
                            Some(name(q)),
                            Some(name(v)),
                            y.clone(),
                            Some(name(&a1.to_string())),
                            Some(name(&a2.to_string())),
                        ]));
                    }
                }
            }
        }
    }
    let delta = Alphabet::new(syms)?;
    let augmented = AugmentedAlphabet::new(delta, m.alphabet().clone(), 2)?;
    let bos = PtmSymbol { state: m.initial(), written: m.bottom(), output: YBar::Eps, action: 0, previous_action: 0 };
    Ok(PtmAlphabet { augmented, bos, num_states: nq, num_tape: ng, num_sigma: ns })
}

/// JSON form of BOS′ for reports.
pub fn ptm_bos_symbol(m: &Ptm) -> Symbol {
    tuple(vec![
        Some(name(&m.states()[m.initial()])),
        Some(name(&m.tape_alphabet()[m.bottom()])),
        Some(name(BOS)),
        Some(name("0")),
        Some(name("0")),
    ])
}

/// Homomorphic φ for an augmented alphabet, checked against the eraser FST.
pub fn eraser_phi(aug: &AugmentedAlphabet) -> Result<(Phi, Fst)> {
    let f = make_eraser_fst(aug)?;
    Ok((Phi::Homomorphism(aug.clone()), f))
}
