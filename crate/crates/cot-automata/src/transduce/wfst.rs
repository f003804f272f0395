use super::eps::{EpsArc, EpsWfsa};
use super::fst::Fst;
use crate::alphabet::Alphabet;
use crate::automata::Pfsa;
use crate::error::{Error, Result};
use crate::rational::{neumann_inverse, one, zero, Matrix, Rational};
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, HashMap, VecDeque};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WfstArc {
    pub from: usize,
    pub input: Option<usize>,
    pub output: Option<usize>,
    pub weight: Rational,
    pub to: usize,
}

/// Weighted finite-state transducer with initial and final weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wfst {
    pub input: Alphabet,
    pub output: Alphabet,
    pub states: Vec<String>,
    pub initial: Vec<Rational>,
    pub finals: Vec<Rational>,
    pub arcs: Vec<WfstArc>,
}

impl Wfst {
    pub fn new(
        input: Alphabet,
        output: Alphabet,
        states: Vec<String>,
        initial: Vec<Rational>,
        finals: Vec<Rational>,
        arcs: Vec<WfstArc>,
    ) -> Result<Wfst> {
        let n = states.len();
        if initial.len() != n || finals.len() != n {
            return Err(Error::Invalid("weight vectors must have one entry per state".into()));
        }
        if initial.iter().chain(&finals).chain(arcs.iter().map(|a| &a.weight)).any(|w| w.is_negative()) {
            return Err(Error::Invalid("negative weight".into()));
        }
        for a in &arcs {
            if a.from >= n || a.to >= n {
                return Err(Error::Invalid("arc refers to an unknown state".into()));
            }
            if a.input.is_some_and(|x| x >= input.len()) || a.output.is_some_and(|y| y >= output.len()) {
                return Err(Error::Invalid("arc label outside its alphabet".into()));
            }
        }
        Ok(Wfst { input, output, states, initial, finals, arcs })
    }

    /// Unit weights on every arc, initial and final state.
    pub fn from_fst(f: &Fst) -> Wfst {
        let n = f.states().len();
        let mut initial = vec![zero(); n];
        let mut finals = vec![zero(); n];
        for &q in f.initial() {
            initial[q] = one();
        }
        for &q in f.finals() {
            finals[q] = one();
        }
        let arcs = f
            .arcs()
            .iter()
            .map(|a| WfstArc { from: a.from, input: a.input, output: a.output, weight: one(), to: a.to })
            .collect();
        Wfst {
            input: f.input().clone(),
            output: f.output().clone(),
            states: f.states().to_vec(),
            initial,
            finals,
            arcs,
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// T(x, y): total weight of accepting paths reading `x` and writing `y`.
    pub fn pair_weight(&self, x: &[usize], y: &[usize]) -> Result<Rational> {
        let n = self.num_states();
        let mut eps = Matrix::zeros(n, n);
        for a in self.arcs.iter().filter(|a| a.input.is_none() && a.output.is_none()) {
            eps.add_at(a.from, a.to, &a.weight);
        }
        let closure = neumann_inverse(&eps)?;
        let (lx, ly) = (x.len(), y.len());
        // value[i][j][q]: weight of completing from q having read x[..i], written y[..j]
        let mut value = vec![vec![vec![zero(); n]; ly + 1]; lx + 1];
        for i in (0..=lx).rev() {
            for j in (0..=ly).rev() {
                let mut direct = vec![zero(); n];
                if i == lx && j == ly {
                    direct.clone_from(&self.finals);
                }
                for a in &self.arcs {
                    let ni = match a.input {
                        None => i,
                        Some(s) if i < lx && x[i] == s => i + 1,
                        Some(_) => continue,
                    };
                    let nj = match a.output {
                        None => j,
                        Some(s) if j < ly && y[j] == s => j + 1,
                        Some(_) => continue,
                    };
                    if ni == i && nj == j {
                        continue;
                    }
                    let v = &value[ni][nj][a.to];
                    if !v.is_zero() {
                        direct[a.from] += &a.weight * v;
                    }
                }
                value[i][j] = closure.mul_vec(&direct)?;
            }
        }
        Ok(crate::rational::dot(&self.initial, &value[0][0]))
    }
}

/// Identity transducer weighted by the automaton: T(y, y') = [y = y'] A(y).
pub fn pfsa_lift(a: &Pfsa) -> Wfst {
    let arcs = a
        .transitions()
        .iter()
        .map(|t| WfstArc {
            from: t.from,
            input: Some(t.symbol),
            output: Some(t.symbol),
            weight: t.weight.clone(),
            to: t.to,
        })
        .collect();
    Wfst {
        input: a.alphabet().clone(),
        output: a.alphabet().clone(),
        states: a.states().to_vec(),
        initial: a.initial().to_vec(),
        finals: a.finals().to_vec(),
        arcs,
    }
}

pub fn wfst_invert(t: &Wfst) -> Wfst {
    Wfst {
        input: t.output.clone(),
        output: t.input.clone(),
        states: t.states.clone(),
        initial: t.initial.clone(),
        finals: t.finals.clone(),
        arcs: t
            .arcs
            .iter()
            .map(|a| WfstArc { from: a.from, input: a.output, output: a.input, weight: a.weight.clone(), to: a.to })
            .collect(),
    }
}

/// Drop output labels, merging arcs that become identical.
pub fn wfst_project_input(t: &Wfst) -> EpsWfsa {
    let mut merged: BTreeMap<(usize, Option<usize>, usize), Rational> = BTreeMap::new();
    for a in &t.arcs {
        *merged.entry((a.from, a.input, a.to)).or_insert_with(zero) += &a.weight;
    }
    EpsWfsa {
        alphabet: t.input.clone(),
        states: t.states.clone(),
        initial: t.initial.clone(),
        finals: t.finals.clone(),
        arcs: merged
            .into_iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|((from, label, to), weight)| EpsArc { from, label, weight, to })
            .collect(),
    }
}

/// Composition reading with `t1` and writing with `t2`:
/// (t2 ∘ t1)(x, z) = Σ_y t1(x, y) t2(y, z), using the three-state ε-filter.
pub fn wfst_compose(t2: &Wfst, t1: &Wfst) -> Result<Wfst> {
    if t1.output != t2.input {
        return Err(Error::AlphabetMismatch("output alphabet of t1 differs from input alphabet of t2".into()));
    }
    let mut out1: Vec<Vec<&WfstArc>> = vec![Vec::new(); t1.num_states()];
    for a in &t1.arcs {
        out1[a.from].push(a);
    }
    let mut in2: HashMap<(usize, Option<usize>), Vec<&WfstArc>> = HashMap::new();
    for a in &t2.arcs {
        in2.entry((a.from, a.input)).or_default().push(a);
    }
    let mut index: HashMap<(usize, usize, u8), usize> = HashMap::new();
    let mut triples: Vec<(usize, usize, u8)> = Vec::new();
    let mut queue = VecDeque::new();
    let mut initial = Vec::new();
    let mut intern = |k: (usize, usize, u8), triples: &mut Vec<_>, queue: &mut VecDeque<_>| -> usize {
        *index.entry(k).or_insert_with(|| {
            triples.push(k);
            queue.push_back(triples.len() - 1);
            triples.len() - 1
        })
    };
    for (q1, w1) in t1.initial.iter().enumerate() {
        for (q2, w2) in t2.initial.iter().enumerate() {
            if w1.is_zero() || w2.is_zero() {
                continue;
            }
            let s = intern((q1, q2, 0), &mut triples, &mut queue);
            initial.push((s, w1 * w2));
        }
    }
    let mut arcs = Vec::new();
    while let Some(s) = queue.pop_front() {
        let (q1, q2, f) = triples[s];
        for a1 in &out1[q1] {
            match a1.output {
                Some(y) => {
                    for a2 in in2.get(&(q2, Some(y))).into_iter().flatten() {
                        let to = intern((a1.to, a2.to, 0), &mut triples, &mut queue);
                        arcs.push(WfstArc {
                            from: s,
                            input: a1.input,
                            output: a2.output,
                            weight: &a1.weight * &a2.weight,
                            to,
                        });
                    }
                }
                None => {
                    if f == 0 {
                        for a2 in in2.get(&(q2, None)).into_iter().flatten() {
                            let to = intern((a1.to, a2.to, 0), &mut triples, &mut queue);
                            arcs.push(WfstArc {
                                from: s,
                                input: a1.input,
                                output: a2.output,
                                weight: &a1.weight * &a2.weight,
                                to,
                            });
                        }
                    }
                    if f != 1 {
                        let to = intern((a1.to, q2, 2), &mut triples, &mut queue);
                        arcs.push(WfstArc { from: s, input: a1.input, output: None, weight: a1.weight.clone(), to });
                    }
                }
            }
        }
        if f != 2 {
            for a2 in in2.get(&(q2, None)).into_iter().flatten() {
                let to = intern((q1, a2.to, 1), &mut triples, &mut queue);
                arcs.push(WfstArc { from: s, input: None, output: a2.output, weight: a2.weight.clone(), to });
            }
        }
    }
    let n = triples.len();
    let mut init = vec![zero(); n];
    for (s, w) in initial {
        init[s] += w;
    }
    let finals = triples.iter().map(|&(q1, q2, _)| &t1.finals[q1] * &t2.finals[q2]).collect();
    let states = triples.iter().map(|&(q1, q2, f)| format!("({},{},{f})", t1.states[q1], t2.states[q2])).collect();
    let arcs = arcs.into_iter().filter(|a| !a.weight.is_zero()).collect();
    Wfst::new(t1.input.clone(), t2.output.clone(), states, init, finals, arcs)
}
