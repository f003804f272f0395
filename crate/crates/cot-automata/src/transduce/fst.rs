use crate::alphabet::{Alphabet, Symbol, BOS, EOS};
use crate::error::{Error, Result};
use crate::search::{Bound, Push, YieldTracker};
use std::collections::{BTreeSet, HashSet, VecDeque};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FstArc {
    pub from: usize,
    pub input: Option<usize>,
    pub output: Option<usize>,
    pub to: usize,
}

/// Unweighted finite-state transducer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fst {
    input: Alphabet,
    output: Alphabet,
    states: Vec<String>,
    initial: Vec<usize>,
    finals: Vec<usize>,
    arcs: Vec<FstArc>,
    /// Set by constructors that produce functions (at most one output per input).
    pub functional: bool,
}

impl Fst {
    pub fn new(
        input: Alphabet,
        output: Alphabet,
        states: Vec<String>,
        initial: Vec<usize>,
        finals: Vec<usize>,
        arcs: Vec<FstArc>,
    ) -> Result<Fst> {
        crate::automata::state_index(&states)?;
        let n = states.len();
        if initial.iter().chain(&finals).any(|&q| q >= n) {
            return Err(Error::Invalid("initial or final state out of range".into()));
        }
        for a in &arcs {
            if a.from >= n || a.to >= n {
                return Err(Error::Invalid("arc refers to an unknown state".into()));
            }
            if a.input.is_some_and(|x| x >= input.len()) || a.output.is_some_and(|y| y >= output.len()) {
                return Err(Error::Invalid("arc label outside its alphabet".into()));
            }
        }
        Ok(Fst { input, output, states, initial, finals, arcs, functional: false })
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }
    pub fn output(&self) -> &Alphabet {
        &self.output
    }
    pub fn states(&self) -> &[String] {
        &self.states
    }
    pub fn initial(&self) -> &[usize] {
        &self.initial
    }
    pub fn finals(&self) -> &[usize] {
        &self.finals
    }
    pub fn arcs(&self) -> &[FstArc] {
        &self.arcs
    }

    fn arcs_from(&self, q: usize) -> impl Iterator<Item = &FstArc> {
        self.arcs.iter().filter(move |a| a.from == q)
    }
}

/// All outputs for input `x` whose length stays within `cap`; the flag
/// reports whether some run was cut at the cap.
pub fn fst_apply(t: &Fst, x: &[usize], cap: usize) -> Result<(BTreeSet<Vec<usize>>, bool)> {
    let mut outputs = BTreeSet::new();
    let mut saturated = false;
    let mut seen: HashSet<(usize, usize, Vec<usize>)> = HashSet::new();
    let mut queue: VecDeque<(usize, usize, Vec<usize>)> = VecDeque::new();
    for &q in &t.initial {
        if seen.insert((q, 0, Vec::new())) {
            queue.push_back((q, 0, Vec::new()));
        }
    }
    while let Some((q, i, out)) = queue.pop_front() {
        if i == x.len() && t.finals.contains(&q) {
            outputs.insert(out.clone());
        }
        for a in t.arcs_from(q) {
            let ni = match a.input {
                None => i,
                Some(s) if i < x.len() && x[i] == s => i + 1,
                Some(_) => continue,
            };
            let mut no = out.clone();
            if let Some(o) = a.output {
                if no.len() == cap {
                    saturated = true;
                    continue;
                }
                no.push(o);
            }
            let key = (a.to, ni, no);
            if seen.insert(key.clone()) {
                queue.push_back(key);
            }
        }
    }
    Ok((outputs, saturated))
}

pub fn identity_fst(sigma: &Alphabet) -> Fst {
    let arcs = (0..sigma.len()).map(|y| FstArc { from: 0, input: Some(y), output: Some(y), to: 0 }).collect();
    let mut f = Fst::new(sigma.clone(), sigma.clone(), vec!["q".into()], vec![0], vec![0], arcs).unwrap();
    f.functional = true;
    f
}

/// How an augmented symbol projects onto Σ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projection {
    Emit(usize),
    Epsilon,
    /// The output component is EOS or BOS; such symbols never occur inside strings.
    Marker,
}

/// Augmented alphabet Δ of tuples whose `output_component` lies in Σ̄_ε.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedAlphabet {
    pub delta: Alphabet,
    pub sigma: Alphabet,
    pub output_component: usize,
    projection: Vec<Projection>,
}

impl AugmentedAlphabet {
    pub fn new(delta: Alphabet, sigma: Alphabet, output_component: usize) -> Result<AugmentedAlphabet> {
        let mut projection = Vec::with_capacity(delta.len());
        for d in delta.symbols() {
            let Symbol::Tuple(parts) = d else {
                return Err(Error::InvalidAlphabet(format!("`{d}` is not a tuple")));
            };
            if parts.iter().all(|p| p.is_none()) {
                return Err(Error::InvalidAlphabet(format!("`{d}` has only empty components")));
            }
            let p = match parts.get(output_component) {
                None => return Err(Error::InvalidAlphabet(format!("`{d}` has no component {output_component}"))),
                Some(None) => Projection::Epsilon,
                Some(Some(Symbol::Name(n))) if n == EOS || n == BOS => Projection::Marker,
                Some(Some(s)) => Projection::Emit(sigma.id_of(s)?),
            };
            projection.push(p);
        }
        Ok(AugmentedAlphabet { delta, sigma, output_component, projection })
    }

    pub fn project(&self, d: usize) -> Projection {
        self.projection[d]
    }

    /// Direct application of the symbol-wise projection.
    pub fn erase(&self, x: &[usize]) -> Option<Vec<usize>> {
        let mut out = Vec::new();
        for &d in x {
            match self.projection[d] {
                Projection::Emit(s) => out.push(s),
                Projection::Epsilon => {}
                Projection::Marker => return None,
            }
        }
        Some(out)
    }
}

/// Single-state transducer mapping every augmented symbol to its output part.
pub fn make_eraser_fst(delta: &AugmentedAlphabet) -> Result<Fst> {
    let mut arcs = Vec::new();
    for d in 0..delta.delta.len() {
        match delta.project(d) {
            Projection::Emit(s) => arcs.push(FstArc { from: 0, input: Some(d), output: Some(s), to: 0 }),
            Projection::Epsilon => arcs.push(FstArc { from: 0, input: Some(d), output: None, to: 0 }),
            Projection::Marker => {}
        }
    }
    let mut f = Fst::new(delta.delta.clone(), delta.sigma.clone(), vec!["q".into()], vec![0], vec![0], arcs)?;
    f.functional = true;
    Ok(f)
}

/// Deletes everything up to and including the first `marker`, copies the rest.
pub fn make_marker_split_fst(sigma: &Alphabet, marker: usize) -> Result<Fst> {
    if marker >= sigma.len() {
        return Err(Error::UnknownSymbol(format!("marker index {marker}")));
    }
    let mut arcs = Vec::new();
    for y in 0..sigma.len() {
        if y == marker {
            arcs.push(FstArc { from: 0, input: Some(y), output: None, to: 1 });
        } else {
            arcs.push(FstArc { from: 0, input: Some(y), output: None, to: 0 });
        }
        arcs.push(FstArc { from: 1, input: Some(y), output: Some(y), to: 1 });
    }
    let mut f = Fst::new(sigma.clone(), sigma.clone(), vec!["0".into(), "1".into()], vec![0], vec![1], arcs)?;
    f.functional = true;
    Ok(f)
}

/// A regular function used to erase chain-of-thought symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Phi {
    Homomorphism(AugmentedAlphabet),
    Transducer(Fst),
}

impl Phi {
    pub fn input(&self) -> &Alphabet {
        match self {
            Phi::Homomorphism(a) => &a.delta,
            Phi::Transducer(f) => f.input(),
        }
    }

    pub fn output(&self) -> &Alphabet {
        match self {
            Phi::Homomorphism(a) => &a.sigma,
            Phi::Transducer(f) => f.output(),
        }
    }

    pub fn to_fst(&self) -> Result<Fst> {
        match self {
            Phi::Homomorphism(a) => make_eraser_fst(a),
            Phi::Transducer(f) => Ok(f.clone()),
        }
    }

    /// The image of `x`, if any; transducers must yield a single output.
    pub fn apply(&self, x: &[usize]) -> Result<Option<Vec<usize>>> {
        match self {
            Phi::Homomorphism(a) => Ok(a.erase(x)),
            Phi::Transducer(f) => {
                let (outs, _) = fst_apply(f, x, x.len() * 4 + 16)?;
                match outs.len() {
                    0 => Ok(None),
                    1 => Ok(outs.into_iter().next()),
                    _ => Err(Error::Domain("transducer is not functional on this input".into())),
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PhiState {
    Hom(Vec<usize>),
    Fst(BTreeSet<(usize, Vec<usize>)>),
}

/// Tracks φ-images of growing Δ-prefixes during exploration.
pub struct PhiTracker<'a> {
    pub phi: &'a Phi,
    pub bound: Bound,
}

impl<'a> PhiTracker<'a> {
    fn close(&self, f: &Fst, mut set: BTreeSet<(usize, Vec<usize>)>) -> (BTreeSet<(usize, Vec<usize>)>, bool) {
        let mut overflow = false;
        let mut stack: Vec<(usize, Vec<usize>)> = set.iter().cloned().collect();
        while let Some((q, out)) = stack.pop() {
            for a in f.arcs_from(q).filter(|a| a.input.is_none()) {
                let mut o = out.clone();
                o.extend(a.output);
                match self.bound.check(&o) {
                    Push::Keep(()) => {
                        if set.insert((a.to, o.clone())) {
                            stack.push((a.to, o));
                        }
                    }
                    Push::Overflow => overflow = true,
                    Push::Dead => {}
                }
            }
        }
        (set, overflow)
    }
}

impl<'a> YieldTracker for PhiTracker<'a> {
    type State = PhiState;

    fn start(&self) -> PhiState {
        match self.phi {
            Phi::Homomorphism(_) => PhiState::Hom(Vec::new()),
            Phi::Transducer(f) => {
                let set = f.initial().iter().map(|&q| (q, Vec::new())).collect();
                PhiState::Fst(self.close(f, set).0)
            }
        }
    }

    fn push(&self, s: &PhiState, label: usize) -> Push<PhiState> {
        match (self.phi, s) {
            (Phi::Homomorphism(a), PhiState::Hom(out)) => match a.project(label) {
                Projection::Epsilon => Push::Keep(s.clone()),
                Projection::Marker => Push::Dead,
                Projection::Emit(y) => {
                    let mut o = out.clone();
                    o.push(y);
                    match self.bound.check(&o) {
                        Push::Keep(()) => Push::Keep(PhiState::Hom(o)),
                        Push::Dead => Push::Dead,
                        Push::Overflow => Push::Overflow,
                    }
                }
            },
            (Phi::Transducer(f), PhiState::Fst(set)) => {
                let mut next = BTreeSet::new();
                let mut overflow = false;
                for (q, out) in set {
                    for a in f.arcs_from(*q).filter(|a| a.input == Some(label)) {
                        let mut o = out.clone();
                        o.extend(a.output);
                        match self.bound.check(&o) {
                            Push::Keep(()) => {
                                next.insert((a.to, o));
                            }
                            Push::Overflow => overflow = true,
                            Push::Dead => {}
                        }
                    }
                }
                let (next, of2) = self.close(f, next);
                if !next.is_empty() {
                    Push::Keep(PhiState::Fst(next))
                } else if overflow || of2 {
                    Push::Overflow
                } else {
                    Push::Dead
                }
            }
            _ => unreachable!("tracker state does not match φ"),
        }
    }

    fn accept(&self, s: &PhiState) -> Option<Vec<usize>> {
        match (self.phi, s) {
            (Phi::Homomorphism(_), PhiState::Hom(out)) => self.bound.complete(out).then(|| out.clone()),
            (Phi::Transducer(f), PhiState::Fst(set)) => set
                .iter()
                .find(|(q, out)| f.finals().contains(q) && self.bound.complete(out))
                .map(|(_, out)| out.clone()),
            _ => unreachable!("tracker state does not match φ"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq() -> AugmentedAlphabet {
        let sigma = Alphabet::from_names(&["a", "b"]).unwrap();
        let mut d = Vec::new();
        for y in [Some("a"), Some("b"), None] {
            for q in ["q", "r"] {
                d.push(Symbol::tuple(vec![y.map(Symbol::name), Some(Symbol::name(q))]));
            }
        }
        AugmentedAlphabet::new(Alphabet::new(d).unwrap(), sigma, 0).unwrap()
    }

    #[test]
    fn eraser_examples() {
        let a = sq();
        let f = make_eraser_fst(&a).unwrap();
        let (o, sat) = fst_apply(&f, &[0, 5, 2], 10).unwrap();
        assert_eq!(o.into_iter().collect::<Vec<_>>(), vec![vec![0, 1]]);
        assert!(!sat);
        assert_eq!(fst_apply(&f, &[], 10).unwrap().0.len(), 1);
        assert_eq!(a.erase(&[4, 4]), Some(vec![]));
    }

    #[test]
    fn eraser_rejects_doubly_empty_symbols() {
        let sigma = Alphabet::from_names(&["a"]).unwrap();
        let bad = Alphabet::new(vec![Symbol::tuple(vec![None, Some(Symbol::name("q"))])]).unwrap();
        assert!(AugmentedAlphabet::new(bad, sigma.clone(), 0).is_ok());
        assert!(Alphabet::new(vec![Symbol::tuple(vec![None, None])]).is_err());
    }

    #[test]
    fn marker_examples() {
        let sigma = Alphabet::from_names(&["a", "b", "X", "c", "d"]).unwrap();
        let f = make_marker_split_fst(&sigma, 2).unwrap();
        let phi = Phi::Transducer(f.clone());
        let x = sigma.parse_string("abXcd").unwrap();
        assert_eq!(phi.apply(&x).unwrap(), Some(sigma.parse_string("cd").unwrap()));
        assert_eq!(phi.apply(&[2]).unwrap(), Some(vec![]));
        assert_eq!(phi.apply(&[0, 1]).unwrap(), None);
        assert_eq!(phi.apply(&sigma.parse_string("aXbXc").unwrap()).unwrap(), Some(sigma.parse_string("bXc").unwrap()));
    }

    #[test]
    fn identity_is_identity() {
        let sigma = Alphabet::from_names(&["a", "b"]).unwrap();
        let f = identity_fst(&sigma);
        assert_eq!(fst_apply(&f, &[1, 0, 1], 5).unwrap().0.into_iter().next().unwrap(), vec![1, 0, 1]);
    }
}
