//! Hard-attention transformer LMs over exact rationals, the position-free
//! PFSA construction and the PTM simulation.

use crate::alphabet::Alphabet;
use crate::automata::{Pfsa, Ptm};
use crate::cot::{action_index, augment_ptm_alphabet, PtmAlphabet, PtmSymbol, YBar, ACTIONS};
use crate::dist::{hardmax, sparsemax, LanguageModel, NextSymbolDistribution};
use crate::error::{Error, Result};
use crate::rational::{add, dot, int, one, onehot, rat, zero, zeros, Matrix, Rational, Vector};
use crate::rnn::{pair_alphabet, pair_head, Output};
use crate::search::KeyedLm;
use crate::transduce::AugmentedAlphabet;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::rc::Rc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scoring {
    Dot,
    NegAbsDot,
}

impl Scoring {
    pub fn score(self, q: &[Rational], k: &[Rational]) -> Rational {
        match self {
            Scoring::Dot => dot(q, k),
            Scoring::NegAbsDot => -dot(q, k).abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MlpLayer {
    pub w: Matrix,
    pub b: Vector,
    pub relu: bool,
}

impl MlpLayer {
    pub fn apply(&self, x: &[Rational]) -> Result<Vector> {
        let mut y = add(&self.w.mul_vec(x)?, &self.b);
        if self.relu {
            for v in y.iter_mut() {
                if v.is_negative() {
                    *v = zero();
                }
            }
        }
        Ok(y)
    }
}

/// Feed-forward stack; an empty stack is the identity.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Mlp {
    pub layers: Vec<MlpLayer>,
}

impl Mlp {
    pub fn apply(&self, x: &[Rational]) -> Result<Vector> {
        let mut y = x.to_vec();
        for l in &self.layers {
            y = l.apply(&y)?;
        }
        Ok(y)
    }
}

/// a_t = Att(Q x_t, K X_≤t, V X_≤t) + x_t and z_t = O(a_t) + a_t with hardmax
/// attention; `output` of `None` is the zero map.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformerLayer {
    pub query: Matrix,
    pub key: Matrix,
    pub value: Matrix,
    pub output: Option<Mlp>,
    pub scoring: Scoring,
    /// Reject steps whose argmax is not a single position.
    pub unique_argmax: bool,
}

impl TransformerLayer {
    fn position(&self, t: usize, x: &[Rational], keys: &[&Vector], values: &[&Vector]) -> Result<Vector> {
        let mut a = x.to_vec();
        if !self.value.is_zero() {
            let q = self.query.mul_vec(x)?;
            let scores: Vec<Rational> = keys.iter().map(|k| self.scoring.score(&q, k)).collect();
            let w = hardmax(&scores);
            if self.unique_argmax && w.iter().filter(|p| !p.is_zero()).count() != 1 {
                return Err(Error::AmbiguousAttention { position: t });
            }
            for (p, v) in w.iter().zip(values) {
                if !p.is_zero() {
                    for (ai, vi) in a.iter_mut().zip(v.iter()) {
                        *ai += p * vi;
                    }
                }
            }
        }
        if let Some(o) = &self.output {
            a = add(&o.apply(&a)?, &a);
        }
        Ok(a)
    }
}

/// Causal application of one layer to all rows of `x`.
pub fn attention_layer_apply(layer: &TransformerLayer, x: &[Vector]) -> Result<Vec<Vector>> {
    let d = layer.value.cols;
    if x.iter().any(|r| r.len() != d || r.len() != layer.value.rows) {
        return Err(Error::Dimension("position vectors do not match the layer".into()));
    }
    let keys = x.iter().map(|r| layer.key.mul_vec(r)).collect::<Result<Vec<_>>>()?;
    let values = x.iter().map(|r| layer.value.mul_vec(r)).collect::<Result<Vec<_>>>()?;
    (0..x.len())
        .map(|t| {
            let k: Vec<&Vector> = keys[..=t].iter().collect();
            let v: Vec<&Vector> = values[..=t].iter().collect();
            layer.position(t, &x[t], &k, &v)
        })
        .collect()
}

/// Positional part of the static representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Positional {
    None,
    /// Adds (1, t+1, 1/(t+1), 1/(t+1)²) starting at `offset`.
    PtmTail {
        offset: usize,
    },
}

pub fn positional_tail(t: usize) -> [Rational; 4] {
    let n = (t + 1) as i64;
    [one(), int(n), rat(1, n), rat(1, n * n)]
}

/// enc(y_<t) = F(z_t) of the last layer; p(· | y_<t) = sparsemax(E enc).
#[derive(Clone, Debug, PartialEq)]
pub struct TransformerLm {
    pub alphabet: Alphabet,
    pub embedding: Vec<Vector>,
    pub bos: Vector,
    pub positional: Positional,
    pub layers: Vec<TransformerLayer>,
    pub f: Mlp,
    pub e: Matrix,
    pub outputs: Vec<Output>,
}

#[derive(Debug)]
struct Node {
    prev: Option<Rc<Node>>,
    symbol: Option<usize>,
    position: usize,
    /// Input to layer l at index l; the last entry is the final layer output.
    inputs: Vec<Vector>,
    keys: Vec<Vector>,
    values: Vec<Vector>,
}

/// Prefix-shared encoding of a context (BOS′ at position 0).
#[derive(Clone, Debug)]
pub struct TfState(Rc<Node>);

impl TfState {
    pub fn position(&self) -> usize {
        self.0.position
    }

    /// Symbols after BOS′.
    pub fn context(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut n = Some(&self.0);
        while let Some(node) = n {
            if let Some(s) = node.symbol {
                out.push(s);
            }
            n = node.prev.as_ref();
        }
        out.reverse();
        out
    }

    /// Vectors of every position at layer input `l` (0 = static representation).
    pub fn layer_rows(&self, l: usize) -> Vec<Vector> {
        let mut out = Vec::new();
        let mut n = Some(&self.0);
        while let Some(node) = n {
            out.push(node.inputs[l].clone());
            n = node.prev.as_ref();
        }
        out.reverse();
        out
    }

    pub fn last(&self, l: usize) -> &Vector {
        &self.0.inputs[l]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TfKey {
    Last(Vector),
    Context(Vec<usize>),
}

impl TransformerLm {
    pub fn width(&self) -> usize {
        self.bos.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.width();
        let mut ok = self.embedding.len() == self.alphabet.len() && self.embedding.iter().all(|x| x.len() == d);
        for l in &self.layers {
            ok &= l.query.cols == d && l.key.cols == d && l.query.rows == l.key.rows;
            ok &= l.value.rows == d && l.value.cols == d;
        }
        ok &= self.e.rows == self.outputs.len();
        if let Positional::PtmTail { offset } = self.positional {
            ok &= offset + 4 <= d;
        }
        if !ok {
            return Err(Error::Dimension("inconsistent transformer parameter shapes".into()));
        }
        if self.outputs.iter().any(|o| matches!(o, Output::Emit(i) if *i >= self.alphabet.len())) {
            return Err(Error::Invalid("output row refers to an unknown symbol".into()));
        }
        Ok(())
    }

    /// Representations never depend on history or position, so the last
    /// static vector determines every future distribution.
    pub fn is_position_free(&self) -> bool {
        self.positional == Positional::None && self.layers.iter().all(|l| l.value.is_zero() && l.output.is_none())
    }

    pub fn static_representation(&self, symbol: Option<usize>, t: usize) -> Result<Vector> {
        let mut x = match symbol {
            None => self.bos.clone(),
            Some(s) => self.embedding.get(s).ok_or_else(|| Error::UnknownSymbol(format!("#{s}")))?.clone(),
        };
        if let Positional::PtmTail { offset } = self.positional {
            for (i, v) in positional_tail(t).into_iter().enumerate() {
                x[offset + i] += v;
            }
        }
        Ok(x)
    }

    fn push(&self, prev: Option<&TfState>, symbol: Option<usize>) -> Result<TfState> {
        let position = prev.map_or(0, |p| p.position() + 1);
        let mut x = self.static_representation(symbol, position)?;
        let mut inputs = vec![x.clone()];
        let mut keys = Vec::with_capacity(self.layers.len());
        let mut values = Vec::with_capacity(self.layers.len());
        for (l, layer) in self.layers.iter().enumerate() {
            let k = layer.key.mul_vec(&x)?;
            let v = layer.value.mul_vec(&x)?;
            let mut ks: Vec<&Vector> = Vec::with_capacity(position + 1);
            let mut vs: Vec<&Vector> = Vec::with_capacity(position + 1);
            if !layer.value.is_zero() {
                let mut n = prev.map(|p| &p.0);
                while let Some(node) = n {
                    ks.push(&node.keys[l]);
                    vs.push(&node.values[l]);
                    n = node.prev.as_ref();
                }
                ks.reverse();
                vs.reverse();
            }
            ks.push(&k);
            vs.push(&v);
            x = layer.position(position, &x, &ks, &vs)?;
            keys.push(k);
            values.push(v);
            inputs.push(x.clone());
        }
        Ok(TfState(Rc::new(Node { prev: prev.map(|p| p.0.clone()), symbol, position, inputs, keys, values })))
    }

    pub fn enc(&self, s: &TfState) -> Result<Vector> {
        self.f.apply(s.last(self.layers.len()))
    }

    /// Raw head output sparsemax(E enc), one entry per row of E.
    pub fn head(&self, s: &TfState) -> Result<Vector> {
        Ok(sparsemax(&self.e.mul_vec(&self.enc(s)?)?))
    }
}

impl LanguageModel for TransformerLm {
    type State = TfState;

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn initial_state(&self) -> Result<TfState> {
        self.push(None, None)
    }
    fn advance(&self, s: &TfState, symbol: usize) -> Result<TfState> {
        self.push(Some(s), Some(symbol))
    }
    fn next_distribution(&self, s: &TfState) -> Result<NextSymbolDistribution> {
        let p = self.head(s)?;
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

impl KeyedLm for TransformerLm {
    type Key = TfKey;
    fn state_key(&self, s: &TfState) -> TfKey {
        if self.is_position_free() {
            TfKey::Last(s.last(0).clone())
        } else {
            TfKey::Context(s.context())
        }
    }
}

/// A layer whose value map and output map vanish, so it is the identity.
pub fn identity_layer(d: usize) -> TransformerLayer {
    TransformerLayer {
        query: Matrix::zeros(1, d),
        key: Matrix::zeros(1, d),
        value: Matrix::zeros(d, d),
        output: None,
        scoring: Scoring::Dot,
        unique_argmax: false,
    }
}

/// One identity layer, F = id, one-hot static representations and the
/// same output matrix as the RNN construction.
pub fn compile_transformer_from_pfsa(a: &Pfsa) -> Result<(TransformerLm, AugmentedAlphabet)> {
    let aug = pair_alphabet(a)?;
    let head = pair_head(a);
    let d = head.columns;
    let m = TransformerLm {
        alphabet: aug.delta.clone(),
        embedding: (0..aug.delta.len()).map(|i| onehot(d, i)).collect(),
        bos: onehot(d, head.bos_column),
        positional: Positional::None,
        layers: vec![identity_layer(d)],
        f: Mlp::default(),
        e: head.e,
        outputs: head.outputs,
    };
    m.validate()?;
    Ok((m, aug))
}

/// Maps the one-hot encoding of a tuple in X₁ × … × X_n (row-major) to the
/// one-hot encoding of its `component`-th entry.
pub fn disjunction_matrix(sizes: &[usize], component: usize) -> Matrix {
    let n: usize = sizes.iter().product();
    let inner: usize = sizes[component + 1..].iter().product();
    let mut w = Matrix::zeros(sizes[component], n);
    for idx in 0..n {
        w.set((idx / inner) % sizes[component], idx, one());
    }
    w
}

/// Offsets of the slots in the PTM simulation vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PtmLayout {
    pub nq: usize,
    pub ng: usize,
    pub oq: usize,
    pub ov: usize,
    pub oa: usize,
    pub a1: usize,
    pub a2: usize,
    pub c1: usize,
    pub c0: usize,
    pub l: usize,
    pub ol: usize,
    pub p1: usize,
    pub pt: usize,
    pub pinv: usize,
    pub pinv2: usize,
    pub d: usize,
}

impl PtmLayout {
    pub fn new(nq: usize, ng: usize) -> PtmLayout {
        let oq = 0;
        let ov = oq + nq;
        let oa = ov + ng;
        let a1 = oa + 3;
        let a2 = a1 + 1;
        let c1 = a2 + 1;
        let c0 = c1 + 1;
        let l = c0 + 1;
        let ol = l + 1;
        let p1 = ol + ng;
        PtmLayout { nq, ng, oq, ov, oa, a1, a2, c1, c0, l, ol, p1, pt: p1 + 1, pinv: p1 + 2, pinv2: p1 + 3, d: p1 + 4 }
    }

    /// Index of (q, s, a) in the one-hot output of the MLP and the columns of E.
    pub fn config_index(&self, q: usize, s: usize, a: i8) -> usize {
        (q * self.ng + s) * 3 + action_index(a)
    }

    pub fn config_size(&self) -> usize {
        self.nq * self.ng * 3
    }
}

/// All pieces of the PTM simulation.
#[derive(Clone, Debug)]
pub struct PtmConstruction {
    pub alphabet: PtmAlphabet,
    pub layout: PtmLayout,
    /// Static map from the one-hot tuple encoding to the vector layout.
    pub w: Matrix,
    pub layer1: TransformerLayer,
    pub layer2: TransformerLayer,
    pub output_mlp: Mlp,
    pub e: Matrix,
    pub outputs: Vec<Output>,
}

fn put_block(target: &mut Matrix, row: usize, block: &Matrix) {
    for i in 0..block.rows {
        for j in 0..block.cols {
            let v = block.get(i, j);
            if !v.is_zero() {
                target.set(row + i, j, v.clone());
            }
        }
    }
}

fn mlp_layer(rows: usize, cols: usize) -> MlpLayer {
    MlpLayer { w: Matrix::zeros(rows, cols), b: zeros(rows), relu: true }
}

fn output_mlp(m: &Ptm, lay: &PtmLayout) -> Mlp {
    let (nq, ng) = (lay.nq, lay.ng);
    let one_r = one();
    let neg = -one();
    // Layer 1: q | v_ℓ | a | onehot(⊔) | onehot(⊥) | fresh | init
    let w1 = nq + ng + 3 + 2 * ng + 2;
    let (u1, b1, fresh, init) = (nq + ng + 3, nq + 2 * ng + 3, nq + 3 * ng + 3, nq + 3 * ng + 4);
    let mut l1 = mlp_layer(w1, lay.d);
    for i in 0..nq {
        l1.w.set(i, lay.oq + i, one());
    }
    for g in 0..ng {
        l1.w.set(nq + g, lay.ol + g, one());
    }
    for k in 0..3 {
        l1.w.set(nq + ng + k, lay.oa + k, one());
    }
    l1.b[u1 + m.blank()] = one();
    l1.b[b1 + m.bottom()] = one();
    l1.w.set(fresh, lay.l, one());
    l1.w.set(fresh, lay.p1, one());
    l1.w.set(fresh, lay.pt, neg.clone());
    l1.w.set(init, lay.p1, int(2));
    l1.w.set(init, lay.pt, neg.clone());
    // Layer 2: fresh ∧ ¬init
    let mut l2 = mlp_layer(w1, w1);
    for i in 0..w1 {
        l2.w.set(i, i, one());
    }
    l2.w.set(fresh, init, neg.clone());
    // Layer 3: q | gated v | gated ⊔ | gated ⊥ | a
    let w3 = nq + 3 * ng + 3;
    let (gv, gu, gb, ga) = (nq, nq + ng, nq + 2 * ng, nq + 3 * ng);
    let mut l3 = mlp_layer(w3, w1);
    for i in 0..nq {
        l3.w.set(i, i, one());
    }
    for g in 0..ng {
        l3.w.set(gv + g, nq + g, one());
        l3.w.set(gv + g, fresh, neg.clone());
        l3.w.set(gv + g, init, neg.clone());
        l3.w.set(gu + g, u1 + g, one());
        l3.w.set(gu + g, fresh, one());
        l3.b[gu + g] = neg.clone();
        l3.w.set(gb + g, b1 + g, one());
        l3.w.set(gb + g, init, one());
        l3.b[gb + g] = neg.clone();
    }
    for k in 0..3 {
        l3.w.set(ga + k, nq + ng + k, one());
    }
    // Layer 4: q | s | a
    let w4 = nq + ng + 3;
    let mut l4 = mlp_layer(w4, w3);
    for i in 0..nq {
        l4.w.set(i, i, one());
    }
    for g in 0..ng {
        for block in [gv, gu, gb] {
            l4.w.set(nq + g, block + g, one());
        }
    }
    for k in 0..3 {
        l4.w.set(nq + ng + k, ga + k, one());
    }
    // Layer 5: three-way conjunction into onehot(q, s, a)
    let mut l5 = mlp_layer(lay.config_size(), w4);
    for q in 0..nq {
        for s in 0..ng {
            for a in ACTIONS {
                let r = lay.config_index(q, s, a);
                l5.w.set(r, q, one_r.clone());
                l5.w.set(r, nq + s, one());
                l5.w.set(r, nq + ng + action_index(a), one());
                l5.b[r] = int(-2);
            }
        }
    }
    Mlp { layers: vec![l1, l2, l3, l4, l5] }
}

pub fn ptm_construction(m: &Ptm) -> Result<PtmConstruction> {
    let alphabet = augment_ptm_alphabet(m)?;
    let (nq, ng) = (alphabet.num_states, alphabet.num_tape);
    let lay = PtmLayout::new(nq, ng);
    let sizes = [nq, ng, alphabet.ybar_slots(), 3, 3];
    let n = alphabet.onehot_size();
    let mut w = Matrix::zeros(lay.d, n);
    put_block(&mut w, lay.oq, &disjunction_matrix(&sizes, 0));
    put_block(&mut w, lay.ov, &disjunction_matrix(&sizes, 1));
    let wa = disjunction_matrix(&sizes, 3);
    put_block(&mut w, lay.oa, &wa);
    let values: Vec<Rational> = ACTIONS.iter().map(|a| int(*a as i64)).collect();
    let wa2 = disjunction_matrix(&sizes, 4);
    for j in 0..n {
        w.set(lay.a1, j, (0..3).map(|k| &values[k] * wa.get(k, j)).sum());
        w.set(lay.a2, j, (0..3).map(|k| &values[k] * wa2.get(k, j)).sum());
    }

    let d = lay.d;
    let mut v1 = Matrix::zeros(d, d);
    v1.set(lay.c1, lay.a1, one());
    v1.set(lay.c0, lay.a2, one());
    let layer1 = TransformerLayer {
        query: Matrix::zeros(1, d),
        key: Matrix::zeros(1, d),
        value: v1,
        output: None,
        scoring: Scoring::Dot,
        unique_argmax: false,
    };

    let third = rat(1, 3);
    let mut q2 = Matrix::zeros(3, d);
    q2.set(0, lay.c1, one());
    q2.set(1, lay.pinv, one());
    q2.set(2, lay.pinv2, third.clone());
    let mut k2 = Matrix::zeros(3, d);
    k2.set(0, lay.pinv, one());
    k2.set(1, lay.c0, -one());
    k2.set(2, lay.pinv2, third);
    let mut v2 = Matrix::zeros(d, d);
    v2.set(lay.l, lay.pt, one());
    for g in 0..ng {
        v2.set(lay.ol + g, lay.ov + g, one());
    }
    let layer2 = TransformerLayer {
        query: q2,
        key: k2,
        value: v2,
        output: None,
        scoring: Scoring::NegAbsDot,
        unique_argmax: true,
    };

    let mut e = Matrix::zeros(alphabet.augmented.delta.len(), lay.config_size());
    for q in 0..nq {
        for s in 0..ng {
            for a_in in ACTIONS {
                let col = lay.config_index(q, s, a_in);
                if q == m.final_state() {
                    let row = alphabet.encode(&PtmSymbol {
                        state: q,
                        written: s,
                        output: YBar::Eos,
                        action: 0,
                        previous_action: a_in,
                    });
                    e.set(row, col, one());
                    continue;
                }
                for &t in m.applicable(q, s) {
                    e.add_at(alphabet.encode_transition(m, t, a_in), col, &m.transitions()[t].weight);
                }
            }
        }
    }
    let outputs = (0..alphabet.augmented.delta.len())
        .map(|i| if alphabet.decode(i).output == YBar::Eos { Output::Eos } else { Output::Emit(i) })
        .collect();
    Ok(PtmConstruction { output_mlp: output_mlp(m, &lay), alphabet, layout: lay, w, layer1, layer2, e, outputs })
}

impl PtmConstruction {
    /// W · onehot(tuple) plus the positional tail; `None` is BOS′.
    pub fn static_representation(&self, sym: Option<&PtmSymbol>, t: usize) -> Result<Vector> {
        let mut x = self.w.mul_vec(&onehot(self.alphabet.onehot_size(), self.alphabet.onehot_index(sym)))?;
        for (i, v) in positional_tail(t).into_iter().enumerate() {
            x[self.layout.p1 + i] += v;
        }
        Ok(x)
    }

    pub fn layer1_apply(&self, x0: &[Vector]) -> Result<Vec<Vector>> {
        attention_layer_apply(&self.layer1, x0)
    }

    pub fn layer2_apply(&self, x1: &[Vector]) -> Result<Vec<Vector>> {
        attention_layer_apply(&self.layer2, x1)
    }

    pub fn output(&self, x2: &[Rational]) -> Result<Vector> {
        self.output_mlp.apply(x2)
    }

    pub fn to_transformer(&self) -> Result<TransformerLm> {
        let delta = &self.alphabet.augmented.delta;
        let embedding = (0..delta.len())
            .map(|i| {
                self.w.mul_vec(&onehot(
                    self.alphabet.onehot_size(),
                    self.alphabet.onehot_index(Some(&self.alphabet.decode(i))),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let bos = self.w.mul_vec(&onehot(self.alphabet.onehot_size(), self.alphabet.onehot_index(None)))?;
        let tf = TransformerLm {
            alphabet: delta.clone(),
            embedding,
            bos,
            positional: Positional::PtmTail { offset: self.layout.p1 },
            layers: vec![self.layer1.clone(), self.layer2.clone()],
            f: self.output_mlp.clone(),
            e: self.e.clone(),
            outputs: self.outputs.clone(),
        };
        tf.validate()?;
        Ok(tf)
    }
}

pub fn compile_transformer_from_ptm(m: &Ptm) -> Result<(TransformerLm, AugmentedAlphabet)> {
    let c = ptm_construction(m)?;
    Ok((c.to_transformer()?, c.alphabet.augmented.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::pfsa::reference_a1;
    use crate::automata::ptm::{ptm_truncated_distribution, reference_m1};
    use crate::cot::{cot_probability, CotLm};
    use crate::search::LmRun;
    use crate::transduce::Phi;

    #[test]
    fn identity_and_uniform_layers() {
        let x: Vec<Vector> = (0..4).map(|i| vec![int(i), int(2 * i)]).collect();
        let mut layer = identity_layer(2);
        assert_eq!(attention_layer_apply(&layer, &x).unwrap(), x);
        layer.value = Matrix::identity(2);
        let out = attention_layer_apply(&layer, &x).unwrap();
        assert_eq!(out[0], vec![int(0), int(0)]);
        assert_eq!(out[3], vec![int(3) + rat(6, 4), int(6) + rat(12, 4)]);
    }

    #[test]
    fn disjunction_examples() {
        let w = disjunction_matrix(&[2, 3], 1);
        assert_eq!(w.mul_vec(&onehot(6, 4)).unwrap(), onehot(3, 1));
        let w = disjunction_matrix(&[2, 3], 0);
        assert_eq!(w.mul_vec(&onehot(6, 4)).unwrap(), onehot(2, 1));
    }

    #[test]
    fn pfsa_transformer_matches() {
        let a = reference_a1();
        let (tf, aug) = compile_transformer_from_pfsa(&a).unwrap();
        assert!(tf.is_position_free());
        let cot = CotLm::new(LmRun(tf), Phi::Homomorphism(aug));
        assert_eq!(cot_probability(&cot, &[0], 10).unwrap().value, rat(1, 4));
        assert_eq!(cot.enumerate(5, 12).unwrap().entries, a.enumerate(5).entries);
    }

    #[test]
    fn m1_static_and_layers() {
        let m = reference_m1();
        let c = ptm_construction(&m).unwrap();
        let lay = c.layout;
        let x = c.static_representation(None, 0).unwrap();
        assert_eq!(x[lay.oq + m.initial()], one());
        assert_eq!(x[lay.ov + m.bottom()], one());
        assert_eq!(x[lay.oa + 1], one());
        assert_eq!(&x[lay.p1..], &positional_tail(0));
        assert_eq!(positional_tail(3), [one(), int(4), rat(1, 4), rat(1, 16)]);
        let s = PtmSymbol { state: 0, written: 1, output: YBar::Eps, action: 1, previous_action: -1 };
        let x = c.static_representation(Some(&s), 2).unwrap();
        assert_eq!((x[lay.a1].clone(), x[lay.a2].clone()), (int(1), int(-1)));
    }

    #[test]
    fn m1_distribution() {
        let m = reference_m1();
        let (tf, aug) = compile_transformer_from_ptm(&m).unwrap();
        let cot = CotLm::new(LmRun(tf), Phi::Homomorphism(aug));
        let t = cot.enumerate(10, 3).unwrap();
        let want = ptm_truncated_distribution(&m, 3).unwrap();
        assert_eq!(t.entries, want.entries);
        assert_eq!(t.residual_mass, want.residual_mass);
        assert_eq!(t.get(&[0, 0]), rat(1, 8));
        assert_eq!(t.residual_mass, rat(1, 8));
    }
}
