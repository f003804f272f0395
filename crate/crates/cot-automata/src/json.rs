//! JSON file formats. Rationals are always strings ("p/q" or "p"); state,
//! stack and tape symbols are referenced by name, alphabet symbols by their
//! JSON form (a string, or an array whose `null` entries are ε).

use crate::alphabet::{Alphabet, Symbol, EOS};
use crate::automata::{
    Direction, Pfsa, PfsaTransition, Ppda, PpdaTransition, Ptm, PtmTransition, TwoPda, TwoPdaTransition,
};
use crate::cot::PtmAlphabet;
use crate::dist::DistributionTable;
use crate::error::{Error, Result};
use crate::model::{Base, CotModel, Model};
use crate::rational::{format_rational, parse_rational, zero, Matrix, Rational, Vector};
use crate::rnn::{ElmanRnnLm, Output};
use crate::transduce::{AugmentedAlphabet, Fst, FstArc, Phi, Wfst, WfstArc};
use crate::transformer::{Mlp, MlpLayer, Positional, Scoring, TransformerLayer, TransformerLm};
use num_traits::Zero;
use serde_json::{json, Map, Value};
use std::path::Path;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field<'a>(v: &'a Value, k: &str) -> Result<&'a Value> {
    v.get(k).ok_or_else(|| parse_err(format!("missing field `{k}`")))
}

fn text<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| parse_err(format!("`{what}` must be a string")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(format!("`{what}` must be an array")))
}

fn names(v: &Value, what: &str) -> Result<Vec<String>> {
    array(v, what)?.iter().map(|x| text(x, what).map(str::to_string)).collect()
}

fn rational(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap_or(0).into())),
        _ => Err(parse_err(format!("expected a rational string, found {v}"))),
    }
}

fn rat_value(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

fn vector(v: &Value, what: &str) -> Result<Vector> {
    array(v, what)?.iter().map(rational).collect()
}

fn vector_value(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rat_value).collect())
}

fn matrix(v: &Value, cols: Option<usize>, what: &str) -> Result<Matrix> {
    let rows: Vec<Vector> = array(v, what)?.iter().map(|r| vector(r, what)).collect::<Result<_>>()?;
    if rows.is_empty() {
        return Ok(Matrix::zeros(0, cols.unwrap_or(0)));
    }
    Matrix::from_rows(rows)
}

fn matrix_value(m: &Matrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| vector_value(r)).collect())
}

fn index_of(list: &[String], v: &Value, what: &str) -> Result<usize> {
    let n = text(v, what)?;
    list.iter().position(|x| x == n).ok_or_else(|| parse_err(format!("unknown {what} `{n}`")))
}

fn opt_index_of(list: &[String], v: &Value, what: &str) -> Result<Option<usize>> {
    if v.is_null() {
        Ok(None)
    } else {
        index_of(list, v, what).map(Some)
    }
}

fn opt_name(list: &[String], i: Option<usize>) -> Value {
    i.map_or(Value::Null, |i| Value::String(list[i].clone()))
}

pub fn alphabet_from_json(v: &Value) -> Result<Alphabet> {
    let syms: Vec<Symbol> = serde_json::from_value(v.clone()).map_err(|e| parse_err(format!("alphabet: {e}")))?;
    Alphabet::new(syms)
}

pub fn alphabet_to_json(a: &Alphabet) -> Value {
    serde_json::to_value(a.symbols()).expect("symbols serialize")
}

fn symbol_ref(a: &Alphabet, v: &Value) -> Result<usize> {
    let s: Symbol = serde_json::from_value(v.clone()).map_err(|e| parse_err(format!("symbol: {e}")))?;
    a.id_of(&s)
}

fn opt_symbol_ref(a: &Alphabet, v: &Value) -> Result<Option<usize>> {
    if v.is_null() {
        Ok(None)
    } else {
        symbol_ref(a, v).map(Some)
    }
}

fn symbol_value(a: &Alphabet, i: usize) -> Value {
    serde_json::to_value(a.symbol(i)).expect("symbol serializes")
}

fn opt_symbol_value(a: &Alphabet, i: Option<usize>) -> Value {
    i.map_or(Value::Null, |i| symbol_value(a, i))
}

fn weight_map(v: &Value, states: &[String], what: &str) -> Result<Vec<Rational>> {
    let obj = v.as_object().ok_or_else(|| parse_err(format!("`{what}` must map state names to weights")))?;
    let mut out = vec![zero(); states.len()];
    for (k, w) in obj {
        let i = states.iter().position(|s| s == k).ok_or_else(|| parse_err(format!("unknown state `{k}`")))?;
        out[i] = rational(w)?;
    }
    Ok(out)
}

fn weight_map_value(w: &[Rational], states: &[String]) -> Value {
    let mut m = Map::new();
    for (s, x) in states.iter().zip(w) {
        if !x.is_zero() {
            m.insert(s.clone(), rat_value(x));
        }
    }
    Value::Object(m)
}

fn pfsa_from(v: &Value) -> Result<Pfsa> {
    let alphabet = alphabet_from_json(field(v, "alphabet")?)?;
    let states = names(field(v, "states")?, "states")?;
    let initial = weight_map(field(v, "initial")?, &states, "initial")?;
    let finals = weight_map(field(v, "final")?, &states, "final")?;
    let mut transitions = Vec::new();
    for t in array(field(v, "transitions")?, "transitions")? {
        transitions.push(PfsaTransition {
            from: index_of(&states, field(t, "from")?, "state")?,
            symbol: symbol_ref(&alphabet, field(t, "symbol")?)?,
            weight: rational(field(t, "weight")?)?,
            to: index_of(&states, field(t, "to")?, "state")?,
        });
    }
    Pfsa::new(alphabet, states, initial, finals, transitions)
}

fn pfsa_to(a: &Pfsa) -> Value {
    let s = a.states();
    let transitions: Vec<Value> = a
        .transitions()
        .iter()
        .map(|t| {
            json!({"from": s[t.from], "symbol": symbol_value(a.alphabet(), t.symbol), "weight": rat_value(&t.weight), "to": s[t.to]})
        })
        .collect();
    json!({
        "type": "pfsa",
        "alphabet": alphabet_to_json(a.alphabet()),
        "states": s,
        "initial": weight_map_value(a.initial(), s),
        "final": weight_map_value(a.finals(), s),
        "transitions": transitions,
    })
}

fn ppda_from(v: &Value) -> Result<Ppda> {
    let alphabet = alphabet_from_json(field(v, "alphabet")?)?;
    let states = names(field(v, "states")?, "states")?;
    let stack = names(field(v, "stack_alphabet")?, "stack_alphabet")?;
    let mut transitions = Vec::new();
    for t in array(field(v, "transitions")?, "transitions")? {
        let push = array(field(t, "push")?, "push")?
            .iter()
            .map(|x| index_of(&stack, x, "stack symbol"))
            .collect::<Result<Vec<_>>>()?;
        transitions.push(PpdaTransition {
            from: index_of(&states, field(t, "from")?, "state")?,
            pop: index_of(&stack, field(t, "pop")?, "stack symbol")?,
            scan: opt_symbol_ref(&alphabet, field(t, "scan")?)?,
            weight: rational(field(t, "weight")?)?,
            to: index_of(&states, field(t, "to")?, "state")?,
            push,
        });
    }
    let start = index_of(&stack, field(v, "start_stack")?, "stack symbol")?;
    let initial = index_of(&states, field(v, "initial")?, "state")?;
    let finals = array(field(v, "final")?, "final")?
        .iter()
        .map(|x| index_of(&states, x, "state"))
        .collect::<Result<Vec<_>>>()?;
    Ppda::new(alphabet, states, stack, transitions, start, initial, finals)
}

fn ppda_to(p: &Ppda) -> Value {
    let (s, g) = (p.states(), p.stack_alphabet());
    let transitions: Vec<Value> = p
        .transitions()
        .iter()
        .map(|t| {
            json!({
                "from": s[t.from],
                "pop": g[t.pop],
                "scan": opt_symbol_value(p.alphabet(), t.scan),
                "weight": rat_value(&t.weight),
                "to": s[t.to],
                "push": t.push.iter().map(|&x| g[x].clone()).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "type": "ppda",
        "alphabet": alphabet_to_json(p.alphabet()),
        "states": s,
        "stack_alphabet": g,
        "start_stack": g[p.start_stack()],
        "initial": s[p.initial()],
        "final": p.finals().iter().map(|&f| s[f].clone()).collect::<Vec<_>>(),
        "transitions": transitions,
    })
}

fn twopda_from(v: &Value) -> Result<TwoPda> {
    let alphabet = alphabet_from_json(field(v, "alphabet")?)?;
    let states = names(field(v, "states")?, "states")?;
    let stack = names(field(v, "stack_alphabet")?, "stack_alphabet")?;
    let mut transitions = Vec::new();
    for t in array(field(v, "transitions")?, "transitions")? {
        let op = |k: &str| -> Result<Option<usize>> { opt_index_of(&stack, field(t, k)?, "stack symbol") };
        transitions.push(TwoPdaTransition {
            from: index_of(&states, field(t, "from")?, "state")?,
            top: index_of(&stack, field(t, "top")?, "stack symbol")?,
            scan: opt_symbol_ref(&alphabet, field(t, "scan")?)?,
            weight: rational(field(t, "weight")?)?,
            to: index_of(&states, field(t, "to")?, "state")?,
            pop1: op("pop1")?,
            pop2: op("pop2")?,
            push1: op("push1")?,
            push2: op("push2")?,
        });
    }
    TwoPda::new(
        alphabet,
        states.clone(),
        stack.clone(),
        index_of(&stack, field(v, "bottom")?, "stack symbol")?,
        transitions,
        index_of(&states, field(v, "initial")?, "state")?,
        index_of(&states, field(v, "final")?, "state")?,
    )
}

fn twopda_to(p: &TwoPda) -> Value {
    let (s, g) = (p.states(), p.stack_alphabet());
    let transitions: Vec<Value> = p
        .transitions()
        .iter()
        .map(|t| {
            json!({
                "from": s[t.from],
                "top": g[t.top],
                "scan": opt_symbol_value(p.alphabet(), t.scan),
                "weight": rat_value(&t.weight),
                "to": s[t.to],
                "pop1": opt_name(g, t.pop1),
                "pop2": opt_name(g, t.pop2),
                "push1": opt_name(g, t.push1),
                "push2": opt_name(g, t.push2),
            })
        })
        .collect();
    json!({
        "type": "2pda",
        "alphabet": alphabet_to_json(p.alphabet()),
        "states": s,
        "stack_alphabet": g,
        "bottom": g[p.bottom()],
        "initial": s[p.initial()],
        "final": s[p.final_state()],
        "transitions": transitions,
    })
}

fn ptm_from(v: &Value) -> Result<Ptm> {
    let alphabet = alphabet_from_json(field(v, "alphabet")?)?;
    let states = names(field(v, "states")?, "states")?;
    let tape = names(field(v, "tape_alphabet")?, "tape_alphabet")?;
    let mut transitions = Vec::new();
    for t in array(field(v, "transitions")?, "transitions")? {
        let direction = match text(field(t, "move")?, "move")? {
            "L" => Direction::L,
            "R" => Direction::R,
            other => return Err(parse_err(format!("move must be L or R, found `{other}`"))),
        };
        transitions.push(PtmTransition {
            from: index_of(&states, field(t, "from")?, "state")?,
            read: index_of(&tape, field(t, "read")?, "tape symbol")?,
            output: opt_symbol_ref(&alphabet, field(t, "output")?)?,
            write: index_of(&tape, field(t, "write")?, "tape symbol")?,
            direction,
            weight: rational(field(t, "weight")?)?,
            to: index_of(&states, field(t, "to")?, "state")?,
        });
    }
    Ptm::new(
        alphabet,
        states.clone(),
        tape.clone(),
        index_of(&tape, field(v, "blank")?, "tape symbol")?,
        index_of(&tape, field(v, "bottom")?, "tape symbol")?,
        index_of(&states, field(v, "initial")?, "state")?,
        index_of(&states, field(v, "final")?, "state")?,
        transitions,
    )
}

fn ptm_to(m: &Ptm) -> Value {
    let (s, g) = (m.states(), m.tape_alphabet());
    let transitions: Vec<Value> = m
        .transitions()
        .iter()
        .map(|t| {
            json!({
                "from": s[t.from],
                "read": g[t.read],
                "output": opt_symbol_value(m.alphabet(), t.output),
                "write": g[t.write],
                "move": if t.direction == Direction::L { "L" } else { "R" },
                "weight": rat_value(&t.weight),
                "to": s[t.to],
            })
        })
        .collect();
    json!({
        "type": "ptm",
        "alphabet": alphabet_to_json(m.alphabet()),
        "states": s,
        "tape_alphabet": g,
        "blank": g[m.blank()],
        "bottom": g[m.bottom()],
        "initial": s[m.initial()],
        "final": s[m.final_state()],
        "transitions": transitions,
    })
}

fn fst_from(v: &Value) -> Result<Fst> {
    let input = alphabet_from_json(field(v, "input")?)?;
    let output = alphabet_from_json(field(v, "output")?)?;
    let states = names(field(v, "states")?, "states")?;
    let list = |k: &str| -> Result<Vec<usize>> {
        array(field(v, k)?, k)?.iter().map(|x| index_of(&states, x, "state")).collect()
    };
    let (initial, finals) = (list("initial")?, list("final")?);
    let mut arcs = Vec::new();
    for a in array(field(v, "arcs")?, "arcs")? {
        arcs.push(FstArc {
            from: index_of(&states, field(a, "from")?, "state")?,
            input: opt_symbol_ref(&input, field(a, "input")?)?,
            output: opt_symbol_ref(&output, field(a, "output")?)?,
            to: index_of(&states, field(a, "to")?, "state")?,
        });
    }
    let mut f = Fst::new(input, output, states, initial, finals, arcs)?;
    f.functional = v.get("functional").and_then(Value::as_bool).unwrap_or(false);
    Ok(f)
}

fn fst_to(f: &Fst) -> Value {
    let s = f.states();
    let arcs: Vec<Value> = f
        .arcs()
        .iter()
        .map(|a| {
            json!({
                "from": s[a.from],
                "input": opt_symbol_value(f.input(), a.input),
                "output": opt_symbol_value(f.output(), a.output),
                "to": s[a.to],
            })
        })
        .collect();
    json!({
        "type": "fst",
        "input": alphabet_to_json(f.input()),
        "output": alphabet_to_json(f.output()),
        "states": s,
        "initial": f.initial().iter().map(|&q| s[q].clone()).collect::<Vec<_>>(),
        "final": f.finals().iter().map(|&q| s[q].clone()).collect::<Vec<_>>(),
        "arcs": arcs,
        "functional": f.functional,
    })
}

fn wfst_from(v: &Value) -> Result<Wfst> {
    let input = alphabet_from_json(field(v, "input")?)?;
    let output = alphabet_from_json(field(v, "output")?)?;
    let states = names(field(v, "states")?, "states")?;
    let initial = weight_map(field(v, "initial")?, &states, "initial")?;
    let finals = weight_map(field(v, "final")?, &states, "final")?;
    let mut arcs = Vec::new();
    for a in array(field(v, "arcs")?, "arcs")? {
        arcs.push(WfstArc {
            from: index_of(&states, field(a, "from")?, "state")?,
            input: opt_symbol_ref(&input, field(a, "input")?)?,
            output: opt_symbol_ref(&output, field(a, "output")?)?,
            weight: rational(field(a, "weight")?)?,
            to: index_of(&states, field(a, "to")?, "state")?,
        });
    }
    Wfst::new(input, output, states, initial, finals, arcs)
}

fn wfst_to(t: &Wfst) -> Value {
    let s = &t.states;
    let arcs: Vec<Value> = t
        .arcs
        .iter()
        .map(|a| {
            json!({
                "from": s[a.from],
                "input": opt_symbol_value(&t.input, a.input),
                "output": opt_symbol_value(&t.output, a.output),
                "weight": rat_value(&a.weight),
                "to": s[a.to],
            })
        })
        .collect();
    json!({
        "type": "wfst",
        "input": alphabet_to_json(&t.input),
        "output": alphabet_to_json(&t.output),
        "states": s,
        "initial": weight_map_value(&t.initial, s),
        "final": weight_map_value(&t.finals, s),
        "arcs": arcs,
    })
}

fn outputs_from(v: &Value, a: &Alphabet) -> Result<Vec<Output>> {
    array(v, "outputs")?
        .iter()
        .map(|o| if o.as_str() == Some(EOS) { Ok(Output::Eos) } else { symbol_ref(a, o).map(Output::Emit) })
        .collect()
}

fn outputs_to(o: &[Output], a: &Alphabet) -> Value {
    Value::Array(
        o.iter()
            .map(|x| match x {
                Output::Emit(i) => symbol_value(a, *i),
                Output::Eos => Value::String(EOS.into()),
            })
            .collect(),
    )
}

fn rnn_from(v: &Value) -> Result<ElmanRnnLm> {
    let alphabet = alphabet_from_json(field(v, "alphabet")?)?;
    let eta = vector(field(v, "eta")?, "eta")?;
    let d = eta.len();
    let activation =
        serde_json::from_value(field(v, "activation")?.clone()).map_err(|e| parse_err(format!("activation: {e}")))?;
    let embedding =
        array(field(v, "embedding")?, "embedding")?.iter().map(|r| vector(r, "embedding")).collect::<Result<_>>()?;
    let m = ElmanRnnLm {
        outputs: outputs_from(field(v, "outputs")?, &alphabet)?,
        alphabet,
        u: matrix(field(v, "U")?, Some(d), "U")?,
        v: matrix(field(v, "V")?, None, "V")?,
        b: vector(field(v, "b")?, "b")?,
        eta,
        embedding,
        bos: vector(field(v, "bos")?, "bos")?,
        activation,
        e: matrix(field(v, "E")?, Some(d), "E")?,
    };
    m.validate()?;
    Ok(m)
}

fn rnn_to(m: &ElmanRnnLm) -> Value {
    json!({
        "type": "rnn",
        "alphabet": alphabet_to_json(&m.alphabet),
        "activation": m.activation,
        "U": matrix_value(&m.u),
        "V": matrix_value(&m.v),
        "b": vector_value(&m.b),
        "eta": vector_value(&m.eta),
        "embedding": m.embedding.iter().map(|x| vector_value(x)).collect::<Vec<_>>(),
        "bos": vector_value(&m.bos),
        "E": matrix_value(&m.e),
        "outputs": outputs_to(&m.outputs, &m.alphabet),
    })
}

fn mlp_from(v: &Value, d: usize) -> Result<Mlp> {
    let mut layers = Vec::new();
    let mut width = d;
    for l in array(v, "mlp")? {
        let w = matrix(field(l, "w")?, Some(width), "w")?;
        width = w.rows;
        layers.push(MlpLayer {
            w,
            b: vector(field(l, "b")?, "b")?,
            relu: field(l, "relu")?.as_bool().ok_or_else(|| parse_err("`relu` must be a boolean"))?,
        });
    }
    Ok(Mlp { layers })
}

fn mlp_to(m: &Mlp) -> Value {
    Value::Array(
        m.layers.iter().map(|l| json!({"w": matrix_value(&l.w), "b": vector_value(&l.b), "relu": l.relu})).collect(),
    )
}

fn transformer_from(v: &Value) -> Result<TransformerLm> {
    let alphabet = alphabet_from_json(field(v, "alphabet")?)?;
    let bos = vector(field(v, "bos")?, "bos")?;
    let d = bos.len();
    let positional = match field(v, "positional")? {
        Value::String(s) if s == "none" => Positional::None,
        other => Positional::PtmTail {
            offset: other
                .get("ptm-tail")
                .and_then(Value::as_u64)
                .ok_or_else(|| parse_err("positional must be \"none\" or {\"ptm-tail\": offset}"))?
                as usize,
        },
    };
    let mut layers = Vec::new();
    for l in array(field(v, "layers")?, "layers")? {
        let scoring: Scoring =
            serde_json::from_value(field(l, "scoring")?.clone()).map_err(|e| parse_err(format!("scoring: {e}")))?;
        let output = match field(l, "output")? {
            Value::Null => None,
            o => Some(mlp_from(o, d)?),
        };
        layers.push(TransformerLayer {
            query: matrix(field(l, "query")?, Some(d), "query")?,
            key: matrix(field(l, "key")?, Some(d), "key")?,
            value: matrix(field(l, "value")?, Some(d), "value")?,
            output,
            scoring,
            unique_argmax: l.get("unique_argmax").and_then(Value::as_bool).unwrap_or(false),
        });
    }
    let f = mlp_from(field(v, "f")?, d)?;
    let width = f.layers.last().map_or(d, |l| l.w.rows);
    let embedding =
        array(field(v, "embedding")?, "embedding")?.iter().map(|r| vector(r, "embedding")).collect::<Result<_>>()?;
    let m = TransformerLm {
        outputs: outputs_from(field(v, "outputs")?, &alphabet)?,
        alphabet,
        embedding,
        bos,
        positional,
        layers,
        f,
        e: matrix(field(v, "E")?, Some(width), "E")?,
    };
    m.validate()?;
    Ok(m)
}

fn transformer_to(m: &TransformerLm) -> Value {
    let positional = match m.positional {
        Positional::None => json!("none"),
        Positional::PtmTail { offset } => json!({ "ptm-tail": offset }),
    };
    let layers: Vec<Value> = m
        .layers
        .iter()
        .map(|l| {
            json!({
                "query": matrix_value(&l.query),
                "key": matrix_value(&l.key),
                "value": matrix_value(&l.value),
                "output": l.output.as_ref().map_or(Value::Null, mlp_to),
                "scoring": l.scoring,
                "unique_argmax": l.unique_argmax,
            })
        })
        .collect();
    json!({
        "type": "transformer",
        "alphabet": alphabet_to_json(&m.alphabet),
        "embedding": m.embedding.iter().map(|x| vector_value(x)).collect::<Vec<_>>(),
        "bos": vector_value(&m.bos),
        "positional": positional,
        "layers": layers,
        "f": mlp_to(&m.f),
        "E": matrix_value(&m.e),
        "outputs": outputs_to(&m.outputs, &m.alphabet),
    })
}

fn base_from(v: &Value) -> Result<Base> {
    match model_from_json(v)? {
        Model::Pfsa(m) => Ok(Base::Pfsa(m)),
        Model::Ppda(m) => Ok(Base::Ppda(m)),
        Model::TwoPda(m) => Ok(Base::TwoPda(m)),
        Model::Ptm(m) => Ok(Base::Ptm(m)),
        Model::Rnn(m) => Ok(Base::Rnn(m)),
        Model::Transformer(m) => Ok(Base::Transformer(m)),
        other => Err(parse_err(format!("a {} cannot be a CoT base model", other.kind()))),
    }
}

fn cot_from(v: &Value) -> Result<CotModel> {
    let sigma = alphabet_from_json(field(v, "sigma")?)?;
    let base = base_from(field(v, "base")?)?;
    let phi_v = field(v, "phi")?;
    let phi = if let Some(c) = phi_v.get("eraser") {
        let c = c.as_u64().ok_or_else(|| parse_err("`eraser` must be a component index"))? as usize;
        Phi::Homomorphism(AugmentedAlphabet::new(base.alphabet().clone(), sigma.clone(), c)?)
    } else {
        Phi::Transducer(fst_from(phi_v)?)
    };
    if phi.output() != &sigma {
        return Err(Error::AlphabetMismatch("φ must write the declared output alphabet".into()));
    }
    CotModel::new(base, phi)
}

fn base_to(b: &Base) -> Value {
    match b {
        Base::Pfsa(m) => pfsa_to(m),
        Base::Ppda(m) => ppda_to(m),
        Base::TwoPda(m) => twopda_to(m),
        Base::Ptm(m) => ptm_to(m),
        Base::Rnn(m) => rnn_to(m),
        Base::Transformer(m) => transformer_to(m),
    }
}

fn cot_to(c: &CotModel) -> Value {
    let phi = match &c.phi {
        Phi::Homomorphism(a) => json!({ "eraser": a.output_component }),
        Phi::Transducer(f) => fst_to(f),
    };
    json!({"type": "cot", "sigma": alphabet_to_json(c.phi.output()), "base": base_to(&c.base), "phi": phi})
}

pub fn model_from_json(v: &Value) -> Result<Model> {
    match text(field(v, "type")?, "type")? {
        "pfsa" => pfsa_from(v).map(Model::Pfsa),
        "ppda" => ppda_from(v).map(Model::Ppda),
        "2pda" => twopda_from(v).map(Model::TwoPda),
        "ptm" => ptm_from(v).map(Model::Ptm),
        "fst" => fst_from(v).map(Model::Fst),
        "wfst" => wfst_from(v).map(Model::Wfst),
        "rnn" => rnn_from(v).map(Model::Rnn),
        "transformer" => transformer_from(v).map(Model::Transformer),
        "cot" => cot_from(v).map(|c| Model::Cot(Box::new(c))),
        other => Err(parse_err(format!("unknown model type `{other}`"))),
    }
}

pub fn model_to_json(m: &Model) -> Value {
    match m {
        Model::Pfsa(x) => pfsa_to(x),
        Model::Ppda(x) => ppda_to(x),
        Model::TwoPda(x) => twopda_to(x),
        Model::Ptm(x) => ptm_to(x),
        Model::Rnn(x) => rnn_to(x),
        Model::Transformer(x) => transformer_to(x),
        Model::Cot(c) => cot_to(c),
        Model::Fst(x) => fst_to(x),
        Model::Wfst(x) => wfst_to(x),
    }
}

pub fn parse_model(text: &str) -> Result<Model> {
    let v: Value = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    model_from_json(&v)
}

pub fn read_model(path: &Path) -> Result<Model> {
    let text = std::fs::read_to_string(path).map_err(|e| parse_err(format!("{}: {e}", path.display())))?;
    parse_model(&text)
}

/// Pretty-printed JSON with a trailing newline; keys are sorted, so equal
/// models always produce identical bytes.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn table_to_json(t: &DistributionTable, sigma: &Alphabet) -> Value {
    t.to_json(sigma)
}

pub fn ptm_alphabet_to_json(pa: &PtmAlphabet, bos: &Symbol) -> Value {
    json!({
        "type": "ptm-alphabet",
        "delta": alphabet_to_json(&pa.augmented.delta),
        "sigma": alphabet_to_json(&pa.augmented.sigma),
        "output_component": pa.augmented.output_component,
        "bos": serde_json::to_value(bos).expect("symbol serializes"),
    })
}
