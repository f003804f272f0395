use clap::{Args, Parser, Subcommand, ValueEnum};
use cot_automata::cot::{
    augment_ptm_alphabet, determinize_pfsa, determinize_pfsa_single_start, determinize_ppda, ptm_bos_symbol,
    sigma_determinize_twopda,
};
use cot_automata::dist::precision_of;
use cot_automata::equiv::{check_weak_equivalence, SampleOutcome};
use cot_automata::json::{model_to_json, ptm_alphabet_to_json, read_model, to_canonical_string};
use cot_automata::model::{Base, CotModel, Model};
use cot_automata::rational::format_rational;
use cot_automata::rnn::{compile_rnn_from_pfsa, extract_pfsa_from_rnn_with_guard, state_guard, ElmanRnnLm};
use cot_automata::search::{sample_index, KeyedLm};
use cot_automata::transduce::Phi;
use cot_automata::transformer::{compile_transformer_from_pfsa, ptm_construction, TransformerLm};
use cot_automata::{Alphabet, Error, LanguageModel, Result, Symbol};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cot-automata", version, about = "Exact probabilistic automata and CoT-augmented neural LMs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutputArg {
    /// Write the result here instead of stdout
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a model file
    Validate { input: PathBuf },
    /// Probability of one string
    Stringsum {
        input: PathBuf,
        /// Symbols separated by spaces, spelled character by character, or a JSON array
        #[arg(long, default_value = "")]
        string: String,
        #[arg(long, default_value_t = 64)]
        step_cap: usize,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Table of all strings up to a length bound
    Enumerate {
        input: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long, default_value_t = 64)]
        step_cap: usize,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Draw strings with a seeded generator
    Sample {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 64)]
        step_cap: usize,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Σ-determinize a machine and wrap it with the eraser φ
    Augment {
        kind: AugmentKind,
        input: PathBuf,
        /// Use one fresh start state so the PFSA is deterministic
        #[arg(long, default_value_t = false)]
        single_start: bool,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Compile a machine into a neural CoT LM
    Compile {
        kind: CompileKind,
        input: PathBuf,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Recover a machine from a neural CoT LM
    Extract {
        kind: ExtractKind,
        input: PathBuf,
        /// Maximum number of distinct hidden states [default: COT_AUTOMATA_GUARD or 10000]
        #[arg(long)]
        state_guard: Option<usize>,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Per-step CSV of a compiled transformer along one PTM branch
    Trace {
        kind: TraceKind,
        input: PathBuf,
        /// Seed for choosing the branch
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated transition indices; overrides --seed
        #[arg(long)]
        branch: Option<String>,
        #[arg(long, default_value_t = 16)]
        max_steps: usize,
        /// Number of most likely next symbols listed per step
        #[arg(long, default_value_t = 3)]
        top: usize,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Exact weak-equivalence check over all strings up to a length bound
    CheckEquiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long, default_value_t = 64)]
        step_cap: usize,
        /// Print the full JSON report instead of the one-line verdict
        #[arg(long, default_value_t = false)]
        report: bool,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Bits needed by the neural representation at each context length
    Precision {
        input: PathBuf,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        #[command(flatten)]
        out: OutputArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AugmentKind {
    Pfsa,
    Ppda,
    #[value(name = "2pda")]
    TwoPda,
    Ptm,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompileKind {
    RnnFromPfsa,
    TfFromPfsa,
    TfFromPtm,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExtractKind {
    PfsaFromRnn,
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceKind {
    TfPtm,
}

fn emit(out: &OutputArg, text: &str) -> Result<()> {
    match &out.output {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Invalid(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: &OutputArg, v: &Value) -> Result<()> {
    emit(out, &to_canonical_string(v))
}

fn parse_string(sigma: &Alphabet, text: &str) -> Result<Vec<usize>> {
    if text.trim_start().starts_with('[') {
        let syms: Vec<Symbol> = serde_json::from_str(text).map_err(|e| Error::Parse(format!("--string: {e}")))?;
        return syms.iter().map(|s| sigma.id_of(s)).collect();
    }
    sigma.parse_string(text)
}

fn symbols_json(sigma: &Alphabet, s: &[usize]) -> Value {
    json!(s.iter().map(|&i| sigma.symbol(i).clone()).collect::<Vec<_>>())
}

fn cot(base: Base, phi: Phi) -> Result<Value> {
    Ok(model_to_json(&Model::Cot(Box::new(CotModel::new(base, phi)?))))
}

fn load_pfsa(p: &Path) -> Result<cot_automata::automata::Pfsa> {
    match read_model(p)? {
        Model::Pfsa(a) => Ok(a),
        m => Err(Error::Invalid(format!("expected a pfsa, found a {}", m.kind()))),
    }
}

fn augment(kind: AugmentKind, input: &Path, single_start: bool) -> Result<Value> {
    let model = read_model(input)?;
    match (kind, model) {
        (AugmentKind::Pfsa, Model::Pfsa(a)) => {
            let (d, aug) = if single_start { determinize_pfsa_single_start(&a)? } else { determinize_pfsa(&a)? };
            cot(Base::Pfsa(d), Phi::Homomorphism(aug))
        }
        (AugmentKind::Ppda, Model::Ppda(p)) => {
            let (d, aug) = determinize_ppda(&p)?;
            cot(Base::Ppda(d), Phi::Homomorphism(aug))
        }
        (AugmentKind::TwoPda, Model::TwoPda(p)) => {
            let (d, aug) = sigma_determinize_twopda(&p)?;
            cot(Base::TwoPda(d), Phi::Homomorphism(aug))
        }
        (AugmentKind::Ptm, Model::Ptm(m)) => Ok(ptm_alphabet_to_json(&augment_ptm_alphabet(&m)?, &ptm_bos_symbol(&m))),
        (_, m) => Err(Error::Invalid(format!("this augmentation does not take a {}", m.kind()))),
    }
}

fn compile(kind: CompileKind, input: &Path) -> Result<Value> {
    match kind {
        CompileKind::RnnFromPfsa => {
            let (r, aug) = compile_rnn_from_pfsa(&load_pfsa(input)?)?;
            cot(Base::Rnn(r), Phi::Homomorphism(aug))
        }
        CompileKind::TfFromPfsa => {
            let (t, aug) = compile_transformer_from_pfsa(&load_pfsa(input)?)?;
            cot(Base::Transformer(t), Phi::Homomorphism(aug))
        }
        CompileKind::TfFromPtm => match read_model(input)? {
            Model::Ptm(m) => {
                let c = ptm_construction(&m)?;
                cot(Base::Transformer(c.to_transformer()?), Phi::Homomorphism(c.alphabet.augmented.clone()))
            }
            m => Err(Error::Invalid(format!("expected a ptm, found a {}", m.kind()))),
        },
    }
}

fn extract(input: &Path, guard: usize) -> Result<Value> {
    match read_model(input)? {
        Model::Cot(c) => match &c.base {
            Base::Rnn(r) => {
                let a = extract_pfsa_from_rnn_with_guard(r, &c.phi.to_fst()?, guard)?;
                Ok(model_to_json(&Model::Pfsa(a)))
            }
            b => Err(Error::Invalid(format!("expected an rnn base, found a {}", b.clone().into_model().kind()))),
        },
        m => Err(Error::Invalid(format!("expected a cot model with an rnn base, found a {}", m.kind()))),
    }
}

fn choose_branch(m: &cot_automata::automata::Ptm, seed: u64, max_steps: usize) -> Result<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cfg = m.initial_configuration();
    let mut branch = Vec::new();
    while branch.len() < max_steps && cfg.state != m.final_state() {
        let choices = m.choices(&cfg);
        let weights: Vec<_> = choices.iter().map(|&t| m.transitions()[t].weight.clone()).collect();
        match sample_index(&weights, rng.next_u64()) {
            Some(i) => {
                branch.push(choices[i]);
                cfg = cot_automata::automata::ptm_step(&cfg, m, choices[i])?;
            }
            None => break,
        }
    }
    Ok(branch)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn trace(input: &Path, seed: u64, branch: Option<&str>, max_steps: usize, top: usize) -> Result<String> {
    let m = match read_model(input)? {
        Model::Ptm(m) => m,
        other => return Err(Error::Invalid(format!("expected a ptm, found a {}", other.kind()))),
    };
    let c = ptm_construction(&m)?;
    let tf = c.to_transformer()?;
    let branch = match branch {
        Some(b) => b
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                let t: usize = s.trim().parse().map_err(|_| Error::Parse(format!("bad transition index `{s}`")))?;
                if t >= m.transitions().len() {
                    return Err(Error::Invalid(format!("transition {t} does not exist")));
                }
                Ok(t)
            })
            .collect::<Result<Vec<_>>>()?,
        None => choose_branch(&m, seed, max_steps)?,
    };
    let lay = c.layout;
    let delta = &tf.alphabet;
    let mut out = String::from("t,q,s,c,ell,top\n");
    let mut st = tf.initial_state()?;
    let mut cfg = m.initial_configuration();
    let mut previous = 0i8;
    for t in 0..=branch.len() {
        let enc = tf.enc(&st)?;
        let idx = enc.iter().position(|x| !num_traits::Zero::is_zero(x)).unwrap_or(0);
        let (q, s) = (idx / 3 / lay.ng, idx / 3 % lay.ng);
        let n = cot_automata::rational::int((t + 1) as i64);
        let cpos = &st.last(1)[lay.c1] * &n;
        let ell = &st.last(2)[lay.l] - cot_automata::rational::one();
        let head = tf.head(&st)?;
        let mut ranked: Vec<(usize, _)> =
            head.iter().cloned().enumerate().filter(|(_, p)| p > &num_traits::Zero::zero()).collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let tops: Vec<String> = ranked
            .iter()
            .take(top)
            .map(|(i, p)| {
                let label = match tf.outputs[*i] {
                    cot_automata::rnn::Output::Eos => cot_automata::alphabet::EOS.to_string(),
                    cot_automata::rnn::Output::Emit(j) => delta.symbol(j).to_string(),
                };
                format!("{label}={}", format_rational(p))
            })
            .collect();
        out.push_str(&format!(
            "{t},{},{},{},{},{}\n",
            csv_field(&m.states()[q]),
            csv_field(&m.tape_alphabet()[s]),
            format_rational(&cpos),
            format_rational(&ell),
            csv_field(&tops.join(" "))
        ));
        if t == branch.len() {
            break;
        }
        let tr = branch[t];
        if !m.choices(&cfg).contains(&tr) {
            return Err(Error::Invalid(format!("transition {tr} is not applicable at step {t}")));
        }
        let sym = c.alphabet.encode_transition(&m, tr, previous);
        cfg = cot_automata::automata::ptm_step(&cfg, &m, tr)?;
        previous = m.transitions()[tr].direction.offset() as i8;
        st = tf.advance(&st, sym)?;
    }
    Ok(out)
}

/// Walk every context with positive probability, merging equal states, and
/// record the widest representation seen at each length.
fn precision_rows<L: KeyedLm>(
    lm: &L,
    max_len: usize,
    repr: impl Fn(&L::State) -> Result<Vec<cot_automata::Rational>>,
) -> Result<Vec<Value>> {
    let mut frontier = vec![lm.initial_state()?];
    let mut rows = Vec::new();
    for len in 1..=max_len {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for s in &frontier {
            let d = lm.next_distribution(s)?;
            for (y, p) in d.probs.iter().enumerate() {
                if num_traits::Zero::is_zero(p) {
                    continue;
                }
                let n = lm.advance(s, y)?;
                if seen.insert(lm.state_key(&n)) {
                    next.push(n);
                }
            }
        }
        if next.len() > state_guard() {
            return Err(Error::StateGuard(state_guard()));
        }
        let bits = next.iter().map(|s| repr(s).map(|v| precision_of(&v))).collect::<Result<Vec<_>>>()?;
        rows.push(json!({"length": len, "states": next.len(), "max_bits": bits.into_iter().max().unwrap_or(0)}));
        frontier = next;
    }
    Ok(rows)
}

fn rnn_precision(r: &ElmanRnnLm, max_len: usize) -> Result<Vec<Value>> {
    precision_rows(r, max_len, |h| Ok(h.clone()))
}

fn tf_precision(t: &TransformerLm, max_len: usize) -> Result<Vec<Value>> {
    precision_rows(t, max_len, |s| {
        let mut v = Vec::new();
        for l in 0..=t.layers.len() {
            v.extend(s.last(l).iter().cloned());
        }
        Ok(v)
    })
}

fn precision(input: &Path, max_len: usize) -> Result<Value> {
    let model = read_model(input)?;
    let base = match model {
        Model::Rnn(r) => Base::Rnn(r),
        Model::Transformer(t) => Base::Transformer(t),
        Model::Cot(c) => c.base,
        m => return Err(Error::Invalid(format!("precision needs a neural model, found a {}", m.kind()))),
    };
    let rows = match &base {
        Base::Rnn(r) => rnn_precision(r, max_len)?,
        Base::Transformer(t) => tf_precision(t, max_len)?,
        b => {
            return Err(Error::Invalid(format!(
                "precision needs a neural model, found a {}",
                b.clone().into_model().kind()
            )))
        }
    };
    let widths: HashSet<u64> = rows.iter().map(|r| r["max_bits"].as_u64().unwrap_or(0)).collect();
    Ok(json!({"lengths": rows, "constant": widths.len() <= 1}))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Validate { input } => {
            let m = read_model(&input)?;
            println!("{}", json!({"valid": true, "type": m.kind()}));
        }
        Command::Stringsum { input, string, step_cap, out } => {
            let v = read_model(&input)?.with_distribution(|d| {
                let y = parse_string(d.sigma(), &string)?;
                d.probability(&y, step_cap)
            })?;
            let mut text = format_rational(&v.value);
            if v.saturated {
                text.push_str(" (lower bound: step cap reached)");
            }
            emit(&out, &format!("{text}\n"))?;
        }
        Command::Enumerate { input, max_len, step_cap, out } => {
            let v = read_model(&input)?.with_distribution(|d| {
                let mut v = d.enumerate_to(max_len, step_cap)?.to_json(d.sigma());
                v["max_len"] = json!(max_len);
                v["step_cap"] = json!(step_cap);
                Ok(v)
            })?;
            emit_json(&out, &v)?;
        }
        Command::Sample { input, seed, count, step_cap, out } => {
            let v = read_model(&input)?.with_distribution(|d| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut samples = Vec::new();
                for _ in 0..count {
                    samples.push(match d.sample(&mut rng, step_cap)? {
                        SampleOutcome::String(s) => json!({"string": symbols_json(d.sigma(), &s)}),
                        SampleOutcome::Truncated => json!({"truncated": true}),
                        SampleOutcome::Undefined => json!({"undefined": true}),
                    });
                }
                Ok(json!({"seed": seed, "step_cap": step_cap, "samples": samples}))
            })?;
            emit_json(&out, &v)?;
        }
        Command::Augment { kind, input, single_start, out } => emit_json(&out, &augment(kind, &input, single_start)?)?,
        Command::Compile { kind, input, out } => emit_json(&out, &compile(kind, &input)?)?,
        Command::Extract { kind: ExtractKind::PfsaFromRnn, input, state_guard: guard, out } => {
            emit_json(&out, &extract(&input, guard.unwrap_or_else(state_guard))?)?
        }
        Command::Trace { kind: TraceKind::TfPtm, input, seed, branch, max_steps, top, out } => {
            emit(&out, &trace(&input, seed, branch.as_deref(), max_steps, top)?)?
        }
        Command::CheckEquiv { a, b, max_len, step_cap, report, out } => {
            let (ma, mb) = (read_model(&a)?, read_model(&b)?);
            let (rep, sigma) = ma.with_distribution(|da| {
                mb.with_distribution(|db| Ok((check_weak_equivalence(da, db, max_len, step_cap)?, da.sigma().clone())))
            })?;
            let code = rep.verdict.exit_code() as u8;
            if report {
                emit_json(&out, &rep.to_json(&sigma))?;
            } else {
                let v = &rep.to_json(&sigma)["verdict"];
                let mut line = v["kind"].as_str().unwrap_or("unknown").to_string();
                if let (Some(y), Some(l), Some(r)) = (v["string"].as_str(), v["lhs"].as_str(), v["rhs"].as_str()) {
                    line = format!("{line} string={y:?} lhs={l} rhs={r}");
                }
                emit(&out, &format!("{line}\n"))?;
            }
            return Ok(code);
        }
        Command::Precision { input, max_len, out } => emit_json(&out, &precision(&input, max_len)?)?,
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let record = json!({"error": {"kind": "usage", "message": e.to_string().trim_end()}});
            eprintln!("{record}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", json!({"error": {"kind": e.kind(), "message": e.to_string()}}));
            ExitCode::from(2)
        }
    }
}
