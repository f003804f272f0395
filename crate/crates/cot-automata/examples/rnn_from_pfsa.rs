//! Compile a PFSA into a constant-precision Heaviside Elman RNN whose CoT
//! output matches the PFSA, then recover a PFSA from the RNN.

use cot_automata::automata::pfsa::reference_a1;
use cot_automata::cot::{eraser_phi, CotLm};
use cot_automata::equiv::{check_weak_equivalence, Verdict};
use cot_automata::rnn::{compile_rnn_from_pfsa, extract_pfsa_from_rnn};
use cot_automata::search::LmRun;
use cot_automata::{precision_of, LanguageModel};

fn main() -> cot_automata::Result<()> {
    let a = reference_a1();
    let (rnn, aug) = compile_rnn_from_pfsa(&a)?;
    println!("hidden size {} over {} CoT symbols", rnn.hidden_size(), aug.delta.len());

    let (phi, fst) = eraser_phi(&aug)?;
    let lm = CotLm::new(LmRun(&rnn), phi);
    let report = check_weak_equivalence(&a, &lm, 6, 8)?;
    println!("weakly equivalent up to length 6: {}", report.verdict == Verdict::ExactEqual);

    let mut h = rnn.initial_state()?;
    for step in 1..=6 {
        let d = rnn.next_distribution(&h)?;
        let next = d.probs.iter().position(|p| p > &num_traits::Zero::zero()).unwrap_or(0);
        h = rnn.advance(&h, next)?;
        println!("step {step}: precision_of(h) = {} bits", precision_of(&h));
    }

    let back = extract_pfsa_from_rnn(&rnn, &fst)?;
    println!("\nextracted PFSA: {} states", back.num_states());
    let report = check_weak_equivalence(&a, &back, 6, 8)?;
    println!("extracted PFSA equals the original: {}", report.verdict == Verdict::ExactEqual);
    Ok(())
}
