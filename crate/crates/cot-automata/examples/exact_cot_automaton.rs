//! The exact CoT distribution of a PFSA under a transducer φ, computed by
//! lifting, composing with φ⁻¹ and projecting, then removing ε-arcs.

use cot_automata::alphabet::Alphabet;
use cot_automata::automata::{Pfsa, PfsaTransition};
use cot_automata::cot::{cot_exact_automaton, cot_probability, CotLm};
use cot_automata::rational::{format_rational, rat};
use cot_automata::transduce::{make_marker_split_fst, Phi};

fn main() -> cot_automata::Result<()> {
    // A model that thinks in a's and b's, then writes `#` and an answer.
    let sigma = Alphabet::from_names(&["a", "b", "#"])?;
    let t = |from, symbol, weight, to| PfsaTransition { from, symbol, weight, to };
    let base = Pfsa::new(
        sigma.clone(),
        vec!["think".into(), "answer".into()],
        vec![rat(1, 1), rat(0, 1)],
        vec![rat(0, 1), rat(1, 2)],
        vec![t(0, 0, rat(1, 4), 0), t(0, 1, rat(1, 4), 0), t(0, 2, rat(1, 2), 1), t(1, 0, rat(1, 2), 1)],
    )?;
    let phi = make_marker_split_fst(&sigma, 2)?;

    let exact = cot_exact_automaton(&base, &phi)?.remove_epsilon()?;
    let lm = CotLm::new(&base, Phi::Transducer(phi));
    for text in ["", "a", "aa", "b"] {
        let y = sigma.parse_string(text)?;
        let p = exact.stringsum(&y)?;
        let bounded = cot_probability(&lm, &y, 40)?;
        println!(
            "p({text:?}) = {}   lower bound from 40-step run search: {}",
            format_rational(&p),
            format_rational(&bounded.value)
        );
    }
    Ok(())
}
