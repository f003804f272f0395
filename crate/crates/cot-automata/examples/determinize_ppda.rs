//! Σ-determinization of a probabilistic pushdown automaton.

use cot_automata::alphabet::Alphabet;
use cot_automata::automata::{Ppda, PpdaTransition};
use cot_automata::cot::{determinize_ppda, CotLm};
use cot_automata::equiv::check_weak_equivalence;
use cot_automata::rational::{format_rational, rat};
use cot_automata::transduce::Phi;

fn main() -> cot_automata::Result<()> {
    // aⁿbⁿ with a geometric choice of n; `push[0]` becomes the top.
    let sigma = Alphabet::from_names(&["a", "b"])?;
    let t = |from, pop, scan, weight, to, push: Vec<usize>| PpdaTransition { from, pop, scan, weight, to, push };
    let p = Ppda::new(
        sigma,
        vec!["push".into(), "pop".into(), "done".into()],
        vec!["S".into(), "A".into()],
        vec![
            t(0, 0, Some(0), rat(1, 2), 0, vec![1, 0]),
            t(0, 1, Some(0), rat(1, 2), 0, vec![1, 1]),
            t(0, 0, None, rat(1, 2), 2, vec![]),
            t(0, 1, Some(1), rat(1, 2), 1, vec![]),
            t(1, 1, Some(1), rat(1, 1), 1, vec![]),
            t(1, 0, None, rat(1, 1), 2, vec![]),
        ],
        0,
        0,
        vec![2],
    )?;
    let table = p.enumerate(6, 32)?;
    for y in table.keys_length_lex() {
        println!("p({:6}) = {}", p.alphabet().render(y), format_rational(&table.entries[y]));
    }

    let (d, aug) = determinize_ppda(&p)?;
    println!("\ndeterminized: {} states, {} augmented symbols", d.states().len(), d.alphabet().len());
    let lm = CotLm::new(&d, Phi::Homomorphism(aug));
    let report = check_weak_equivalence(&p, &lm, 6, 32)?;
    println!("verdict: {:?}", report.verdict);
    Ok(())
}
