//! Σ-determinization of a non-deterministic PFSA and the eraser φ that
//! recovers the original distribution.

use cot_automata::automata::pfsa::reference_a1;
use cot_automata::cot::{determinize_pfsa, determinize_pfsa_single_start, CotLm};
use cot_automata::equiv::{check_weak_equivalence, Verdict};
use cot_automata::rational::format_rational;
use cot_automata::transduce::Phi;

fn main() -> cot_automata::Result<()> {
    let a = reference_a1();
    println!("original deterministic: {}", a.is_deterministic());

    for (label, (d, aug)) in [("product", determinize_pfsa(&a)?), ("single start", determinize_pfsa_single_start(&a)?)]
    {
        println!(
            "\n{label}: {} states over {} augmented symbols, deterministic = {}",
            d.num_states(),
            d.alphabet().len(),
            d.is_deterministic()
        );
        for s in d.alphabet().symbols() {
            print!(" {s}");
        }
        println!();
        let lm = CotLm::new(&d, Phi::Homomorphism(aug));
        let report = check_weak_equivalence(&a, &lm, 6, 8)?;
        println!("weakly equivalent up to length 6: {}", report.verdict == Verdict::ExactEqual);
        let ab = a.alphabet().parse_string("ab")?;
        println!("p(ab) through the eraser: {}", format_rational(&lm.enumerate(2, 4)?.get(&ab)));
    }
    Ok(())
}
