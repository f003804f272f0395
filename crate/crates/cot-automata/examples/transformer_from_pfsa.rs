//! A hard-attention transformer CoT LM built from a PFSA.

use cot_automata::automata::pfsa::reference_a1;
use cot_automata::cot::CotLm;
use cot_automata::equiv::check_weak_equivalence;
use cot_automata::rational::format_rational;
use cot_automata::search::LmRun;
use cot_automata::transduce::Phi;
use cot_automata::transformer::compile_transformer_from_pfsa;

fn main() -> cot_automata::Result<()> {
    let a = reference_a1();
    let (tf, aug) = compile_transformer_from_pfsa(&a)?;
    println!("width {}, {} layers, position free = {}", tf.width(), tf.layers.len(), tf.is_position_free());

    let lm = CotLm::new(LmRun(&tf), Phi::Homomorphism(aug));
    let table = lm.enumerate(3, 5)?;
    for y in table.keys_length_lex() {
        println!("p({:4}) = {}", a.alphabet().render(y), format_rational(&table.entries[y]));
    }
    println!("verdict against the PFSA: {:?}", check_weak_equivalence(&a, &lm, 6, 8)?.verdict);
    Ok(())
}
