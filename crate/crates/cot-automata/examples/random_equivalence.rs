//! Seeded random machines and the exact weak-equivalence checker,
//! including a deliberate counterexample.

use cot_automata::cot::{determinize_pfsa, CotLm};
use cot_automata::equiv::{check_weak_equivalence, random_machine, Machine, MachineKind, SizeBounds};
use cot_automata::transduce::Phi;

fn pfsa(seed: u64) -> cot_automata::automata::Pfsa {
    match random_machine(MachineKind::Pfsa, SizeBounds::default(), seed) {
        Machine::Pfsa(a) => a,
        _ => unreachable!(),
    }
}

fn main() -> cot_automata::Result<()> {
    for seed in 0..5 {
        let a = pfsa(seed);
        let (d, aug) = determinize_pfsa(&a)?;
        let lm = CotLm::new(&d, Phi::Homomorphism(aug));
        let report = check_weak_equivalence(&a, &lm, 6, 7)?;
        println!("seed {seed}: {} states, verdict {:?}", a.num_states(), report.verdict);
    }
    let report = check_weak_equivalence(&pfsa(0), &pfsa(1), 6, 7)?;
    println!("\ntwo unrelated machines: {}", report.to_json(pfsa(0).alphabet())["verdict"]);
    Ok(())
}
