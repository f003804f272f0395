//! Σ-determinization of random two-stack pushdown automata.

use cot_automata::cot::{sigma_determinize_twopda, CotLm};
use cot_automata::equiv::{check_weak_equivalence, random_machine, Machine, MachineKind, SizeBounds};
use cot_automata::transduce::Phi;

fn main() -> cot_automata::Result<()> {
    for seed in 0..5 {
        let Machine::TwoPda(p) = random_machine(MachineKind::TwoPda, SizeBounds::default(), seed) else {
            unreachable!()
        };
        let (d, aug) = sigma_determinize_twopda(&p)?;
        let lm = CotLm::new(&d, Phi::Homomorphism(aug));
        let report = check_weak_equivalence(&p, &lm, 4, 12)?;
        println!(
            "seed {seed}: {} transitions, Σ-deterministic after tagging = {}, verdict {:?}",
            p.transitions().len(),
            d.is_sigma_deterministic(),
            report.verdict
        );
    }
    Ok(())
}
