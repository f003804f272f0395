//! Simulate a probabilistic Turing machine with a two-layer hard-attention
//! transformer and compare every step against the machine itself.

use cot_automata::automata::ptm::reference_m1;
use cot_automata::automata::ptm_truncated_distribution;
use cot_automata::cot::CotLm;
use cot_automata::equiv::{check_transformer_ptm_tree, random_machine, Machine, MachineKind, SizeBounds};
use cot_automata::rational::format_rational;
use cot_automata::search::{Bound, LmRun};
use cot_automata::transduce::Phi;
use cot_automata::transformer::ptm_construction;

fn main() -> cot_automata::Result<()> {
    let m = reference_m1();
    let c = ptm_construction(&m)?;
    let tf = c.to_transformer()?;
    println!("model width {}, CoT alphabet of {} symbols", tf.width(), tf.alphabet.len());

    let lm = CotLm::new(LmRun(&tf), Phi::Homomorphism(c.alphabet.augmented.clone()));
    let exploration = lm.explore(Bound::MaxLen(4), 4)?;
    for cap in 1..=4 {
        let want = ptm_truncated_distribution(&m, cap)?;
        let got = exploration.table(cap);
        println!(
            "cap {cap}: p(aⁿ) = [{}], residual {}, matches the machine: {}",
            got.keys_length_lex().iter().map(|y| format_rational(&got.entries[*y])).collect::<Vec<_>>().join(", "),
            format_rational(&got.residual_mass),
            got.entries == want.entries && got.residual_mass == want.residual_mass
        );
    }

    for seed in 0..3 {
        let Machine::Ptm(r) = random_machine(MachineKind::Ptm, SizeBounds::default(), 1000 + seed) else {
            unreachable!()
        };
        let tf = ptm_construction(&r)?.to_transformer()?;
        let report = check_transformer_ptm_tree(&r, &tf, 6)?;
        println!("random PTM {seed}: {} nodes checked, mismatch {:?}", report.nodes, report.first_mismatch);
    }
    Ok(())
}
