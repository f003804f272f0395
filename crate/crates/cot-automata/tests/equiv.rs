mod common;

use cot_automata::automata::pfsa::reference_a1;
use cot_automata::automata::ptm::reference_m1;
use cot_automata::automata::{Pfsa, PfsaTransition};
use cot_automata::equiv::{
    check_weak_equivalence, enumerate_distribution, random_machine, Machine, MachineKind, SizeBounds, Verdict,
};
use cot_automata::json::model_to_json;
use cot_automata::model::Model;
use cot_automata::rational::{one, rat};
use proptest::prelude::*;

fn tampered_a1() -> Pfsa {
    let a = reference_a1();
    let mut t: Vec<PfsaTransition> = a.transitions().to_vec();
    t[2].weight = rat(1, 4);
    let mut finals = a.finals().to_vec();
    finals[1] = rat(3, 4);
    Pfsa::new(a.alphabet().clone(), a.states().to_vec(), a.initial().to_vec(), finals, t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generators_are_seed_deterministic(seed in any::<u64>()) {
        for kind in [MachineKind::Pfsa, MachineKind::Ppda, MachineKind::TwoPda, MachineKind::Ptm] {
            let json = || model_to_json(&match random_machine(kind, SizeBounds::default(), seed) {
                Machine::Pfsa(m) => Model::Pfsa(m),
                Machine::Ppda(m) => Model::Ppda(m),
                Machine::TwoPda(m) => Model::TwoPda(m),
                Machine::Ptm(m) => Model::Ptm(m),
            });
            prop_assert_eq!(json(), json());
        }
    }

    #[test]
    fn enumerations_never_exceed_one(seed in any::<u64>()) {
        for kind in [MachineKind::Pfsa, MachineKind::Ppda, MachineKind::TwoPda, MachineKind::Ptm] {
            let t = match random_machine(kind, SizeBounds::default(), seed) {
                Machine::Pfsa(m) => enumerate_distribution(&m, 4, 10),
                Machine::Ppda(m) => enumerate_distribution(&m, 4, 10),
                Machine::TwoPda(m) => enumerate_distribution(&m, 4, 10),
                Machine::Ptm(m) => enumerate_distribution(&m, 4, 10),
            }
            .unwrap();
            prop_assert!(t.total() <= one());
        }
    }

    #[test]
    fn every_machine_equals_itself(seed in any::<u64>()) {
        let a = common::pfsa(seed);
        prop_assert_eq!(check_weak_equivalence(&a, &a, 6, 7).unwrap().verdict, Verdict::ExactEqual);
    }
}

#[test]
fn counterexamples_are_length_lex_minimal() {
    let (a, b) = (reference_a1(), tampered_a1());
    let r = check_weak_equivalence(&a, &b, 6, 7).unwrap();
    let first = r.pairs.iter().find(|(_, x, y)| x != y).unwrap();
    match &r.verdict {
        Verdict::Counterexample { string, lhs, rhs } => {
            assert_eq!(string, &first.0);
            assert_eq!((lhs, rhs), (&first.1, &first.2));
            assert_eq!(a.alphabet().render(string), "a");
        }
        v => panic!("expected a counterexample, got {v:?}"),
    }
    assert_eq!(r.verdict.exit_code(), 1);
}

#[test]
fn truncation_is_inconclusive() {
    let m = reference_m1();
    let r = check_weak_equivalence(&m, &m, 4, 2).unwrap();
    assert_eq!(r.verdict, Verdict::EqualUpToTruncation);
    assert_eq!(r.verdict.exit_code(), 2);
    assert_eq!(check_weak_equivalence(&m, &m, 4, 6).unwrap().verdict.exit_code(), 0);
}
