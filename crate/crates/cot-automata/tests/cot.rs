mod common;

use cot_automata::cot::{
    augment_ptm_alphabet, determinize_pfsa, determinize_pfsa_single_start, determinize_ppda, sigma_determinize_twopda,
    CotLm,
};
use cot_automata::equiv::{check_weak_equivalence, Verdict};
use cot_automata::transduce::Phi;
use proptest::prelude::*;
use std::collections::HashMap;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pfsa_determinization_is_weakly_equivalent(seed in any::<u64>()) {
        let a = common::pfsa(seed);
        let (d, aug) = determinize_pfsa(&a).unwrap();
        prop_assert!(d.is_transition_deterministic());
        let r = check_weak_equivalence(&a, &CotLm::new(&d, Phi::Homomorphism(aug)), 6, 7).unwrap();
        prop_assert_eq!(r.verdict, Verdict::ExactEqual);

        let (s, aug) = determinize_pfsa_single_start(&a).unwrap();
        prop_assert!(s.is_deterministic());
        let r = check_weak_equivalence(&a, &CotLm::new(&s, Phi::Homomorphism(aug)), 6, 8).unwrap();
        prop_assert_eq!(r.verdict, Verdict::ExactEqual);
    }

    #[test]
    fn ppda_determinization_scans_its_target(seed in any::<u64>()) {
        let p = common::ppda(seed);
        let (d, aug) = determinize_ppda(&p).unwrap();
        for t in d.transitions() {
            prop_assert_eq!(t.scan, Some(t.to));
        }
        // Two source transitions that agree on everything but the push
        // sequence are the only way the result can fail to be deterministic.
        let mut pushes: HashMap<_, Vec<&Vec<usize>>> = HashMap::new();
        for t in p.transitions() {
            pushes.entry((t.from, t.pop, t.scan, t.to)).or_default().push(&t.push);
        }
        let collision = pushes.values().any(|v| v.len() > 1);
        prop_assert_eq!(d.is_deterministic(), !collision);

        let r = check_weak_equivalence(&p, &CotLm::new(&d, Phi::Homomorphism(aug)), 4, 12).unwrap();
        prop_assert!(!matches!(r.verdict, Verdict::Counterexample { .. }), "{:?}", r.verdict);
    }

    #[test]
    fn twopda_determinization_is_sigma_deterministic(seed in any::<u64>()) {
        let p = common::twopda(seed);
        let (d, aug) = sigma_determinize_twopda(&p).unwrap();
        prop_assert!(d.is_sigma_deterministic());
        let r = check_weak_equivalence(&p, &CotLm::new(&d, Phi::Homomorphism(aug)), 4, 12).unwrap();
        prop_assert!(!matches!(r.verdict, Verdict::Counterexample { .. }), "{:?}", r.verdict);
    }

    #[test]
    fn ptm_alphabet_codec_round_trips(seed in any::<u64>()) {
        let pa = augment_ptm_alphabet(&common::ptm(seed)).unwrap();
        for id in 0..pa.augmented.delta.len() {
            prop_assert_eq!(pa.encode(&pa.decode(id)), id);
        }
    }
}
