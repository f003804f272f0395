mod common;

use cot_automata::automata::pfsa::reference_a1;
use cot_automata::automata::ptm::reference_m1;
use cot_automata::automata::{ptm_truncated_distribution, Pfsa};
use cot_automata::cot::determinize_pfsa_single_start;
use cot_automata::rational::{int, one, rat, zero};
use cot_automata::Rational;
use num_traits::Signed;
use proptest::prelude::*;

/// Path weights for `y` from an explicit walk over every path, plus the
/// number of positive-weight paths.
fn brute_force(a: &Pfsa, y: &[usize]) -> (Rational, usize) {
    fn walk(a: &Pfsa, q: usize, rest: &[usize], w: Rational, acc: &mut (Rational, usize)) {
        if rest.is_empty() {
            let f = &w * &a.finals()[q];
            if f.is_positive() {
                acc.0 += f;
                acc.1 += 1;
            }
            return;
        }
        for t in a.outgoing(q).filter(|t| t.symbol == rest[0]) {
            walk(a, t.to, &rest[1..], &w * &t.weight, acc);
        }
    }
    let mut acc = (zero(), 0);
    for (q, w) in a.initial().iter().enumerate() {
        if w.is_positive() {
            walk(a, q, y, w.clone(), &mut acc);
        }
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn enumeration_and_live_prefix_mass_sum_to_one(seed in any::<u64>(), len in 0usize..7) {
        let a = common::pfsa(seed);
        let t = a.enumerate(len);
        prop_assert_eq!(t.total() + &t.residual_mass, one());
    }

    #[test]
    fn forward_matches_path_enumeration(seed in any::<u64>()) {
        let a = common::pfsa(seed);
        for y in common::strings(a.alphabet().len(), 6) {
            prop_assert_eq!(a.stringsum(&y), brute_force(&a, &y).0);
        }
    }

    #[test]
    fn deterministic_machines_have_at_most_one_path(seed in any::<u64>()) {
        let (d, _) = determinize_pfsa_single_start(&common::pfsa(seed)).unwrap();
        prop_assert!(d.is_deterministic());
        for y in common::strings(d.alphabet().len(), 4) {
            prop_assert!(brute_force(&d, &y).1 <= 1);
        }
    }

    #[test]
    fn ptm_truncations_are_monotone(seed in any::<u64>()) {
        let m = common::ptm(seed);
        let mut previous = ptm_truncated_distribution(&m, 0).unwrap();
        for cap in 1..=8 {
            let t = ptm_truncated_distribution(&m, cap).unwrap();
            prop_assert_eq!(t.total() + &t.residual_mass, one());
            prop_assert!(t.residual_mass <= previous.residual_mass);
            for (y, p) in &previous.entries {
                prop_assert!(&t.get(y) >= p);
            }
            previous = t;
        }
    }

    #[test]
    fn pushdown_enumerations_are_semimeasures(seed in any::<u64>()) {
        let p = common::ppda(seed);
        let t = p.enumerate(4, 12).unwrap();
        prop_assert!(t.total() + &t.residual_mass <= one());
        let q = common::twopda(seed);
        let t = q.enumerate(4, 12).unwrap();
        prop_assert!(t.total() + &t.residual_mass <= one());
    }
}

#[test]
fn a1_stringsums() {
    let a = reference_a1();
    let s = |text: &str| a.stringsum(&a.alphabet().parse_string(text).unwrap());
    assert_eq!(s(""), rat(1, 4));
    assert_eq!(s("a"), rat(1, 4));
    assert_eq!(s("ab"), rat(1, 16));
    assert_eq!(s("ba"), zero());
    assert!(!a.is_deterministic());
}

#[test]
fn m1_is_geometric() {
    let m = reference_m1();
    for cap in 1..=10 {
        let t = ptm_truncated_distribution(&m, cap).unwrap();
        let mut p = rat(1, 2);
        for n in 0..cap {
            assert_eq!(t.get(&vec![0; n]), p);
            p /= int(2);
        }
        assert_eq!(t.residual_mass, p * int(2));
    }
}

#[test]
fn m1_cap_three() {
    let t = ptm_truncated_distribution(&reference_m1(), 3).unwrap();
    assert_eq!(t.entries.len(), 3);
    assert_eq!(t.get(&[0, 0]), rat(1, 8));
    assert_eq!(t.residual_mass, rat(1, 8));
    assert!(!t.get(&[0, 0, 0]).is_positive());
}
