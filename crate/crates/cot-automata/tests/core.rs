mod common;

use cot_automata::rational::{int, one, rat, zero};
use cot_automata::rnn::compile_rnn_from_pfsa;
use cot_automata::{hardmax, lm_string_probability, precision_of, sparsemax, Rational};
use num_traits::Signed;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..40, 1i64..17).prop_map(|(n, d)| rat(n, d))
}

fn simplex_point() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(0i64..9, 1..7).prop_filter("needs positive mass", |v| v.iter().any(|&x| x > 0)).prop_map(
        |v| {
            let total: i64 = v.iter().sum();
            v.into_iter().map(|x| rat(x, total)).collect()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sparsemax_is_identity_on_the_simplex(p in simplex_point()) {
        prop_assert_eq!(sparsemax(&p), p);
    }

    #[test]
    fn sparsemax_lands_on_the_simplex(x in prop::collection::vec(rational(), 1..8)) {
        let p = sparsemax(&x);
        prop_assert_eq!(p.iter().fold(zero(), |a, b| a + b), one());
        prop_assert!(p.iter().all(|v| !v.is_negative()));
        prop_assert_eq!(sparsemax(&p), p);
    }

    #[test]
    fn sparsemax_ignores_common_shifts(x in prop::collection::vec(rational(), 1..8), c in rational()) {
        let shifted: Vec<Rational> = x.iter().map(|v| v + &c).collect();
        prop_assert_eq!(sparsemax(&shifted), sparsemax(&x));
    }

    #[test]
    fn hardmax_sums_to_one_and_ignores_shifts(x in prop::collection::vec(rational(), 1..8), c in rational()) {
        let h = hardmax(&x);
        prop_assert_eq!(h.iter().fold(zero(), |a, b| a + b), one());
        let shifted: Vec<Rational> = x.iter().map(|v| v + &c).collect();
        prop_assert_eq!(hardmax(&shifted), h);
    }

    #[test]
    fn precision_is_permutation_invariant(x in prop::collection::vec(rational(), 0..8), k in 0usize..8) {
        let mut y = x.clone();
        y.reverse();
        if !y.is_empty() {
            let k = k % y.len();
            y.rotate_left(k);
        }
        prop_assert_eq!(precision_of(&x), precision_of(&y));
    }

    #[test]
    fn pfsa_semimeasure_up_to_length_six(seed in 0u64..10_000) {
        let a = common::pfsa(seed);
        let total = common::strings(a.alphabet().len(), 6)
            .iter()
            .map(|y| lm_string_probability(&a, y).unwrap())
            .fold(zero(), |x, y| x + y);
        prop_assert!(total <= one());
        prop_assert_eq!(total, a.enumerate(6).total());
    }
}

#[test]
fn simplex_fixed_points() {
    let p = vec![rat(1, 2), rat(1, 4), rat(1, 4)];
    assert_eq!(sparsemax(&p), p);
    assert_eq!(sparsemax(&[int(3), int(1), int(0)]), vec![one(), zero(), zero()]);
    assert_eq!(sparsemax(&[rat(1, 3), rat(1, 2), int(-1)]), vec![rat(5, 12), rat(7, 12), zero()]);
}

#[test]
fn precision_counts_numerator_and_denominator_bits() {
    assert_eq!(precision_of(&[one(), zero()]), 0);
    assert_eq!(precision_of(&[rat(1, 4)]), 2);
    assert_eq!(precision_of(&[rat(5, 12)]), 3 + 4);
}

#[test]
fn compiled_rnn_is_a_semimeasure() {
    let a = common::pfsa(11);
    let (rnn, aug) = compile_rnn_from_pfsa(&a).unwrap();
    let total = common::strings(aug.delta.len(), 4)
        .iter()
        .map(|y| lm_string_probability(&rnn, y).unwrap())
        .fold(zero(), |x, y| x + y);
    assert!(total <= one());
}
