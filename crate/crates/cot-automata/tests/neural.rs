mod common;

use cot_automata::automata::ptm_step;
use cot_automata::cot::{eraser_phi, CotLm};
use cot_automata::equiv::{check_transformer_ptm_trace, check_weak_equivalence, Verdict};
use cot_automata::rational::{one, rat, zero, Matrix};
use cot_automata::rnn::{compile_rnn_from_pfsa, extract_pfsa_from_rnn, extract_pfsa_from_rnn_with_guard};
use cot_automata::search::{sample_index, LmRun};
use cot_automata::transduce::Phi;
use cot_automata::transformer::{
    attention_layer_apply, compile_transformer_from_pfsa, compile_transformer_from_ptm, positional_tail, Scoring,
    TransformerLayer,
};
use cot_automata::{precision_of, Error, LanguageModel, Rational};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec((-6i64..6, 1i64..5), rows * cols).prop_map(move |v| {
        let mut m = Matrix::zeros(rows, cols);
        for (i, (n, d)) in v.into_iter().enumerate() {
            m.set(i / cols, i % cols, rat(n, d));
        }
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn compiled_rnn_is_weakly_equivalent_and_round_trips(seed in any::<u64>()) {
        let a = common::pfsa(seed);
        let (rnn, aug) = compile_rnn_from_pfsa(&a).unwrap();
        let (phi, fst) = eraser_phi(&aug).unwrap();
        let r = check_weak_equivalence(&a, &CotLm::new(LmRun(&rnn), phi), 6, 8).unwrap();
        prop_assert_eq!(r.verdict, Verdict::ExactEqual);
        let back = extract_pfsa_from_rnn(&rnn, &fst).unwrap();
        prop_assert_eq!(check_weak_equivalence(&a, &back, 6, 7).unwrap().verdict, Verdict::ExactEqual);
    }

    #[test]
    fn compiled_rnn_states_are_one_hot_with_exact_distributions(seed in any::<u64>()) {
        let (rnn, _) = compile_rnn_from_pfsa(&common::pfsa(seed)).unwrap();
        let mut frontier = vec![rnn.initial_state().unwrap()];
        let mut bits = HashSet::new();
        for _ in 0..12 {
            let mut next = Vec::new();
            let mut seen = HashSet::new();
            for h in &frontier {
                prop_assert_eq!(h.iter().filter(|x| !x.is_zero()).count(), 1);
                prop_assert!(h.iter().all(|x| x.is_zero() || x == &one()));
                bits.insert(precision_of(h));
                let d = rnn.next_distribution(h).unwrap();
                prop_assert_eq!(d.total(), one());
                for (y, p) in d.probs.iter().enumerate() {
                    if !p.is_zero() {
                        let n = rnn.advance(h, y).unwrap();
                        if seen.insert(n.clone()) {
                            next.push(n);
                        }
                    }
                }
            }
            frontier = next;
        }
        prop_assert_eq!(bits.len(), 1);
    }

    #[test]
    fn compiled_pfsa_transformer_is_weakly_equivalent(seed in any::<u64>()) {
        let a = common::pfsa(seed);
        let (tf, aug) = compile_transformer_from_pfsa(&a).unwrap();
        let r = check_weak_equivalence(&a, &CotLm::new(LmRun(&tf), Phi::Homomorphism(aug)), 6, 8).unwrap();
        prop_assert_eq!(r.verdict, Verdict::ExactEqual);
    }

    #[test]
    fn zero_value_layers_are_the_identity(q in matrix(2, 3), k in matrix(2, 3), x in prop::collection::vec(matrix(1, 3), 1..5)) {
        let layer = TransformerLayer { query: q, key: k, value: Matrix::zeros(3, 3), output: None, scoring: Scoring::Dot, unique_argmax: false };
        let rows: Vec<Vec<Rational>> = x.iter().map(|m| m.row(0).to_vec()).collect();
        prop_assert_eq!(attention_layer_apply(&layer, &rows).unwrap(), rows);
    }
}

#[test]
fn ptm_transformer_follows_sampled_branches() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for seed in 0..20 {
        let m = common::ptm(3000 + seed);
        let (tf, _) = compile_transformer_from_ptm(&m).unwrap();
        for _ in 0..4 {
            let mut cfg = m.initial_configuration();
            let mut branch = Vec::new();
            while branch.len() < 15 && cfg.state != m.final_state() {
                let choices = m.choices(&cfg);
                let w: Vec<Rational> = choices.iter().map(|&t| m.transitions()[t].weight.clone()).collect();
                let Some(i) = sample_index(&w, rng.next_u64()) else { break };
                branch.push(choices[i]);
                cfg = ptm_step(&cfg, &m, choices[i]).unwrap();
            }
            let report = check_transformer_ptm_trace(&m, &tf, &branch).unwrap();
            assert!(report.all_ok(), "machine {seed}: {:?}", report.first_mismatch);
            assert_eq!(report.steps.len(), branch.len() + 1);
        }
    }
}

#[test]
fn positional_precision_grows_logarithmically() {
    for k in 1..12u32 {
        let t = (1usize << k) - 1;
        assert_eq!(precision_of(&positional_tail(t)), 2 * k as u64);
    }
}

#[test]
fn extraction_respects_the_state_guard() {
    let a = common::pfsa(5);
    let (rnn, aug) = compile_rnn_from_pfsa(&a).unwrap();
    let (_, fst) = eraser_phi(&aug).unwrap();
    assert!(matches!(extract_pfsa_from_rnn_with_guard(&rnn, &fst, 1), Err(Error::StateGuard(1))));
}

#[test]
fn rnn_distribution_at_bos_matches_the_initial_weights() {
    let a = cot_automata::automata::pfsa::reference_a1();
    let (rnn, aug) = compile_rnn_from_pfsa(&a).unwrap();
    let d = rnn.next_distribution(&rnn.initial_state().unwrap()).unwrap();
    let positive: Vec<usize> = (0..d.probs.len()).filter(|&i| !d.probs[i].is_zero()).collect();
    assert_eq!(d.eos, zero());
    assert_eq!(positive.len(), 1);
    assert_eq!(aug.erase(&positive), Some(vec![]));
}
