//! Cross-module invariants: exhaustive sweeps at desk scale plus randomized
//! property checks for the predicate hierarchy and the root-counting engine.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use proptest::prelude::*;
use qstirling::{
    binomial_sum_identity, block_to_half_edge, catalan, count_distinct_real_roots, des,
    enumerate_block_trees, enumerate_half_edge_trees, enumerate_words, eulerian_polynomial,
    expand_series, factorial, is_quasi_stirling, is_real_rooted, is_stirling,
    quasi_stirling_polynomial, tree_polynomial, verify_identity, word_count, IntPoly, Label,
    Multiset, PolyMethod, Word,
};

const CAP: u32 = 16;

fn compositions_of(total: u32) -> Vec<Multiset> {
    fn rec(left: u32, parts: &mut Vec<u32>, out: &mut Vec<Multiset>) {
        if left == 0 {
            out.push(Multiset::new(parts.clone()).unwrap());
            return;
        }
        for part in 1..=left {
            parts.push(part);
            rec(left - part, parts, out);
            parts.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, &mut Vec::new(), &mut out);
    out
}

#[test]
fn values_are_shareable_across_threads() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<Multiset>();
    assert_send_sync::<Word>();
    assert_send_sync::<IntPoly>();
}

#[test]
fn stirling_words_are_quasi_stirling() {
    for total in 1..=8u32 {
        for spec in compositions_of(total) {
            for w in enumerate_words(&spec).filter(is_stirling) {
                assert!(
                    is_quasi_stirling(&w),
                    "stirling but not quasi-stirling: {w}"
                );
            }
        }
    }
}

#[test]
fn repeated_ones_make_the_predicates_agree() {
    // multisets {1^k, 2, ..., n}: only the value 1 repeats
    for k in 1..=4u32 {
        for n in 1..=4usize {
            let mut mult = vec![1u32; n];
            mult[0] = k;
            let spec = Multiset::new(mult).unwrap();
            for w in enumerate_words(&spec) {
                assert_eq!(is_quasi_stirling(&w), is_stirling(&w), "disagree on {w}");
            }
        }
    }
}

#[test]
fn enumeration_is_complete_distinct_and_valid() {
    for total in 1..=6u32 {
        for spec in compositions_of(total) {
            let words: Vec<Word> = enumerate_words(&spec).collect();
            assert_eq!(BigInt::from(words.len()), word_count(&spec));
            let distinct: BTreeSet<&Word> = words.iter().collect();
            assert_eq!(distinct.len(), words.len());
            for w in &words {
                assert!(w.matches(&spec));
                assert!(des(w).unwrap() >= 1);
            }
        }
    }
}

#[test]
fn equal_pair_counts_follow_the_closed_forms() {
    // {1^2, ..., n^2}: n!*C_n words in total, (n+1)^(n-1) with the top statistic
    for n in 1..=4u32 {
        let spec = Multiset::new(vec![2; n as usize]).unwrap();
        let words: Vec<Word> = enumerate_words(&spec).filter(is_quasi_stirling).collect();
        assert_eq!(
            BigInt::from(words.len()),
            factorial(n as u64) * catalan(n as u64)
        );
        let top = words
            .iter()
            .filter(|w| des(w).unwrap() == n as usize)
            .count();
        assert_eq!(BigInt::from(top), BigInt::from(n + 1).pow(n - 1));
    }
}

#[test]
fn polynomial_basics_hold_across_small_multisets() {
    for total in 1..=7u32 {
        for spec in compositions_of(total) {
            let by_words = quasi_stirling_polynomial(&spec, PolyMethod::Words, CAP).unwrap();
            let by_trees = quasi_stirling_polynomial(&spec, PolyMethod::Trees, CAP).unwrap();
            assert_eq!(by_words, by_trees, "methods disagree on {spec}");
            assert_eq!(by_words.coeff(0), BigInt::from(0));
            assert!(by_words.coeffs().iter().all(|c| c >= &BigInt::from(0)));
            let count = enumerate_words(&spec).filter(is_quasi_stirling).count();
            assert_eq!(by_words.eval_at_one(), BigInt::from(count));
        }
    }
}

#[test]
fn series_coefficients_count_wall_trees() {
    for total in 1..=5u32 {
        for spec in compositions_of(total) {
            let p = tree_polynomial(&spec, CAP).unwrap();
            let prefix = expand_series(&p, spec.total(), 5);
            for (m, c) in prefix.coeffs.iter().enumerate() {
                let trees = enumerate_half_edge_trees(&spec, m, CAP).unwrap();
                assert_eq!(BigInt::from(trees.len()), *c, "mismatch at {spec}, m={m}");
            }
        }
    }
}

#[test]
fn wall_rewriting_conserves_the_block_count() {
    for total in 1..=4u32 {
        for spec in compositions_of(total) {
            for m in 0..=4usize {
                for bt in enumerate_block_trees(&spec, m, CAP).unwrap() {
                    let h = block_to_half_edge(&spec, &bt).unwrap();
                    assert_eq!(h.half_edges(), bt.block_count());
                    let unlabeled = count_unlabeled(h.tree());
                    assert_eq!(unlabeled, m);
                }
            }
        }
    }
}

fn count_unlabeled(t: &qstirling::Tree) -> usize {
    let own = usize::from(t.label == Label::Unlabeled);
    own + t.children.iter().map(count_unlabeled).sum::<usize>()
}

#[test]
fn eulerian_polynomials_have_distinct_nonpositive_real_roots() {
    for n in 1..=8usize {
        let report = is_real_rooted(&eulerian_polynomial(n)).unwrap();
        assert!(report.all_real && report.all_nonpositive, "n={n}");
        assert_eq!(report.distinct_real_roots, n - 1, "n={n}");
    }
}

fn small_multiset() -> impl Strategy<Value = Multiset> {
    prop::collection::vec(1..=3u32, 1..=4).prop_map(|m| Multiset::new(m).unwrap())
}

fn word_of(spec: &Multiset) -> impl Strategy<Value = Word> {
    let mut values = Vec::new();
    for v in spec.values() {
        values.extend(std::iter::repeat_n(v, spec.multiplicity(v) as usize));
    }
    Just(values)
        .prop_shuffle()
        .prop_map(|v| Word::new(v).unwrap())
}

proptest! {
    #[test]
    fn prop_predicate_hierarchy(w in small_multiset().prop_flat_map(|s| word_of(&s))) {
        if is_stirling(&w) {
            prop_assert!(is_quasi_stirling(&w));
        }
        prop_assert!(des(&w).unwrap() >= 1);
    }

    #[test]
    fn prop_text_forms_round_trip(spec in small_multiset()) {
        let text = spec.to_string();
        prop_assert_eq!(text.parse::<Multiset>().unwrap(), spec);
    }

    #[test]
    fn prop_word_text_round_trips(w in small_multiset().prop_flat_map(|s| word_of(&s))) {
        let text = w.to_string();
        prop_assert_eq!(text.parse::<Word>().unwrap(), w);
    }

    #[test]
    fn prop_sum_identity(n in 1..=60u64, m in 1..=60u64) {
        prop_assert!(binomial_sum_identity(n, m).equal);
    }

    #[test]
    fn prop_sturm_counts_constructed_roots(roots in prop::collection::btree_set(0..=30u32, 1..=5)) {
        // p = prod (t + r) over distinct r >= 0: every root real and nonpositive
        let mut p = IntPoly::one();
        for &r in &roots {
            p = &p * &IntPoly::from_i64(&[r as i64, 1]);
        }
        prop_assert_eq!(count_distinct_real_roots(&p).unwrap(), roots.len());
        let report = is_real_rooted(&p).unwrap();
        prop_assert!(report.all_real && report.all_nonpositive);
    }

    #[test]
    fn prop_positive_roots_are_flagged(roots in prop::collection::btree_set(1..=30u32, 1..=5)) {
        // p = prod (t - r) over distinct r > 0: real-rooted but not nonpositive
        let mut p = IntPoly::one();
        for &r in &roots {
            p = &p * &IntPoly::from_i64(&[-(r as i64), 1]);
        }
        let report = is_real_rooted(&p).unwrap();
        prop_assert!(report.all_real);
        prop_assert!(!report.all_nonpositive);
    }

    #[test]
    fn prop_identity_report_passes(spec in small_multiset()) {
        prop_assert!(verify_identity(&spec, 6, CAP).unwrap().pass);
    }
}
