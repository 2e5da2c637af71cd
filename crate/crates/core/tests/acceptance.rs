//! End-to-end acceptance checks. Each test covers one advertised guarantee
//! and prints a single pass/fail line (visible with `--nocapture`).

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use qstirling::{
    binomial, binomial_sum_identity, block_to_half_edge, catalan, cdes, closed_form_coefficient,
    decode_block_tree, des, encode_block_tree, ends, enumerate_block_trees, enumerate_code_pairs,
    enumerate_half_edge_trees, enumerate_words, eulerian_polynomial, expand_series, factorial,
    half_edge_to_block, is_log_concave, is_quasi_stirling, is_real_rooted, is_unimodal,
    quasi_stirling_polynomial, stirling_reduction, tree_ends, tree_to_word, verify_identity,
    visit_trees, word_to_tree, BlockTree, CodePair, ExtValue, IntPoly, Multiset, PolyMethod, Word,
};

const CAP: u32 = 16;

fn ms(text: &str) -> Multiset {
    text.parse().unwrap()
}

/// All compositions of every total 1..=max_total, in lexicographic order.
fn compositions_up_to(max_total: u32) -> Vec<Multiset> {
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
    for total in 1..=max_total {
        rec(total, &mut Vec::new(), &mut out);
    }
    out
}

fn report(name: &str, ok: bool, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    let verdict = if ok && elapsed <= budget {
        "pass"
    } else {
        "FAIL"
    };
    println!("criterion {name}: {verdict} ({elapsed:.2?}, budget {budget:?})");
    assert!(ok, "criterion {name} failed");
    assert!(
        elapsed <= budget,
        "criterion {name} exceeded its {budget:?} budget: {elapsed:.2?}"
    );
}

#[test]
fn criterion_1_worked_polynomial() {
    let start = Instant::now();
    let spec = ms("1,2,1");
    let p = quasi_stirling_polynomial(&spec, PolyMethod::Words, CAP).unwrap();
    let ok = p == IntPoly::from_i64(&[0, 1, 7, 4]);
    report("1 (worked polynomial)", ok, start, Duration::from_secs(1));
}

#[test]
fn criterion_2_main_identity_sweep() {
    let start = Instant::now();
    let mut ok = true;
    for spec in compositions_up_to(8) {
        let rep = verify_identity(&spec, 10, CAP).unwrap();
        ok &= rep.pass;
    }
    report("2 (identity, K <= 8)", ok, start, Duration::from_secs(300));
}

#[test]
fn criterion_3_equal_pairs_specialization() {
    let start = Instant::now();
    let spec = ms("2,2,2");
    let rep = verify_identity(&spec, 10, CAP).unwrap();
    let mut ok = rep.pass;

    // closed form specializes to m^3/4 * C(3+m, 3): compare 4*c_m with m^3*C(m+3, 3)
    for m in 0..=10u64 {
        let lhs = closed_form_coefficient(&spec, m as usize) * 4;
        let rhs = BigInt::from(m).pow(3) * binomial(m + 3, 3);
        ok &= lhs == rhs;
    }

    let total: usize = enumerate_words(&spec).filter(is_quasi_stirling).count();
    ok &= total == 30;
    ok &= BigInt::from(total) == factorial(3) * catalan(3);

    let top = enumerate_words(&spec)
        .filter(is_quasi_stirling)
        .filter(|w| des(w).unwrap() == 3)
        .count();
    ok &= top == 16;

    report(
        "3 (equal multiplicities)",
        ok,
        start,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_4_uniform_top_coefficient() {
    let start = Instant::now();
    let spec = ms("3,3");
    let top = enumerate_words(&spec)
        .filter(is_quasi_stirling)
        .filter(|w| des(w).unwrap() == 2)
        .count();
    report(
        "4 (uniform top count)",
        top == 5,
        start,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_5_tree_word_bijection() {
    let start = Instant::now();
    let mut ok = true;

    for spec in compositions_up_to(7) {
        let mut images = Vec::new();
        let mut local_ok = true;
        visit_trees(&spec, &mut |t| {
            let w = tree_to_word(t).unwrap();
            local_ok &= w.matches(&spec) && is_quasi_stirling(&w);
            local_ok &= word_to_tree(&w).unwrap() == *t;
            local_ok &= des(&w).unwrap() == cdes(t) && ends(&w) == tree_ends(t);
            images.push(w);
        });
        images.sort();
        let before = images.len();
        images.dedup();
        local_ok &= images.len() == before;
        let words = enumerate_words(&spec).filter(is_quasi_stirling).count();
        local_ok &= images.len() == words;
        ok &= local_ok;
    }

    // spot check: one long word decoded and re-encoded end to end
    let w: Word = "27175633545".parse().unwrap();
    let t = word_to_tree(&w).unwrap();
    ok &= tree_to_word(&t).unwrap() == w;
    ok &= cdes(&t) == 5;
    ok &= des(&w).unwrap() == 5;
    ok &= ends(&w) == (ExtValue::Finite(2), ExtValue::Finite(5));

    report(
        "5 (word/tree bijection)",
        ok,
        start,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_6_block_structures() {
    let start = Instant::now();
    let mut ok = true;

    for text in ["1", "1,2", "2,2", "1,2,1"] {
        let spec = ms(text);
        for m in 0..=4usize {
            let blocks = enumerate_block_trees(&spec, m, CAP).unwrap();
            let walls = enumerate_half_edge_trees(&spec, m, CAP).unwrap();
            let pairs = enumerate_code_pairs(&spec, m, CAP).unwrap();
            let expected = closed_form_coefficient(&spec, m);
            ok &= BigInt::from(blocks.len()) == expected;
            ok &= blocks.len() == walls.len() && blocks.len() == pairs.len();

            for bt in &blocks {
                let h = block_to_half_edge(&spec, bt).unwrap();
                ok &= walls.contains(&h);
                ok &= half_edge_to_block(&h) == *bt;
                let pair = encode_block_tree(&spec, bt).unwrap();
                ok &= pairs.contains(&pair);
                ok &= decode_block_tree(&spec, &pair).unwrap() == *bt;
            }
        }
    }

    // hand-computed code pair for a seven-value tree
    let spec = ms("1,1,2,1,3,1,2");
    let bt: BlockTree = "0(2,7(7(1))|5(5(3(3(*)),6|*),5(*|*|4)))".parse().unwrap();
    let pair = encode_block_tree(&spec, &bt).unwrap();
    let expected: CodePair =
        "0^2,3_1,5_1^2,5_2^3,7_1 ; (5_1,1)(5_2,3)(5_1,1)(0,2)(0,1)(7_1,1)(0,1)"
            .parse()
            .unwrap();
    ok &= pair == expected;
    ok &= decode_block_tree(&spec, &expected).unwrap() == bt;

    report("6 (block structures)", ok, start, Duration::from_secs(120));
}

#[test]
fn criterion_7_binomial_sum() {
    let start = Instant::now();
    let mut ok = true;
    for n in 1..=30u64 {
        for m in 1..=30u64 {
            ok &= binomial_sum_identity(n, m).equal;
        }
    }
    report("7 (binomial sum)", ok, start, Duration::from_secs(1));
}

#[test]
fn criterion_8_polynomial_shape_sweep() {
    let start = Instant::now();
    let mut ok = true;
    for spec in compositions_up_to(8) {
        let red = stirling_reduction(&spec, CAP).unwrap();
        ok &= red.equal;
        let roots = is_real_rooted(&red.polynomial).unwrap();
        ok &= roots.all_real && roots.all_nonpositive;
        ok &= is_log_concave(&red.polynomial).unwrap();
        ok &= is_unimodal(&red.polynomial).unwrap();
    }
    report(
        "8 (shape sweep, K <= 8)",
        ok,
        start,
        Duration::from_secs(300),
    );
}

#[test]
fn criterion_9_eulerian_series() {
    let start = Instant::now();
    let mut ok = true;
    for n in 1..=8usize {
        let prefix = expand_series(&eulerian_polynomial(n), n as u32, 12);
        for (m, c) in prefix.coeffs.iter().enumerate() {
            ok &= *c == BigInt::from(m).pow(n as u32);
        }
    }
    report("9 (Eulerian series)", ok, start, Duration::from_secs(10));
}
