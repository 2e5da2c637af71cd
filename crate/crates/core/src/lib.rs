//! Exact combinatorics of quasi-Stirling permutations on multisets: word and
//! tree enumeration, the descent polynomial and its series identity, the
//! word/tree and block-tree/code correspondences, and exact root analysis.
//!
//! Throughout, `des` counts strict descents **plus one** (the convention the
//! polynomials are built on), so every descent polynomial here is divisible
//! by `t`. All arithmetic is arbitrary precision; nothing is floating point.

pub mod analysis;
pub mod block_tree;
pub mod code;
pub mod error;
pub mod half_edge;
pub mod identity;
pub mod multiset;
pub mod poly;
pub mod tree;
pub mod word;

pub use analysis::{
    count_distinct_real_roots, is_log_concave, is_real_rooted, is_unimodal, squarefree_part,
    stirling_reduction, ReductionReport, RootReport,
};
pub use block_tree::{
    block_to_half_edge, enumerate_block_trees, half_edge_to_block, validate_block_tree, Block,
    BlockTree, EvenNode, OddNode,
};
pub use code::{
    count_code_pairs, decode_block_tree, encode_block_tree, enumerate_code_pairs, CodePair, Slot,
};
pub use error::{Error, Result};
pub use half_edge::{enumerate_half_edge_trees, HalfEdgeTree};
pub use identity::{
    binomial_sum_identity, closed_form_coefficient, expand_series, quasi_stirling_polynomial,
    stirling_polynomial, verify_identity, IdentityReport, IdentityRow, PolyMethod, SeriesPrefix,
    SumIdentityCheck,
};
pub use multiset::Multiset;
pub use poly::{binomial, catalan, eulerian_polynomial, factorial, IntPoly};
pub use tree::{
    cdes, cdes_vertex, enumerate_trees, is_valid_tree, tree_ends, tree_polynomial, tree_to_word,
    validate_tree, visit_trees, word_to_tree, Label, Tree,
};
pub use word::{
    des, ends, enumerate_words, is_quasi_stirling, is_stirling, special_counts, word_count,
    ExtValue, SpecialCounts, Word, Words,
};
