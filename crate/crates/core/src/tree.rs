use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::multiset::Multiset;
use crate::poly::IntPoly;
use crate::word::{self, ExtValue, Word};

/// Vertex label: `0` for the root, values `1..=n` elsewhere, or an unlabeled
/// leaf (used by half-edge trees).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Label {
    Value(u32),
    Unlabeled,
}

impl Label {
    pub fn value(self) -> Option<u32> {
        match self {
            Label::Value(v) => Some(v),
            Label::Unlabeled => None,
        }
    }
}

/// An ordered rooted tree with labeled (or unlabeled) vertices.
///
/// The trees of a multiset `{1^k1,...,n^kn}` have the root labeled 0, one
/// odd-level vertex per value `v` with exactly `kv - 1` children, all
/// labeled `v`, and no unlabeled vertices.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Tree {
    pub label: Label,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn new(label: Label, children: Vec<Tree>) -> Self {
        Tree { label, children }
    }

    pub fn leaf(value: u32) -> Self {
        Tree::new(Label::Value(value), Vec::new())
    }

    pub fn unlabeled_leaf() -> Self {
        Tree::new(Label::Unlabeled, Vec::new())
    }

    pub fn root(children: Vec<Tree>) -> Self {
        Tree::new(Label::Value(0), children)
    }

    pub fn vertex_count(&self) -> usize {
        1 + self.children.iter().map(Tree::vertex_count).sum::<usize>()
    }
}

impl fmt::Display for Tree {
    /// `0(2,7(7(1)),5(5(6,3(3)),5(4)))`; unlabeled leaves render as `*`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label {
            Label::Value(v) => write!(f, "{v}")?,
            Label::Unlabeled => write!(f, "*")?,
        }
        if !self.children.is_empty() {
            write!(f, "(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser {
            bytes: s.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse {
            at: self.pos,
            msg: msg.to_string(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected a number");
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .or_else(|_| self.err("number out of range"))
    }

    fn node(&mut self) -> Result<Tree> {
        let label = if self.eat(b'*') {
            Label::Unlabeled
        } else {
            Label::Value(self.number()?)
        };
        let mut children = Vec::new();
        if self.eat(b'(') {
            loop {
                children.push(self.node()?);
                if self.eat(b',') {
                    continue;
                }
                if self.eat(b')') {
                    break;
                }
                return self.err("expected `,` or `)`");
            }
        }
        Ok(Tree::new(label, children))
    }

    fn finish(&self) -> Result<()> {
        if self.pos == self.bytes.len() {
            Ok(())
        } else {
            self.err("trailing input")
        }
    }
}

impl FromStr for Tree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser::new(s);
        let t = p.node()?;
        p.finish()?;
        Ok(t)
    }
}

/// Checks membership in the tree family of `spec`; `Ok(())` or the first
/// violated property.
pub fn validate_tree(spec: &Multiset, t: &Tree) -> Result<()> {
    if t.label != Label::Value(0) {
        return Err(Error::InvalidTree("root must be labeled 0".into()));
    }
    let mut counts = vec![0u32; spec.n()];
    count_labels(t, &mut counts)?;
    if counts != spec.multiplicities() {
        return Err(Error::InvalidTree(
            "label content does not match the multiset".into(),
        ));
    }
    check_levels(t, 0, spec)
}

pub fn is_valid_tree(spec: &Multiset, t: &Tree) -> bool {
    validate_tree(spec, t).is_ok()
}

fn count_labels(t: &Tree, counts: &mut [u32]) -> Result<()> {
    match t.label {
        Label::Unlabeled => {
            return Err(Error::InvalidTree("unlabeled vertex".into()));
        }
        Label::Value(0) => {}
        Label::Value(v) => {
            if v as usize > counts.len() {
                return Err(Error::InvalidTree(format!(
                    "label {v} outside the multiset"
                )));
            }
            counts[v as usize - 1] += 1;
        }
    }
    for c in &t.children {
        count_labels(c, counts)?;
    }
    Ok(())
}

fn check_levels(t: &Tree, level: usize, spec: &Multiset) -> Result<()> {
    for c in &t.children {
        if level.is_multiple_of(2) {
            // children of an even-level vertex head odd-level subtrees
            let v = match c.label {
                Label::Value(v) if v >= 1 => v,
                _ => {
                    return Err(Error::InvalidTree(
                        "odd-level vertex must carry a value label".into(),
                    ))
                }
            };
            let want = spec.multiplicity(v) - 1;
            if c.children.len() != want as usize {
                return Err(Error::InvalidTree(format!(
                    "odd-level vertex {v} has {} children, expected {want}",
                    c.children.len()
                )));
            }
            if c.children.iter().any(|g| g.label != Label::Value(v)) {
                return Err(Error::InvalidTree(format!(
                    "children of odd-level vertex {v} must be labeled {v}"
                )));
            }
        }
        check_levels(c, level + 1, spec)?;
    }
    Ok(())
}

/// Cyclic descents of a single vertex: strict descents in the cyclic
/// sequence (own label, child labels...). Leaves contribute 0.
pub fn cdes_vertex(t: &Tree) -> usize {
    if t.children.is_empty() {
        return 0;
    }
    let lbl = |l: Label| l.value().expect("cdes is defined on labeled trees");
    let mut seq = Vec::with_capacity(t.children.len() + 1);
    seq.push(lbl(t.label));
    seq.extend(t.children.iter().map(|c| lbl(c.label)));
    (0..seq.len())
        .filter(|&i| seq[i] > seq[(i + 1) % seq.len()])
        .count()
}

/// Total cyclic descents over all vertices; the one-vertex tree counts 1 by
/// convention, so `cdes` matches the descent statistic of words.
pub fn cdes(t: &Tree) -> usize {
    if t.children.is_empty() {
        return 1;
    }
    fn sum(t: &Tree) -> usize {
        cdes_vertex(t) + t.children.iter().map(sum).sum::<usize>()
    }
    sum(t)
}

/// Labels of the leftmost and rightmost root children, with sentinels
/// `(+inf, -inf)` for the one-vertex tree.
pub fn tree_ends(t: &Tree) -> (ExtValue, ExtValue) {
    match (t.children.first(), t.children.last()) {
        (Some(f), Some(l)) => (
            ExtValue::Finite(f.label.value().expect("labeled tree")),
            ExtValue::Finite(l.label.value().expect("labeled tree")),
        ),
        _ => (ExtValue::PosInf, ExtValue::NegInf),
    }
}

// --- enumeration ---------------------------------------------------------

struct TreeGen<'a> {
    spec: &'a Multiset,
}

impl TreeGen<'_> {
    /// Ordered forests of odd-level subtrees covering exactly `avail`.
    fn forests(&self, avail: u32, prefix: &mut Vec<Tree>, f: &mut dyn FnMut(&[Tree])) {
        if avail == 0 {
            f(prefix);
            return;
        }
        let mut rest = avail;
        while rest != 0 {
            let v = rest.trailing_zeros() + 1;
            rest &= rest - 1;
            let others = avail & !(1 << (v - 1));
            if self.spec.multiplicity(v) == 1 {
                // a leaf subtree carries no further values
                self.descend(v, 0, others, prefix, f);
            } else {
                let mut sub = 0u32;
                loop {
                    self.descend(v, sub, others & !sub, prefix, f);
                    if sub == others {
                        break;
                    }
                    sub = (sub.wrapping_sub(others)) & others;
                }
            }
        }
    }

    fn descend(
        &self,
        v: u32,
        content: u32,
        remaining: u32,
        prefix: &mut Vec<Tree>,
        f: &mut dyn FnMut(&[Tree]),
    ) {
        self.odd_subtrees(v, content, &mut |t| {
            prefix.push(t);
            self.forests(remaining, prefix, f);
            prefix.pop();
        });
    }

    /// Subtrees rooted at the odd-level vertex `v` whose descendants cover
    /// exactly `content`.
    fn odd_subtrees(&self, v: u32, content: u32, g: &mut dyn FnMut(Tree)) {
        let parts = self.spec.multiplicity(v) as usize - 1;
        let mut acc = Vec::with_capacity(parts);
        self.odd_children(v, parts, content, &mut acc, g);
    }

    fn odd_children(
        &self,
        v: u32,
        parts: usize,
        content: u32,
        acc: &mut Vec<Tree>,
        g: &mut dyn FnMut(Tree),
    ) {
        if parts == 0 {
            if content == 0 {
                g(Tree::new(Label::Value(v), acc.clone()));
            }
            return;
        }
        let mut sub = 0u32;
        loop {
            let mut inner = Vec::new();
            self.forests(sub, &mut inner, &mut |forest| {
                acc.push(Tree::new(Label::Value(v), forest.to_vec()));
                self.odd_children(v, parts - 1, content & !sub, acc, g);
                acc.pop();
            });
            if sub == content {
                break;
            }
            sub = (sub.wrapping_sub(content)) & content;
        }
    }
}

/// Visits every tree of `spec` exactly once, in a fixed deterministic order.
pub fn visit_trees(spec: &Multiset, f: &mut dyn FnMut(&Tree)) {
    assert!(spec.n() <= 31, "value masks use u32 bits");
    let all = if spec.n() == 31 {
        u32::MAX >> 1
    } else {
        (1u32 << spec.n()) - 1
    };
    let g = TreeGen { spec };
    let mut prefix = Vec::new();
    g.forests(all, &mut prefix, &mut |children| {
        f(&Tree::root(children.to_vec()));
    });
}

/// Materializes the full tree family of `spec`.
pub fn enumerate_trees(spec: &Multiset) -> Vec<Tree> {
    let mut out = Vec::new();
    visit_trees(spec, &mut |t| out.push(t.clone()));
    out
}

/// Generating polynomial of the tree family by total cyclic descents.
pub fn tree_polynomial(spec: &Multiset, cap: u32) -> Result<IntPoly> {
    spec.ensure_within(cap)?;
    let mut coeffs = vec![BigInt::zero(); spec.total() as usize + 1];
    visit_trees(spec, &mut |t| {
        coeffs[cdes(t)] += BigInt::one();
    });
    Ok(IntPoly::from_coeffs(coeffs))
}

// --- the word correspondence ---------------------------------------------

/// Reads off the word of a tree: preserves the descent statistic (cyclic
/// descents become descents-plus-one) and the first/last statistics.
pub fn tree_to_word(t: &Tree) -> Result<Word> {
    if t.label == Label::Value(0) && t.children.is_empty() {
        return Ok(Word::empty());
    }
    let spec = derived_spec(t)?;
    validate_tree(&spec, t)?;
    let mut out = Vec::with_capacity(spec.total() as usize);
    encode_children(&t.children, &mut out);
    Ok(Word::new(out).unwrap())
}

fn derived_spec(t: &Tree) -> Result<Multiset> {
    fn collect(t: &Tree, counts: &mut Vec<u32>) -> Result<()> {
        match t.label {
            Label::Value(v) if v >= 1 => {
                if counts.len() < v as usize {
                    counts.resize(v as usize, 0);
                }
                counts[v as usize - 1] += 1;
            }
            Label::Value(_) => {}
            Label::Unlabeled => {
                return Err(Error::InvalidTree("unlabeled vertex".into()));
            }
        }
        for c in &t.children {
            collect(c, counts)?;
        }
        Ok(())
    }
    let mut counts = Vec::new();
    collect(t, &mut counts)?;
    if counts.is_empty() {
        return Err(Error::InvalidTree("tree carries no values".into()));
    }
    if let Some(v) = counts.iter().position(|&k| k == 0) {
        return Err(Error::InvalidTree(format!("value {} is absent", v + 1)));
    }
    Multiset::new(counts)
}

fn encode_children(children: &[Tree], out: &mut Vec<u32>) {
    let Some((first, rest)) = children.split_first() else {
        return;
    };
    let r = first.label.value().expect("validated tree");
    // each even-level copy of r starts a segment; the final r leads back to
    // the remaining siblings
    for even in &first.children {
        out.push(r);
        encode_children(&even.children, out);
    }
    out.push(r);
    encode_children(rest, out);
}

/// Rebuilds the tree of a quasi-Stirling word; the inverse of
/// [`tree_to_word`]. Errors when the word contains a crossing or does not
/// exhaust an initial range of values.
pub fn word_to_tree(w: &Word) -> Result<Tree> {
    if w.is_empty() {
        return Ok(Tree::root(Vec::new()));
    }
    let spec = w.derived_multiset()?;
    if !word::is_quasi_stirling(w) {
        return Err(Error::NotQuasiStirling);
    }
    let children = decode_children(w.values());
    let t = Tree::root(children);
    debug_assert!(validate_tree(&spec, &t).is_ok());
    Ok(t)
}

fn decode_children(vals: &[u32]) -> Vec<Tree> {
    let Some(&r) = vals.first() else {
        return Vec::new();
    };
    let marks: Vec<usize> = vals
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| (v == r).then_some(i))
        .collect();
    let mut evens = Vec::with_capacity(marks.len() - 1);
    for pair in marks.windows(2) {
        let segment = &vals[pair[0] + 1..pair[1]];
        evens.push(Tree::new(Label::Value(r), decode_children(segment)));
    }
    let mut children = vec![Tree::new(Label::Value(r), evens)];
    children.extend(decode_children(&vals[marks[marks.len() - 1] + 1..]));
    children
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::des;

    const WORKED_TREE: &str = "0(2,7(7(1)),5(5(6,3(3)),5(4)))";
    const WORKED_WORD: &str = "27175633545";

    fn ms(s: &str) -> Multiset {
        s.parse().unwrap()
    }

    fn tree(s: &str) -> Tree {
        s.parse().unwrap()
    }

    #[test]
    fn parse_display_round_trip() {
        for s in [WORKED_TREE, "0", "0(1)", "0(1,2(2))", "0(5(5(*,3),*))"] {
            assert_eq!(tree(s).to_string(), s);
        }
        assert!("0(1,".parse::<Tree>().is_err());
        assert!("0(1))".parse::<Tree>().is_err());
        assert!("0()".parse::<Tree>().is_err());
    }

    #[test]
    fn validation() {
        let spec = ms("1,1,2,1,3,1,2");
        assert!(is_valid_tree(&spec, &tree(WORKED_TREE)));
        // odd-level 5 must have multiplicity-minus-one children
        assert!(!is_valid_tree(&spec, &tree("0(2,7(7(1)),5(5(6,3(3),4)))")));
        assert!(!is_valid_tree(&ms("1,2"), &tree("0(1,2)")));
        assert!(is_valid_tree(&ms("1,2"), &tree("0(1,2(2))")));
        assert!(!is_valid_tree(&ms("1,2"), &tree("1(1,2(2))")));
    }

    #[test]
    fn cyclic_descent_counts() {
        let t = tree(WORKED_TREE);
        assert_eq!(cdes_vertex(&t), 2);
        assert_eq!(cdes(&t), 5);
        assert_eq!(cdes(&tree("0")), 1);
        assert_eq!(cdes(&tree("0(1)")), 1);
        assert_eq!(cdes_vertex(&tree("5(5,5)")), 0);
        assert_eq!(cdes_vertex(&tree("5(6,3)")), 1);
        assert_eq!(cdes_vertex(&tree("5(4)")), 1);
    }

    #[test]
    fn end_statistics() {
        assert_eq!(
            tree_ends(&tree(WORKED_TREE)),
            (ExtValue::Finite(2), ExtValue::Finite(5))
        );
        assert_eq!(tree_ends(&tree("0")), (ExtValue::PosInf, ExtValue::NegInf));
        assert_eq!(
            tree_ends(&tree("0(3(3))")),
            (ExtValue::Finite(3), ExtValue::Finite(3))
        );
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_trees(&ms("1,2")).len(), 3);
        assert_eq!(enumerate_trees(&ms("2,2")).len(), 4);
        assert_eq!(enumerate_trees(&ms("2,2,2")).len(), 30);
        assert_eq!(enumerate_trees(&ms("1")).len(), 1);
        let all = enumerate_trees(&ms("2,2"));
        let dedup: std::collections::HashSet<_> = all.iter().cloned().collect();
        assert_eq!(dedup.len(), all.len());
        for t in &all {
            assert!(is_valid_tree(&ms("2,2"), t));
        }
    }

    #[test]
    fn tree_polynomial_matches_known_values() {
        assert_eq!(
            tree_polynomial(&ms("1,2,1"), 9).unwrap(),
            IntPoly::from_i64(&[0, 1, 7, 4])
        );
        assert_eq!(
            tree_polynomial(&ms("1,2"), 9).unwrap(),
            IntPoly::from_i64(&[0, 1, 2])
        );
        assert_eq!(
            tree_polynomial(&ms("1"), 9).unwrap(),
            IntPoly::from_i64(&[0, 1])
        );
        assert!(matches!(
            tree_polynomial(&ms("5,5"), 9),
            Err(Error::SizeCap { total: 10, cap: 9 })
        ));
    }

    #[test]
    fn word_correspondence_on_the_worked_example() {
        let t = tree(WORKED_TREE);
        let w = tree_to_word(&t).unwrap();
        assert_eq!(w.to_string(), WORKED_WORD);
        assert_eq!(des(&w).unwrap(), cdes(&t));
        assert_eq!(word::ends(&w), tree_ends(&t));
        assert_eq!(word_to_tree(&w).unwrap(), t);
    }

    #[test]
    fn word_correspondence_small_cases() {
        assert_eq!(tree_to_word(&tree("0(1)")).unwrap().to_string(), "1");
        assert_eq!(tree_to_word(&tree("0(1,2(2))")).unwrap().to_string(), "122");
        assert_eq!(tree_to_word(&tree("0(2(2),1)")).unwrap().to_string(), "221");
        assert_eq!(
            tree_to_word(&tree("0(2(2(1)))")).unwrap().to_string(),
            "212"
        );
        assert_eq!(
            word_to_tree(&"212".parse().unwrap()).unwrap(),
            tree("0(2(2(1)))")
        );
        assert_eq!(
            word_to_tree(&"1212".parse::<Word>().unwrap()),
            Err(Error::NotQuasiStirling)
        );
        // the one-vertex tree and the empty word are the fixed point
        assert_eq!(word_to_tree(&Word::empty()).unwrap(), tree("0"));
        assert_eq!(tree_to_word(&tree("0")).unwrap(), Word::empty());
    }
}
