use std::fmt;

use crate::error::{Error, Result};
use crate::half_edge::HalfEdgeTree;
use crate::multiset::Multiset;
use crate::tree::{Label, Tree};

/// Vertex on an even level; its children are grouped into ordered blocks.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EvenNode {
    pub label: u32,
    pub blocks: Vec<Block>,
}

/// One block: either a bare unlabeled leaf or a strictly increasing run of
/// odd-level vertices.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Block {
    Leaf,
    Run(Vec<OddNode>),
}

/// Vertex on an odd level, carrying one even child per extra occurrence of
/// its value.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OddNode {
    pub label: u32,
    pub children: Vec<EvenNode>,
}

/// A tree of the multiset whose even-level children are partitioned into
/// blocks. Text form uses `|` between blocks and `*` for a leaf block:
/// `0(2,7(7(1))|5(5(3(3(*)),6|*),5(*|*|4)))`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BlockTree {
    pub root: EvenNode,
}

impl BlockTree {
    pub fn block_count(&self) -> usize {
        count_blocks_even(&self.root)
    }
}

fn count_blocks_even(e: &EvenNode) -> usize {
    e.blocks.len()
        + e.blocks
            .iter()
            .map(|b| match b {
                Block::Leaf => 0,
                Block::Run(run) => run
                    .iter()
                    .flat_map(|o| o.children.iter())
                    .map(count_blocks_even)
                    .sum(),
            })
            .sum::<usize>()
}

// --- display ---------------------------------------------------------------

impl fmt::Display for EvenNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        if self.blocks.is_empty() {
            return Ok(());
        }
        write!(f, "(")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Block::Leaf => write!(f, "*"),
            Block::Run(run) => {
                for (i, o) in run.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{o}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for OddNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        if self.children.is_empty() {
            return Ok(());
        }
        write!(f, "(")?;
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for BlockTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)
    }
}

// --- parsing ----------------------------------------------------------------

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse {
            at: self.pos,
            msg: msg.into(),
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
        while matches!(self.peek(), Some(b'0'..=b'9')) {
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

    fn even(&mut self) -> Result<EvenNode> {
        let label = self.number()?;
        let mut blocks = Vec::new();
        if self.eat(b'(') {
            loop {
                blocks.push(self.block()?);
                if self.eat(b'|') {
                    continue;
                }
                if self.eat(b')') {
                    break;
                }
                return self.err("expected '|' or ')'");
            }
        }
        Ok(EvenNode { label, blocks })
    }

    fn block(&mut self) -> Result<Block> {
        if self.eat(b'*') {
            return Ok(Block::Leaf);
        }
        let mut run = vec![self.odd()?];
        while self.eat(b',') {
            run.push(self.odd()?);
        }
        Ok(Block::Run(run))
    }

    fn odd(&mut self) -> Result<OddNode> {
        let label = self.number()?;
        let mut children = Vec::new();
        if self.eat(b'(') {
            loop {
                children.push(self.even()?);
                if self.eat(b',') {
                    continue;
                }
                if self.eat(b')') {
                    break;
                }
                return self.err("expected ',' or ')'");
            }
        }
        Ok(OddNode { label, children })
    }
}

impl std::str::FromStr for BlockTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            bytes: s.as_bytes(),
            pos: 0,
        };
        let root = p.even()?;
        if p.pos != p.bytes.len() {
            return p.err("trailing input");
        }
        Ok(BlockTree { root })
    }
}

// --- validation --------------------------------------------------------------

/// Checks `bt` against `spec`: root labeled 0, one odd vertex per value with
/// one even child per extra occurrence, runs strictly increasing.
pub fn validate_block_tree(spec: &Multiset, bt: &BlockTree) -> Result<()> {
    if bt.root.label != 0 {
        return Err(Error::InvalidBlockTree("root must be labeled 0".into()));
    }
    let mut seen = vec![false; spec.n()];
    check_even_node(spec, &bt.root, &mut seen)?;
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidBlockTree(format!(
            "value {} never appears",
            v + 1
        )));
    }
    Ok(())
}

fn check_even_node(spec: &Multiset, e: &EvenNode, seen: &mut [bool]) -> Result<()> {
    for b in &e.blocks {
        let run = match b {
            Block::Leaf => continue,
            Block::Run(run) => run,
        };
        if run.is_empty() {
            return Err(Error::InvalidBlockTree("empty run block".into()));
        }
        for pair in run.windows(2) {
            if pair[0].label >= pair[1].label {
                return Err(Error::InvalidBlockTree(format!(
                    "run not increasing at value {}",
                    pair[1].label
                )));
            }
        }
        for o in run {
            check_odd_node(spec, o, seen)?;
        }
    }
    Ok(())
}

fn check_odd_node(spec: &Multiset, o: &OddNode, seen: &mut [bool]) -> Result<()> {
    let v = o.label;
    if v == 0 || v as usize > spec.n() {
        return Err(Error::InvalidBlockTree(format!("label {v} out of range")));
    }
    let slot = &mut seen[(v - 1) as usize];
    if *slot {
        return Err(Error::InvalidBlockTree(format!("value {v} appears twice")));
    }
    *slot = true;
    let want = (spec.multiplicity(v) - 1) as usize;
    if o.children.len() != want {
        return Err(Error::InvalidBlockTree(format!(
            "vertex {v} must have {want} children, has {}",
            o.children.len()
        )));
    }
    for c in &o.children {
        if c.label != v {
            return Err(Error::InvalidBlockTree(format!(
                "child of vertex {v} labeled {}",
                c.label
            )));
        }
        check_even_node(spec, c, seen)?;
    }
    Ok(())
}

// --- correspondence with half-edge trees -------------------------------------

/// Rewrites the blocks of every even vertex into wall positions: each block
/// ends in a wall, and the leading members of the first block smaller than
/// the vertex move behind everything.
pub fn block_to_half_edge(spec: &Multiset, bt: &BlockTree) -> Result<HalfEdgeTree> {
    validate_block_tree(spec, bt)?;
    let m = bt.block_count();
    let tree = even_to_tree(&bt.root);
    debug_assert!(HalfEdgeTree::new(spec, tree.clone()).is_ok());
    Ok(HalfEdgeTree::from_valid_parts(tree, m))
}

fn even_to_tree(e: &EvenNode) -> Tree {
    let mut children = Vec::new();
    let mut moved = Vec::new();
    for (i, b) in e.blocks.iter().enumerate() {
        if let Block::Run(run) = b {
            for o in run {
                let t = odd_to_tree(o);
                if i == 0 && o.label < e.label {
                    moved.push(t);
                } else {
                    children.push(t);
                }
            }
        }
        children.push(Tree::unlabeled_leaf());
    }
    children.extend(moved);
    Tree::new(Label::Value(e.label), children)
}

fn odd_to_tree(o: &OddNode) -> Tree {
    Tree::new(
        Label::Value(o.label),
        o.children.iter().map(even_to_tree).collect(),
    )
}

/// Inverse rewriting: children after the last wall move to the front, then
/// every wall closes one block, a run when its compartment is non-empty.
pub fn half_edge_to_block(h: &HalfEdgeTree) -> BlockTree {
    BlockTree {
        root: tree_to_even(h.tree()),
    }
}

fn tree_to_even(t: &Tree) -> EvenNode {
    let label = t.label.value().expect("even vertex is labeled");
    let last_wall = t.children.iter().rposition(|c| c.label == Label::Unlabeled);
    let (walled, tail) = match last_wall {
        Some(i) => t.children.split_at(i + 1),
        None => {
            debug_assert!(t.children.is_empty());
            return EvenNode {
                label,
                blocks: Vec::new(),
            };
        }
    };
    let mut blocks = Vec::new();
    let mut run: Vec<OddNode> = tail.iter().map(tree_to_odd).collect();
    for c in walled {
        match c.label {
            Label::Value(_) => run.push(tree_to_odd(c)),
            Label::Unlabeled => {
                if run.is_empty() {
                    blocks.push(Block::Leaf);
                } else {
                    blocks.push(Block::Run(std::mem::take(&mut run)));
                }
            }
        }
    }
    EvenNode { label, blocks }
}

fn tree_to_odd(t: &Tree) -> OddNode {
    OddNode {
        label: t.label.value().expect("odd vertex is labeled"),
        children: t.children.iter().map(tree_to_even).collect(),
    }
}

// --- enumeration ---------------------------------------------------------------

fn bit(v: u32) -> u32 {
    1 << (v - 1)
}

fn mask_values(mask: u32) -> impl Iterator<Item = u32> {
    (1..=32u32).filter(move |v| mask & bit(*v) != 0)
}

/// Block sequences drawing exactly on the values of `avail`, each paired with
/// the number of blocks it contains including nested ones (at most `budget`).
fn gen_seq(spec: &Multiset, avail: u32, budget: usize) -> Vec<(Vec<Block>, usize)> {
    let mut out = Vec::new();
    if avail == 0 {
        out.push((Vec::new(), 0));
    }
    if budget == 0 {
        return out;
    }
    for (rest, used) in gen_seq(spec, avail, budget - 1) {
        let mut seq = vec![Block::Leaf];
        seq.extend(rest);
        out.push((seq, used + 1));
    }
    for (run, consumed, inner) in gen_run(spec, 0, avail, budget - 1) {
        for (rest, used) in gen_seq(spec, avail & !consumed, budget - 1 - inner) {
            let mut seq = vec![Block::Run(run.clone())];
            seq.extend(rest);
            out.push((seq, 1 + inner + used));
        }
    }
    out
}

/// Increasing runs starting above `prev`, each with the mask of values the
/// run consumed and the blocks used inside its subtrees.
fn gen_run(
    spec: &Multiset,
    prev: u32,
    avail: u32,
    budget: usize,
) -> Vec<(Vec<OddNode>, u32, usize)> {
    let mut out = Vec::new();
    for v in mask_values(avail) {
        if v <= prev {
            continue;
        }
        let others = avail & !bit(v);
        let mut content = 0u32;
        loop {
            for (odd, used) in gen_odd(spec, v, content, budget) {
                out.push((vec![odd.clone()], bit(v) | content, used));
                for (tail, consumed, tail_used) in
                    gen_run(spec, v, others & !content, budget - used)
                {
                    let mut run = vec![odd.clone()];
                    run.extend(tail);
                    out.push((run, bit(v) | content | consumed, used + tail_used));
                }
            }
            content = content.wrapping_sub(others) & others;
            if content == 0 {
                break;
            }
        }
    }
    out
}

fn gen_odd(spec: &Multiset, v: u32, content: u32, budget: usize) -> Vec<(OddNode, usize)> {
    let parts = (spec.multiplicity(v) - 1) as usize;
    gen_children(spec, v, parts, content, budget)
        .into_iter()
        .map(|(children, used)| (OddNode { label: v, children }, used))
        .collect()
}

fn gen_children(
    spec: &Multiset,
    v: u32,
    parts: usize,
    content: u32,
    budget: usize,
) -> Vec<(Vec<EvenNode>, usize)> {
    if parts == 0 {
        return if content == 0 {
            vec![(Vec::new(), 0)]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    let mut share = 0u32;
    loop {
        for (blocks, used) in gen_seq(spec, share, budget) {
            let head = EvenNode { label: v, blocks };
            for (rest, rest_used) in
                gen_children(spec, v, parts - 1, content & !share, budget - used)
            {
                let mut children = vec![head.clone()];
                children.extend(rest);
                out.push((children, used + rest_used));
            }
        }
        share = share.wrapping_sub(content) & content;
        if share == 0 {
            break;
        }
    }
    out
}

/// All block trees of `spec` with exactly `m` blocks in total.
pub fn enumerate_block_trees(spec: &Multiset, m: usize, cap: u32) -> Result<Vec<BlockTree>> {
    spec.ensure_within(cap)?;
    let n = spec.n();
    assert!(n <= 31, "enumeration limited to 31 distinct values");
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    Ok(gen_seq(spec, all, m)
        .into_iter()
        .filter(|(_, used)| *used == m)
        .map(|(blocks, _)| BlockTree {
            root: EvenNode { label: 0, blocks },
        })
        .collect())
}
