use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::block_tree::{validate_block_tree, Block, BlockTree, EvenNode, OddNode};
use crate::error::{Error, Result};
use crate::identity::closed_form_coefficient;
use crate::multiset::Multiset;

/// Names an even-level vertex: the root, or the `index`-th even child of the
/// odd vertex of `value`. Written `0` and `5_2`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Slot {
    Root,
    Child { value: u32, index: u32 },
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Root => write!(f, "0"),
            Slot::Child { value, index } => write!(f, "{value}_{index}"),
        }
    }
}

/// The code of a block tree: a pool recording how many blocks each slot
/// holds, and one (slot, block) entry per value in pruning order.
///
/// Written `0^2,3_1,5_1^2,5_2^3,7_1 ; (5_1,1)(5_2,3)(5_1,1)(0,2)(0,1)(7_1,1)(0,1)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CodePair {
    pub pool: BTreeMap<Slot, usize>,
    pub seq: Vec<(Slot, usize)>,
}

impl CodePair {
    /// Total number of blocks the pool accounts for.
    pub fn block_total(&self) -> usize {
        self.pool.values().sum()
    }
}

impl fmt::Display for CodePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (s, c)) in self.pool.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
            if *c > 1 {
                write!(f, "^{c}")?;
            }
        }
        write!(f, " ; ")?;
        for (s, b) in &self.seq {
            write!(f, "({s},{b})")?;
        }
        Ok(())
    }
}

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

    fn number(&mut self) -> Result<u64> {
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

    fn slot(&mut self) -> Result<Slot> {
        let v = self.number()? as u32;
        if self.eat(b'_') {
            let j = self.number()? as u32;
            if v == 0 {
                return self.err("the root slot takes no index");
            }
            Ok(Slot::Child { value: v, index: j })
        } else if v == 0 {
            Ok(Slot::Root)
        } else {
            self.err("a value slot needs an index")
        }
    }
}

impl std::str::FromStr for CodePair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            bytes: s.as_bytes(),
            pos: 0,
        };
        let mut pool = BTreeMap::new();
        loop {
            let slot = p.slot()?;
            let count = if p.eat(b'^') { p.number()? as usize } else { 1 };
            if pool.insert(slot, count).is_some() {
                return p.err("slot listed twice in the pool");
            }
            if p.eat(b',') {
                continue;
            }
            break;
        }
        for b in *b" ; " {
            if !p.eat(b) {
                return p.err("expected ' ; ' between pool and sequence");
            }
        }
        let mut seq = Vec::new();
        while p.eat(b'(') {
            let slot = p.slot()?;
            if !p.eat(b',') {
                return p.err("expected ','");
            }
            let b = p.number()? as usize;
            if !p.eat(b')') {
                return p.err("expected ')'");
            }
            seq.push((slot, b));
        }
        if p.pos != p.bytes.len() {
            return p.err("trailing input");
        }
        Ok(CodePair { pool, seq })
    }
}

fn check_slot(spec: &Multiset, s: Slot) -> Result<()> {
    match s {
        Slot::Root => Ok(()),
        Slot::Child { value, index } => {
            if value == 0 || value as usize > spec.n() {
                Err(Error::InvalidCodePair(format!(
                    "slot value {value} out of range"
                )))
            } else if index == 0 || index >= spec.multiplicity(value) {
                Err(Error::InvalidCodePair(format!(
                    "slot {value}_{index} does not exist"
                )))
            } else {
                Ok(())
            }
        }
    }
}

/// Encodes a block tree by pruning the largest value with no unpruned value
/// below it, `n` times, recording where each pruned vertex sat.
pub fn encode_block_tree(spec: &Multiset, bt: &BlockTree) -> Result<CodePair> {
    validate_block_tree(spec, bt)?;
    let n = spec.n();
    let mut pool = BTreeMap::new();
    let mut place = vec![None; n];
    let mut holder: Vec<Option<u32>> = vec![None; n];
    let mut pending = vec![0usize; n];
    scan_even(
        Slot::Root,
        None,
        &bt.root,
        &mut pool,
        &mut place,
        &mut holder,
        &mut pending,
    );
    let mut pruned = vec![false; n];
    let mut seq = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (1..=n)
            .rev()
            .find(|&v| !pruned[v - 1] && pending[v - 1] == 0)
            .expect("some value is always prunable");
        pruned[v - 1] = true;
        seq.push(place[v - 1].expect("every value is placed"));
        if let Some(u) = holder[v - 1] {
            pending[(u - 1) as usize] -= 1;
        }
    }
    Ok(CodePair { pool, seq })
}

fn scan_even(
    slot: Slot,
    above: Option<u32>,
    e: &EvenNode,
    pool: &mut BTreeMap<Slot, usize>,
    place: &mut [Option<(Slot, usize)>],
    holder: &mut [Option<u32>],
    pending: &mut [usize],
) {
    if !e.blocks.is_empty() {
        pool.insert(slot, e.blocks.len());
    }
    for (bi, b) in e.blocks.iter().enumerate() {
        let Block::Run(run) = b else { continue };
        for o in run {
            let i = (o.label - 1) as usize;
            place[i] = Some((slot, bi + 1));
            holder[i] = above;
            if let Some(u) = above {
                pending[(u - 1) as usize] += 1;
            }
            for (j, c) in o.children.iter().enumerate() {
                let child_slot = Slot::Child {
                    value: o.label,
                    index: (j + 1) as u32,
                };
                scan_even(child_slot, Some(o.label), c, pool, place, holder, pending);
            }
        }
    }
}

/// Rebuilds the block tree a code pair encodes.
pub fn decode_block_tree(spec: &Multiset, pair: &CodePair) -> Result<BlockTree> {
    let n = spec.n();
    for (s, c) in &pair.pool {
        check_slot(spec, *s)?;
        if *c == 0 {
            return Err(Error::InvalidCodePair(
                "pool multiplicities must be positive".into(),
            ));
        }
    }
    if pair.seq.len() != n {
        return Err(Error::InvalidCodePair(format!(
            "sequence has {} entries, expected {n}",
            pair.seq.len()
        )));
    }
    for (s, b) in &pair.seq {
        check_slot(spec, *s)?;
        let held = pair.pool.get(s).copied().unwrap_or(0);
        if *b == 0 || *b > held {
            return Err(Error::InvalidCodePair(format!(
                "block index {b} out of range for slot {s}"
            )));
        }
    }
    if pair.seq.last().map(|(s, _)| *s) != Some(Slot::Root) {
        return Err(Error::InvalidCodePair(
            "the final entry must sit at the root".into(),
        ));
    }

    // recover the pruning order: at each step the largest unused value whose
    // slots never appear later in the sequence
    let mut used = vec![false; n];
    let mut labels = vec![0u32; n];
    for (i, label) in labels.iter_mut().enumerate() {
        let mut blocked = vec![false; n];
        for (a, _) in &pair.seq[i..] {
            if let Slot::Child { value, .. } = a {
                blocked[(*value - 1) as usize] = true;
            }
        }
        let v = (1..=n)
            .rev()
            .find(|&v| !used[v - 1] && !blocked[v - 1])
            .ok_or_else(|| {
                Error::InvalidCodePair(format!("no value can be pruned at step {}", i + 1))
            })?;
        used[v - 1] = true;
        *label = v as u32;
    }

    // place the values back, later-pruned first so parents exist, each block
    // kept sorted
    let mut members: BTreeMap<Slot, Vec<Vec<u32>>> = pair
        .pool
        .iter()
        .map(|(s, c)| (*s, vec![Vec::new(); *c]))
        .collect();
    for i in (0..n).rev() {
        let (a, b) = pair.seq[i];
        let block = &mut members.get_mut(&a).expect("checked above")[b - 1];
        let at = block.partition_point(|&x| x < labels[i]);
        block.insert(at, labels[i]);
    }
    let bt = BlockTree {
        root: build_even(spec, &members, Slot::Root, 0),
    };
    validate_block_tree(spec, &bt)?;
    Ok(bt)
}

fn build_even(
    spec: &Multiset,
    members: &BTreeMap<Slot, Vec<Vec<u32>>>,
    slot: Slot,
    label: u32,
) -> EvenNode {
    let blocks = members
        .get(&slot)
        .map(|bs| {
            bs.iter()
                .map(|b| {
                    if b.is_empty() {
                        Block::Leaf
                    } else {
                        Block::Run(
                            b.iter()
                                .map(|&v| OddNode {
                                    label: v,
                                    children: (1..spec.multiplicity(v))
                                        .map(|j| {
                                            build_even(
                                                spec,
                                                members,
                                                Slot::Child { value: v, index: j },
                                                v,
                                            )
                                        })
                                        .collect(),
                                })
                                .collect(),
                        )
                    }
                })
                .collect()
        })
        .unwrap_or_default();
    EvenNode { label, blocks }
}

fn gen_pools(remaining: usize, idx: usize, counts: &mut [usize], f: &mut dyn FnMut(&[usize])) {
    if idx == counts.len() {
        if remaining == 0 {
            f(counts);
        }
        return;
    }
    for c in 0..=remaining {
        counts[idx] = c;
        gen_pools(remaining - c, idx + 1, counts, f);
    }
    counts[idx] = 0;
}

fn fill_seq(
    options: &[(Slot, usize)],
    root_blocks: usize,
    n: usize,
    pool: &BTreeMap<Slot, usize>,
    prefix: &mut Vec<(Slot, usize)>,
    out: &mut Vec<CodePair>,
) {
    if prefix.len() == n - 1 {
        for b in 1..=root_blocks {
            let mut seq = prefix.clone();
            seq.push((Slot::Root, b));
            out.push(CodePair {
                pool: pool.clone(),
                seq,
            });
        }
        return;
    }
    for opt in options {
        prefix.push(*opt);
        fill_seq(options, root_blocks, n, pool, prefix, out);
        prefix.pop();
    }
}

/// All code pairs of `spec` whose pool holds `m` blocks in total.
pub fn enumerate_code_pairs(spec: &Multiset, m: usize, cap: u32) -> Result<Vec<CodePair>> {
    spec.ensure_within(cap)?;
    let mut slots = vec![Slot::Root];
    for v in spec.values() {
        for j in 1..spec.multiplicity(v) {
            slots.push(Slot::Child { value: v, index: j });
        }
    }
    let n = spec.n();
    let mut out = Vec::new();
    let mut counts = vec![0usize; slots.len()];
    gen_pools(m, 0, &mut counts, &mut |counts| {
        if counts[0] == 0 {
            return;
        }
        let pool: BTreeMap<Slot, usize> = slots
            .iter()
            .zip(counts)
            .filter(|(_, c)| **c > 0)
            .map(|(s, c)| (*s, *c))
            .collect();
        let options: Vec<(Slot, usize)> = slots
            .iter()
            .zip(counts)
            .flat_map(|(s, c)| {
                let s = *s;
                (1..=*c).map(move |b| (s, b))
            })
            .collect();
        fill_seq(&options, counts[0], n, &pool, &mut Vec::new(), &mut out);
    });
    Ok(out)
}

/// How many code pairs `spec` admits with a pool of `m` blocks.
pub fn count_code_pairs(spec: &Multiset, m: usize) -> BigInt {
    closed_form_coefficient(spec, m)
}
