use std::fmt;

use crate::error::{Error, Result};
use crate::multiset::Multiset;
use crate::tree::{validate_tree, visit_trees, Label, Tree};

/// A tree of the multiset with `m` unlabeled leaf edges attached at
/// even-level vertices, acting as walls between the labeled children.
///
/// At every even-level vertex the walls cut the labeled children into
/// compartments that increase strictly left to right; a wall is forced to
/// the right of a last child larger than the vertex and to the left of a
/// first child smaller than it.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HalfEdgeTree {
    tree: Tree,
    half_edges: usize,
}

impl HalfEdgeTree {
    /// Validates `tree` as a half-edge tree of `spec`.
    pub fn new(spec: &Multiset, tree: Tree) -> Result<Self> {
        let mut half_edges = 0usize;
        check_even(&tree, 0, &mut half_edges)?;
        let stripped = strip_unlabeled(&tree);
        validate_tree(spec, &stripped)?;
        Ok(HalfEdgeTree { tree, half_edges })
    }

    pub(crate) fn from_valid_parts(tree: Tree, half_edges: usize) -> Self {
        HalfEdgeTree { tree, half_edges }
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn half_edges(&self) -> usize {
        self.half_edges
    }

    /// The underlying tree with every half-edge removed.
    pub fn stripped(&self) -> Tree {
        strip_unlabeled(&self.tree)
    }
}

impl fmt::Display for HalfEdgeTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tree)
    }
}

fn strip_unlabeled(t: &Tree) -> Tree {
    Tree::new(
        t.label,
        t.children
            .iter()
            .filter(|c| c.label != Label::Unlabeled)
            .map(strip_unlabeled)
            .collect(),
    )
}

fn check_even(t: &Tree, level: usize, half_edges: &mut usize) -> Result<()> {
    let own = match t.label {
        Label::Value(v) => v,
        Label::Unlabeled => {
            return Err(Error::InvalidTree(
                "half-edges may only hang from even-level vertices".into(),
            ))
        }
    };
    if level % 2 == 1 {
        // odd level: no walls here, descend through the even children
        for c in &t.children {
            if c.label == Label::Unlabeled {
                return Err(Error::InvalidTree(
                    "half-edges may only hang from even-level vertices".into(),
                ));
            }
            check_even(c, level + 1, half_edges)?;
        }
        return Ok(());
    }
    let mut prev_in_compartment: Option<u32> = None;
    let mut wall_seen = false;
    let mut first_labeled: Option<u32> = None;
    let mut wall_before_first = false;
    let mut last_labeled: Option<u32> = None;
    let mut wall_after_last = false;
    for c in &t.children {
        match c.label {
            Label::Unlabeled => {
                if !c.children.is_empty() {
                    return Err(Error::InvalidTree("half-edges must be leaves".into()));
                }
                *half_edges += 1;
                wall_seen = true;
                wall_after_last = true;
                prev_in_compartment = None;
            }
            Label::Value(v) => {
                if let Some(p) = prev_in_compartment {
                    if p >= v {
                        return Err(Error::InvalidTree(format!(
                            "compartment of vertex {own} is not increasing"
                        )));
                    }
                }
                prev_in_compartment = Some(v);
                if first_labeled.is_none() {
                    first_labeled = Some(v);
                    wall_before_first = wall_seen;
                }
                last_labeled = Some(v);
                wall_after_last = false;
                check_even(c, level + 1, half_edges)?;
            }
        }
    }
    if let Some(f) = first_labeled {
        if own > f && !wall_before_first {
            return Err(Error::InvalidTree(format!(
                "vertex {own}: a wall is required left of first child {f}"
            )));
        }
    }
    if let Some(l) = last_labeled {
        if l > own && !wall_after_last {
            return Err(Error::InvalidTree(format!(
                "vertex {own}: a wall is required right of last child {l}"
            )));
        }
    }
    Ok(())
}

// --- enumeration ----------------------------------------------------------

/// One even-level vertex's wall slots: `children + 1` gaps, some forced.
struct GapSpec {
    gaps: usize,
    forced: Vec<bool>,
}

fn collect_gap_specs(t: &Tree, level: usize, out: &mut Vec<GapSpec>) {
    let own = t.label.value().expect("labeled tree");
    if level.is_multiple_of(2) {
        let labels: Vec<u32> = t
            .children
            .iter()
            .map(|c| c.label.value().expect("labeled tree"))
            .collect();
        let gaps = labels.len() + 1;
        let mut forced = vec![false; gaps];
        if let Some(&f) = labels.first() {
            if own > f {
                forced[0] = true;
            }
        }
        if let Some(&l) = labels.last() {
            if l > own {
                forced[gaps - 1] = true;
            }
        }
        for (i, pair) in labels.windows(2).enumerate() {
            if pair[0] > pair[1] {
                forced[i + 1] = true;
            }
        }
        out.push(GapSpec { gaps, forced });
    }
    for c in &t.children {
        collect_gap_specs(c, level + 1, out);
    }
}

/// Distributes `m` walls over the flattened gaps, each forced gap taking at
/// least one.
fn assign_walls(
    flat: &[bool],
    min_suffix: &[usize],
    idx: usize,
    remaining: usize,
    counts: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    if idx == flat.len() {
        if remaining == 0 {
            f(counts);
        }
        return;
    }
    let lo = if flat[idx] { 1 } else { 0 };
    let reserve = min_suffix[idx + 1];
    if remaining < lo + reserve {
        return;
    }
    for take in lo..=(remaining - reserve) {
        counts.push(take);
        assign_walls(flat, min_suffix, idx + 1, remaining - take, counts, f);
        counts.pop();
    }
}

fn build_with_walls(
    t: &Tree,
    level: usize,
    specs: &[GapSpec],
    counts: &[usize],
    cursor: &mut usize,
    gap_cursor: &mut usize,
) -> Tree {
    if level % 2 == 1 {
        return Tree::new(
            t.label,
            t.children
                .iter()
                .map(|c| build_with_walls(c, level + 1, specs, counts, cursor, gap_cursor))
                .collect(),
        );
    }
    let spec = &specs[*cursor];
    *cursor += 1;
    let my_gaps = *gap_cursor;
    *gap_cursor += spec.gaps;
    let mut children = Vec::new();
    for (i, c) in t.children.iter().enumerate() {
        for _ in 0..counts[my_gaps + i] {
            children.push(Tree::unlabeled_leaf());
        }
        children.push(build_with_walls(
            c,
            level + 1,
            specs,
            counts,
            cursor,
            gap_cursor,
        ));
    }
    for _ in 0..counts[my_gaps + spec.gaps - 1] {
        children.push(Tree::unlabeled_leaf());
    }
    Tree::new(t.label, children)
}

/// All half-edge trees of `spec` with exactly `m` half-edges.
pub fn enumerate_half_edge_trees(spec: &Multiset, m: usize, cap: u32) -> Result<Vec<HalfEdgeTree>> {
    spec.ensure_within(cap)?;
    let mut out = Vec::new();
    visit_trees(spec, &mut |base| {
        let mut gap_specs = Vec::new();
        collect_gap_specs(base, 0, &mut gap_specs);
        let flat: Vec<bool> = gap_specs
            .iter()
            .flat_map(|s| s.forced.iter().copied())
            .collect();
        let mut min_suffix = vec![0usize; flat.len() + 1];
        for i in (0..flat.len()).rev() {
            min_suffix[i] = min_suffix[i + 1] + usize::from(flat[i]);
        }
        let mut counts = Vec::with_capacity(flat.len());
        assign_walls(&flat, &min_suffix, 0, m, &mut counts, &mut |counts| {
            let built = build_with_walls(base, 0, &gap_specs, counts, &mut 0, &mut 0);
            out.push(HalfEdgeTree::from_valid_parts(built, m));
        });
    });
    Ok(out)
}
