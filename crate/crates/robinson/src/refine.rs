//! Partition refinement: on plain point sets (`stable_partition`) and on
//! X-trees (`stable_trees`), both producing the maximal mmodules contained
//! in the initial parts, in a deterministic order.
//!
//! The pivot is always the front of the pending queue `Z`, a split class
//! hands each of its parts the queue "other parts, then the rest of `Z`",
//! and parts are emitted depth-first in increasing distance from the pivot.
//!
//! That emission order is deterministic but is not, in general, a universal
//! proximity order of the copoints. [`proximity_order`] computes one: it
//! refines the copoints again, starting from classes sorted by distance to
//! `p`, and orders every split by where the pivot must lie relative to the
//! class being split.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::{DissimilarityMatrix, IndexSet};
use crate::weight::Weight;

/// An ordered list of disjoint classes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OrderedPartition {
    pub classes: Vec<IndexSet>,
}

impl std::ops::Deref for OrderedPartition {
    type Target = [IndexSet];
    fn deref(&self) -> &[IndexSet] {
        &self.classes
    }
}

/// A point `p` and its copoints: `classes[0] == {p}` followed by the
/// maximal mmodules avoiding `p`, in proximity order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopointPartition {
    pub p: usize,
    pub classes: Vec<IndexSet>,
}

impl CopointPartition {
    /// The copoints proper, `C1, …, Ck`.
    pub fn copoints(&self) -> &[IndexSet] {
        &self.classes[1..]
    }
}

/// A generic X-tree used as a set representation during refinement.
///
/// Nodes may carry the dendrogram weight they were built from; joins made
/// by [`pivot_tree`] inherit the weight of the node whose children they
/// group, so a refined dendrogram keeps its weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefineTree {
    Leaf(usize),
    Node(Option<Weight>, Vec<RefineTree>),
}

impl RefineTree {
    /// Leaves in left-to-right order.
    pub fn leaf_order(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.push_leaves(&mut out);
        out
    }

    pub(crate) fn push_leaves(&self, out: &mut Vec<usize>) {
        match self {
            RefineTree::Leaf(x) => out.push(*x),
            RefineTree::Node(_, cs) => cs.iter().for_each(|c| c.push_leaves(out)),
        }
    }

    pub fn leaves(&self) -> IndexSet {
        IndexSet::from_unsorted(self.leaf_order())
    }

    pub fn weight(&self) -> Option<Weight> {
        match self {
            RefineTree::Leaf(_) => None,
            RefineTree::Node(w, _) => *w,
        }
    }

    /// Any leaf, found by walking the leftmost branch.
    pub fn first_leaf(&self) -> usize {
        let mut t = self;
        loop {
            match t {
                RefineTree::Leaf(x) => return *x,
                RefineTree::Node(_, cs) => t = &cs[0],
            }
        }
    }

    /// Group trees under one node; a single tree is returned as is.
    pub fn join(weight: Option<Weight>, mut trees: Vec<RefineTree>) -> RefineTree {
        if trees.len() == 1 {
            trees.pop().unwrap()
        } else {
            RefineTree::Node(weight, trees)
        }
    }
}

impl From<&crate::dendrogram::DNode> for RefineTree {
    fn from(n: &crate::dendrogram::DNode) -> Self {
        use crate::dendrogram::DNode;
        match n {
            DNode::Leaf(x) => RefineTree::Leaf(*x),
            DNode::Internal { weight, children } => RefineTree::Node(
                Some(*weight),
                children.iter().map(RefineTree::from).collect(),
            ),
        }
    }
}

/// Split `class` by distance to `q`, in increasing distance; each part keeps
/// the relative order of `class`.
pub(crate) fn refine(m: &DissimilarityMatrix, q: usize, class: &[usize]) -> Vec<Vec<usize>> {
    if let Some(&first) = class.first() {
        let w = m.d(q, first);
        if class.iter().all(|&x| m.d(q, x) == w) {
            return vec![class.to_vec()];
        }
    }
    let mut groups: BTreeMap<Weight, Vec<usize>> = BTreeMap::new();
    for &x in class {
        groups.entry(m.d(q, x)).or_default().push(x);
    }
    groups.into_values().collect()
}

/// Ordered partition of `class` by increasing distance from `q`.
pub fn refine_by_pivot(
    m: &DissimilarityMatrix,
    q: usize,
    class: &IndexSet,
) -> Result<OrderedPartition> {
    if class.contains(q) {
        return Err(Error::PivotInsideClass(q));
    }
    class.check_range(m.n())?;
    if q >= m.n() {
        return Err(Error::PointOutOfRange(q));
    }
    let classes = refine(m, q, class.as_slice())
        .into_iter()
        .map(IndexSet::from_unsorted)
        .collect();
    Ok(OrderedPartition { classes })
}

/// Check that `parts` partition `subset`.
fn check_partition<'a>(
    n: usize,
    subset: impl Iterator<Item = usize>,
    parts: impl Iterator<Item = &'a [usize]>,
) -> Result<()> {
    let mut seen = vec![0u8; n];
    for x in subset {
        if x >= n {
            return Err(Error::PointOutOfRange(x));
        }
        seen[x] = 1;
    }
    for part in parts {
        if part.is_empty() {
            return Err(Error::NotAPartition);
        }
        for &x in part {
            if x >= n || seen[x] != 1 {
                return Err(Error::NotAPartition);
            }
            seen[x] = 2;
        }
    }
    if seen.contains(&1) {
        return Err(Error::NotAPartition);
    }
    Ok(())
}

/// Refine `class` against the pending queue `z`, appending the resulting
/// classes to `out` in emission order.
///
/// A pivot that does not split the class is simply dropped from the queue,
/// so long non-splitting runs cost no copying.
fn refine_part(
    m: &DissimilarityMatrix,
    class: Vec<usize>,
    z: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let mut stack = vec![(class, z, 0usize)];
    while let Some((b, z, mut pos)) = stack.pop() {
        loop {
            if b.len() == 1 || pos == z.len() {
                out.push(b);
                break;
            }
            let q = z[pos];
            let w = m.d(q, b[0]);
            if b.iter().all(|&x| m.d(q, x) == w) {
                pos += 1;
                continue;
            }
            let parts = refine(m, q, &b);
            if parts.len() == 1 {
                pos += 1;
                continue;
            }
            let rest = &z[pos + 1..];
            let mut children = Vec::with_capacity(parts.len());
            for i in 0..parts.len() {
                let mut zi: Vec<usize> = Vec::new();
                for (j, p) in parts.iter().enumerate() {
                    if j != i {
                        zi.extend_from_slice(p);
                    }
                }
                zi.extend_from_slice(rest);
                children.push((parts[i].clone(), zi, 0));
            }
            stack.extend(children.into_iter().rev());
            break;
        }
    }
}

/// Refine `initial` (a partition of `subset`) into the maximal mmodules of
/// `subset` contained in its classes.
pub fn stable_partition(
    m: &DissimilarityMatrix,
    subset: &IndexSet,
    initial: &[IndexSet],
) -> Result<OrderedPartition> {
    check_partition(m.n(), subset.iter(), initial.iter().map(|c| c.as_slice()))?;
    let mut out = Vec::new();
    for (i, class) in initial.iter().enumerate() {
        let mut z = Vec::with_capacity(subset.len() - class.len());
        for (j, other) in initial.iter().enumerate() {
            if j != i {
                z.extend(other.iter());
            }
        }
        // Z(S_i) lists the rest of the subset in subset order.
        z.sort_unstable();
        refine_part(m, class.as_slice().to_vec(), z, &mut out);
    }
    Ok(OrderedPartition {
        classes: out.into_iter().map(IndexSet::from_unsorted).collect(),
    })
}

/// The copoint partition at `p`: `{p}` followed by the copoints in the
/// order produced by refining `({p}, subset ∖ {p})`.
pub fn copoint_partition(
    m: &DissimilarityMatrix,
    subset: &IndexSet,
    p: usize,
) -> Result<CopointPartition> {
    if !subset.contains(p) {
        return Err(Error::NotALeaf(p));
    }
    let rest = IndexSet::from_unsorted(subset.iter().filter(|&x| x != p).collect());
    let initial: Vec<IndexSet> = if rest.is_empty() {
        vec![IndexSet::singleton(p)]
    } else {
        vec![IndexSet::singleton(p), rest]
    };
    let mut classes = stable_partition(m, subset, &initial)?.classes;
    let copoints = classes.split_off(1);
    classes.extend(proximity_order(m, p, copoints));
    Ok(CopointPartition { p, classes })
}

/// Order the copoints of `p` so that, in every compatible order, no point of
/// a later copoint lies between `p` and a point of an earlier one, and the
/// distance to `p` never decreases.
///
/// Classes start as groups of equal distance to `p` and are refined by the
/// representative `q` of each other copoint until every class is a single
/// copoint. The parts of a split class `B` are ordered as follows:
///
/// * `q` in a class before `B`: no point of `B` lies between `p` and `q`, so
///   points nearer to `p` are nearer to `q`; parts go by increasing
///   distance to `q`.
/// * `q` in a class after `B`: `q` lies beyond `B`. Points with
///   `d(q, x) < d(q, p)` are on the side of `q` and approach `p` as the
///   distance grows; points with `d(q, x) > d(q, p)` are on the other side
///   and move away from `p` as it grows. The part at exactly `d(q, p)`
///   comes first, then the far side by increasing distance, then the near
///   side by decreasing distance.
///
/// Each rule keeps the class order valid for every compatible order, so
/// the final order is universal.
pub fn proximity_order(
    m: &DissimilarityMatrix,
    p: usize,
    copoints: Vec<IndexSet>,
) -> Vec<IndexSet> {
    let reps: Vec<usize> = copoints.iter().map(|c| c.as_slice()[0]).collect();
    let k = reps.len();
    let mut by_dist: BTreeMap<Weight, Vec<usize>> = BTreeMap::new();
    for (i, &r) in reps.iter().enumerate() {
        by_dist.entry(m.d(p, r)).or_default().push(i);
    }
    let mut classes: Vec<Vec<usize>> = by_dist.into_values().collect();
    let mut class_of = vec![0usize; k];
    let mut changed = true;
    while changed && classes.len() < k {
        changed = false;
        for q in 0..k {
            if classes.len() == k {
                break;
            }
            for (pos, class) in classes.iter().enumerate() {
                for &c in class {
                    class_of[c] = pos;
                }
            }
            let qpos = class_of[q];
            let rq = reps[q];
            let splits = |class: &Vec<usize>| {
                let w = m.d(rq, reps[class[0]]);
                class.iter().any(|&c| m.d(rq, reps[c]) != w)
            };
            if !classes
                .iter()
                .enumerate()
                .any(|(pos, c)| pos != qpos && c.len() > 1 && splits(c))
            {
                continue;
            }
            changed = true;
            let dq = m.d(rq, p);
            let mut next = Vec::with_capacity(classes.len() + 1);
            for (pos, class) in std::mem::take(&mut classes).into_iter().enumerate() {
                if pos == qpos || class.len() == 1 || !splits(&class) {
                    next.push(class);
                    continue;
                }
                let mut groups: BTreeMap<Weight, Vec<usize>> = BTreeMap::new();
                for &c in &class {
                    groups.entry(m.d(rq, reps[c])).or_default().push(c);
                }
                if pos > qpos {
                    next.extend(groups.into_values());
                } else {
                    let near: Vec<Vec<usize>> =
                        groups.range(..dq).map(|(_, g)| g.clone()).collect();
                    if let Some(g) = groups.remove(&dq) {
                        next.push(g);
                    }
                    next.extend(groups.into_iter().filter(|(w, _)| *w > dq).map(|(_, g)| g));
                    next.extend(near.into_iter().rev());
                }
            }
            classes = next;
        }
    }
    let mut slots: Vec<Option<IndexSet>> = copoints.into_iter().map(Some).collect();
    classes
        .into_iter()
        .flatten()
        .map(|i| slots[i].take().expect("each copoint placed once"))
        .collect()
}

enum Pivoted {
    /// Constant distance to the pivot over the whole tree, handed back.
    Const(Weight, RefineTree),
    Split(Vec<RefineTree>),
}

fn pivot(m: &DissimilarityMatrix, q: usize, tree: RefineTree) -> Pivoted {
    match tree {
        RefineTree::Leaf(x) => Pivoted::Const(m.d(q, x), RefineTree::Leaf(x)),
        RefineTree::Node(w, children) => {
            let results: Vec<Pivoted> = children.into_iter().map(|c| pivot(m, q, c)).collect();
            let uniform = match results.first() {
                Some(Pivoted::Const(w0, _)) => {
                    let w0 = *w0;
                    results
                        .iter()
                        .all(|r| matches!(r, Pivoted::Const(v, _) if *v == w0))
                        .then_some(w0)
                }
                _ => None,
            };
            if let Some(w0) = uniform {
                let cs = results
                    .into_iter()
                    .map(|r| match r {
                        Pivoted::Const(_, t) => t,
                        Pivoted::Split(_) => unreachable!(),
                    })
                    .collect();
                return Pivoted::Const(w0, RefineTree::Node(w, cs));
            }
            let mut forest = Vec::new();
            let mut groups: BTreeMap<Weight, Vec<RefineTree>> = BTreeMap::new();
            for r in results {
                match r {
                    Pivoted::Split(f) => forest.extend(f),
                    Pivoted::Const(v, t) => groups.entry(v).or_default().push(t),
                }
            }
            forest.extend(groups.into_values().map(|g| RefineTree::join(w, g)));
            Pivoted::Split(forest)
        }
    }
}

/// Split `tree` into subtrees and joins of sibling subtrees on which the
/// distance to `q` is constant. Non-constant children are split first, in
/// child order; constant children follow, grouped by increasing distance.
pub fn pivot_tree(m: &DissimilarityMatrix, q: usize, tree: RefineTree) -> Result<Vec<RefineTree>> {
    if tree.leaf_order().contains(&q) {
        return Err(Error::PivotIsLeaf(q));
    }
    Ok(pivot_unchecked(m, q, tree))
}

/// Whether `q` is at one distance from every leaf of `tree`; read-only, so
/// the common non-splitting pivot costs no allocation.
fn constant_from(m: &DissimilarityMatrix, q: usize, tree: &RefineTree) -> bool {
    fn go(m: &DissimilarityMatrix, q: usize, w: Weight, t: &RefineTree) -> bool {
        match t {
            RefineTree::Leaf(x) => m.d(q, *x) == w,
            RefineTree::Node(_, cs) => cs.iter().all(|c| go(m, q, w, c)),
        }
    }
    go(m, q, m.d(q, tree.first_leaf()), tree)
}

fn pivot_unchecked(m: &DissimilarityMatrix, q: usize, tree: RefineTree) -> Vec<RefineTree> {
    if constant_from(m, q, &tree) {
        return vec![tree];
    }
    match pivot(m, q, tree) {
        Pivoted::Const(_, t) => vec![t],
        Pivoted::Split(f) => f,
    }
}

fn refine_tree(
    m: &DissimilarityMatrix,
    tree: RefineTree,
    z: Vec<usize>,
    out: &mut Vec<RefineTree>,
) {
    let mut stack = vec![(tree, z, 0usize)];
    while let Some((t, z, mut pos)) = stack.pop() {
        let mut t = t;
        loop {
            if matches!(t, RefineTree::Leaf(_)) || pos == z.len() {
                out.push(t);
                break;
            }
            let q = z[pos];
            if constant_from(m, q, &t) {
                pos += 1;
                continue;
            }
            let mut parts = pivot_unchecked(m, q, t);
            if parts.len() == 1 {
                t = parts.pop().unwrap();
                pos += 1;
                continue;
            }
            let leaves: Vec<Vec<usize>> = parts.iter().map(|p| p.leaf_order()).collect();
            let rest = &z[pos + 1..];
            let mut children = Vec::with_capacity(parts.len());
            for (i, p) in parts.into_iter().enumerate() {
                let mut zi = Vec::new();
                for (j, l) in leaves.iter().enumerate() {
                    if j != i {
                        zi.extend_from_slice(l);
                    }
                }
                zi.extend_from_slice(rest);
                children.push((p, zi, 0));
            }
            stack.extend(children.into_iter().rev());
            break;
        }
    }
}

/// Tree-based stable partition: the leaf sets of the output are the maximal
/// mmodules of the union contained in the input leaf sets (for coherent
/// input trees).
pub fn stable_trees(m: &DissimilarityMatrix, trees: Vec<RefineTree>) -> Result<Vec<RefineTree>> {
    let leaves: Vec<Vec<usize>> = trees.iter().map(|t| t.leaf_order()).collect();
    let all: Vec<usize> = leaves.iter().flatten().copied().collect();
    check_partition(
        m.n(),
        all.iter().copied(),
        leaves.iter().map(|l| l.as_slice()),
    )?;
    let mut out = Vec::new();
    for (i, t) in trees.into_iter().enumerate() {
        let mut z = Vec::new();
        for (j, l) in leaves.iter().enumerate() {
            if j != i {
                z.extend_from_slice(l);
            }
        }
        refine_tree(m, t, z, &mut out);
    }
    Ok(out)
}
