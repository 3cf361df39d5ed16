//! The copoint pipeline: PQ-trees built from the copoints attached at a
//! point, frontiers, the recognition entry point, and the correspondences
//! between copoints and both trees.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::matrix::{first_violation, is_mmodule, DissimilarityMatrix, IndexSet, Order};
use crate::mmodtree::MModuleTree;
use crate::pqtree::{dist, is_split_at, mk_p, mk_q, tree_diameter, PqTree};
use crate::refine::copoint_partition;
pub use crate::refine::CopointPartition;
use crate::weight::Weight;

/// Outcome of recognition. Refusal is a value: either the structural
/// contradiction met while building the tree or a triple violating the
/// Robinson condition in the candidate order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recognition {
    Accepted { tree: PqTree, order: Order },
    Rejected { reason: Error },
}

impl Recognition {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Recognition::Accepted { .. })
    }
}

/// `d(A, B)` between two classes, read at their first points.
fn dc(m: &DissimilarityMatrix, a: &IndexSet, b: &IndexSet) -> Weight {
    m.d(a.as_slice()[0], b.as_slice()[0])
}

fn dp(m: &DissimilarityMatrix, p: usize, c: &IndexSet) -> Weight {
    m.d(p, c.as_slice()[0])
}

/// Frontier flags of the copoints `C1, …, Ck` of `cp`: flag `i-1` is true
/// iff `[C0, Ci]` is an mmodule.
///
/// For every `j'`, the first `j < j'` with `d(Cj, Cj') ≠ d(p, Cj')` makes
/// `Cj, …, Cj'-1` non-frontiers; all unmarked copoints are frontiers.
pub fn frontiers(m: &DissimilarityMatrix, cp: &CopointPartition) -> Vec<bool> {
    let cs = cp.copoints();
    let k = cs.len();
    let mut flag = vec![true; k];
    for jp in 1..k {
        let target = dp(m, cp.p, &cs[jp]);
        if let Some(j) = (0..jp).find(|&j| dc(m, &cs[j], &cs[jp]) != target) {
            flag[j..jp].iter_mut().for_each(|f| *f = false);
        }
    }
    flag
}

/// Frontier flags computed directly from the definition (quadratic per
/// copoint); used to cross-check [`frontiers`].
pub fn frontiers_direct(
    m: &DissimilarityMatrix,
    subset: &IndexSet,
    cp: &CopointPartition,
) -> Vec<bool> {
    let mut prefix: Vec<usize> = cp.classes[0].as_slice().to_vec();
    cp.copoints()
        .iter()
        .map(|c| {
            prefix.extend(c.iter());
            is_mmodule(m, subset.as_slice(), &prefix)
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Unplaced,
    Left,
    Right,
}

/// Result of [`next_frontier`]: copoints (by 1-based index) placed left and
/// right of `p`, and the last frontier `i` before `Ck` (0 if none).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierSplit {
    pub left: Vec<usize>,
    pub i: usize,
    pub right: Vec<usize>,
}

/// Place the copoints after the last frontier before `Ck` on either side of
/// `p`. `cs[j-1]` is `Cj`; returned indices are 1-based.
pub fn next_frontier(m: &DissimilarityMatrix, p: usize, cs: &[IndexSet]) -> Result<FrontierSplit> {
    let k = cs.len();
    if k == 0 {
        return Ok(FrontierSplit {
            left: Vec::new(),
            i: 0,
            right: Vec::new(),
        });
    }
    let c = |j: usize| &cs[j - 1];
    let mut side = vec![Side::Unplaced; k + 1];
    let mut left: VecDeque<usize> = VecDeque::new();
    let mut right: VecDeque<usize> = VecDeque::from([k]);
    side[k] = Side::Right;
    let mut i = k;
    let mut l = k;
    while l >= i {
        let target = dp(m, p, c(l));
        let start = i;
        for j in (1..start).rev() {
            let dj = dc(m, c(j), c(l));
            let to_left =
                (dj < target && side[l] == Side::Left) || (dj > target && side[l] == Side::Right);
            let to_right =
                (dj < target && side[l] == Side::Right) || (dj > target && side[l] == Side::Left);
            if to_left || to_right {
                let (near, far, near_side, far_side) = if to_left {
                    (&mut left, &mut right, Side::Left, Side::Right)
                } else {
                    (&mut right, &mut left, Side::Right, Side::Left)
                };
                for t in (j + 1..i).rev() {
                    far.push_front(t);
                    side[t] = far_side;
                }
                near.push_front(j);
                side[j] = near_side;
                i = j;
            }
        }
        if l == 0 {
            break;
        }
        l -= 1;
    }
    check_sides(m, p, cs, &side, i)?;
    Ok(FrontierSplit {
        left: left.into_iter().rev().collect(),
        i: i - 1,
        right: right.into_iter().collect(),
    })
}

/// A copoint closer to some later copoint than `p` is must lie on its
/// side; one farther away must lie on the other.
fn check_sides(
    m: &DissimilarityMatrix,
    p: usize,
    cs: &[IndexSet],
    side: &[Side],
    i: usize,
) -> Result<()> {
    let k = cs.len();
    for l in i..=k {
        let target = dp(m, p, &cs[l - 1]);
        for j in i..l {
            let dj = dc(m, &cs[j - 1], &cs[l - 1]);
            let same = side[j] == side[l];
            if (dj < target && !same) || (dj > target && same) {
                return Err(Error::SideConflict(cs[j - 1].as_slice()[0]));
            }
        }
    }
    Ok(())
}

/// Index `i` (1-based, `2 ≤ i ≤ ℓ`) before which a new child at uniform
/// distance `delta` is inserted into the children of a Q-node: the minimal
/// `i` with `d(βi, βℓ) ≤ δ` (or `i = ℓ`) and `d(βi-1, βi) ≥ δ`.
pub fn admissible_hole(
    m: &DissimilarityMatrix,
    delta: Weight,
    children: &[PqTree],
) -> Result<usize> {
    let l = children.len();
    (2..=l)
        .find(|&i| {
            (i == l || dist(m, &children[i - 1], &children[l - 1]) <= delta)
                && dist(m, &children[i - 2], &children[i - 1]) >= delta
        })
        .ok_or(Error::NoAdmissibleHole)
}

/// The PQ-tree of `(subset, d)` for a Robinson subspace, from the copoints
/// attached at the smallest point.
pub fn pq_tree2(m: &DissimilarityMatrix, subset: &IndexSet) -> Result<PqTree> {
    subset.check_range(m.n())?;
    let p = subset.min().ok_or(Error::EmptySubset)?;
    if subset.len() == 1 {
        return Ok(PqTree::Leaf(p));
    }
    let cp = copoint_partition(m, subset, p)?;
    copoints_to_pq_tree(m, p, cp.copoints())
}

/// The PQ-tree of `{p} ∪ C1 ∪ … ∪ Ck` from the copoints at `p` in
/// proximity order.
pub fn copoints_to_pq_tree(m: &DissimilarityMatrix, p: usize, cs: &[IndexSet]) -> Result<PqTree> {
    let k = cs.len();
    if k == 0 {
        return Ok(PqTree::Leaf(p));
    }
    let split = next_frontier(m, p, cs)?;
    let tp = if split.i > 0 {
        copoints_to_pq_tree(m, p, &cs[..split.i])?
    } else {
        PqTree::Leaf(p)
    };
    if split.i + 1 < k {
        let mut kids = Vec::with_capacity(split.left.len() + split.right.len() + 1);
        for &j in &split.left {
            kids.push(pq_tree2(m, &cs[j - 1])?);
        }
        kids.push(tp);
        for &j in &split.right {
            kids.push(pq_tree2(m, &cs[j - 1])?);
        }
        return Ok(mk_q(m, kids));
    }

    let ck = &cs[k - 1];
    let alpha = pq_tree2(m, ck)?;
    let delta = dp(m, p, ck);
    let diam = tree_diameter(m, &alpha);
    Ok(match alpha {
        PqTree::P(betas) if diam == delta => {
            let mut kids = betas;
            kids.push(tp);
            mk_p(m, kids)
        }
        PqTree::P(mut betas) if diam > delta => {
            if betas.len() != 2 {
                return Err(Error::NotRobinson(format!(
                    "a copoint has a P-root of arity {} wider than its distance to the attaching point",
                    betas.len()
                )));
            }
            let b2 = betas.pop().unwrap();
            let b1 = betas.pop().unwrap();
            PqTree::Q(vec![b1, tp, b2])
        }
        PqTree::Q(mut betas) if diam > delta => match apex_at(m, &betas, delta) {
            Some(j) => {
                let apex = std::mem::replace(&mut betas[j], PqTree::Leaf(p));
                betas[j] = if is_split_at(m, &apex, delta) {
                    let PqTree::P(mut gammas) = apex else {
                        unreachable!("split nodes are P-nodes")
                    };
                    gammas.push(tp);
                    mk_p(m, gammas)
                } else {
                    mk_p(m, vec![apex, tp])
                };
                PqTree::Q(betas)
            }
            None => {
                let i = admissible_hole(m, delta, &betas)?;
                betas.insert(i - 1, tp);
                PqTree::Q(betas)
            }
        },
        // Leaves, P-roots narrower than δ, and Q-roots no wider than δ.
        alpha => mk_p(m, vec![alpha, tp]),
    })
}

/// Interior child of a Q-node at distance exactly `delta` from its first,
/// last and adjacent siblings.
fn apex_at(m: &DissimilarityMatrix, cs: &[PqTree], delta: Weight) -> Option<usize> {
    let k = cs.len();
    (1..k.saturating_sub(1)).find(|&i| {
        dist(m, &cs[0], &cs[i]) == delta
            && dist(m, &cs[i - 1], &cs[i]) == delta
            && dist(m, &cs[i], &cs[i + 1]) == delta
            && dist(m, &cs[i], &cs[k - 1]) == delta
    })
}

/// Recognise a Robinson space: build the PQ-tree from copoints, bring it to
/// normal form, then verify its canonical order. Accepted orders always
/// verify; by the correctness of the construction every Robinson space is
/// accepted.
pub fn recognize_robinson(m: &DissimilarityMatrix) -> Recognition {
    if let Err(e) = m.validate() {
        return Recognition::Rejected { reason: e };
    }
    let tree = match pq_tree2(m, &m.all()) {
        Ok(t) => t.normal_form(),
        Err(e) => return Recognition::Rejected { reason: e },
    };
    let order = tree.canonical_order();
    match first_violation(m, &order) {
        None => Recognition::Accepted { tree, order },
        Some((x, y, z)) => Recognition::Rejected {
            reason: Error::RobinsonViolation {
                x,
                y,
                z,
                dxy: m.format_weight(m.d(x, y)),
                dyz: m.format_weight(m.d(y, z)),
                dxz: m.format_weight(m.d(x, z)),
            },
        },
    }
}

/// The copoints at `p` read off the mmodule tree along the root-to-`p`
/// path: a ∩-node contributes its leaf set minus the path child, a ∪-node
/// each off-path child. Sorted by smallest point.
pub fn copoints_from_mmodule_tree(tree: &MModuleTree, p: usize) -> Result<Vec<IndexSet>> {
    let mut out = Vec::new();
    let mut t = tree;
    loop {
        match t {
            MModuleTree::Leaf(x) if *x == p => break,
            MModuleTree::Leaf(_) => return Err(Error::NotALeaf(p)),
            MModuleTree::Cup(cs) | MModuleTree::Cap { children: cs, .. } => {
                let on_path = cs
                    .iter()
                    .position(|c| c.leaves().contains(p))
                    .ok_or(Error::NotALeaf(p))?;
                if matches!(t, MModuleTree::Cup(_)) {
                    out.extend(
                        cs.iter()
                            .enumerate()
                            .filter(|&(i, _)| i != on_path)
                            .map(|(_, c)| c.leaves()),
                    );
                } else {
                    let mut rest = Vec::new();
                    cs.iter()
                        .enumerate()
                        .filter(|&(i, _)| i != on_path)
                        .for_each(|(_, c)| rest.extend(c.leaf_order()));
                    out.push(IndexSet::from_unsorted(rest));
                }
                t = &cs[on_path];
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Whether `set` is an interval of every order represented by `tree`: a
/// node's leaf set or a run of consecutive children of a Q-node.
pub fn is_block_via_tree(tree: &PqTree, set: &IndexSet) -> bool {
    if set.len() <= 1 {
        return true;
    }
    let mut t = tree;
    loop {
        let cs = t.children();
        if cs.is_empty() {
            return false;
        }
        let leaves: Vec<IndexSet> = cs.iter().map(|c| c.leaves()).collect();
        let inside: Vec<usize> = leaves
            .iter()
            .map(|ls| ls.iter().filter(|&x| set.contains(x)).count())
            .collect();
        let total: usize = inside.iter().sum();
        if total != set.len() {
            return false;
        }
        let touched: Vec<usize> = (0..cs.len()).filter(|&i| inside[i] > 0).collect();
        if touched.len() == 1 {
            let c = touched[0];
            if inside[c] == leaves[c].len() {
                return true;
            }
            t = &cs[c];
            continue;
        }
        let full = touched.iter().all(|&i| inside[i] == leaves[i].len());
        let all = touched.len() == cs.len();
        let run = touched.windows(2).all(|w| w[1] == w[0] + 1);
        return full && (all || (matches!(t, PqTree::Q(_)) && run));
    }
}

/// Verify that the standard (non-split) nodes on the path from `p` to the
/// root of the PQ-tree are exactly the initial intervals `[C0, C]` that are
/// both an mmodule and a block.
pub fn upsilon_frontier_check(m: &DissimilarityMatrix, tree: &PqTree, p: usize) -> Result<()> {
    let subset = tree.leaves();
    if !subset.contains(p) {
        return Err(Error::NotALeaf(p));
    }
    // Node sets on the path from the root down to p, with split flags.
    let mut standard: Vec<IndexSet> = Vec::new();
    let mut t = tree;
    let mut split = false;
    while !t.is_leaf() {
        if !split {
            standard.push(t.leaves());
        }
        let cs = t.children();
        let next = cs
            .iter()
            .position(|c| c.leaves().contains(p))
            .ok_or(Error::NotALeaf(p))?;
        split = match t {
            PqTree::Q(_) => crate::pqtree::find_apex(m, cs)
                .is_some_and(|(i, d)| i == next && is_split_at(m, &cs[i], d)),
            _ => false,
        };
        t = &cs[next];
    }
    standard.sort();

    let cp = copoint_partition(m, &subset, p)?;
    let mut prefix: Vec<usize> = vec![p];
    let mut expected: Vec<IndexSet> = Vec::new();
    for c in cp.copoints() {
        prefix.extend(c.iter());
        let s = IndexSet::from_unsorted(prefix.clone());
        if is_mmodule(m, subset.as_slice(), s.as_slice()) && is_block_via_tree(tree, &s) {
            expected.push(s);
        }
    }
    expected.sort();
    if standard != expected {
        let diff = standard
            .iter()
            .filter(|s| !expected.contains(s))
            .chain(expected.iter().filter(|s| !standard.contains(s)))
            .next()
            .map(|s| format!("{:?}", s.as_slice()))
            .unwrap_or_default();
        return Err(Error::CorrespondenceViolation(diff));
    }
    Ok(())
}
