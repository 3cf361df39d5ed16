//! PQ-trees: represented orders, counting and enumeration, the structural
//! normal form used for equivalence, conical/apex/split classification, and
//! the construction from δ*-mmodules.

use num_bigint::BigUint;

use crate::copoints::pq_tree2;
use crate::error::{Error, Result};
use crate::matrix::{
    delta_graph_components, delta_star, diameter, DissimilarityMatrix, IndexSet, Order,
};
use crate::mmodtree::{maximal_mmodules, mmodule_tree, MModuleTree};
use crate::weight::Weight;

/// A PQ-tree over a set of points. Children of a P-node may be permuted
/// freely; children of a Q-node may only be reversed. Arity-2 internal
/// nodes are P-nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PqTree {
    Leaf(usize),
    P(Vec<PqTree>),
    Q(Vec<PqTree>),
}

/// Shape of a node relative to the distances of its children.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeClassification {
    /// `δ*` of the node's leaf set when it is not connected: the common
    /// cross-child distance of a P-node or the apex distance of a conical
    /// Q-node. `None` for a non-conical Q-node (and for leaves).
    pub delta_star: Option<Weight>,
    /// Index of the apex child of a conical Q-node.
    pub apex: Option<usize>,
    /// The apex child is a split node.
    pub split: bool,
}

impl PqTree {
    pub fn children(&self) -> &[PqTree] {
        match self {
            PqTree::Leaf(_) => &[],
            PqTree::P(cs) | PqTree::Q(cs) => cs,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, PqTree::Leaf(_))
    }

    /// Left-to-right leaf sequence.
    pub fn canonical_order(&self) -> Order {
        let mut out = Vec::new();
        self.push_leaves(&mut out);
        out
    }

    pub(crate) fn push_leaves(&self, out: &mut Vec<usize>) {
        match self {
            PqTree::Leaf(x) => out.push(*x),
            _ => self.children().iter().for_each(|c| c.push_leaves(out)),
        }
    }

    pub fn leaves(&self) -> IndexSet {
        IndexSet::from_unsorted(self.canonical_order())
    }

    /// The leftmost leaf, used as the representative of the node's set.
    pub fn rep(&self) -> usize {
        let mut t = self;
        loop {
            match t {
                PqTree::Leaf(x) => return *x,
                PqTree::P(cs) | PqTree::Q(cs) => t = &cs[0],
            }
        }
    }

    pub fn min_leaf(&self) -> usize {
        match self {
            PqTree::Leaf(x) => *x,
            _ => self
                .children()
                .iter()
                .map(|c| c.min_leaf())
                .min()
                .unwrap_or(usize::MAX),
        }
    }

    /// Number of represented orders: the product of `arity!` over P-nodes
    /// and of 2 over Q-nodes.
    pub fn count_orders(&self) -> BigUint {
        match self {
            PqTree::Leaf(_) => BigUint::from(1u32),
            PqTree::P(cs) => {
                let fact =
                    (1..=cs.len()).fold(BigUint::from(1u32), |acc, k| acc * BigUint::from(k));
                cs.iter().fold(fact, |acc, c| acc * c.count_orders())
            }
            PqTree::Q(cs) => cs
                .iter()
                .fold(BigUint::from(2u32), |acc, c| acc * c.count_orders()),
        }
    }

    /// Every represented order exactly once, or `TooManyOrders` when there
    /// are more than `cap`.
    pub fn enumerate_orders(&self, cap: usize) -> Result<Vec<Order>> {
        let count = self.count_orders();
        if count > BigUint::from(cap) {
            return Err(Error::TooManyOrders {
                count: count.to_string(),
                cap,
            });
        }
        Ok(self.orders())
    }

    fn orders(&self) -> Vec<Order> {
        match self {
            PqTree::Leaf(x) => vec![vec![*x]],
            PqTree::P(cs) => {
                let per_child: Vec<Vec<Order>> = cs.iter().map(|c| c.orders()).collect();
                let mut out = Vec::new();
                for perm in permutations(cs.len()) {
                    let seq: Vec<&Vec<Order>> = perm.iter().map(|&i| &per_child[i]).collect();
                    product_concat(&seq, &mut out);
                }
                out
            }
            PqTree::Q(cs) => {
                let per_child: Vec<Vec<Order>> = cs.iter().map(|c| c.orders()).collect();
                let mut out = Vec::new();
                let fwd: Vec<&Vec<Order>> = per_child.iter().collect();
                product_concat(&fwd, &mut out);
                let rev: Vec<&Vec<Order>> = per_child.iter().rev().collect();
                product_concat(&rev, &mut out);
                out
            }
        }
    }

    /// Membership of `order` in the set of represented orders.
    pub fn represents_order(&self, order: &[usize]) -> bool {
        let leaves = self.canonical_order();
        if leaves.len() != order.len() {
            return false;
        }
        let size = leaves
            .iter()
            .chain(order)
            .copied()
            .max()
            .map_or(0, |x| x + 1);
        let mut pos = vec![usize::MAX; size];
        for (i, &x) in order.iter().enumerate() {
            if pos[x] != usize::MAX {
                return false;
            }
            pos[x] = i;
        }
        if leaves.iter().any(|&x| pos[x] == usize::MAX) {
            return false;
        }
        // Returns the (first, last) position of a node's leaves when they
        // are contiguous and the node's constraint holds.
        fn span(t: &PqTree, pos: &[usize]) -> Option<(usize, usize, usize)> {
            match t {
                PqTree::Leaf(x) => Some((pos[*x], pos[*x], 1)),
                PqTree::P(cs) | PqTree::Q(cs) => {
                    let spans = cs
                        .iter()
                        .map(|c| span(c, pos))
                        .collect::<Option<Vec<_>>>()?;
                    let lo = spans.iter().map(|s| s.0).min()?;
                    let hi = spans.iter().map(|s| s.1).max()?;
                    let size: usize = spans.iter().map(|s| s.2).sum();
                    if hi - lo + 1 != size {
                        return None;
                    }
                    if let PqTree::Q(_) = t {
                        let fwd = spans.windows(2).all(|w| w[0].1 < w[1].0);
                        let bwd = spans.windows(2).all(|w| w[0].0 > w[1].1);
                        if !fwd && !bwd {
                            return None;
                        }
                    }
                    Some((lo, hi, size))
                }
            }
        }
        span(self, &pos).is_some()
    }

    /// Structural normal form: arity-1 nodes elided, arity-2 Q-nodes made
    /// P-nodes, P children sorted by smallest leaf, and each Q-node oriented
    /// so that the sequence of its children's smallest leaves is the
    /// lexicographically smaller of the two readings.
    pub fn normal_form(&self) -> PqTree {
        fn go(t: &PqTree) -> (PqTree, usize) {
            match t {
                PqTree::Leaf(x) => (PqTree::Leaf(*x), *x),
                PqTree::P(cs) | PqTree::Q(cs) => {
                    let mut kids: Vec<(PqTree, usize)> = cs.iter().map(go).collect();
                    if kids.len() == 1 {
                        return kids.pop().unwrap();
                    }
                    let min = kids.iter().map(|k| k.1).min().unwrap();
                    if matches!(t, PqTree::P(_)) || kids.len() == 2 {
                        kids.sort_by_key(|k| k.1);
                        (PqTree::P(kids.into_iter().map(|k| k.0).collect()), min)
                    } else {
                        let fwd: Vec<usize> = kids.iter().map(|k| k.1).collect();
                        let rev: Vec<usize> = fwd.iter().rev().copied().collect();
                        if rev < fwd {
                            kids.reverse();
                        }
                        (PqTree::Q(kids.into_iter().map(|k| k.0).collect()), min)
                    }
                }
            }
        }
        go(self).0
    }

    /// True iff both trees represent the same set of orders (decided on
    /// normal forms).
    pub fn equivalent(&self, other: &PqTree) -> bool {
        self.normal_form() == other.normal_form()
    }

    /// Internal nodes with their leaf sets, in pre-order.
    pub fn internal_nodes(&self) -> Vec<(&PqTree, IndexSet)> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a PqTree, out: &mut Vec<(&'a PqTree, IndexSet)>) {
            if !t.is_leaf() {
                out.push((t, t.leaves()));
                t.children().iter().for_each(|c| go(c, out));
            }
        }
        go(self, &mut out);
        out
    }

    /// Number of Q-nodes of arity at least 3.
    pub fn q_count(&self) -> usize {
        match self {
            PqTree::Leaf(_) => 0,
            PqTree::P(cs) => cs.iter().map(|c| c.q_count()).sum(),
            PqTree::Q(cs) => {
                usize::from(cs.len() >= 3) + cs.iter().map(|c| c.q_count()).sum::<usize>()
            }
        }
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::with_capacity(k);
    let mut used = vec![false; k];
    fn go(k: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(k, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    go(k, &mut cur, &mut used, &mut out);
    out
}

fn product_concat(seq: &[&Vec<Order>], out: &mut Vec<Order>) {
    let mut acc: Vec<Order> = vec![Vec::new()];
    for options in seq {
        let mut next = Vec::with_capacity(acc.len() * options.len());
        for a in &acc {
            for o in options.iter() {
                let mut v = a.clone();
                v.extend_from_slice(o);
                next.push(v);
            }
        }
        acc = next;
    }
    out.extend(acc);
}

/// Distance between the leaf sets of two nodes of a PQ-tree (constant,
/// since node leaf sets are disjoint mmodules).
pub(crate) fn dist(m: &DissimilarityMatrix, a: &PqTree, b: &PqTree) -> Weight {
    m.d(a.rep(), b.rep())
}

/// Diameter of a node's leaf set read off the tree: the distance between
/// two children of a P-node, or between the extreme children of a Q-node.
pub(crate) fn tree_diameter(m: &DissimilarityMatrix, t: &PqTree) -> Weight {
    match t {
        PqTree::Leaf(_) => Weight::ZERO,
        PqTree::P(cs) | PqTree::Q(cs) if cs.len() >= 2 => dist(m, &cs[0], &cs[cs.len() - 1]),
        PqTree::P(cs) | PqTree::Q(cs) => tree_diameter(m, &cs[0]),
    }
}

/// A P-node over `children`, normalised: a single child is returned as is,
/// and a P child whose children sit at the same mutual distance as the new
/// node's children is merged into it.
pub(crate) fn mk_p(m: &DissimilarityMatrix, mut children: Vec<PqTree>) -> PqTree {
    if children.len() == 1 {
        return children.pop().unwrap();
    }
    let delta = dist(m, &children[0], &children[1]);
    let mut out = Vec::with_capacity(children.len());
    for c in children {
        match c {
            PqTree::P(gs) if dist(m, &gs[0], &gs[1]) == delta => out.extend(gs),
            other => out.push(other),
        }
    }
    PqTree::P(out)
}

/// A Q-node over `children`, normalised: one child is returned as is and
/// two children make a P-node.
pub(crate) fn mk_q(m: &DissimilarityMatrix, mut children: Vec<PqTree>) -> PqTree {
    match children.len() {
        1 => children.pop().unwrap(),
        2 => mk_p(m, children),
        _ => PqTree::Q(children),
    }
}

/// Rebuild a tree bottom-up through the normalising constructors.
pub fn normalize(m: &DissimilarityMatrix, t: &PqTree) -> PqTree {
    match t {
        PqTree::Leaf(x) => PqTree::Leaf(*x),
        PqTree::P(cs) => mk_p(m, cs.iter().map(|c| normalize(m, c)).collect()),
        PqTree::Q(cs) => mk_q(m, cs.iter().map(|c| normalize(m, c)).collect()),
    }
}

/// Index of an interior child of a Q-node equidistant from all others, and
/// that distance. Only the four distances to the first, last and adjacent
/// children are compared.
pub(crate) fn find_apex(m: &DissimilarityMatrix, cs: &[PqTree]) -> Option<(usize, Weight)> {
    let k = cs.len();
    if k < 3 {
        return None;
    }
    (1..k - 1).find_map(|i| {
        let v = dist(m, &cs[0], &cs[i]);
        let same = dist(m, &cs[i - 1], &cs[i]) == v
            && dist(m, &cs[i], &cs[i + 1]) == v
            && dist(m, &cs[i], &cs[k - 1]) == v;
        same.then_some((i, v))
    })
}

/// True iff `t` is a P-node whose children are at mutual distance `delta`,
/// i.e. `G_δ` of its leaf set is disconnected.
pub(crate) fn is_split_at(m: &DissimilarityMatrix, t: &PqTree, delta: Weight) -> bool {
    matches!(t, PqTree::P(cs) if dist(m, &cs[0], &cs[1]) == delta)
}

/// Classify one node.
pub fn classify_node(m: &DissimilarityMatrix, t: &PqTree) -> NodeClassification {
    match t {
        PqTree::Leaf(_) => NodeClassification {
            delta_star: None,
            apex: None,
            split: false,
        },
        PqTree::P(cs) => NodeClassification {
            delta_star: Some(dist(m, &cs[0], &cs[1])),
            apex: None,
            split: false,
        },
        PqTree::Q(cs) => match find_apex(m, cs) {
            Some((i, v)) => NodeClassification {
                delta_star: Some(v),
                apex: Some(i),
                split: is_split_at(m, &cs[i], v),
            },
            None => NodeClassification {
                delta_star: None,
                apex: None,
                split: false,
            },
        },
    }
}

/// Classification of every internal node, in pre-order, with leaf sets.
pub fn classify(m: &DissimilarityMatrix, tree: &PqTree) -> Vec<(IndexSet, NodeClassification)> {
    tree.internal_nodes()
        .into_iter()
        .map(|(t, s)| (s, classify_node(m, t)))
        .collect()
}

/// The PQ-tree of `(subset, d)` for a Robinson subspace, built from the
/// δ*-mmodules. Children of Q-nodes produced for connected subspaces are
/// ordered by recognising the quotient by the maximal mmodules.
pub fn delta_pq_tree(m: &DissimilarityMatrix, subset: &IndexSet) -> Result<PqTree> {
    subset.check_range(m.n())?;
    match subset.len() {
        0 => return Err(Error::EmptySubset),
        1 => return Ok(PqTree::Leaf(subset.as_slice()[0])),
        _ => {}
    }
    let ds = delta_star(m, subset.as_slice())?;
    let comps = delta_graph_components(m, subset.as_slice(), ds);
    if comps.len() == 1 {
        let parts = maximal_mmodules(m, subset)?;
        if parts.len() < 3 {
            return Err(Error::NotRobinson(
                "connected subspace with fewer than three maximal mmodules".into(),
            ));
        }
        // The maximal mmodules partition a connected space; check that the
        // tree root really is a ∪-node.
        let total: usize = parts.iter().map(|p| p.len()).sum();
        if total != subset.len() {
            return Err(Error::NotRobinson(
                "maximal mmodules of a connected subspace overlap".into(),
            ));
        }
        let reps: Vec<usize> = parts.iter().map(|p| p.as_slice()[0]).collect();
        let q = DissimilarityMatrix::from_fn(reps.len(), m.scale(), |a, b| m.d(reps[a], reps[b]));
        let flat = pq_tree2(&q, &q.all())?;
        let order = match &flat {
            PqTree::Q(cs) if cs.iter().all(|c| c.is_leaf()) => flat.canonical_order(),
            _ => {
                return Err(Error::NotRobinson(
                    "quotient by the maximal mmodules is not flat".into(),
                ))
            }
        };
        let kids = order
            .iter()
            .map(|&i| delta_pq_tree(m, &parts[i]))
            .collect::<Result<Vec<_>>>()?;
        return Ok(mk_q(m, kids));
    }

    let mut trees = comps
        .iter()
        .map(|c| delta_pq_tree(m, c))
        .collect::<Result<Vec<_>>>()?;
    let large = comps.iter().position(|c| diameter(m, c.as_slice()) > ds);
    let Some(j) = large else {
        return Ok(mk_p(m, trees));
    };
    let t0 = trees.remove(j);
    let betas = match t0 {
        PqTree::Q(cs) => cs,
        PqTree::P(cs) if cs.len() == 2 => cs,
        _ => {
            return Err(Error::NotRobinson(
                "the large δ*-mmodule is not split by a Q-node".into(),
            ))
        }
    };
    let l = betas.len();
    // 1-based i in 2..=l, minimal with d(β_i, β_l) <= δ* and d(β_{i-1}, β_i) >= δ*.
    let i = (2..=l)
        .find(|&i| {
            (i == l || dist(m, &betas[i - 1], &betas[l - 1]) <= ds)
                && dist(m, &betas[i - 2], &betas[i - 1]) >= ds
        })
        .ok_or(Error::NoAdmissibleHole)?;
    let apex = mk_p(m, trees);
    let mut kids = betas;
    kids.insert(i - 1, apex);
    Ok(mk_q(m, kids))
}

/// Convenience: both trees of a subset.
pub fn trees_of(m: &DissimilarityMatrix, subset: &IndexSet) -> Result<(PqTree, MModuleTree)> {
    Ok((pq_tree2(m, subset)?, mmodule_tree(m, subset)?))
}
