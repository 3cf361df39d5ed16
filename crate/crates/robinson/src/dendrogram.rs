//! The vertex-weighted dendrogram of the subdominant ultrametric, built by a
//! single Prim sweep that inserts each vertex as it is visited.

use crate::error::{Error, Result};
use crate::matrix::{DissimilarityMatrix, IndexSet};
use crate::weight::Weight;

/// A dendrogram node. Internal weights strictly increase towards the root
/// and `d̂(x, y)` is the weight of the lowest common ancestor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DNode {
    Leaf(usize),
    Internal {
        weight: Weight,
        children: Vec<DNode>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dendrogram {
    pub root: DNode,
}

impl DNode {
    /// Leaves below this node, sorted.
    pub fn leaves(&self) -> IndexSet {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        IndexSet::from_unsorted(out)
    }

    pub(crate) fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            DNode::Leaf(x) => out.push(*x),
            DNode::Internal { children, .. } => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn weight(&self) -> Option<Weight> {
        match self {
            DNode::Leaf(_) => None,
            DNode::Internal { weight, .. } => Some(*weight),
        }
    }

    pub fn children(&self) -> &[DNode] {
        match self {
            DNode::Leaf(_) => &[],
            DNode::Internal { children, .. } => children,
        }
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a DNode)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }
}

/// Sorted leaf set of a node.
pub fn cluster_of(node: &DNode) -> IndexSet {
    node.leaves()
}

impl Dendrogram {
    /// All internal nodes as `(cluster, weight)` pairs, in pre-order.
    pub fn clusters(&self) -> Vec<(IndexSet, Weight)> {
        let mut out = Vec::new();
        self.root.visit(&mut |n| {
            if let DNode::Internal { weight, .. } = n {
                out.push((n.leaves(), *weight));
            }
        });
        out
    }

    pub fn leaves(&self) -> IndexSet {
        self.root.leaves()
    }

    /// `d̂(x, y)`: the weight of the lowest common ancestor of two leaves.
    pub fn subdominant_distance(&self, x: usize, y: usize) -> Result<Weight> {
        let px = path_to(&self.root, x).ok_or(Error::NotALeaf(x))?;
        let py = path_to(&self.root, y).ok_or(Error::NotALeaf(y))?;
        if x == y {
            return Ok(Weight::ZERO);
        }
        // Paths run leaf → root; walk them from the root end.
        let mut lca = None;
        for (a, b) in px.iter().rev().zip(py.iter().rev()) {
            if std::ptr::eq(*a, *b) {
                lca = Some(*a);
            } else {
                break;
            }
        }
        Ok(lca.and_then(|n| n.weight()).unwrap_or(Weight::ZERO))
    }

    /// The whole induced ultrametric as an `n × n` matrix (points outside
    /// the dendrogram get zero rows). Quadratic in the number of leaves.
    pub fn ultrametric(&self, n: usize) -> Vec<Vec<Weight>> {
        let mut out = vec![vec![Weight::ZERO; n]; n];
        fn go(node: &DNode, out: &mut Vec<Vec<Weight>>) -> Vec<usize> {
            match node {
                DNode::Leaf(x) => vec![*x],
                DNode::Internal { weight, children } => {
                    let mut acc: Vec<usize> = Vec::new();
                    for c in children {
                        let ls = go(c, out);
                        for &a in &acc {
                            for &b in &ls {
                                out[a][b] = *weight;
                                out[b][a] = *weight;
                            }
                        }
                        acc.extend(ls);
                    }
                    acc
                }
            }
        }
        go(&self.root, &mut out);
        out
    }

    /// True iff weights strictly increase from every node to its parent.
    pub fn weights_strictly_increase(&self) -> bool {
        fn ok(node: &DNode, bound: Option<Weight>) -> bool {
            match node {
                DNode::Leaf(_) => true,
                DNode::Internal { weight, children } => {
                    bound.is_none_or(|b| *weight < b)
                        && children.len() >= 2
                        && children.iter().all(|c| ok(c, Some(*weight)))
                }
            }
        }
        ok(&self.root, None)
    }
}

fn path_to(root: &DNode, x: usize) -> Option<Vec<&DNode>> {
    match root {
        DNode::Leaf(y) if *y == x => Some(vec![root]),
        DNode::Leaf(_) => None,
        DNode::Internal { children, .. } => children.iter().find_map(|c| {
            path_to(c, x).map(|mut p| {
                p.push(root);
                p
            })
        }),
    }
}

/// Arena node used during construction.
enum Slot {
    Leaf(usize),
    Internal {
        weight: Weight,
        children: Vec<usize>,
    },
}

/// Build the dendrogram of the subdominant ultrametric of `(subset, d)`.
///
/// The Prim source is the smallest index; among unvisited vertices with the
/// same key the smallest index is visited first. Each visited vertex `u`
/// with key `ρ` is inserted by walking down the leftmost branch until a node
/// of weight at most `ρ` is met.
pub fn build_dendrogram(m: &DissimilarityMatrix, subset: &[usize]) -> Result<Dendrogram> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut pts = subset.to_vec();
    pts.sort_unstable();
    for &x in &pts {
        if x >= m.n() {
            return Err(Error::PointOutOfRange(x));
        }
    }
    let k = pts.len();
    let mut arena: Vec<Slot> = Vec::with_capacity(2 * k);
    arena.push(Slot::Leaf(pts[0]));
    let mut root = 0usize;

    let mut visited = vec![false; k];
    let mut key = vec![Weight(u64::MAX); k];
    visited[0] = true;
    for j in 1..k {
        key[j] = m.d(pts[0], pts[j]);
    }
    for _ in 1..k {
        let mut u = usize::MAX;
        for j in 0..k {
            if !visited[j] && (u == usize::MAX || key[j] < key[u]) {
                u = j;
            }
        }
        visited[u] = true;
        let rho = key[u];
        let leaf = arena.len();
        arena.push(Slot::Leaf(pts[u]));

        // Walk the leftmost branch. `parent` is the node whose first child
        // is `cur` (None when `cur` is the root).
        let mut parent: Option<usize> = None;
        let mut cur = root;
        loop {
            let replacement = match &mut arena[cur] {
                Slot::Leaf(_) => Some((rho, vec![leaf, cur])),
                Slot::Internal { weight, children } => {
                    if *weight < rho {
                        Some((rho, vec![leaf, cur]))
                    } else if *weight == rho {
                        children.insert(0, leaf);
                        None
                    } else {
                        parent = Some(cur);
                        cur = children[0];
                        continue;
                    }
                }
            };
            if let Some((weight, children)) = replacement {
                let id = arena.len();
                arena.push(Slot::Internal { weight, children });
                match parent {
                    None => root = id,
                    Some(p) => {
                        if let Slot::Internal { children, .. } = &mut arena[p] {
                            children[0] = id;
                        }
                    }
                }
            }
            break;
        }

        for j in 0..k {
            if !visited[j] {
                let w = m.d(pts[u], pts[j]);
                if w < key[j] {
                    key[j] = w;
                }
            }
        }
    }
    Ok(Dendrogram {
        root: freeze(&arena, root),
    })
}

fn freeze(arena: &[Slot], id: usize) -> DNode {
    match &arena[id] {
        Slot::Leaf(x) => DNode::Leaf(*x),
        Slot::Internal { weight, children } => DNode::Internal {
            weight: *weight,
            children: children.iter().map(|&c| freeze(arena, c)).collect(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{flat_abc, worked_example};

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::from_unsorted(v.iter().map(|x| x - 1).collect())
    }

    #[test]
    fn worked_example_clusters() {
        let d = worked_example();
        let t = build_dendrogram(&d, d.all().as_slice()).unwrap();
        let mut got = t.clusters();
        got.sort();
        let mut want = vec![
            (set(&[2, 3]), Weight(1)),
            (set(&[1, 2, 3, 4]), Weight(2)),
            (set(&[5, 6, 7]), Weight(1)),
            (set(&[8, 9]), Weight(1)),
            (set(&[8, 9, 10, 11, 12]), Weight(2)),
            (set(&[1, 2, 3, 4, 5, 6, 7]), Weight(5)),
            (set(&(1..=12).collect::<Vec<_>>()), Weight(6)),
        ];
        want.sort();
        assert_eq!(got, want);
        assert!(t.weights_strictly_increase());
        assert_eq!(t.subdominant_distance(0, 7).unwrap(), Weight(6));
        assert_eq!(t.subdominant_distance(1, 2).unwrap(), Weight(1));
        assert_eq!(t.subdominant_distance(4, 5).unwrap(), Weight(1));
        assert_eq!(t.subdominant_distance(0, 99), Err(Error::NotALeaf(99)));
    }

    #[test]
    fn small_cases() {
        let d = worked_example();
        let t = build_dendrogram(&d, &[3]).unwrap();
        assert_eq!(t.root, DNode::Leaf(3));
        assert_eq!(build_dendrogram(&d, &[]), Err(Error::EmptySubset));
        let f = flat_abc();
        let t = build_dendrogram(&f, &[0, 1, 2]).unwrap();
        match &t.root {
            DNode::Internal { weight, children } => {
                assert_eq!(*weight, Weight(1));
                assert_eq!(children.len(), 3);
            }
            _ => panic!("expected an internal root"),
        }
    }
}
