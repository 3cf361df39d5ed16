//! The mmodule tree, built top-down from the dendrogram of the subdominant
//! ultrametric: at every step the children of the current dendrogram node
//! are the ρ-components, and refinement of dendrogram subtrees yields the
//! maximal mmodules together with the dendrograms of the recursive calls.

use crate::dendrogram::build_dendrogram;
use crate::error::{Error, Result};
use crate::matrix::{rho_components, DissimilarityMatrix, IndexSet};
use crate::refine::{stable_trees, RefineTree};
use crate::weight::Weight;

/// Annotation of a special ∩-node: every cross-child distance is `delta`
/// and exactly the child at index `large` has diameter above `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Special {
    pub delta: Weight,
    pub large: usize,
}

/// The mmodule tree. Children of each node are kept sorted by smallest
/// leaf; arity-2 nodes are always ∩-nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MModuleTree {
    Leaf(usize),
    /// ∪-node: each child's leaf set is an mmodule.
    Cup(Vec<MModuleTree>),
    /// ∩-node: every union of a proper subset of the children is an mmodule.
    Cap {
        children: Vec<MModuleTree>,
        special: Option<Special>,
    },
}

impl MModuleTree {
    /// A ∪-node, sorted; two children make a ∩-node instead.
    pub fn cup(children: Vec<MModuleTree>) -> MModuleTree {
        if children.len() == 2 {
            return MModuleTree::cap(children, None);
        }
        let mut children = children;
        children.sort_by_key(|c| c.min_leaf());
        MModuleTree::Cup(children)
    }

    /// A ∩-node, sorted, with the large index remapped.
    pub fn cap(children: Vec<MModuleTree>, special: Option<Special>) -> MModuleTree {
        let mut keyed: Vec<(usize, bool, MModuleTree)> = children
            .into_iter()
            .enumerate()
            .map(|(i, c)| (c.min_leaf(), special.is_some_and(|s| s.large == i), c))
            .collect();
        keyed.sort_by_key(|k| k.0);
        let large = keyed.iter().position(|k| k.1);
        let special = special.map(|s| Special {
            delta: s.delta,
            large: large.expect("large child present"),
        });
        MModuleTree::Cap {
            children: keyed.into_iter().map(|k| k.2).collect(),
            special,
        }
    }

    /// Smallest leaf (children are sorted, so this follows first children).
    pub fn min_leaf(&self) -> usize {
        let mut t = self;
        loop {
            match t {
                MModuleTree::Leaf(x) => return *x,
                MModuleTree::Cup(cs) | MModuleTree::Cap { children: cs, .. } => t = &cs[0],
            }
        }
    }

    pub fn children(&self) -> &[MModuleTree] {
        match self {
            MModuleTree::Leaf(_) => &[],
            MModuleTree::Cup(cs) | MModuleTree::Cap { children: cs, .. } => cs,
        }
    }

    pub fn special(&self) -> Option<Special> {
        match self {
            MModuleTree::Cap { special, .. } => *special,
            _ => None,
        }
    }

    pub fn leaf_order(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.push_leaves(&mut out);
        out
    }

    fn push_leaves(&self, out: &mut Vec<usize>) {
        match self {
            MModuleTree::Leaf(x) => out.push(*x),
            _ => self.children().iter().for_each(|c| c.push_leaves(out)),
        }
    }

    pub fn leaves(&self) -> IndexSet {
        IndexSet::from_unsorted(self.leaf_order())
    }

    /// Re-sort every child list by smallest leaf (remapping large indices)
    /// and turn arity-2 ∪-nodes into ∩-nodes.
    pub fn canonical(&self) -> MModuleTree {
        match self {
            MModuleTree::Leaf(x) => MModuleTree::Leaf(*x),
            MModuleTree::Cup(cs) => MModuleTree::cup(cs.iter().map(|c| c.canonical()).collect()),
            MModuleTree::Cap { children, special } => {
                MModuleTree::cap(children.iter().map(|c| c.canonical()).collect(), *special)
            }
        }
    }

    /// Every node with its leaf set, in pre-order.
    pub fn nodes(&self) -> Vec<(&MModuleTree, IndexSet)> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a MModuleTree, out: &mut Vec<(&'a MModuleTree, IndexSet)>) {
            out.push((t, t.leaves()));
            for c in t.children() {
                go(c, out);
            }
        }
        go(self, &mut out);
        out
    }
}

/// One level of the construction: the kind of the root and the dendrograms
/// of the sets its children stand for.
pub(crate) enum RootAnalysis {
    Leaf(usize),
    Cap(Vec<RefineTree>),
    Cup(Vec<RefineTree>),
    Special {
        delta: Weight,
        small: Vec<RefineTree>,
        large: LargeChild,
    },
}

pub(crate) enum LargeChild {
    /// The large δ*-mmodule has exactly two maximal mmodules.
    Cap(RefineTree, RefineTree),
    Cup(Vec<RefineTree>),
}

/// Analyse the root of the mmodule tree of the set whose subdominant
/// dendrogram is `tree`.
pub(crate) fn analyze_root(m: &DissimilarityMatrix, tree: RefineTree) -> Result<RootAnalysis> {
    let (delta, comps) = match tree {
        RefineTree::Leaf(x) => return Ok(RootAnalysis::Leaf(x)),
        RefineTree::Node(Some(w), cs) => (w, cs),
        RefineTree::Node(None, _) => {
            return Err(Error::MalformedTree(
                "dendrogram node without weight".into(),
            ))
        }
    };
    let sets: Vec<Vec<usize>> = comps.iter().map(|c| c.leaf_order()).collect();
    let total: usize = sets.iter().map(|s| s.len()).sum();

    if cfg!(debug_assertions) && total <= 48 {
        let all: Vec<usize> = sets.iter().flatten().copied().collect();
        let mut want = rho_components(m, &all)?;
        let mut got: Vec<IndexSet> = sets
            .iter()
            .map(|s| IndexSet::from_unsorted(s.clone()))
            .collect();
        want.sort();
        got.sort();
        debug_assert_eq!(got, want, "dendrogram children must be the ρ-components");
    }

    // A ρ-component is a δ*-mmodule iff every distance leaving it is δ*.
    let is_dmod: Vec<bool> = (0..sets.len())
        .map(|i| {
            sets.iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .all(|(_, other)| {
                    sets[i]
                        .iter()
                        .all(|&x| other.iter().all(|&y| m.d(x, y) == delta))
                })
        })
        .collect();

    if is_dmod.iter().all(|&b| b) {
        return Ok(RootAnalysis::Cap(comps));
    }

    if !is_dmod.iter().any(|&b| b) {
        return connected_case(m, delta, comps, &sets);
    }

    // Mixed case: the non-mmodule components form the large δ*-mmodule.
    let mut small = Vec::new();
    let mut big: Vec<(RefineTree, Vec<usize>)> = Vec::new();
    for ((c, s), dm) in comps.into_iter().zip(sets).zip(is_dmod) {
        if dm {
            small.push(c);
        } else {
            big.push((c, s));
        }
    }
    let k = big.len();
    let mut adj = vec![Vec::new(); k];
    for a in 0..k {
        for b in a + 1..k {
            if big[a]
                .1
                .iter()
                .any(|&x| big[b].1.iter().any(|&y| m.d(x, y) > delta))
            {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    let mut colour = vec![u8::MAX; k];
    colour[0] = 0;
    let mut queue = vec![0usize];
    let mut head = 0;
    while head < queue.len() {
        let a = queue[head];
        head += 1;
        for &b in &adj[a] {
            if colour[b] == u8::MAX {
                colour[b] = 1 - colour[a];
                queue.push(b);
            } else if colour[b] == colour[a] {
                return Err(Error::NotRobinson(
                    "the far-pair graph of the large component is not bipartite".into(),
                ));
            }
        }
    }
    if queue.len() != k {
        return Err(Error::NotRobinson(
            "the far-pair graph of the large component is disconnected".into(),
        ));
    }
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for ((c, _), col) in big.into_iter().zip(colour) {
        if col == 0 {
            lo.push(c);
        } else {
            hi.push(c);
        }
    }
    // Within one side all cross distances are exactly δ*, so the join of
    // the component dendrograms at weight δ* is the side's dendrogram.
    let s_lo = RefineTree::join(Some(delta), lo);
    let s_hi = RefineTree::join(Some(delta), hi);
    let mut parts = stable_trees(m, vec![s_lo, s_hi])?;
    let large = if parts.len() == 2 {
        let b = parts.pop().unwrap();
        let a = parts.pop().unwrap();
        LargeChild::Cap(a, b)
    } else {
        LargeChild::Cup(parts)
    };
    Ok(RootAnalysis::Special {
        delta,
        small,
        large,
    })
}

fn connected_case(
    m: &DissimilarityMatrix,
    delta: Weight,
    mut comps: Vec<RefineTree>,
    sets: &[Vec<usize>],
) -> Result<RootAnalysis> {
    // C1: the smallest component, ties broken by smallest point.
    let c1 = (0..sets.len())
        .min_by_key(|&i| (sets[i].len(), sets[i].iter().min().copied()))
        .expect("at least two components");
    let t1 = comps.remove(c1);
    let rest = RefineTree::join(Some(delta), comps);
    let mut parts = stable_trees(m, vec![t1, rest])?;
    let reps: Vec<usize> = parts.iter().map(|p| p.first_leaf()).collect();
    let l = parts.len();
    let r0 = reps[0];
    let dwarf = (1..l).find(|&i| {
        m.d(r0, reps[i]) == delta
            && (1..l)
                .filter(|&j| j != i)
                .all(|j| m.d(r0, reps[j]) == m.d(reps[i], reps[j]))
    });
    if let Some(i) = dwarf {
        if cfg!(debug_assertions) {
            let again = (i + 1..l).find(|&i2| {
                m.d(r0, reps[i2]) == delta
                    && (1..l)
                        .filter(|&j| j != i2)
                        .all(|j| m.d(r0, reps[j]) == m.d(reps[i2], reps[j]))
            });
            debug_assert!(again.is_none(), "dwarf partner must be unique");
        }
        let si = parts.remove(i);
        let s1 = parts.remove(0);
        let merged = match si {
            RefineTree::Node(Some(w), mut cs) if w == delta => {
                cs.push(s1);
                RefineTree::Node(Some(w), cs)
            }
            other => RefineTree::Node(Some(delta), vec![s1, other]),
        };
        let mut out = vec![merged];
        out.extend(parts);
        return Ok(RootAnalysis::Cup(out));
    }
    Ok(RootAnalysis::Cup(parts))
}

fn build(m: &DissimilarityMatrix, tree: RefineTree) -> Result<MModuleTree> {
    let rec = |ts: Vec<RefineTree>| {
        ts.into_iter()
            .map(|t| build(m, t))
            .collect::<Result<Vec<_>>>()
    };
    Ok(match analyze_root(m, tree)? {
        RootAnalysis::Leaf(x) => MModuleTree::Leaf(x),
        RootAnalysis::Cap(ts) => MModuleTree::cap(rec(ts)?, None),
        RootAnalysis::Cup(ts) => MModuleTree::cup(rec(ts)?),
        RootAnalysis::Special {
            delta,
            small,
            large,
        } => {
            let mut children = rec(small)?;
            let large_tree = match large {
                LargeChild::Cap(a, b) => MModuleTree::cap(vec![build(m, a)?, build(m, b)?], None),
                LargeChild::Cup(ts) => MModuleTree::cup(rec(ts)?),
            };
            children.push(large_tree);
            let large = children.len() - 1;
            MModuleTree::cap(children, Some(Special { delta, large }))
        }
    })
}

fn subset_dendrogram(m: &DissimilarityMatrix, subset: &IndexSet) -> Result<RefineTree> {
    subset.check_range(m.n())?;
    let t = build_dendrogram(m, subset.as_slice())?;
    Ok(RefineTree::from(&t.root))
}

/// The mmodule tree of `(subset, d)` for a Robinson subspace.
///
/// Structural contradictions that cannot occur in a Robinson space are
/// reported as [`Error::NotRobinson`]; on other non-Robinson input the
/// result is unspecified.
pub fn mmodule_tree(m: &DissimilarityMatrix, subset: &IndexSet) -> Result<MModuleTree> {
    build(m, subset_dendrogram(m, subset)?)
}

/// The maximal mmodules of `(subset, d)`: the children of a ∪-root, or the
/// complements of the children of a ∩-root.
pub fn maximal_mmodules(m: &DissimilarityMatrix, subset: &IndexSet) -> Result<Vec<IndexSet>> {
    if subset.len() < 2 {
        return Err(Error::SubsetTooSmall { size: subset.len() });
    }
    let complement = |part: &IndexSet| {
        IndexSet::from_unsorted(subset.iter().filter(|&x| !part.contains(x)).collect())
    };
    Ok(match analyze_root(m, subset_dendrogram(m, subset)?)? {
        RootAnalysis::Leaf(_) => unreachable!("at least two points"),
        RootAnalysis::Cup(ts) => ts.iter().map(|t| t.leaves()).collect(),
        RootAnalysis::Cap(ts) => ts.iter().map(|t| complement(&t.leaves())).collect(),
        RootAnalysis::Special { small, large, .. } => {
            let mut out: Vec<IndexSet> = small.iter().map(|t| complement(&t.leaves())).collect();
            let mut big = Vec::new();
            match &large {
                LargeChild::Cap(a, b) => {
                    a.push_leaves(&mut big);
                    b.push_leaves(&mut big);
                }
                LargeChild::Cup(ts) => ts.iter().for_each(|t| t.push_leaves(&mut big)),
            }
            out.push(complement(&IndexSet::from_unsorted(big)));
            out
        }
    })
}

/// Membership test for mmodules read off the tree: the empty set,
/// singletons, node leaf sets, and unions of a proper subset of the children
/// of a ∩-node.
pub fn is_mmodule_via_tree(tree: &MModuleTree, candidate: &IndexSet) -> bool {
    if candidate.len() <= 1 {
        return true;
    }
    let size = candidate.as_slice().last().copied().unwrap_or(0) + 1;
    let mut mask = vec![false; size];
    candidate.iter().for_each(|x| mask[x] = true);
    let want = candidate.len();
    // Post-order: the first node containing the whole candidate is the
    // lowest common ancestor of its points.
    fn go(
        t: &MModuleTree,
        mask: &[bool],
        want: usize,
        verdict: &mut Option<bool>,
    ) -> (usize, usize) {
        match t {
            MModuleTree::Leaf(x) => (usize::from(mask.get(*x).copied().unwrap_or(false)), 1),
            _ => {
                let counts: Vec<(usize, usize)> = t
                    .children()
                    .iter()
                    .map(|c| go(c, mask, want, verdict))
                    .collect();
                let inside: usize = counts.iter().map(|c| c.0).sum();
                let total: usize = counts.iter().map(|c| c.1).sum();
                if verdict.is_none() && inside == want {
                    let is_cap = matches!(t, MModuleTree::Cap { .. });
                    *verdict = Some(
                        inside == total
                            || (is_cap && counts.iter().all(|&(i, n)| i == 0 || i == n)),
                    );
                }
                (inside, total)
            }
        }
    }
    let mut verdict = None;
    let (inside, _) = go(tree, &mask, want, &mut verdict);
    // Points outside the tree can never be part of one of its mmodules.
    inside == want && verdict.unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{equal_triple, flat_abc, worked_example};

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::from_unsorted(v.iter().map(|x| x - 1).collect())
    }

    fn leaf(x: usize) -> MModuleTree {
        MModuleTree::Leaf(x - 1)
    }

    fn cap(cs: Vec<MModuleTree>) -> MModuleTree {
        MModuleTree::cap(cs, None)
    }

    #[test]
    fn worked_example_tree() {
        let d = worked_example();
        let t = mmodule_tree(&d, &d.all()).unwrap();
        let eta1 = cap(vec![leaf(1), leaf(4)]);
        let xi1 = MModuleTree::cap(
            vec![eta1, cap(vec![leaf(2), leaf(3)])],
            Some(Special {
                delta: Weight(2),
                large: 0,
            }),
        );
        let xi2 = cap(vec![leaf(5), leaf(6), leaf(7)]);
        let eta3 = MModuleTree::cup(vec![leaf(8), leaf(9), leaf(12)]);
        let xi3 = MModuleTree::cap(
            vec![leaf(10), leaf(11), eta3],
            Some(Special {
                delta: Weight(2),
                large: 2,
            }),
        );
        let want = MModuleTree::cup(vec![xi1, xi2, xi3]);
        assert_eq!(t, want);
        match &t.children()[2] {
            MModuleTree::Cap {
                special: Some(s),
                children,
            } => {
                assert_eq!(s.delta, Weight(2));
                assert_eq!(children[s.large].leaves(), set(&[8, 9, 12]));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn small_trees() {
        let f = flat_abc();
        let t = mmodule_tree(&f, &f.all()).unwrap();
        assert_eq!(t.leaves(), f.all());
        assert!(matches!(&t, MModuleTree::Cap { children, .. } if children.len() == 2));
        assert_eq!(
            t.children()[0],
            MModuleTree::cap(vec![MModuleTree::Leaf(0), MModuleTree::Leaf(2)], None)
        );
        let e = equal_triple();
        let t = mmodule_tree(&e, &e.all()).unwrap();
        assert_eq!(
            t,
            MModuleTree::cap((0..3).map(MModuleTree::Leaf).collect(), None)
        );
    }

    #[test]
    fn maximal_modules() {
        let d = worked_example();
        let mut got = maximal_mmodules(&d, &d.all()).unwrap();
        got.sort();
        assert_eq!(
            got,
            vec![
                set(&[1, 2, 3, 4]),
                set(&[5, 6, 7]),
                set(&[8, 9, 10, 11, 12])
            ]
        );
        let mut got = maximal_mmodules(&d, &set(&[8, 9, 10, 11, 12])).unwrap();
        got.sort();
        assert_eq!(
            got,
            vec![set(&[8, 9, 10, 12]), set(&[8, 9, 11, 12]), set(&[10, 11])]
        );
    }

    #[test]
    fn membership() {
        let d = worked_example();
        let t = mmodule_tree(&d, &d.all()).unwrap();
        assert!(is_mmodule_via_tree(&t, &set(&[8, 9, 12])));
        assert!(!is_mmodule_via_tree(&t, &set(&[9, 12])));
        assert!(is_mmodule_via_tree(&t, &set(&[10, 11])));
        assert!(is_mmodule_via_tree(&t, &set(&[2, 3])));
        assert!(!is_mmodule_via_tree(&t, &set(&[1, 2, 3])));
        assert!(is_mmodule_via_tree(&t, &d.all()));
    }
}
