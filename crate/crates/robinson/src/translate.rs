//! Translation between the PQ-tree and the mmodule tree of a Robinson
//! space, and the node-to-node correspondence between the two.

use crate::copoints::pq_tree2;
use crate::error::{Error, Result};
use crate::matrix::{DissimilarityMatrix, IndexSet};
use crate::mmodtree::{MModuleTree, Special};
use crate::pqtree::{classify_node, dist, find_apex, is_split_at, mk_p, PqTree};
use crate::weight::Weight;

/// The mmodule tree read off the PQ-tree: P-nodes become ∩-nodes,
/// non-conical Q-nodes ∪-nodes, and conical Q-nodes special ∩-nodes whose
/// large child gathers the non-apex children.
pub fn pq_to_mmodule_tree(m: &DissimilarityMatrix, tree: &PqTree) -> MModuleTree {
    match tree {
        PqTree::Leaf(x) => MModuleTree::Leaf(*x),
        PqTree::P(cs) => {
            MModuleTree::cap(cs.iter().map(|c| pq_to_mmodule_tree(m, c)).collect(), None)
        }
        PqTree::Q(cs) => {
            let Some((i, delta)) = find_apex(m, cs) else {
                return MModuleTree::cup(cs.iter().map(|c| pq_to_mmodule_tree(m, c)).collect());
            };
            let t0 = MModuleTree::cup(
                cs.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, c)| pq_to_mmodule_tree(m, c))
                    .collect(),
            );
            let apex = &cs[i];
            let mut children = vec![t0];
            match classify_node(m, apex).delta_star {
                Some(inner) if inner >= delta => {
                    children.extend(apex.children().iter().map(|g| pq_to_mmodule_tree(m, g)));
                }
                _ => children.push(pq_to_mmodule_tree(m, apex)),
            }
            MModuleTree::cap(children, Some(Special { delta, large: 0 }))
        }
    }
}

/// The index `j` (1-based, `1 ≤ j < ℓ`) splitting the children of the
/// Q-root of a large δ*-mmodule into its two sides: from
/// `i0 = max{i : d(γi, γℓ) > δ*}`, the first `i ≥ i0` with
/// `d(γi, γi+1) ≥ δ*`.
pub fn find_bipartition(
    m: &DissimilarityMatrix,
    delta: Weight,
    children: &[PqTree],
) -> Result<usize> {
    let l = children.len();
    if l < 2 {
        return Err(Error::NoBipartition);
    }
    let i0 = (1..l)
        .rev()
        .find(|&i| dist(m, &children[i - 1], &children[l - 1]) > delta)
        .ok_or(Error::NoBipartition)?;
    (i0..l)
        .find(|&i| dist(m, &children[i - 1], &children[i]) >= delta)
        .ok_or(Error::NoBipartition)
}

/// The PQ-tree read off the mmodule tree. Children of Q-nodes coming from
/// ∪-nodes are ordered by recognising the flat quotient; special ∩-nodes
/// insert the apex between the two sides of the large child.
pub fn mmodule_to_pq_tree(m: &DissimilarityMatrix, tree: &MModuleTree) -> Result<PqTree> {
    match tree {
        MModuleTree::Leaf(x) => Ok(PqTree::Leaf(*x)),
        MModuleTree::Cup(cs) => {
            let reps: Vec<usize> = cs.iter().map(|c| c.min_leaf()).collect();
            let q =
                DissimilarityMatrix::from_fn(reps.len(), m.scale(), |a, b| m.d(reps[a], reps[b]));
            let flat = pq_tree2(&q, &q.all())?;
            match &flat {
                PqTree::Q(ks) if ks.len() == cs.len() && ks.iter().all(|k| k.is_leaf()) => {}
                _ => {
                    return Err(Error::NotRobinson(
                        "quotient of a ∪-node is not flat".into(),
                    ))
                }
            }
            let kids = flat
                .canonical_order()
                .iter()
                .map(|&i| mmodule_to_pq_tree(m, &cs[i]))
                .collect::<Result<Vec<_>>>()?;
            Ok(PqTree::Q(kids))
        }
        MModuleTree::Cap {
            children,
            special: None,
        } => Ok(mk_p(
            m,
            children
                .iter()
                .map(|c| mmodule_to_pq_tree(m, c))
                .collect::<Result<Vec<_>>>()?,
        )),
        MModuleTree::Cap {
            children,
            special: Some(Special { delta, large }),
        } => {
            let gammas = match mmodule_to_pq_tree(m, &children[*large])? {
                PqTree::Q(gs) => gs,
                PqTree::P(gs) if gs.len() == 2 => gs,
                _ => {
                    return Err(Error::NotRobinson(
                        "large child is not split by a Q-node".into(),
                    ))
                }
            };
            let j = find_bipartition(m, *delta, &gammas)?;
            let others = children
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != *large)
                .map(|(_, c)| mmodule_to_pq_tree(m, c))
                .collect::<Result<Vec<_>>>()?;
            let apex = mk_p(m, others);
            let mut kids = gammas;
            kids.insert(j, apex);
            Ok(PqTree::Q(kids))
        }
    }
}

/// Summary of a successful node-to-node check.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorrespondenceReport {
    /// Internal nodes present in both trees.
    pub matched: usize,
    /// Large children of special ∩-nodes (no PQ counterpart).
    pub unmatched_mmodule: Vec<IndexSet>,
    /// Split children of conical Q-nodes (no mmodule-tree counterpart).
    pub unmatched_pq: Vec<IndexSet>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    PlainCap,
    Cup,
    SpecialCap,
}

/// Check the correspondence between the internal nodes of both trees of
/// one space: non-special ∩ ↔ P, ∪ ↔ non-conical Q, special ∩ ↔ conical Q,
/// with large children and split children as the only unmatched nodes.
pub fn node_correspondence(
    m: &DissimilarityMatrix,
    pq: &PqTree,
    mt: &MModuleTree,
) -> Result<CorrespondenceReport> {
    if pq.leaves() != mt.leaves() {
        return Err(Error::CorrespondenceViolation(
            "the trees have different leaf sets".into(),
        ));
    }
    let violation = |s: &IndexSet, what: &str| {
        Error::CorrespondenceViolation(format!("{:?}: {what}", s.as_slice()))
    };

    // PQ side: (leaf set, expected kind or None for split nodes).
    let mut pq_nodes: Vec<(IndexSet, Option<Kind>)> = Vec::new();
    fn walk_pq(
        m: &DissimilarityMatrix,
        t: &PqTree,
        split: bool,
        out: &mut Vec<(IndexSet, Option<Kind>)>,
    ) {
        if t.is_leaf() {
            return;
        }
        let cs = t.children();
        let (kind, apex) = match t {
            PqTree::P(_) => (Kind::PlainCap, None),
            _ => match find_apex(m, cs) {
                Some((i, d)) => (Kind::SpecialCap, Some((i, is_split_at(m, &cs[i], d)))),
                None => (Kind::Cup, None),
            },
        };
        out.push((t.leaves(), (!split).then_some(kind)));
        for (i, c) in cs.iter().enumerate() {
            walk_pq(m, c, apex == Some((i, true)), out);
        }
    }
    walk_pq(m, pq, false, &mut pq_nodes);

    let mut mt_nodes: Vec<(IndexSet, Kind, bool)> = Vec::new();
    fn walk_mt(t: &MModuleTree, large: bool, out: &mut Vec<(IndexSet, Kind, bool)>) {
        let kind = match t {
            MModuleTree::Leaf(_) => return,
            MModuleTree::Cup(_) => Kind::Cup,
            MModuleTree::Cap { special: None, .. } => Kind::PlainCap,
            MModuleTree::Cap {
                special: Some(_), ..
            } => Kind::SpecialCap,
        };
        out.push((t.leaves(), kind, large));
        let large_idx = t.special().map(|s| s.large);
        for (i, c) in t.children().iter().enumerate() {
            walk_mt(c, large_idx == Some(i), out);
        }
    }
    walk_mt(mt, false, &mut mt_nodes);

    let mut report = CorrespondenceReport::default();
    for (set, kind) in &pq_nodes {
        let hit = mt_nodes.iter().find(|n| &n.0 == set);
        match (kind, hit) {
            (None, None) => report.unmatched_pq.push(set.clone()),
            (None, Some(_)) => {
                return Err(violation(set, "split node appears in the mmodule tree"))
            }
            (Some(_), None) => return Err(violation(set, "PQ node missing from the mmodule tree")),
            (Some(k), Some(n)) if *k != n.1 => return Err(violation(set, "node kinds disagree")),
            (Some(_), Some(n)) if n.2 => {
                return Err(violation(set, "large child appears in the PQ-tree"))
            }
            (Some(_), Some(_)) => report.matched += 1,
        }
    }
    for (set, _, large) in &mt_nodes {
        if !pq_nodes.iter().any(|n| &n.0 == set) {
            if !large {
                return Err(violation(set, "mmodule-tree node missing from the PQ-tree"));
            }
            report.unmatched_mmodule.push(set.clone());
        }
    }
    Ok(report)
}
