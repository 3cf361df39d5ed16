//! Tree documents: the JSON interchange form of PQ-trees, mmodule trees and
//! dendrograms, plus DOT and ASCII renderings.
//!
//! Points are 1-based in documents. Weights are decimal strings so they
//! survive a round trip exactly; converting a document back into a tree
//! takes the [`Scale`] of the matrix it belongs to.
//!
//! ```json
//! {"kind": "pq", "root": {"type": "Q", "children": [
//!   {"type": "leaf", "point": 1}, {"type": "leaf", "point": 2}, {"type": "leaf", "point": 3}]}}
//! ```

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dendrogram::{DNode, Dendrogram};
use crate::error::{Error, Result};
use crate::matrix::{is_compatible_order, DissimilarityMatrix};
use crate::mmodtree::{MModuleTree, Special};
use crate::pqtree::{classify_node, PqTree};
use crate::translate::{mmodule_to_pq_tree, pq_to_mmodule_tree};
use crate::weight::Scale;

/// Which tree a document holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    Pq,
    Mmodule,
    Dendrogram,
}

impl TreeKind {
    pub fn name(self) -> &'static str {
        match self {
            TreeKind::Pq => "pq",
            TreeKind::Mmodule => "mmodule",
            TreeKind::Dendrogram => "dendrogram",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeType {
    P,
    Q,
    #[serde(rename = "cup")]
    Cup,
    #[serde(rename = "cap")]
    Cap,
    #[serde(rename = "internal")]
    Internal,
    #[serde(rename = "leaf")]
    Leaf,
}

/// One node of a document.
///
/// * `weight`: dendrogram node weight, the `δ` of a special ∩-node, or the
///   `δ*` of a PQ node when the document was written with a matrix.
/// * `special` / `largeChild`: a special ∩-node and the index of its large
///   child.
/// * `apex`: index of the apex child of a conical Q-node (informational).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NodeRecord {
    #[serde(rename = "type")]
    pub node_type: NodeType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub special: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub large_child: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub apex: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<NodeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<usize>,
}

impl NodeRecord {
    fn leaf(x: usize) -> NodeRecord {
        NodeRecord {
            point: Some(x + 1),
            ..NodeRecord::internal(NodeType::Leaf, Vec::new())
        }
    }

    fn internal(node_type: NodeType, children: Vec<NodeRecord>) -> NodeRecord {
        NodeRecord {
            node_type,
            weight: None,
            special: false,
            large_child: None,
            apex: None,
            children,
            point: None,
        }
    }

    fn leaf_point(&self) -> Result<usize> {
        match (self.point, self.children.is_empty()) {
            (Some(p), true) if p >= 1 => Ok(p - 1),
            _ => Err(Error::MalformedTree(
                "a leaf needs a 1-based point and no children".into(),
            )),
        }
    }

    fn expect_children(&self, min: usize) -> Result<()> {
        if self.point.is_some() || self.children.len() < min {
            return Err(Error::MalformedTree(format!(
                "a {:?} node needs at least {min} children and no point",
                self.node_type
            )));
        }
        Ok(())
    }
}

/// A serialized tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDocument {
    pub kind: TreeKind,
    pub root: NodeRecord,
}

impl TreeDocument {
    /// A PQ-tree document. With a matrix, Q-nodes carry their apex and
    /// nodes their `δ*` where defined.
    pub fn from_pq(tree: &PqTree, annotate: Option<&DissimilarityMatrix>) -> TreeDocument {
        fn go(t: &PqTree, m: Option<&DissimilarityMatrix>) -> NodeRecord {
            let (ty, cs) = match t {
                PqTree::Leaf(x) => return NodeRecord::leaf(*x),
                PqTree::P(cs) => (NodeType::P, cs),
                PqTree::Q(cs) => (NodeType::Q, cs),
            };
            let mut rec = NodeRecord::internal(ty, cs.iter().map(|c| go(c, m)).collect());
            if let Some(m) = m {
                let c = classify_node(m, t);
                rec.weight = c.delta_star.map(|w| m.format_weight(w));
                rec.apex = c.apex;
            }
            rec
        }
        TreeDocument {
            kind: TreeKind::Pq,
            root: go(tree, annotate),
        }
    }

    pub fn from_mmodule(tree: &MModuleTree, scale: Scale) -> TreeDocument {
        fn go(t: &MModuleTree, scale: Scale) -> NodeRecord {
            match t {
                MModuleTree::Leaf(x) => NodeRecord::leaf(*x),
                MModuleTree::Cup(cs) => {
                    NodeRecord::internal(NodeType::Cup, cs.iter().map(|c| go(c, scale)).collect())
                }
                MModuleTree::Cap { children, special } => {
                    let mut rec = NodeRecord::internal(
                        NodeType::Cap,
                        children.iter().map(|c| go(c, scale)).collect(),
                    );
                    if let Some(s) = special {
                        rec.special = true;
                        rec.weight = Some(scale.format(s.delta));
                        rec.large_child = Some(s.large);
                    }
                    rec
                }
            }
        }
        TreeDocument {
            kind: TreeKind::Mmodule,
            root: go(tree, scale),
        }
    }

    /// A dendrogram document; children are listed by smallest point.
    pub fn from_dendrogram(tree: &Dendrogram, scale: Scale) -> TreeDocument {
        fn go(t: &DNode, scale: Scale) -> NodeRecord {
            match t {
                DNode::Leaf(x) => NodeRecord::leaf(*x),
                DNode::Internal { weight, children } => {
                    let mut kids: Vec<(usize, NodeRecord)> = children
                        .iter()
                        .map(|c| (c.leaves().as_slice()[0], go(c, scale)))
                        .collect();
                    kids.sort_by_key(|k| k.0);
                    let mut rec = NodeRecord::internal(
                        NodeType::Internal,
                        kids.into_iter().map(|k| k.1).collect(),
                    );
                    rec.weight = Some(scale.format(*weight));
                    rec
                }
            }
        }
        TreeDocument {
            kind: TreeKind::Dendrogram,
            root: go(&tree.root, scale),
        }
    }

    fn expect_kind(&self, kind: TreeKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::MalformedTree(format!(
                "expected a {} document, found {}",
                kind.name(),
                self.kind.name()
            )));
        }
        Ok(())
    }

    /// The PQ-tree of a `pq` document. Annotations are not read back.
    pub fn to_pq(&self) -> Result<PqTree> {
        self.expect_kind(TreeKind::Pq)?;
        fn go(r: &NodeRecord) -> Result<PqTree> {
            let kids = || r.children.iter().map(go).collect::<Result<Vec<_>>>();
            match r.node_type {
                NodeType::Leaf => Ok(PqTree::Leaf(r.leaf_point()?)),
                NodeType::P => {
                    r.expect_children(2)?;
                    Ok(PqTree::P(kids()?))
                }
                NodeType::Q => {
                    r.expect_children(3)?;
                    Ok(PqTree::Q(kids()?))
                }
                other => Err(Error::MalformedTree(format!(
                    "{other:?} node in a pq document"
                ))),
            }
        }
        let t = go(&self.root)?;
        check_distinct(t.canonical_order())?;
        Ok(t)
    }

    pub fn to_mmodule(&self, scale: Scale) -> Result<MModuleTree> {
        self.expect_kind(TreeKind::Mmodule)?;
        fn go(r: &NodeRecord, scale: Scale) -> Result<MModuleTree> {
            let kids = || {
                r.children
                    .iter()
                    .map(|c| go(c, scale))
                    .collect::<Result<Vec<_>>>()
            };
            match r.node_type {
                NodeType::Leaf => Ok(MModuleTree::Leaf(r.leaf_point()?)),
                NodeType::Cup => {
                    r.expect_children(3)?;
                    Ok(MModuleTree::Cup(kids()?))
                }
                NodeType::Cap => {
                    r.expect_children(2)?;
                    let special = if r.special {
                        let (Some(w), Some(large)) = (&r.weight, r.large_child) else {
                            return Err(Error::MalformedTree(
                                "a special cap needs weight and largeChild".into(),
                            ));
                        };
                        if large >= r.children.len() {
                            return Err(Error::MalformedTree(format!(
                                "largeChild {large} out of range"
                            )));
                        }
                        Some(Special {
                            delta: scale.parse(w)?,
                            large,
                        })
                    } else {
                        None
                    };
                    Ok(MModuleTree::Cap {
                        children: kids()?,
                        special,
                    })
                }
                other => Err(Error::MalformedTree(format!(
                    "{other:?} node in an mmodule document"
                ))),
            }
        }
        let t = go(&self.root, scale)?;
        check_distinct(t.leaf_order())?;
        Ok(t)
    }

    pub fn to_dendrogram(&self, scale: Scale) -> Result<Dendrogram> {
        self.expect_kind(TreeKind::Dendrogram)?;
        fn go(r: &NodeRecord, scale: Scale) -> Result<DNode> {
            match r.node_type {
                NodeType::Leaf => Ok(DNode::Leaf(r.leaf_point()?)),
                NodeType::Internal => {
                    r.expect_children(2)?;
                    let w = r.weight.as_deref().ok_or_else(|| {
                        Error::MalformedTree("internal node without weight".into())
                    })?;
                    Ok(DNode::Internal {
                        weight: scale.parse(w)?,
                        children: r
                            .children
                            .iter()
                            .map(|c| go(c, scale))
                            .collect::<Result<_>>()?,
                    })
                }
                other => Err(Error::MalformedTree(format!(
                    "{other:?} node in a dendrogram document"
                ))),
            }
        }
        let root = go(&self.root, scale)?;
        let mut leaves = Vec::new();
        root.collect_leaves(&mut leaves);
        check_distinct(leaves)?;
        Ok(Dendrogram { root })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<TreeDocument> {
        serde_json::from_str(text).map_err(|e| Error::MalformedTree(e.to_string()))
    }

    /// Graphviz rendering; export only.
    pub fn to_dot(&self) -> String {
        let mut out = format!(
            "digraph {} {{\n  node [fontname=\"monospace\"];\n",
            self.kind.name()
        );
        let mut next = 0usize;
        fn go(r: &NodeRecord, next: &mut usize, out: &mut String) -> usize {
            let id = *next;
            *next += 1;
            let (label, shape) = match r.node_type {
                NodeType::Leaf => (r.point.unwrap_or(0).to_string(), "plaintext"),
                _ => (
                    node_label(r),
                    if r.node_type == NodeType::Q {
                        "box"
                    } else {
                        "ellipse"
                    },
                ),
            };
            let _ = writeln!(out, "  n{id} [label=\"{label}\", shape={shape}];");
            for (i, c) in r.children.iter().enumerate() {
                let cid = go(c, next, out);
                let style = if r.large_child == Some(i) {
                    " [style=bold, label=\"large\"]"
                } else {
                    ""
                };
                let _ = writeln!(out, "  n{id} -> n{cid}{style};");
            }
            id
        }
        go(&self.root, &mut next, &mut out);
        out.push_str("}\n");
        out
    }

    /// One-line bracket rendering for humans; not parsed back. PQ-trees
    /// print as `P(…)` and `Q[…]`, mmodule trees as `cup{…}` and
    /// `cap{…}` (a special ∩-node as `cap@δ{…}` with its large child
    /// prefixed by `*`), dendrograms as `w(…)`.
    pub fn to_ascii(&self) -> String {
        fn go(r: &NodeRecord, top: bool, out: &mut String) {
            if r.node_type == NodeType::Leaf {
                let _ = write!(out, "{}", r.point.unwrap_or(0));
                return;
            }
            let (open, close) = match r.node_type {
                NodeType::P | NodeType::Internal => ("(", ")"),
                NodeType::Q => ("[", "]"),
                _ => ("{", "}"),
            };
            let head = match r.node_type {
                NodeType::P => "P".to_string(),
                NodeType::Q => "Q".to_string(),
                NodeType::Cup => "cup".to_string(),
                NodeType::Cap if r.special => format!("cap@{}", r.weight.as_deref().unwrap_or("?")),
                NodeType::Cap => "cap".to_string(),
                NodeType::Internal => r.weight.clone().unwrap_or_default(),
                NodeType::Leaf => unreachable!(),
            };
            out.push_str(&head);
            out.push_str(open);
            if top {
                out.push(' ');
            }
            for (i, c) in r.children.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                if r.large_child == Some(i) {
                    out.push('*');
                }
                go(c, false, out);
            }
            if top {
                out.push(' ');
            }
            out.push_str(close);
        }
        let mut out = String::new();
        go(&self.root, true, &mut out);
        out
    }
}

fn node_label(r: &NodeRecord) -> String {
    let base = match r.node_type {
        NodeType::P => "P",
        NodeType::Q => "Q",
        NodeType::Cup => "∪",
        NodeType::Cap => "∩",
        NodeType::Internal => "",
        NodeType::Leaf => "",
    };
    match (&r.weight, r.node_type) {
        (Some(w), NodeType::Internal) => w.clone(),
        (Some(w), _) if r.special => format!("{base} δ={w}"),
        (Some(w), _) => format!("{base} {w}"),
        (None, _) => base.to_string(),
    }
}

fn check_distinct(mut leaves: Vec<usize>) -> Result<()> {
    leaves.sort_unstable();
    if let Some(w) = leaves.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::MalformedTree(format!(
            "point {} appears twice",
            w[0] + 1
        )));
    }
    Ok(())
}

/// Check that a tree's leaves are exactly the points of `m`. The leaves must
/// already be distinct, as they are in every tree read from a document.
pub fn check_leaf_set(leaves: &[usize], m: &DissimilarityMatrix) -> Result<()> {
    let n = m.n();
    if let Some(x) = leaves.iter().find(|&&x| x >= n) {
        return Err(Error::MalformedTree(format!(
            "point {} is not a point of the {n}-point matrix",
            x + 1
        )));
    }
    if leaves.len() != n {
        return Err(Error::MalformedTree(format!(
            "tree has {} leaves but the matrix has {n} points",
            leaves.len()
        )));
    }
    Ok(())
}

/// Translate a `pq` document of a Robinson matrix into its `mmodule`
/// document, or an `mmodule` document into its `pq` document (in normal
/// form). Trees whose leaves or orders do not fit `m` are refused.
pub fn translate_document(m: &DissimilarityMatrix, doc: &TreeDocument) -> Result<TreeDocument> {
    let foreign =
        |what: &str| Error::MalformedTree(format!("the {what} does not belong to this matrix"));
    match doc.kind {
        TreeKind::Pq => {
            let pq = doc.to_pq()?;
            check_leaf_set(pq.leaves().as_slice(), m)?;
            if !is_compatible_order(m, &pq.canonical_order()) {
                return Err(foreign("PQ-tree"));
            }
            Ok(TreeDocument::from_mmodule(
                &pq_to_mmodule_tree(m, &pq).canonical(),
                m.scale(),
            ))
        }
        TreeKind::Mmodule => {
            let mt = doc.to_mmodule(m.scale())?;
            check_leaf_set(mt.leaves().as_slice(), m)?;
            let pq = mmodule_to_pq_tree(m, &mt).map_err(|_| foreign("mmodule tree"))?;
            if !is_compatible_order(m, &pq.canonical_order()) {
                return Err(foreign("mmodule tree"));
            }
            Ok(TreeDocument::from_pq(&pq.normal_form(), Some(m)))
        }
        TreeKind::Dendrogram => Err(Error::MalformedTree(
            "only pq and mmodule documents can be translated".into(),
        )),
    }
}
