//! Instance checks shared by the integration tests and the acceptance
//! harness. Each check returns `Err` with a description of the first
//! disagreement it finds.

#![allow(dead_code)]

use std::collections::BTreeSet;

use robinson::copoints::copoints_from_mmodule_tree;
use robinson::generate::{generate, perturb, random_symmetric, rng_for, Profile};
use robinson::matrix::{delta_graph_components, delta_star, diameter, is_mmodule};
use robinson::mmodtree::is_mmodule_via_tree;
use robinson::oracle::{
    brute_compatible_orders, brute_copoints, brute_mmodules, brute_subdominant,
};
use robinson::pqtree::delta_pq_tree;
use robinson::refine::copoint_partition;
use robinson::translate::{mmodule_to_pq_tree, node_correspondence, pq_to_mmodule_tree};
use robinson::{
    build_dendrogram, mmodule_tree, pq_tree2, recognize_robinson, DissimilarityMatrix, IndexSet,
    MModuleTree, PqTree, Recognition,
};

pub type Check = Result<(), String>;

/// Orders are enumerated up to this many; every instance with `n ≤ 9`
/// stays far below it.
pub const ENUMERATION_CAP: usize = 1_000_000;

pub fn ensure(ok: bool, what: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

/// A PQ-tree from bracket notation with 1-based labels:
/// `Q[1 P(2 3) 4]`.
pub fn pq(text: &str) -> PqTree {
    fn node(tokens: &[&str], pos: &mut usize) -> PqTree {
        let t = tokens[*pos];
        *pos += 1;
        let close = match t {
            "P(" => ")",
            "Q[" => "]",
            leaf => return PqTree::Leaf(leaf.parse::<usize>().expect("label") - 1),
        };
        let mut kids = Vec::new();
        while tokens[*pos] != close {
            kids.push(node(tokens, pos));
        }
        *pos += 1;
        if close == ")" {
            PqTree::P(kids)
        } else {
            PqTree::Q(kids)
        }
    }
    let spaced = text
        .replace("P(", " P( ")
        .replace("Q[", " Q[ ")
        .replace(')', " ) ")
        .replace(']', " ] ");
    let tokens: Vec<&str> = spaced.split_whitespace().collect();
    let mut pos = 0;
    let t = node(&tokens, &mut pos);
    assert_eq!(pos, tokens.len(), "trailing tokens in {text:?}");
    t
}

/// An index set from 1-based labels.
pub fn labels(xs: &[usize]) -> IndexSet {
    IndexSet::from_unsorted(xs.iter().map(|x| x - 1).collect())
}

/// Seeded generator instance, perturbed for one seed in three when
/// `perturbed` is set.
pub fn instance(n: usize, seed: u64, profile: Profile, perturbed: bool) -> DissimilarityMatrix {
    let m = generate(n, seed, profile);
    if perturbed && seed.is_multiple_of(3) {
        let mut rng = rng_for(seed ^ 0x5eed);
        perturb(&m, 1 + seed as usize % 3, &mut rng)
    } else {
        m
    }
}

/// Mixed source for verdict checks: Robinson instances, perturbed ones and
/// matrices with independent entries.
pub fn mixed_instance(seed: u64) -> DissimilarityMatrix {
    let n = 2 + seed as usize % 7;
    let profile = Profile::ALL[(seed / 7) as usize % 4];
    match seed % 3 {
        0 => generate(n, seed, profile),
        1 => instance(n, seed * 3, profile, true),
        _ => random_symmetric(n, 1 + seed % 4, &mut rng_for(seed)),
    }
}

fn robinson_tree(m: &DissimilarityMatrix) -> Result<PqTree, String> {
    match recognize_robinson(m) {
        Recognition::Accepted { tree, .. } => Ok(tree),
        Recognition::Rejected { reason } => Err(format!("rejected a Robinson instance: {reason}")),
    }
}

/// The orders of the recognised tree are exactly the compatible orders;
/// the δ-construction gives an equivalent tree.
pub fn check_orders(m: &DissimilarityMatrix) -> Check {
    let brute = brute_compatible_orders(m, &m.all()).map_err(|e| e.to_string())?;
    match recognize_robinson(m) {
        Recognition::Rejected { reason } => ensure(brute.is_empty(), || {
            format!("rejected ({reason}) but orders exist")
        }),
        Recognition::Accepted { tree, order } => {
            ensure(!brute.is_empty(), || {
                format!("accepted {order:?} but no order exists")
            })?;
            let mut got = tree
                .enumerate_orders(ENUMERATION_CAP)
                .map_err(|e| e.to_string())?;
            got.sort();
            ensure(got == brute, || {
                format!(
                    "tree gives {} orders, brute force {}",
                    got.len(),
                    brute.len()
                )
            })?;
            let delta = delta_pq_tree(m, &m.all()).map_err(|e| e.to_string())?;
            ensure(delta.equivalent(&tree), || {
                "δ-construction disagrees with the copoint construction".into()
            })
        }
    }
}

/// The recognition verdict equals the existence of a compatible order.
pub fn check_verdict(m: &DissimilarityMatrix) -> Check {
    let brute = !brute_compatible_orders(m, &m.all())
        .map_err(|e| e.to_string())?
        .is_empty();
    let got = recognize_robinson(m).is_accepted();
    ensure(got == brute, || {
        format!("verdict {got}, brute force {brute}")
    })
}

/// Tree membership agrees with the subset scan, and the three copoint
/// computations agree at every point.
pub fn check_mmodules(m: &DissimilarityMatrix) -> Check {
    let all = m.all();
    let mt = mmodule_tree(m, &all).map_err(|e| e.to_string())?;
    let brute: BTreeSet<IndexSet> = brute_mmodules(m, &all)
        .map_err(|e| e.to_string())?
        .into_iter()
        .collect();
    let pts = all.as_slice();
    for mask in 1u32..1 << pts.len() {
        let s = IndexSet::from_unsorted(
            (0..pts.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| pts[i])
                .collect(),
        );
        let via = is_mmodule_via_tree(&mt, &s);
        ensure(via == brute.contains(&s), || {
            format!("{:?}: tree says {via}", s.as_slice())
        })?;
    }
    for p in 0..m.n() {
        let brute = brute_copoints(m, &all, p).map_err(|e| e.to_string())?;
        let mut part = copoint_partition(m, &all, p)
            .map_err(|e| e.to_string())?
            .classes;
        part.sort();
        let mut brute_sorted = brute.clone();
        brute_sorted.sort();
        ensure(part == brute_sorted, || {
            format!("copoint partition at {p} differs")
        })?;
        let mut from_tree = copoints_from_mmodule_tree(&mt, p).map_err(|e| e.to_string())?;
        from_tree.push(IndexSet::singleton(p));
        from_tree.sort();
        ensure(from_tree == brute_sorted, || {
            format!("copoints from the tree at {p} differ")
        })?;
    }
    Ok(())
}

/// Both translations invert each other and agree with the direct
/// constructions.
pub fn check_roundtrip(m: &DissimilarityMatrix) -> Check {
    let all = m.all();
    let pq = pq_tree2(m, &all).map_err(|e| e.to_string())?;
    let mt = mmodule_tree(m, &all).map_err(|e| e.to_string())?;
    let mt_from_pq = pq_to_mmodule_tree(m, &pq);
    ensure(mt_from_pq.canonical() == mt.canonical(), || {
        "pq → mmodule differs from the direct tree".into()
    })?;
    let pq_back = mmodule_to_pq_tree(m, &mt_from_pq).map_err(|e| e.to_string())?;
    ensure(pq_back.equivalent(&pq), || {
        "pq → mmodule → pq is not equivalent".into()
    })?;
    let pq_from_mt = mmodule_to_pq_tree(m, &mt).map_err(|e| e.to_string())?;
    let mt_back = pq_to_mmodule_tree(m, &pq_from_mt);
    ensure(mt_back.canonical() == mt.canonical(), || {
        "mmodule → pq → mmodule differs".into()
    })?;
    node_correspondence(m, &pq, &mt)
        .map(|_| ())
        .map_err(|e| e.to_string())
}

/// The dendrogram's ultrametric is the subdominant one and its weights
/// increase strictly towards the root.
pub fn check_subdominant(m: &DissimilarityMatrix) -> Check {
    let all = m.all();
    let dg = build_dendrogram(m, all.as_slice()).map_err(|e| e.to_string())?;
    let brute = brute_subdominant(m, &all).map_err(|e| e.to_string())?;
    let got = dg.ultrametric(m.n());
    for x in 0..m.n() {
        for y in 0..m.n() {
            ensure(got[x][y] == brute[x][y], || {
                format!("d̂({x},{y}) = {} but {}", got[x][y], brute[x][y])
            })?;
        }
    }
    ensure(dg.weights_strictly_increase(), || {
        "weights do not increase strictly".into()
    })
}

fn pq_clusters(t: &PqTree) -> BTreeSet<IndexSet> {
    t.internal_nodes().into_iter().map(|(_, s)| s).collect()
}

fn mmodule_clusters(t: &MModuleTree) -> BTreeSet<IndexSet> {
    t.nodes()
        .into_iter()
        .filter(|(n, _)| !n.children().is_empty())
        .map(|(_, s)| s)
        .collect()
}

/// For an ultrametric: no Q-node, an all-∩ mmodule tree whose children are
/// strictly narrower than their parents, and the three trees have the same
/// clusters.
pub fn check_ultrametric(m: &DissimilarityMatrix) -> Check {
    let all = m.all();
    let pq = robinson_tree(m)?;
    ensure(pq.q_count() == 0, || {
        format!("{} Q-node(s) of arity ≥ 3", pq.q_count())
    })?;
    let mt = mmodule_tree(m, &all).map_err(|e| e.to_string())?;
    for (node, set) in mt.nodes() {
        match node {
            MModuleTree::Leaf(_) => {}
            MModuleTree::Cup(_) => return Err(format!("∪-node at {:?}", set.as_slice())),
            MModuleTree::Cap { children, .. } => {
                let d = diameter(m, set.as_slice());
                for c in children {
                    let dc = diameter(m, c.leaves().as_slice());
                    ensure(dc < d, || {
                        format!("child diameter {dc} not below {d} at {:?}", set.as_slice())
                    })?;
                }
            }
        }
    }
    let dg = build_dendrogram(m, all.as_slice()).map_err(|e| e.to_string())?;
    let d_clusters: BTreeSet<IndexSet> = dg.clusters().into_iter().map(|(c, _)| c).collect();
    let (a, b) = (pq_clusters(&pq), mmodule_clusters(&mt));
    ensure(a == b, || {
        "PQ-tree and mmodule tree have different clusters".into()
    })?;
    ensure(b == d_clusters, || {
        "mmodule tree and dendrogram have different clusters".into()
    })
}

/// Distinct copoints over all attaching points number at most `2n - 1`.
pub fn check_copoint_count(m: &DissimilarityMatrix) -> Check {
    let all = m.all();
    let mut seen = BTreeSet::new();
    for p in 0..m.n() {
        let cp = copoint_partition(m, &all, p).map_err(|e| e.to_string())?;
        seen.extend(cp.copoints().iter().cloned());
    }
    let bound = (2 * m.n()).saturating_sub(1);
    ensure(seen.len() <= bound, || {
        format!("{} distinct copoints, bound {bound}", seen.len())
    })
}

/// `G_δ(S)` is disconnected for at most one positive matrix value, which is
/// then `δ*(S)`, and its components are mmodules of `S`.
pub fn check_delta_dichotomy(m: &DissimilarityMatrix, subset: &IndexSet) -> Check {
    if subset.len() < 2 {
        return Ok(());
    }
    let s = subset.as_slice();
    let disconnecting: Vec<_> = m
        .values()
        .into_iter()
        .filter(|v| v.raw() > 0)
        .filter_map(|v| {
            let comps = delta_graph_components(m, s, v);
            (comps.len() > 1).then_some((v, comps))
        })
        .collect();
    ensure(disconnecting.len() <= 1, || {
        format!(
            "G_δ of {s:?} disconnects for {} values",
            disconnecting.len()
        )
    })?;
    if let Some((v, comps)) = disconnecting.first() {
        let ds = delta_star(m, s).map_err(|e| e.to_string())?;
        ensure(*v == ds, || {
            format!("disconnecting δ = {v} but δ* = {ds} on {s:?}")
        })?;
        for c in comps {
            ensure(is_mmodule(m, s, c.as_slice()), || {
                format!("component {:?} is not an mmodule", c.as_slice())
            })?;
        }
    }
    Ok(())
}

/// `count_orders` equals the length of the enumeration whenever that is at
/// most `cap`.
pub fn check_counting(t: &PqTree, cap: usize) -> Check {
    let count = t.count_orders();
    if count > cap.into() {
        return Ok(());
    }
    let orders = t.enumerate_orders(cap).map_err(|e| e.to_string())?;
    ensure(count == orders.len().into(), || {
        format!("count {count} but {} orders enumerated", orders.len())
    })
}

/// The worked example's PQ-tree.
pub const WORKED_PQ: &str = "Q[ Q[1 P(2 3) 4] P(5 6 7) Q[8 9 P(10 11) 12] ]";

/// The worked example's mmodule tree: `cap@δ` marks a special ∩-node and
/// `*` its large child.
pub const WORKED_MMODULE: &str =
    "cup{ cap@2{*cap{1 4} cap{2 3}} cap{5 6 7} cap@2{*cup{8 9 12} 10 11} }";

/// Non-trivial copoints of the worked example with the points they are
/// attached to.
pub const WORKED_COPOINTS: [(&[usize], &[usize]); 11] = [
    (&[2, 3], &[1, 4]),
    (&[1, 4], &[2, 3]),
    (&[1, 2, 3, 4], &[5, 6, 7, 8, 9, 10, 11, 12]),
    (&[5, 6], &[7]),
    (&[5, 7], &[6]),
    (&[6, 7], &[5]),
    (&[5, 6, 7], &[1, 2, 3, 4, 8, 9, 10, 11, 12]),
    (&[10, 11], &[8, 9, 12]),
    (&[8, 9, 10, 12], &[11]),
    (&[8, 9, 11, 12], &[10]),
    (&[8, 9, 10, 11, 12], &[1, 2, 3, 4, 5, 6, 7]),
];

/// Dendrogram clusters of the worked example with their weights.
pub const WORKED_CLUSTERS: [(&[usize], u64); 7] = [
    (&[2, 3], 1),
    (&[5, 6, 7], 1),
    (&[8, 9], 1),
    (&[1, 2, 3, 4], 2),
    (&[8, 9, 10, 11, 12], 2),
    (&[1, 2, 3, 4, 5, 6, 7], 5),
    (&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12], 6),
];

/// Every reproduction check on the worked example, by name.
pub fn worked_example_checks() -> Vec<(&'static str, Check)> {
    use robinson::document::TreeDocument;
    use robinson::fixtures::worked_example;
    use robinson::Weight;

    let d = worked_example();
    let all = d.all();
    let fig_a = pq(WORKED_PQ);
    let mut out: Vec<(&'static str, Check)> = Vec::new();

    out.push((
        "copoint PQ-tree",
        pq_tree2(&d, &all)
            .map_err(|e| e.to_string())
            .and_then(|t| ensure(t.equivalent(&fig_a), || format!("{t:?}"))),
    ));
    out.push((
        "δ PQ-tree",
        delta_pq_tree(&d, &all)
            .map_err(|e| e.to_string())
            .and_then(|t| ensure(t.equivalent(&fig_a), || format!("{t:?}"))),
    ));
    let render = |t: &MModuleTree| TreeDocument::from_mmodule(&t.canonical(), d.scale()).to_ascii();
    out.push((
        "mmodule tree",
        mmodule_tree(&d, &all)
            .map_err(|e| e.to_string())
            .and_then(|t| {
                let s = render(&t);
                ensure(s == WORKED_MMODULE, || s.clone())
            }),
    ));
    out.push(("pq → mmodule", {
        let s = render(&pq_to_mmodule_tree(&d, &fig_a));
        ensure(s == WORKED_MMODULE, || s.clone())
    }));
    out.push(("third child 2-special", {
        let mt = pq_to_mmodule_tree(&d, &fig_a).canonical();
        let third = &mt.children()[2];
        match third.special() {
            Some(sp) => ensure(
                sp.delta == Weight(2) && third.children()[sp.large].leaves() == labels(&[8, 9, 12]),
                || format!("special {sp:?}"),
            ),
            None => Err("not special".into()),
        }
    }));
    out.push(("copoints", {
        let mut r = Ok(());
        for p in 1..=12usize {
            let want: BTreeSet<IndexSet> = WORKED_COPOINTS
                .iter()
                .filter(|(_, at)| at.contains(&p))
                .map(|(c, _)| labels(c))
                .collect();
            let got: BTreeSet<IndexSet> = match copoint_partition(&d, &all, p - 1) {
                Ok(cp) => cp
                    .copoints()
                    .iter()
                    .filter(|c| c.len() >= 2)
                    .cloned()
                    .collect(),
                Err(e) => {
                    r = Err(e.to_string());
                    break;
                }
            };
            if got != want {
                r = Err(format!("attaching point {p}"));
                break;
            }
        }
        r
    }));
    out.push((
        "dendrogram",
        build_dendrogram(&d, all.as_slice())
            .map_err(|e| e.to_string())
            .and_then(|dg| {
                let got: BTreeSet<(IndexSet, Weight)> = dg.clusters().into_iter().collect();
                let want: BTreeSet<(IndexSet, Weight)> = WORKED_CLUSTERS
                    .iter()
                    .map(|(c, w)| (labels(c), Weight(*w)))
                    .collect();
                ensure(got == want, || format!("{got:?}"))
            }),
    ));
    out
}
