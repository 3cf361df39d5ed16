//! Brute-force reference implementations, written directly from the
//! definitions and sharing no code with the algorithms they check.
//! Every oracle has a hard size cap and refuses larger instances.

use crate::error::{Error, Result};
use crate::matrix::{DissimilarityMatrix, IndexSet, Order};
use crate::weight::Weight;

pub const ORDERS_CAP: usize = 9;
pub const MMODULES_CAP: usize = 14;
pub const SUBDOMINANT_CAP: usize = 256;
pub const COPOINTS_CAP: usize = 14;

fn cap(subset: &IndexSet, limit: usize) -> Result<()> {
    if subset.len() > limit {
        return Err(Error::InstanceTooLarge {
            n: subset.len(),
            cap: limit,
        });
    }
    Ok(())
}

/// Every compatible order of `(subset, d)`, in lexicographic order.
/// Prefixes that already contain a violating triple are not extended.
pub fn brute_compatible_orders(m: &DissimilarityMatrix, subset: &IndexSet) -> Result<Vec<Order>> {
    cap(subset, ORDERS_CAP)?;
    let pts = subset.as_slice();
    let mut out = Vec::new();
    let mut prefix: Vec<usize> = Vec::with_capacity(pts.len());
    let mut used = vec![false; pts.len()];
    fn extend(
        m: &DissimilarityMatrix,
        pts: &[usize],
        prefix: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Order>,
    ) {
        if prefix.len() == pts.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..pts.len() {
            if used[i] {
                continue;
            }
            let z = pts[i];
            // Only triples ending at the new point need checking.
            let ok = (0..prefix.len()).all(|a| {
                (a + 1..prefix.len()).all(|b| {
                    let (x, y) = (prefix[a], prefix[b]);
                    m.d(x, z) >= m.d(x, y) && m.d(x, z) >= m.d(y, z)
                })
            });
            if ok {
                used[i] = true;
                prefix.push(z);
                extend(m, pts, prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    extend(m, pts, &mut prefix, &mut used, &mut out);
    Ok(out)
}

/// Whether `(subset, d)` admits a compatible order.
pub fn brute_is_robinson(m: &DissimilarityMatrix, subset: &IndexSet) -> Result<bool> {
    Ok(!brute_compatible_orders(m, subset)?.is_empty())
}

fn mmodule_mask(m: &DissimilarityMatrix, pts: &[usize], mask: u32) -> bool {
    let inside: Vec<usize> = (0..pts.len())
        .filter(|&i| mask >> i & 1 == 1)
        .map(|i| pts[i])
        .collect();
    let Some(&first) = inside.first() else {
        return true;
    };
    (0..pts.len())
        .filter(|&i| mask >> i & 1 == 0)
        .all(|i| inside.iter().all(|&x| m.d(pts[i], x) == m.d(pts[i], first)))
}

/// Every mmodule of `(subset, d)`, including the empty set, singletons and
/// the whole subset, ordered by bitmask over the subset.
pub fn brute_mmodules(m: &DissimilarityMatrix, subset: &IndexSet) -> Result<Vec<IndexSet>> {
    cap(subset, MMODULES_CAP)?;
    let pts = subset.as_slice();
    Ok((0u32..1 << pts.len())
        .filter(|&mask| mmodule_mask(m, pts, mask))
        .map(|mask| {
            IndexSet::from_unsorted(
                (0..pts.len())
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| pts[i])
                    .collect(),
            )
        })
        .collect())
}

/// The subdominant ultrametric as a full `n × n` table (entries outside
/// `subset` are zero), by iterating the minimax closure to a fixpoint.
pub fn brute_subdominant(m: &DissimilarityMatrix, subset: &IndexSet) -> Result<Vec<Vec<Weight>>> {
    cap(subset, SUBDOMINANT_CAP)?;
    let pts = subset.as_slice();
    let k = pts.len();
    let mut u: Vec<Vec<Weight>> = (0..k)
        .map(|a| (0..k).map(|b| m.d(pts[a], pts[b])).collect())
        .collect();
    loop {
        let mut changed = false;
        for x in 0..k {
            for y in 0..k {
                for z in 0..k {
                    let via = u[x][z].max(u[z][y]);
                    if via < u[x][y] {
                        u[x][y] = via;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut out = vec![vec![Weight::ZERO; m.n()]; m.n()];
    for a in 0..k {
        for b in 0..k {
            out[pts[a]][pts[b]] = u[a][b];
        }
    }
    Ok(out)
}

/// `{p}` followed by the maximal mmodules not containing `p`, sorted.
pub fn brute_copoints(
    m: &DissimilarityMatrix,
    subset: &IndexSet,
    p: usize,
) -> Result<Vec<IndexSet>> {
    cap(subset, COPOINTS_CAP)?;
    let pts = subset.as_slice();
    let pi = pts.iter().position(|&x| x == p).ok_or(Error::NotALeaf(p))?;
    let avoid: Vec<u32> = (1u32..1 << pts.len())
        .filter(|&mask| mask >> pi & 1 == 0 && mmodule_mask(m, pts, mask))
        .collect();
    let mut out: Vec<IndexSet> = avoid
        .iter()
        .filter(|&&a| !avoid.iter().any(|&b| b != a && b & a == a))
        .map(|&mask| {
            IndexSet::from_unsorted(
                (0..pts.len())
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| pts[i])
                    .collect(),
            )
        })
        .collect();
    out.sort();
    out.insert(0, IndexSet::singleton(p));
    Ok(out)
}
