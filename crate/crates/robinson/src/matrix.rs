//! Dissimilarity spaces over an exact-weight matrix, subset views, δ-graphs,
//! δ*, quotients and compatible-order checks.

use crate::error::{Error, Result};
use crate::weight::{Scale, Weight};

/// A symmetric `n × n` matrix of exact weights with a zero diagonal.
///
/// Construction through [`DissimilarityMatrix::new`] or
/// [`DissimilarityMatrix::from_rows`] validates the matrix; the raw
/// constructor [`DissimilarityMatrix::from_raw`] does not, so that invalid
/// input can still be loaded and reported by [`DissimilarityMatrix::validate`].
///
/// Entries are stored row-major at the narrowest width that holds the
/// largest value: every algorithm walks rows of the matrix many times, and
/// a smaller footprint keeps more of it in cache.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DissimilarityMatrix {
    n: usize,
    data: Storage,
    scale: Scale,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Storage {
    U16(Vec<u16>),
    U32(Vec<u32>),
    U64(Vec<u64>),
}

impl Storage {
    fn pack(data: Vec<Weight>) -> Storage {
        let max = data.iter().map(|w| w.0).max().unwrap_or(0);
        if max <= u16::MAX as u64 {
            Storage::U16(data.into_iter().map(|w| w.0 as u16).collect())
        } else if max <= u32::MAX as u64 {
            Storage::U32(data.into_iter().map(|w| w.0 as u32).collect())
        } else {
            Storage::U64(data.into_iter().map(|w| w.0).collect())
        }
    }

    #[inline]
    fn get(&self, k: usize) -> Weight {
        match self {
            Storage::U16(v) => Weight(v[k] as u64),
            Storage::U32(v) => Weight(v[k] as u64),
            Storage::U64(v) => Weight(v[k]),
        }
    }

    fn len(&self) -> usize {
        match self {
            Storage::U16(v) => v.len(),
            Storage::U32(v) => v.len(),
            Storage::U64(v) => v.len(),
        }
    }
}

impl DissimilarityMatrix {
    /// Build and validate a matrix from row-major data.
    pub fn new(n: usize, data: Vec<Weight>, scale: Scale) -> Result<Self> {
        let m = Self::from_raw(n, data, scale)?;
        m.validate()?;
        Ok(m)
    }

    /// Build without checking symmetry or the diagonal.
    pub fn from_raw(n: usize, data: Vec<Weight>, scale: Scale) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::RaggedMatrix);
        }
        Ok(DissimilarityMatrix {
            n,
            data: Storage::pack(data),
            scale,
        })
    }

    /// Build and validate an integer matrix from full rows.
    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::RaggedMatrix);
        }
        let data = rows.iter().flatten().map(|&v| Weight(v)).collect();
        Self::new(n, data, Scale(0))
    }

    /// Build an integer matrix from the strict upper triangle, given row by
    /// row (`rows[i]` holds `d(i, i+1), …, d(i, n-1)`).
    pub fn from_upper(rows: &[Vec<u64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = vec![Weight::ZERO; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n - i - 1 {
                return Err(Error::RaggedMatrix);
            }
            for (k, &v) in row.iter().enumerate() {
                let j = i + 1 + k;
                data[i * n + j] = Weight(v);
                data[j * n + i] = Weight(v);
            }
        }
        Self::new(n, data, Scale(0))
    }

    /// Build from a symmetric function over `0..n`.
    pub fn from_fn(n: usize, scale: Scale, mut f: impl FnMut(usize, usize) -> Weight) -> Self {
        let mut data = vec![Weight::ZERO; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let w = f(i, j);
                data[i * n + j] = w;
                data[j * n + i] = w;
            }
        }
        DissimilarityMatrix {
            n,
            data: Storage::pack(data),
            scale,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn scale(&self) -> Scale {
        self.scale
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> Weight {
        self.data.get(i * self.n + j)
    }

    /// Row `i` as weights.
    pub fn row(&self, i: usize) -> impl Iterator<Item = Weight> + '_ {
        (0..self.n).map(move |j| self.d(i, j))
    }

    /// All points `0..n` as an index set.
    pub fn all(&self) -> IndexSet {
        IndexSet((0..self.n).collect())
    }

    /// Returns normally iff the matrix is non-empty, has a zero diagonal and
    /// is symmetric.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyMatrix);
        }
        for i in 0..self.n {
            if self.d(i, i) != Weight::ZERO {
                return Err(Error::NonzeroDiagonal { i });
            }
        }
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.d(i, j) != self.d(j, i) {
                    return Err(Error::AsymmetricInput { i, j });
                }
            }
        }
        Ok(())
    }

    /// The matrix seen through a relabelling: entry `(a, b)` of the result is
    /// `d(perm[a], perm[b])`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        DissimilarityMatrix::from_fn(self.n, self.scale, |a, b| self.d(perm[a], perm[b]))
    }

    /// Distinct values occurring in the matrix, sorted.
    pub fn values(&self) -> Vec<Weight> {
        let mut v: Vec<Weight> = (0..self.data.len()).map(|k| self.data.get(k)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn format_weight(&self, w: Weight) -> String {
        self.scale.format(w)
    }
}

/// A strictly increasing list of point indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Sort the points; duplicates are an error.
    pub fn new(mut points: Vec<usize>) -> Result<Self> {
        points.sort_unstable();
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint(w[0]));
        }
        Ok(IndexSet(points))
    }

    /// Sort and deduplicate.
    pub fn from_unsorted(mut points: Vec<usize>) -> Self {
        points.sort_unstable();
        points.dedup();
        IndexSet(points)
    }

    pub fn singleton(x: usize) -> Self {
        IndexSet(vec![x])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn min(&self) -> Option<usize> {
        self.0.first().copied()
    }

    /// Check every index is below `n`.
    pub fn check_range(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&x) if x >= n => Err(Error::PointOutOfRange(x)),
            _ => Ok(()),
        }
    }
}

impl From<IndexSet> for Vec<usize> {
    fn from(s: IndexSet) -> Self {
        s.0
    }
}

impl<'a> IntoIterator for &'a IndexSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A sequence of distinct points; a permutation of its support set.
pub type Order = Vec<usize>;

/// True iff `order` is compatible: every triple `x < y < z` in the order
/// has `d(x, z) >= max(d(x, y), d(y, z))`.
pub fn is_compatible_order(m: &DissimilarityMatrix, order: &[usize]) -> bool {
    first_violation(m, order).is_none()
}

/// A triple `(x, y, z)`, in order positions `x < y < z`, violating the
/// compatibility condition, if any.
///
/// Runs in `O(k²)`: the triple condition is equivalent to every row of the
/// permuted matrix being non-decreasing to the right of the diagonal and
/// every column being non-increasing above it, so only adjacent entries need
/// comparing.
pub fn first_violation(m: &DissimilarityMatrix, order: &[usize]) -> Option<(usize, usize, usize)> {
    let k = order.len();
    for a in 0..k {
        for b in a + 1..k.saturating_sub(1) {
            // row a: d(a, b) <= d(a, b+1)
            if m.d(order[a], order[b]) > m.d(order[a], order[b + 1]) {
                return Some((order[a], order[b], order[b + 1]));
            }
        }
    }
    for c in 0..k {
        for b in 1..c {
            // column c: d(b-1, c) >= d(b, c)
            if m.d(order[b - 1], order[c]) < m.d(order[b], order[c]) {
                return Some((order[b - 1], order[b], order[c]));
            }
        }
    }
    None
}

/// Largest edge of a minimum spanning tree of the complete graph on
/// `subset`: the smallest `δ` such that `d <= δ` connects the subset.
pub fn delta_star(m: &DissimilarityMatrix, subset: &[usize]) -> Result<Weight> {
    if subset.len() < 2 {
        return Err(Error::SubsetTooSmall { size: subset.len() });
    }
    let k = subset.len();
    let mut in_tree = vec![false; k];
    let mut best = vec![Weight(u64::MAX); k];
    in_tree[0] = true;
    for j in 1..k {
        best[j] = m.d(subset[0], subset[j]);
    }
    let mut top = Weight::ZERO;
    for _ in 1..k {
        let mut u = usize::MAX;
        for j in 0..k {
            if !in_tree[j] && (u == usize::MAX || best[j] < best[u]) {
                u = j;
            }
        }
        in_tree[u] = true;
        top = top.max(best[u]);
        for j in 0..k {
            if !in_tree[j] {
                let w = m.d(subset[u], subset[j]);
                if w < best[j] {
                    best[j] = w;
                }
            }
        }
    }
    Ok(top)
}

/// Components of the graph on `subset` whose edges are the pairs accepted
/// by `edge`, each sorted, listed by smallest member.
///
/// Quadratic: each dequeued vertex scans the still-unvisited vertices.
pub(crate) fn components_by(
    subset: &[usize],
    mut edge: impl FnMut(usize, usize) -> bool,
) -> Vec<IndexSet> {
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    let mut unvisited: Vec<usize> = sorted;
    let mut out = Vec::new();
    while !unvisited.is_empty() {
        let seed = unvisited.remove(0);
        let mut comp = vec![seed];
        let mut head = 0;
        while head < comp.len() {
            let x = comp[head];
            head += 1;
            let mut keep = Vec::with_capacity(unvisited.len());
            for &y in &unvisited {
                if edge(x, y) {
                    comp.push(y);
                } else {
                    keep.push(y);
                }
            }
            unvisited = keep;
        }
        comp.sort_unstable();
        out.push(IndexSet(comp));
    }
    out
}

/// Components of `G_δ(subset)`, the graph with an edge wherever `d != δ`.
pub fn delta_graph_components(
    m: &DissimilarityMatrix,
    subset: &[usize],
    delta: Weight,
) -> Vec<IndexSet> {
    components_by(subset, |x, y| m.d(x, y) != delta)
}

/// Components of the strict threshold graph `d < δ*` on the subset.
pub fn rho_components(m: &DissimilarityMatrix, subset: &[usize]) -> Result<Vec<IndexSet>> {
    let ds = delta_star(m, subset)?;
    Ok(components_by(subset, |x, y| m.d(x, y) < ds))
}

/// True iff no point of `subset ∖ candidate` distinguishes two points of
/// `candidate`.
pub fn is_mmodule(m: &DissimilarityMatrix, subset: &[usize], candidate: &[usize]) -> bool {
    let Some(&first) = candidate.first() else {
        return true;
    };
    let mut inside = std::collections::HashSet::with_capacity(candidate.len());
    inside.extend(candidate.iter().copied());
    subset
        .iter()
        .filter(|z| !inside.contains(z))
        .all(|&z| candidate.iter().all(|&x| m.d(z, x) == m.d(z, first)))
}

/// The quotient space of `parts`: entry `(a, b)` is the common distance
/// between part `a` and part `b`.
pub fn quotient(m: &DissimilarityMatrix, parts: &[IndexSet]) -> Result<DissimilarityMatrix> {
    let mut owner = vec![usize::MAX; m.n()];
    for (a, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(Error::NotAPartition);
        }
        part.check_range(m.n())?;
        for x in part.iter() {
            if owner[x] != usize::MAX {
                return Err(Error::NotAPartition);
            }
            owner[x] = a;
        }
    }
    for (a, part) in parts.iter().enumerate() {
        let rep = part.as_slice()[0];
        for (b, other) in parts.iter().enumerate() {
            if a == b {
                continue;
            }
            for z in other.iter() {
                let want = m.d(z, rep);
                if let Some(x) = part.iter().find(|&x| m.d(z, x) != want) {
                    return Err(Error::NotAnMModulePartition { z, x: rep, y: x });
                }
            }
        }
    }
    let k = parts.len();
    Ok(DissimilarityMatrix::from_fn(k, m.scale(), |a, b| {
        m.d(parts[a].as_slice()[0], parts[b].as_slice()[0])
    }))
}

/// The diameter of the subset and its lexicographically smallest diametral
/// pair `(x, y)` with `x < y`.
pub fn diameter_and_pair(
    m: &DissimilarityMatrix,
    subset: &[usize],
) -> Result<(Weight, usize, usize)> {
    if subset.len() < 2 {
        return Err(Error::SubsetTooSmall { size: subset.len() });
    }
    let mut s = subset.to_vec();
    s.sort_unstable();
    let mut best = (m.d(s[0], s[1]), s[0], s[1]);
    for (a, &x) in s.iter().enumerate() {
        for &y in &s[a + 1..] {
            if m.d(x, y) > best.0 {
                best = (m.d(x, y), x, y);
            }
        }
    }
    Ok(best)
}

/// Diameter of a subset (0 for fewer than two points).
pub fn diameter(m: &DissimilarityMatrix, subset: &[usize]) -> Weight {
    diameter_and_pair(m, subset)
        .map(|t| t.0)
        .unwrap_or(Weight::ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{flat_abc, worked_example};

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::new(v.to_vec()).unwrap()
    }

    // The worked example is 1-based in print; the fixtures are 0-based.
    fn p(v: &[usize]) -> Vec<usize> {
        v.iter().map(|x| x - 1).collect()
    }

    #[test]
    fn validate_examples() {
        assert!(worked_example().validate().is_ok());
        assert!(DissimilarityMatrix::from_rows(&[vec![0]]).is_ok());
        let bad = DissimilarityMatrix::from_raw(
            2,
            vec![Weight(0), Weight(1), Weight(2), Weight(0)],
            Scale(0),
        )
        .unwrap();
        assert_eq!(bad.validate(), Err(Error::AsymmetricInput { i: 0, j: 1 }));
        let diag = DissimilarityMatrix::from_raw(1, vec![Weight(3)], Scale(0)).unwrap();
        assert_eq!(diag.validate(), Err(Error::NonzeroDiagonal { i: 0 }));
        let empty = DissimilarityMatrix::from_raw(0, vec![], Scale(0)).unwrap();
        assert_eq!(empty.validate(), Err(Error::EmptyMatrix));
    }

    #[test]
    fn compatible_order_examples() {
        let d = worked_example();
        let id: Vec<usize> = (0..12).collect();
        assert!(is_compatible_order(&d, &id));
        let mut swapped = id.clone();
        swapped.swap(0, 1);
        assert!(!is_compatible_order(&d, &swapped));
        let two = DissimilarityMatrix::from_rows(&[vec![0, 4], vec![4, 0]]).unwrap();
        assert!(is_compatible_order(&two, &[0, 1]));
        assert!(is_compatible_order(&two, &[1, 0]));
    }

    #[test]
    fn delta_star_examples() {
        let d = worked_example();
        assert_eq!(delta_star(&d, d.all().as_slice()).unwrap(), Weight(6));
        assert_eq!(delta_star(&d, &p(&[8, 9, 10, 11, 12])).unwrap(), Weight(2));
        let two = DissimilarityMatrix::from_rows(&[vec![0, 7], vec![7, 0]]).unwrap();
        assert_eq!(delta_star(&two, &[0, 1]).unwrap(), Weight(7));
        assert_eq!(
            delta_star(&two, &[0]),
            Err(Error::SubsetTooSmall { size: 1 })
        );
    }

    #[test]
    fn delta_graph_examples() {
        let d = worked_example();
        assert_eq!(
            delta_graph_components(&d, d.all().as_slice(), Weight(6)).len(),
            1
        );
        let comps = delta_graph_components(&d, &p(&[8, 9, 10, 11, 12]), Weight(2));
        assert_eq!(
            comps,
            vec![set(&p(&[8, 9, 12])), set(&p(&[10])), set(&p(&[11]))]
        );
        let f = flat_abc();
        assert_eq!(
            delta_graph_components(&f, &[0, 1, 2], Weight(1)),
            vec![set(&[0, 2]), set(&[1])]
        );
    }

    #[test]
    fn rho_component_examples() {
        let d = worked_example();
        let comps = rho_components(&d, d.all().as_slice()).unwrap();
        assert_eq!(
            comps,
            vec![
                set(&p(&[1, 2, 3, 4, 5, 6, 7])),
                set(&p(&[8, 9, 10, 11, 12]))
            ]
        );
        let comps = rho_components(&d, &p(&[5, 6, 7])).unwrap();
        assert_eq!(comps.len(), 3);
    }

    #[test]
    fn mmodule_and_quotient_examples() {
        let d = worked_example();
        let all = d.all();
        assert!(is_mmodule(&d, all.as_slice(), &p(&[2, 3])));
        assert!(!is_mmodule(&d, all.as_slice(), &p(&[1, 2, 3])));
        assert!(is_mmodule(&d, all.as_slice(), all.as_slice()));
        let parts = vec![
            set(&p(&[1, 2, 3, 4])),
            set(&p(&[5, 6, 7])),
            set(&p(&[8, 9, 10, 11, 12])),
        ];
        let q = quotient(&d, &parts).unwrap();
        assert_eq!(
            (q.d(0, 1), q.d(0, 2), q.d(1, 2)),
            (Weight(5), Weight(8), Weight(6))
        );
        let singles: Vec<IndexSet> = (0..12).map(IndexSet::singleton).collect();
        assert_eq!(quotient(&d, &singles).unwrap(), d);
        let bad = vec![set(&p(&[1, 2])), set(&p(&[3, 4]))];
        assert!(matches!(
            quotient(&d, &bad),
            Err(Error::NotAnMModulePartition { .. })
        ));
    }

    #[test]
    fn diameter_examples() {
        let d = worked_example();
        assert_eq!(
            diameter_and_pair(&d, d.all().as_slice()).unwrap(),
            (Weight(8), 0, 7)
        );
        assert_eq!(
            diameter_and_pair(&d, &p(&[8, 9, 10, 11, 12])).unwrap(),
            (Weight(3), 7, 11)
        );
        assert_eq!(
            diameter_and_pair(&d, &p(&[5, 6])).unwrap(),
            (Weight(1), 4, 5)
        );
    }
}
