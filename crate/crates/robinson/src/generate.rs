//! Seeded random instances: Robinson matrices in several flavours, random
//! ultrametrics, and perturbations that usually destroy the Robinson
//! property.
//!
//! A Robinson matrix is filled band by band in a compatible order with
//! `R[i][j] = max(R[i][j-1], R[i+1][j]) + increment`, so rows and columns
//! never decrease away from the diagonal. Points may then be duplicated
//! (creating mmodules with ties) before the labels are shuffled.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::DissimilarityMatrix;
use crate::weight::{Scale, Weight};

/// Flavour of generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Profile {
    /// Increments in `1..=10`, sometimes zero, plus duplicated points.
    Generic,
    /// Random dendrogram heights: an ultrametric.
    Ultrametric,
    /// Strictly positive small increments: few mmodules, long Q-nodes.
    FlatHeavy,
    /// Increments in `{0, 1}`: many equal distances.
    TieHeavy,
}

impl Profile {
    pub const ALL: [Profile; 4] = [
        Profile::Generic,
        Profile::Ultrametric,
        Profile::FlatHeavy,
        Profile::TieHeavy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Profile::Generic => "generic",
            Profile::Ultrametric => "ultrametric",
            Profile::FlatHeavy => "flat-heavy",
            Profile::TieHeavy => "tie-heavy",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Profile::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown profile {s:?} (expected generic, ultrametric, flat-heavy or tie-heavy)"))
    }
}

/// The generator's random source for a seed.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A Robinson matrix on `n` points, with labels shuffled.
pub fn generate(n: usize, seed: u64, profile: Profile) -> DissimilarityMatrix {
    let mut rng = rng_for(seed);
    let m = generate_ordered(n, &mut rng, profile);
    shuffle(&m, &mut rng)
}

/// A Robinson matrix on `n` points for which the identity is a compatible
/// order (before shuffling).
pub fn generate_ordered(n: usize, rng: &mut impl Rng, profile: Profile) -> DissimilarityMatrix {
    match profile {
        Profile::Ultrametric => random_ultrametric(n, rng),
        Profile::Generic => {
            let base = (n as f64 * rng.gen_range(0.5..=1.0)).ceil().max(1.0) as usize;
            let m = banded(base.min(n), rng, |r| {
                if r.gen_bool(0.15) {
                    0
                } else {
                    r.gen_range(1..=10)
                }
            });
            duplicate_points(&m, n, rng)
        }
        Profile::FlatHeavy => banded(n, rng, |r| r.gen_range(1..=3)),
        Profile::TieHeavy => banded(n, rng, |r| r.gen_range(0..=1)),
    }
}

fn banded(
    n: usize,
    rng: &mut impl Rng,
    mut inc: impl FnMut(&mut dyn rand::RngCore) -> u64,
) -> DissimilarityMatrix {
    let mut r = vec![vec![0u64; n]; n];
    for gap in 1..n {
        for i in 0..n - gap {
            let j = i + gap;
            let v = r[i][j - 1].max(r[i + 1][j]) + inc(rng);
            r[i][j] = v;
            r[j][i] = v;
        }
    }
    DissimilarityMatrix::from_fn(n, Scale(0), |i, j| Weight(r[i][j]))
}

/// Grow `m` to `n` points by inserting copies of random points right after
/// the original, at a distance no larger than the original's nearest
/// neighbour. The identity stays compatible.
///
/// Distances are kept in creation order (a copy's row is its original's row
/// plus the tie) and the final positions are a separate sequence, so each
/// insertion costs linear time.
fn duplicate_points(m: &DissimilarityMatrix, n: usize, rng: &mut impl Rng) -> DissimilarityMatrix {
    let mut dist: Vec<Vec<u64>> = (0..m.n())
        .map(|i| (0..m.n()).map(|j| m.d(i, j).raw()).collect())
        .collect();
    let mut seq: Vec<usize> = (0..m.n()).collect();
    while seq.len() < n {
        let k = seq.len();
        let x = rng.gen_range(0..k);
        let mut cap = u64::MAX;
        if x > 0 {
            cap = cap.min(dist[seq[x - 1]][seq[x]]);
        }
        if x + 1 < k {
            cap = cap.min(dist[seq[x]][seq[x + 1]]);
        }
        let t = if cap == u64::MAX {
            rng.gen_range(0..=5)
        } else {
            rng.gen_range(0..=cap)
        };
        let orig = seq[x];
        let mut row = dist[orig].clone();
        row[orig] = t;
        row.push(0);
        for (a, r) in dist.iter_mut().enumerate() {
            r.push(row[a]);
        }
        dist.push(row);
        seq.insert(x + 1, k);
    }
    DissimilarityMatrix::from_fn(seq.len(), Scale(0), |i, j| Weight(dist[seq[i]][seq[j]]))
}

/// A random ultrametric on `n` points from a random dendrogram, in a
/// compatible order (leaves in tree order).
pub fn random_ultrametric(n: usize, rng: &mut impl Rng) -> DissimilarityMatrix {
    let mut d = vec![vec![0u64; n]; n];
    fn split(pts: std::ops::Range<usize>, height: u64, rng: &mut impl Rng, d: &mut Vec<Vec<u64>>) {
        let len = pts.end - pts.start;
        if len <= 1 {
            return;
        }
        let h = height.saturating_sub(rng.gen_range(0..3)).max(1);
        let parts = rng.gen_range(2..=len.min(4));
        // Cut points strictly inside the range.
        let mut cuts: Vec<usize> = (pts.start + 1..pts.end).collect();
        cuts.shuffle(rng);
        let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
        cuts.sort_unstable();
        let mut bounds = vec![pts.start];
        bounds.extend(cuts);
        bounds.push(pts.end);
        for w in bounds.windows(2) {
            #[allow(clippy::needless_range_loop)] // writes both d[a][b] and d[b][a]
            for a in w[0]..w[1] {
                for b in w[1]..pts.end {
                    d[a][b] = h;
                    d[b][a] = h;
                }
            }
        }
        for w in bounds.windows(2) {
            split(w[0]..w[1], h - 1, rng, d);
        }
    }
    split(0..n, 3 * n as u64 + 3, rng, &mut d);
    DissimilarityMatrix::from_fn(n, Scale(0), |i, j| Weight(d[i][j]))
}

/// Relabel the points by a random permutation.
pub fn shuffle(m: &DissimilarityMatrix, rng: &mut impl Rng) -> DissimilarityMatrix {
    let mut perm: Vec<usize> = (0..m.n()).collect();
    perm.shuffle(rng);
    m.permuted(&perm)
}

/// Change `changes` random off-diagonal entries (symmetrically) to random
/// values up to the current maximum plus one.
pub fn perturb(m: &DissimilarityMatrix, changes: usize, rng: &mut impl Rng) -> DissimilarityMatrix {
    let n = m.n();
    if n < 2 {
        return m.clone();
    }
    let top = m.values().last().map_or(0, |w| w.raw()) + 1;
    let mut edits: Vec<(usize, usize, u64)> = Vec::new();
    for _ in 0..changes {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        edits.push((i.min(j), i.max(j), rng.gen_range(0..=top)));
    }
    DissimilarityMatrix::from_fn(n, m.scale(), |i, j| {
        edits
            .iter()
            .rev()
            .find(|e| e.0 == i && e.1 == j)
            .map_or(m.d(i, j), |e| Weight(e.2))
    })
}

/// A symmetric matrix with independent entries in `0..=max`.
pub fn random_symmetric(n: usize, max: u64, rng: &mut impl Rng) -> DissimilarityMatrix {
    DissimilarityMatrix::from_fn(n, Scale(0), |_, _| Weight(rng.gen_range(0..=max)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::is_compatible_order;

    #[test]
    fn ordered_instances_are_robinson() {
        for profile in Profile::ALL {
            for seed in 0..50 {
                let mut rng = rng_for(seed);
                let n = 1 + (seed as usize % 17);
                let m = generate_ordered(n, &mut rng, profile);
                assert_eq!(m.n(), n);
                m.validate().unwrap();
                let id: Vec<usize> = (0..n).collect();
                assert!(is_compatible_order(&m, &id), "{profile} seed {seed}");
            }
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            generate(12, 7, Profile::Generic),
            generate(12, 7, Profile::Generic)
        );
        assert_eq!(generate(1, 0, Profile::TieHeavy).n(), 1);
        assert_eq!("tie-heavy".parse::<Profile>().unwrap(), Profile::TieHeavy);
        assert!("nope".parse::<Profile>().is_err());
    }

    #[test]
    fn ultrametric_profile() {
        let mut rng = rng_for(3);
        let m = random_ultrametric(20, &mut rng);
        for x in 0..20 {
            for y in 0..20 {
                for z in 0..20 {
                    assert!(m.d(x, y) <= m.d(x, z).max(m.d(z, y)));
                }
            }
        }
    }
}
