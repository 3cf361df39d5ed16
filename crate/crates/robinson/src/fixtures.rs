//! Small reference spaces used throughout the documentation and tests.
//!
//! Points are 0-based here; the worked example is usually discussed with
//! labels 1..=12, i.e. label `x` is index `x - 1`.

use crate::matrix::DissimilarityMatrix;

/// The 12-point Robinson space used as the running example. It is already
/// given in a compatible order.
pub fn worked_example() -> DissimilarityMatrix {
    DissimilarityMatrix::from_upper(&[
        vec![2, 2, 3, 5, 5, 5, 8, 8, 8, 8, 8],
        vec![1, 2, 5, 5, 5, 8, 8, 8, 8, 8],
        vec![2, 5, 5, 5, 8, 8, 8, 8, 8],
        vec![5, 5, 5, 8, 8, 8, 8, 8],
        vec![1, 1, 6, 6, 6, 6, 6],
        vec![1, 6, 6, 6, 6, 6],
        vec![6, 6, 6, 6, 6],
        vec![1, 2, 2, 3],
        vec![2, 2, 2],
        vec![2, 2],
        vec![2],
        vec![],
    ])
    .expect("worked example is a valid dissimilarity")
}

/// Three points `a, b, c` (indices 0, 1, 2) with `d(a,b) = d(b,c) = 1` and
/// `d(a,c) = 2`: the smallest flat space with a non-trivial mmodule tree.
pub fn flat_abc() -> DissimilarityMatrix {
    DissimilarityMatrix::from_upper(&[vec![1, 2], vec![1], vec![]]).expect("valid")
}

/// Three points at pairwise distance 1.
pub fn equal_triple() -> DissimilarityMatrix {
    DissimilarityMatrix::from_upper(&[vec![1, 1], vec![1], vec![]]).expect("valid")
}

/// A 4-point dissimilarity admitting no compatible order.
pub fn non_robinson_four() -> DissimilarityMatrix {
    DissimilarityMatrix::from_upper(&[vec![1, 3, 2], vec![1, 3], vec![1], vec![]]).expect("valid")
}
