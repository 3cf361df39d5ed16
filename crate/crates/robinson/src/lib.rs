//! Recognition of Robinson dissimilarity spaces and construction of, and
//! translation between, their tree representations: the PQ-tree of
//! compatible orders, the mmodule tree, and the dendrogram of the
//! subdominant ultrametric.
//!
//! Points are 0-based indices into a [`DissimilarityMatrix`]; subsets are
//! carried as [`IndexSet`]s over one shared matrix. All weights are exact
//! integers (see [`weight`]).
//!
//! ```
//! use robinson::{fixtures, recognize_robinson, Recognition};
//!
//! let d = fixtures::worked_example();
//! match recognize_robinson(&d) {
//!     Recognition::Accepted { order, .. } => assert_eq!(order, (0..12).collect::<Vec<_>>()),
//!     Recognition::Rejected { reason } => panic!("{reason}"),
//! }
//! ```

pub mod bench;
pub mod copoints;
pub mod dendrogram;
pub mod document;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod io;
pub mod matrix;
pub mod mmodtree;
pub mod oracle;
pub mod pqtree;
pub mod refine;
pub mod translate;
pub mod weight;

pub use copoints::{pq_tree2, recognize_robinson, Recognition};
pub use dendrogram::{build_dendrogram, DNode, Dendrogram};
pub use error::{Error, Result};
pub use matrix::{DissimilarityMatrix, IndexSet, Order};
pub use mmodtree::{mmodule_tree, MModuleTree};
pub use pqtree::{delta_pq_tree, PqTree};
pub use refine::{CopointPartition, OrderedPartition, RefineTree};
pub use weight::{Scale, Weight};
