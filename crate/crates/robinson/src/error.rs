use thiserror::Error;

/// Every failure the library can report.
///
/// Point indices carried by the variants are 0-based, as everywhere in the
/// library API; the command-line front end renders them 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix has no points")]
    EmptyMatrix,
    #[error("matrix is not symmetric: d({i},{j}) != d({j},{i})")]
    AsymmetricInput { i: usize, j: usize },
    #[error("diagonal entry d({i},{i}) is not zero")]
    NonzeroDiagonal { i: usize },
    #[error("matrix rows have inconsistent lengths")]
    RaggedMatrix,
    #[error("subset has {size} point(s); at least 2 are required")]
    SubsetTooSmall { size: usize },
    #[error("subset is empty")]
    EmptySubset,
    #[error("point {0} is out of range for this matrix")]
    PointOutOfRange(usize),
    #[error("point {0} appears more than once")]
    DuplicatePoint(usize),
    #[error("parts are not mmodules: d({z},{x}) != d({z},{y})")]
    NotAnMModulePartition { z: usize, x: usize, y: usize },
    #[error("point {0} is not a leaf of the tree")]
    NotALeaf(usize),
    #[error("pivot {0} lies inside the class being refined")]
    PivotInsideClass(usize),
    #[error("pivot {0} is a leaf of the tree being refined")]
    PivotIsLeaf(usize),
    #[error("classes do not partition the subset")]
    NotAPartition,
    #[error("not a Robinson space: {0}")]
    NotRobinson(String),
    #[error("order violates the Robinson condition at points {x}, {y}, {z}: d({x},{z}) = {dxz} < max(d({x},{y}) = {dxy}, d({y},{z}) = {dyz})")]
    RobinsonViolation {
        x: usize,
        y: usize,
        z: usize,
        dxy: String,
        dyz: String,
        dxz: String,
    },
    #[error("tree represents {count} orders, more than the cap of {cap}")]
    TooManyOrders { count: String, cap: usize },
    #[error("no bipartition of the large component exists")]
    NoBipartition,
    #[error("no admissible hole for the new apex child")]
    NoAdmissibleHole,
    #[error("the copoint containing point {0} is forced on both sides of the attaching point")]
    SideConflict(usize),
    #[error("instance of size {n} exceeds the brute-force cap of {cap}")]
    InstanceTooLarge { n: usize, cap: usize },
    #[error("tree correspondence violated at {0}")]
    CorrespondenceViolation(String),
    #[error("invalid weight {0:?}")]
    InvalidWeight(String),
    #[error("malformed tree: {0}")]
    MalformedTree(String),
}

impl Error {
    /// The same error with every point index shifted to 1-based labels, for
    /// messages shown to people.
    pub fn one_based(self) -> Error {
        use Error::*;
        match self {
            AsymmetricInput { i, j } => AsymmetricInput { i: i + 1, j: j + 1 },
            NonzeroDiagonal { i } => NonzeroDiagonal { i: i + 1 },
            PointOutOfRange(p) => PointOutOfRange(p + 1),
            DuplicatePoint(p) => DuplicatePoint(p + 1),
            NotAnMModulePartition { z, x, y } => NotAnMModulePartition {
                z: z + 1,
                x: x + 1,
                y: y + 1,
            },
            NotALeaf(p) => NotALeaf(p + 1),
            PivotInsideClass(p) => PivotInsideClass(p + 1),
            PivotIsLeaf(p) => PivotIsLeaf(p + 1),
            SideConflict(p) => SideConflict(p + 1),
            RobinsonViolation {
                x,
                y,
                z,
                dxy,
                dyz,
                dxz,
            } => RobinsonViolation {
                x: x + 1,
                y: y + 1,
                z: z + 1,
                dxy,
                dyz,
                dxz,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
