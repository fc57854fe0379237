use thiserror::Error;

/// Errors raised by the library. Mathematical verdicts (property failures,
/// lemma violations) are reported through return values, never through this
/// type.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension {0} is outside the supported range 1..=16")]
    DimensionOutOfRange(usize),

    #[error("box {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("coordinate {0} does not fit the 16-bit lattice range")]
    CoordinateOutOfRange(i64),

    #[error("duplicate box {0:?}")]
    DuplicateBox(Vec<u16>),

    #[error("melting rule violated at {} site(s)", .0.len())]
    MeltingRule(Vec<MeltingViolation>),

    #[error("axis {axis} is repeated or outside 0..{n}")]
    InvalidAxis { axis: usize, n: usize },

    #[error("hypercube dimension {0} is intractable for exhaustive enumeration (max 6)")]
    Intractable(usize),

    #[error("hypercube dimension {0} is outside the supported range 1..=10")]
    SubdimOutOfRange(usize),

    #[error("charge functions are not implemented for n = {0} (supported: 2..=12)")]
    UnsupportedDimension(usize),

    #[error("the potential function is defined for even n >= 4, got n = {0}; use the pole ledger instead")]
    OddPotential(usize),

    #[error("cluster size {size} is outside 2..={max}")]
    ClusterSize { size: usize, max: usize },

    #[error("estimated cluster work {estimate} exceeds the limit {limit}")]
    WorkLimit { estimate: u64, limit: u64 },

    #[error("weights violate the Calabi-Yau condition (sum = {0})")]
    NotCalabiYau(String),

    #[error("no generic weights found after {0} draws")]
    GenericityBudget(usize),

    #[error("rational roots collide at {value} for distinct lattice points {first:?} and {second:?}")]
    GenericityFailure {
        value: String,
        first: Vec<i32>,
        second: Vec<i32>,
    },

    #[error("target N = {target} exceeds the {cells} cells of the hypercube")]
    StratumOutOfRange { target: usize, cells: usize },

    #[error("invalid input: {0}")]
    Input(String),
}

/// A single failure of the melting rule: `site` is present but its
/// predecessor along `axis` (0-based) is missing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MeltingViolation {
    pub site: Vec<u16>,
    pub axis: usize,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
