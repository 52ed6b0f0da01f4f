//! Orthogonal equipartition ("pancake cuts") of finite planar point sets.
//!
//! The core solver finds two mutually orthogonal lines such that each open
//! quadrant they bound contains at most `⌊n/4⌋` of the `n` input points and
//! each line on its own bisects the set. It runs in worst-case linear time:
//! the search happens in the dual line arrangement, where each phase encloses
//! the tracked median level in a pair of trapezoids and discards at least half
//! of the surviving lines.
//!
//! The crate also ships:
//!
//! - [`selection`]: deterministic median-of-medians order statistics, the
//!   linear-time workhorse under every level evaluation;
//! - [`oracle`]: slow, independent brute-force solvers and exact-rational
//!   re-verification used as ground truth in tests, plus a median-finding
//!   reduction built on the 2-D solver;
//! - [`highdim`]: brute-force enumeration solvers for the d-dimensional
//!   generalizations (d mutually orthogonal hyperplanes pairwise quartering
//!   one set; two orthogonal hyperplanes quartering several sets);
//! - [`bench`]: a scaling harness that substantiates the linear-time claim
//!   with a deterministic comparison counter.

pub mod bench;
pub mod geometry;
pub mod highdim;
pub mod instances;
pub mod oracle;
pub mod selection;
pub mod solver;

pub use geometry::{
    axis_cut, count_quadrants, cut_at_slope, dual_transform, dual_untransform, level_value, n_of,
    orthogonal_slope, verify_cut, Arrangement, CutLine, DualLine, NAngle, OrthoCut, Point,
    PointSet2D, QuadrantCounts,
};
pub use selection::{kth_smallest, median, Counter};
pub use solver::{solve, solve_traced, PhaseConfig, SearchState, SolveStats};

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point set has {got} points but at least {needed} are required")]
    TooFewPoints { needed: usize, got: usize },
    #[error("slope must be nonzero")]
    ZeroSlope,
    #[error("slope must be positive, got {0}")]
    NonPositiveSlope(f64),
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("an arrangement needs at least one line")]
    EmptyArrangement,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate search phase: {0}")]
    DegeneratePhase(String),
    #[error("solver failed after {retries} retries and oracle fallback: {reason}")]
    SolveFailed { retries: usize, reason: String },
    #[error("no valid partition found by exhaustive search")]
    NotFound,
    #[error("degenerate candidate: {0}")]
    Degenerate(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("instance exceeds the built-in size cap ({0}); pass force=true to override")]
    CapExceeded(String),
    #[error("values must be distinct")]
    DuplicateValues,
    #[error("values must have odd length >= 5, got {0}")]
    BadMedianInput(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
