use thiserror::Error;

/// Errors produced while building instances or running a solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("instance has no points")]
    Empty,
    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("distance matrix is not square: row {row} has {found} entries, expected {expected}")]
    NotSquare {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("matrix is not symmetric at ({i}, {j}): {forward} vs {backward}")]
    Asymmetric {
        i: usize,
        j: usize,
        forward: f64,
        backward: f64,
    },
    #[error("negative distance {value} at ({i}, {j})")]
    NegativeEntry { i: usize, j: usize, value: f64 },
    #[error("nonzero diagonal entry {value} at index {i}")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("triangle inequality violated: d({i},{k}) exceeds d({i},{j}) + d({j},{k}) by {slack}")]
    TriangleViolation {
        i: usize,
        j: usize,
        k: usize,
        slack: f64,
    },
    #[error("invalid norm exponent {0}; expected p >= 1")]
    InvalidNorm(f64),
    #[error("index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("operation needs at least {needed} points, got {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("operation supports at most {max} points, got {found}")]
    TooManyPoints { max: usize, found: usize },
    #[error("operation requires coordinate input")]
    NotCoordinates,
    #[error("invalid edge ({0}, {1}): {2}")]
    InvalidEdge(usize, usize, String),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("matching is not perfect: {matched} of {n} vertices matched")]
    NotPerfect { matched: usize, n: usize },
    #[error("dual variables are not feasible: {0} violation(s)")]
    InvalidDuals(usize),
    #[error("invalid cycle cover: {0}")]
    InvalidCover(String),
    #[error("odd cycle radii: {0}")]
    OddCycle(String),
    #[error("minimum radius {delta} is infeasible: closest pair is at distance {min_distance}")]
    RadiusTooLarge { delta: f64, min_distance: f64 },
    #[error("minimum radius must be a nonnegative finite number, got {0}")]
    InvalidRadius(f64),
    #[error("separator tree does not match the graph: {0}")]
    TreeMismatch(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
