use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown family kind `{0}`")]
    UnknownKind(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("index {0} not found in family")]
    IndexNotFound(String),
    #[error("no condition ({condition}) witness for index {index}")]
    MissingWitness {
        condition: &'static str,
        index: String,
    },
    #[error("family witnesses are unusable: {0}")]
    WitnessRequirements(String),
    #[error("empty grid")]
    EmptyGrid,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(
        "grid too coarse on axis {axis}: {points} points, order {order} needs at least {needed}"
    )]
    GridTooCoarse {
        axis: usize,
        points: usize,
        order: usize,
        needed: usize,
    },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("function is not declared analytic")]
    NotAnalytic,
    #[error("operation needs an exact evaluator, but the function only has grid values")]
    MissingEvaluator,
    #[error("radius {radius} exceeds the admissible radius {limit}")]
    RadiusTooLarge { radius: f64, limit: f64 },
    #[error("inequality {which} violated: ratio {ratio} at {at:?}")]
    InequalityViolated {
        which: &'static str,
        ratio: f64,
        at: Vec<f64>,
    },
    #[error("point {0:?} is not a grid point")]
    OffGrid(Vec<f64>),
    #[error("point {0:?} lies outside the grid box")]
    OutsideBox(Vec<f64>),
    #[error("rank {rank} exceeds the grid rank {max}")]
    RankTooLarge { rank: usize, max: usize },
    #[error("zero weight at a retained grid point {0:?}")]
    ZeroWeight(Vec<f64>),
    #[error("expression error: {0}")]
    Expr(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
