use crate::geometry::BBox;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("compact set must be nonempty")]
    EmptyCompact,

    #[error("non-finite coordinate ({0}, {1})")]
    NonFinite(f64, f64),

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("raster compacts live on different grids")]
    GridMismatch,

    #[error("grid {grid} does not cover required region {required}")]
    Coverage { required: BBox, grid: BBox },

    #[error("distance vector has length {got}, boundary has {expected} compacts")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid distance vector: {0}")]
    InvalidDistances(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no feasible distance vector found")]
    NoSolution,

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
