use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("need at least {need} non-empty snapshots, found {found}")]
    TooFewSnapshots { found: usize, need: usize },

    #[error("vertex index {index} out of range for {vertices} vertices")]
    VertexOutOfRange { index: usize, vertices: usize },

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("embedding dimension {d} exceeds vertex count {vertices}")]
    DimTooLarge { d: usize, vertices: usize },

    #[error("dense adjacency guard exceeded: {vertices} vertices, guard {guard}")]
    DenseGuard { vertices: usize, guard: usize },

    #[error("invalid parameter {name}: {msg}")]
    InvalidParam { name: &'static str, msg: String },

    #[error("snapshot has no edges")]
    EdgelessSnapshot,

    #[error("target snapshot has no edges to split")]
    EmptyTarget,

    #[error("not enough non-edges to sample: need {need}, have {available}")]
    InsufficientNonEdges { need: usize, available: usize },

    #[error("labels contain a single class only")]
    SingleClass,

    #[error("negative entry at ({row},{col}): non-negative matrix required")]
    NegativeEntry { row: usize, col: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, msg: impl Into<String>) -> Self {
        Error::InvalidParam { name, msg: msg.into() }
    }
}
