use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no hyperedges")]
    NoHyperedges,

    #[error("node id {node} out of range (n_nodes = {n_nodes})")]
    NodeOutOfRange { node: usize, n_nodes: usize },

    #[error("hyperedge {0} is empty")]
    EmptyHyperedge(usize),

    #[error("hypergraph has no nodes")]
    EmptyHypergraph,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible generator spec: {0}")]
    Infeasible(String),

    #[error("degree sequence too concentrated: {0} consecutive rejections")]
    TooConcentrated(u64),

    #[error("enumeration budget of {0} states exceeded")]
    BudgetExceeded(usize),

    #[error("degenerate diameter {0}: need at least 2")]
    DegenerateDiameter(u32),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("training diverged at epoch {epoch} (last finite loss at epoch {last_finite:?})")]
    Diverged {
        epoch: usize,
        last_finite: Option<usize>,
    },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("need at least {needed} items, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("stage {stage} failed: {source}")]
    Stage { stage: String, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
