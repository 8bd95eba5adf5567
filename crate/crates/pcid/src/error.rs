use num_bigint::BigUint;

use crate::admg::VertexId;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("vertex {0} lies outside the graph")]
    VertexOutsideGraph(VertexId),

    #[error("invalid window [{0}, {1}]")]
    InvalidWindow(u32, u32),

    #[error("directed cycle among contemporaneous edges in layer {0}")]
    InLayerCycle(u32),

    #[error("invalid periodic spec: {0}")]
    InvalidSpec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid query: {0}")]
    Query(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("graph has {vertices} vertices, exceeding the oracle guard of {max}")]
    SizeGuard { vertices: usize, max: usize },

    #[error(
        "window of {layers} layers exceeds the budget of {budget}; \
         the lookback constant is C = {constant}. Use an explicit layer \
         count (--lookback <n>) or raise PCID_MAX_WINDOW"
    )]
    WindowBudget {
        layers: BigUint,
        budget: u64,
        constant: BigUint,
    },

    #[error("shift by {delta} would move {vertex} below layer 0")]
    ShiftBelowZero { vertex: VertexId, delta: i64 },

    #[error("internal invariant failed: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
