use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(NodeId),

    #[error("edge endpoint {node} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { node: NodeId, node_count: usize },

    #[error("negative edge weight {weight} on edge ({u}, {v})")]
    NegativeWeight { u: NodeId, v: NodeId, weight: f64 },

    #[error("density is undefined for graphs with fewer than 2 nodes (got {0})")]
    DensityUndefined(usize),

    #[error("metric undefined: total edge weight is zero")]
    ZeroTotalWeight,

    #[error("partition labels {labels} nodes but graph has {nodes}")]
    PartitionMismatch { labels: usize, nodes: usize },

    #[error("weight vector has {got} entries but graph has {expected} edges")]
    EdgeSetMismatch { got: usize, expected: usize },

    #[error("partitions label different node sets: {0} vs {1} nodes")]
    NodeSetMismatch(usize, usize),

    #[error("bad header: expected `{expected}`, got `{got}`")]
    BadHeader { expected: String, got: String },

    #[error("conflicting country records for users: {0}")]
    ConflictingCountries(String),

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: usize, need: usize },

    #[error("degenerate sample: no usable spread in the data")]
    DegenerateSamples,

    #[error("samples must be positive integers")]
    NonPositiveSample,

    #[error("paired samples have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("need at least {need} non-zero paired differences, got {got}")]
    InsufficientPairs { got: usize, need: usize },

    #[error("contingency table must be at least 2x2 after pruning empty rows and columns")]
    DegenerateTable,

    #[error("infeasible generator settings: intra-community edge probability {0:.4} exceeds 1")]
    InfeasibleSpec(f64),

    #[error("invalid generator settings: {0}")]
    InvalidSpec(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
