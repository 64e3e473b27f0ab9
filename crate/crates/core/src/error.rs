use thiserror::Error;

use crate::nodeset::NodeId;

/// Errors raised by queries against an existing graph.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("invalid trail: {0}")]
    InvalidTrail(String),
    #[error("node {0} has no descendant in the conditioning set")]
    NoDescendantInZ(NodeId),
    #[error("trail is blocked by the conditioning set")]
    NotActivated,
    #[error("trail has a converging connection at position {0}")]
    HasConvergingConnection(usize),
    #[error("node set lacks local relationships ({0} and {1} are linked but not adjacent)")]
    NotLocal(NodeId, NodeId),
    /// A property that should hold by construction failed; carries a
    /// description of the violated clause.
    #[error("property violated: {0}")]
    Violated(String),
}
