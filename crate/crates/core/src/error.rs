use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("tree has no nodes")]
    Empty,
    #[error("node {node} out of range for a tree on {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop at node {node}")]
    SelfLoop { node: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph contains a cycle")]
    Cyclic,
}
