use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("vertices {u} and {v} lie in different components; resistance between them is undefined")]
    DifferentComponents { u: usize, v: usize },

    #[error("pair ({u}, {v}) is not a valid candidate: {reason}")]
    InvalidPair { u: usize, v: usize, reason: &'static str },

    #[error("edge ({u}, {v}) already present")]
    ExistingEdge { u: usize, v: usize },

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("component is bipartite; {0}")]
    Bipartite(&'static str),

    #[error("ill-conditioned system (reciprocal condition {rcond:e})")]
    IllConditioned { rcond: f64 },

    #[error("series did not reach tolerance after {iterations} iterations")]
    SeriesCap { iterations: usize },

    #[error("brute-force search needs {needed} combinations, cap is {cap}")]
    SearchTooLarge { needed: u128, cap: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
