use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown node {node} (component has nodes 1..={n})")]
    UnknownNode { node: usize, n: usize },

    #[error("p*g/n = {p_times_g}/{n} is not integral; choose g so every node gets a whole number of packets")]
    Indivisible { p_times_g: String, n: usize },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
