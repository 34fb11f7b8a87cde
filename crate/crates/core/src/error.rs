use thiserror::Error;

/// Errors raised by tree operations, Tokunaga models, numerics and sampling.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("EMPTY_TREE: operation requires a nonempty tree")]
    EmptyTree,
    #[error("NODE_NOT_FOUND: node {0} is not part of the tree")]
    NodeNotFound(usize),
    #[error("NOT_FULL_BINARY: node at position {at} has {children} children, expected 0 or 2")]
    NotFullBinary { at: usize, children: usize },
    #[error("SYNTAX_ERROR at byte offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("NEGATIVE_PARAM: {0}")]
    NegativeParam(String),
    #[error("NONPOSITIVE_K: order must be at least {min}, got {got}")]
    NonPositiveOrder { min: u32, got: u32 },
    #[error("OUT_OF_DOMAIN: z = {z} is outside the convergence region (radius {radius})")]
    OutOfDomain { z: f64, radius: f64 },
    #[error("NO_ROOT_IN_DOMAIN: generating function stays negative up to z = {bound}")]
    NoRootInDomain { bound: f64 },
    #[error("OVERFLOW: Horton number for K = {order} exceeds the representable range")]
    Overflow { order: u32 },
    #[error("NONINTEGER_MEAN: deterministic side-branching needs integer T_{k}, got {mean}")]
    NonIntegerMean { k: u32, mean: f64 },
    #[error("NONINTEGER_SEQUENCE: exact arithmetic needs integer T_{k}, got {value}")]
    NonIntegerSequence { k: u32, value: f64 },
    #[error("TREE_TOO_LARGE: sampled tree exceeds the cap of {limit} nodes")]
    TreeTooLarge { limit: usize },
    #[error("INVALID_CONFIG: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// True for errors caused by bad input rather than a failure while computing.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Overflow { .. } | Error::TreeTooLarge { .. } | Error::NoRootInDomain { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
