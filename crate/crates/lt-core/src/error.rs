use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("valuation: {0}")]
    Valuation(&'static str),
    #[error("convergence: {0}")]
    Convergence(&'static str),
    #[error("hypothesis: {0}")]
    Hypothesis(&'static str),
    #[error("singular: {0}")]
    Singular(&'static str),
    #[error("domain: {0}")]
    Domain(&'static str),
    #[error("rank deficient lattice")]
    Rank,
    #[error("identity {name} fails at index {index}")]
    Identity { name: &'static str, index: usize },
    #[error("degenerate: {0}")]
    Degenerate(&'static str),
    #[error("precision capped: {0}")]
    CappedAtPrecision(&'static str),
    #[error("config: {0}")]
    Config(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
