use thiserror::Error;

/// Errors raised by the time-frequency toolkit.
#[derive(Debug, Error)]
pub enum TfError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("window is identically zero")]
    ZeroWindow,

    #[error("invalid lattice: {0}")]
    Lattice(String),

    #[error("operator is not hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("system is not a frame (lower bound {lower:e} <= tolerance {tol:e})")]
    NotAFrame { lower: f64, tol: f64 },

    #[error("symbol has a negative entry {value} at ({k}, {l})")]
    SymbolSign { k: usize, l: usize, value: f64 },

    #[error("symbol has a non-real entry at ({k}, {l})")]
    SymbolNotReal { k: usize, l: usize },

    #[error("symbol is supported outside the region at ({k}, {l})")]
    Support { k: usize, l: usize },

    #[error("symbol violates the partition condition: lower sum {lower:e}")]
    Partition { lower: f64 },

    #[error("no frame found up to n = {n_max} windows (best condition {best_condition:e})")]
    Exhausted { n_max: usize, best_condition: f64 },

    #[error("ensemble contains no signals")]
    EmptyEnsemble,

    #[error("block size {block} does not divide N = {n}")]
    BlockSize { block: usize, n: usize },

    #[error("invalid norm specification: {0}")]
    NormSpec(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, TfError>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(TfError::Dimension { expected, found })
    }
}
