use crate::lattice::Site;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("linear system is singular: pivot {pivot:.3e} at column {column}")]
    SingularSystem { pivot: f64, column: usize },
    #[error("local continuation system at {site} is singular: |det| = {det:.3e}")]
    SingularLocalSystem { site: Site, det: f64 },
    #[error("power-norm bound stayed at {best:.6} after {max_power} powers")]
    InconclusiveBound { best: f64, max_power: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
