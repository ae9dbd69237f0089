use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("quadrature did not converge: {0}")]
    Convergence(String),
    #[error("Fock cutoff too small: {0}")]
    Cutoff(String),
    #[error("oracle check failed: {0}")]
    Oracle(String),
    #[error("decay fit failed: {0}")]
    Fit(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
