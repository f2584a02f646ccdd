use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("{n} qubits exceeds the dense limit of {limit}")]
    DenseLimit { n: usize, limit: usize },

    #[error("singular linear system (smallest eigenvalue {min_eigenvalue:e})")]
    Singular { min_eigenvalue: f64 },

    #[error("numeric degeneracy: {0}")]
    Degenerate(String),

    #[error("divergence at iteration {iteration}: {reason}")]
    Divergence { iteration: usize, reason: String },

    #[error("at beta = {beta:.3}: {source}")]
    AtBeta {
        beta: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("contract violation: {0}")]
    Contract(String),
}

impl Error {
    pub(crate) fn at_beta(self, beta: f64) -> Self {
        match self {
            e @ Error::AtBeta { .. } => e,
            e => Error::AtBeta {
                beta,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Dimension { expected, actual })
    }
}
