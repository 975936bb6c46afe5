use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The inverse demand `p(X) = 1/X` was evaluated at a non-positive total output.
    #[error("price singularity: total output {total} is not positive")]
    PriceSingularity { total: f64 },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("invalid integration setup: {0}")]
    Integration(String),

    #[error("root finder did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("degenerate crossing: |Q(i*omega)| = {magnitude:e}")]
    DegenerateCrossing { magnitude: f64 },

    #[error("degenerate transversality: denominator magnitude {magnitude:e}")]
    DegenerateTransversality { magnitude: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
