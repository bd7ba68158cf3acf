use thiserror::Error;

/// Errors produced anywhere in the moment toolkit.
#[derive(Debug, Error)]
pub enum MomentError {
    #[error("moment vector of order {order} is too short for a Hankel block of size {size}")]
    OrderTooLow { order: usize, size: usize },

    #[error("moment vector is not realizable (margin {margin:e})")]
    NotRealizable { margin: f64 },

    #[error("Hankel rank detection failed: all leading minors vanish but moments do not")]
    RankDetection,

    #[error("degenerate denominator in {0}")]
    DegenerateDenominator(&'static str),

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("argument outside the admissible domain: {0}")]
    Domain(String),

    #[error("singular linear system in {0}")]
    Singular(&'static str),

    #[error("time step {dt:e} exceeds the stability limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("unknown model '{0}' (expected pn:N, m1, k1, mpn:N, mm1, mk1, mk2)")]
    UnknownModel(String),

    #[error("unknown scenario '{0}' (expected one-beam, two-beams, rectangular-ic, source-beam)")]
    UnknownScenario(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("invalid scenario: {0}")]
    Validation(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("no snapshot at t = {0}")]
    MissingSnapshot(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl MomentError {
    /// Failures of the numerics on valid input, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            MomentError::NotRealizable { .. }
                | MomentError::RankDetection
                | MomentError::DegenerateDenominator(_)
                | MomentError::NoConvergence { .. }
                | MomentError::Domain(_)
                | MomentError::Singular(_)
                | MomentError::Cfl { .. }
                | MomentError::StepUnderflow { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, MomentError>;
