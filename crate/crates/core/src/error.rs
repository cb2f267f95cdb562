use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Bad field modulus, mismatched moduli, or an invalid combination of options.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("unsupported degree {degree}: {reason}")]
    UnsupportedDegree { degree: usize, reason: &'static str },

    #[error("resource limit exceeded at degree {degree}: {reason}")]
    Resource { degree: usize, reason: String },

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("root isolation failed: found {found} of {expected} zeros; suspect intervals {suspects:?}")]
    RootIsolation {
        found: usize,
        expected: usize,
        suspects: Vec<(f64, f64)>,
    },

    #[error("Bernoulli index {index} outside table range 0..={max}")]
    TableRange { index: usize, max: usize },

    #[error("linear program: {0}")]
    Solver(String),

    #[error("certification failed: violation {violation:e} at theta = {theta}")]
    Certification { theta: f64, violation: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}
