use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("chain length must be odd and positive, got {0}")]
    EvenLength(usize),

    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("site {site} outside 1..={n_sites}")]
    InvalidSite { site: usize, n_sites: usize },

    #[error("momentum index {ell} not allowed for L = {n_sites}")]
    InvalidMomentum { ell: i64, n_sites: usize },

    #[error("state is not a translation eigenstate (|<T>| = {overlap:.3e})")]
    NotTranslationEigenstate { overlap: f64 },

    #[error("L = {n_sites} exceeds the cap of {cap} for {what}")]
    SizeCap {
        what: &'static str,
        n_sites: usize,
        cap: usize,
    },

    #[error("{0}")]
    OutOfRange(String),

    #[error("zero-norm amplitude vector")]
    ZeroNorm,

    #[error(
        "eigensolver did not converge after {iterations} iterations (residual {residual:.3e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("h* bracket search failed: {0}")]
    Bracket(String),

    #[error("method '{method}' cannot evaluate {subject}")]
    Unsupported { method: String, subject: String },

    #[error("unknown {kind} '{name}'")]
    UnknownName { kind: &'static str, name: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
