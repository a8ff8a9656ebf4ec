use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by measure evaluation, scheme construction and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A Gauss node landed on the origin; the atom would sit at zero jump size.
    #[error("degenerate node {node:.3e} at the origin; use an even atom count for symmetric profiles")]
    DegenerateNode { node: f64 },

    #[error("ill-conditioned moment matrix: {0}")]
    IllConditioned(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    /// Some atom rate came out nonpositive, so the truncation level has not
    /// yet reached the positivity threshold.
    #[error("epsilon too large: rate a[{index}] = {value:.6e} <= 0 at epsilon = {epsilon}; retry with a smaller epsilon")]
    EpsilonTooLarge {
        epsilon: f64,
        index: usize,
        value: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("path failure: non-finite state")]
    PathFailure,

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
