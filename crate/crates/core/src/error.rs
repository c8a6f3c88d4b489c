use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("invalid chain: {0}")]
    Chain(String),

    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("mixing time exceeds the cap of {0} steps")]
    MixingCap(u64),

    #[error("register layout mismatch: {0}")]
    Layout(String),

    #[error("ancilla registers are not in their zero state (stray mass {0:.3e})")]
    AncillaLeak(f64),

    #[error("malformed state dump: {0}")]
    Dump(String),

    #[error("malformed report: {0}")]
    Report(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than by the algorithms.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::NoConvergence(_) | Error::AncillaLeak(_) | Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
