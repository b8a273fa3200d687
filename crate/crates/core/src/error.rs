use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported surface: {0}")]
    UnsupportedSurface(String),
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("surface mismatch")]
    SurfaceMismatch,
    #[error("undecidable within bound: {0}")]
    Undecidable(String),
    #[error("polarization not ample")]
    NotAmple,
    #[error("spectral data invalid: {0}")]
    SpectralDataInvalid(String),
    #[error("non-integral Chern class: {0}")]
    NonIntegral(String),
    #[error("display assumes eta=12c1")]
    DisplayAssumesEta,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
