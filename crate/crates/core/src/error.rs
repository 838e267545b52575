use thiserror::Error;

/// Errors raised by the solver, its diagnostics and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(&'static str),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("spectral coefficients are not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("multiplier is singular at wavevector ({0}, {1})")]
    SingularMultiplier(f64, f64),
    #[error("operator requires a zero-mean field, mean is {0:e}")]
    NonzeroMean(f64),
    #[error("mollifier width {eps} must be below l/4 = {limit}")]
    MollifierTooWide { eps: f64, limit: f64 },
    #[error("extension height must be non-negative, got {0}")]
    NegativeHeight(f64),
    #[error("exponent {value} outside {range}")]
    ExponentRange { value: f64, range: &'static str },
    #[error("dt = {dt} exceeds the CFL limit; recommended dt = {recommended}")]
    Cfl { dt: f64, recommended: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("trajectory: {0}")]
    Trajectory(String),
    #[error("line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("snapshot magic mismatch")]
    BadMagic,
    #[error("unsupported snapshot version {0}")]
    UnsupportedVersion(u32),
    #[error("snapshot truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("snapshot dimensions invalid: {0}")]
    DimensionMismatch(String),
    #[error("empty diagnostics series")]
    EmptySeries,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
