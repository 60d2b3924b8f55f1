use thiserror::Error;

#[derive(Debug, Error)]
pub enum SrlError {
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("resolution {0} below minimum {1}")]
    ResolutionTooSmall(usize, usize),
    #[error("divergent tail: q*tail_exponent = {0} must exceed N = {1}")]
    DivergentTail(f64, usize),
    #[error("functions live on different grids")]
    GridMismatch,
    #[error("zero norm input")]
    ZeroNorm,
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("frequency support violation: spectral mass {0:e} outside radius {1}")]
    FrequencySupport(f64, f64),
    #[error("monotonicity guard tripped at step {step}: {prev} -> {next}")]
    Monotonicity { step: usize, prev: f64, next: f64 },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SrlError>;
