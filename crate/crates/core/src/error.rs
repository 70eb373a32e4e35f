use thiserror::Error;

/// Errors produced while building, evaluating or analyzing mixtures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("covariance {index} is not symmetric positive definite")]
    NonSpd { index: usize },
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weights sum to {sum}, expected 1 within 1e-9")]
    WeightSumInvalid { sum: f64 },
    #[error("a mixture needs at least one component")]
    EmptyMixture,
    #[error("point contains non-finite coordinates: {0:?}")]
    NonFinite(Vec<f64>),
    #[error("affine map is singular")]
    SingularTransform,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no generic arrangement found after {attempts} draws (best margin {best_margin:.3e})")]
    GenericityFailure { attempts: usize, best_margin: f64 },
    #[error("mean {index} lies too close to a foreign hyperplane or off its own")]
    MeanOnForeignHyperplane { index: usize },
    #[error("delta must lie in (0, 1), got {0}")]
    InvalidDelta(f64),
    #[error("no delta in the schedule reached {target} modes; counts per delta: {counts:?}")]
    DeltaNotFound {
        target: usize,
        counts: Vec<(f64, usize)>,
    },
    #[error("product has {count} components, more than the cap of {cap}")]
    TooManyComponents { count: usize, cap: usize },
    #[error("combined precision is ill-conditioned (estimate {condition:.3e})")]
    IllConditioned { condition: f64 },
    #[error("ascent did not converge (scale-free gradient norm {gradient_norm:.3e})")]
    NoConvergence { gradient_norm: f64 },
    #[error("ridgeline oracle needs at least {min} samples, got {samples}")]
    TooFewSamples { samples: usize, min: usize },
    #[error("operation needs exactly {expected} components, mixture has {found}")]
    ComponentCount { expected: usize, found: usize },
    #[error("grid scans support dimension 1 or 2, got {0}")]
    UnsupportedDimension(usize),
    #[error("unknown scenario '{name}'; available: {}", available.join(", "))]
    UnknownScenario {
        name: String,
        available: Vec<String>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
