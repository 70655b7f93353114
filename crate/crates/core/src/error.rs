use thiserror::Error;

/// Errors raised by the pricers and oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("price {price} lies outside the open channel ({lower}, {upper})")]
    PriceOutsideChannel { price: f64, lower: f64, upper: f64 },

    #[error("strike {strike} lies outside the channel ({lower}, {upper})")]
    StrikeOutsideChannel { strike: f64, lower: f64, upper: f64 },

    #[error("strike {strike} must lie strictly between the barriers ({lower}, {upper})")]
    InvalidStrike { strike: f64, lower: f64, upper: f64 },

    #[error("elapsed time must be positive, got {0}")]
    NonpositiveTime(f64),

    #[error("time to maturity must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("separation constant must be positive, got {0}")]
    NonpositiveRho(f64),

    #[error("quadrature did not reach tolerance: estimate {estimate}, error {error}")]
    QuadratureFailure { estimate: f64, error: f64 },

    #[error("series not converged after {terms} terms (truncation bound {bound:e})")]
    SeriesNotConverged { terms: usize, bound: f64 },

    #[error("finite-difference grid {space}x{time} is coarser than the 200x200 minimum")]
    GridTooCoarse { space: usize, time: usize },

    #[error("binomial branch is degenerate: up = {up}, down = {down}")]
    DegenerateBranch { up: f64, down: f64 },

    #[error("invalid Monte Carlo configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, PricingError>;
