use crate::output::RESULT_SCHEMA;
use channelpx_core::PricingError;
use serde::Serialize;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable or malformed config.
    #[error("{0}")]
    Parse(String),
    /// Inputs outside the domain of a pricer.
    #[error(transparent)]
    Domain(#[from] PricingError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
    exit_code: i32,
}

#[derive(Serialize)]
struct ErrorDocument<'a> {
    schema: &'static str,
    error: ErrorBody<'a>,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => EXIT_PARSE,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Io(_) => "io",
            CliError::Domain(e) => match e {
                PricingError::InvalidParams(_) => "invalid_params",
                PricingError::PriceOutsideChannel { .. } => "price_outside_channel",
                PricingError::StrikeOutsideChannel { .. } => "strike_outside_channel",
                PricingError::InvalidStrike { .. } => "invalid_strike",
                PricingError::NonpositiveTime(_) => "nonpositive_time",
                PricingError::NegativeTime(_) => "negative_time",
                PricingError::NonpositiveRho(_) => "nonpositive_rho",
                PricingError::QuadratureFailure { .. } => "quadrature_failure",
                PricingError::SeriesNotConverged { .. } => "series_not_converged",
                PricingError::GridTooCoarse { .. } => "grid_too_coarse",
                PricingError::DegenerateBranch { .. } => "degenerate_branch",
                PricingError::InvalidConfig(_) => "invalid_config",
            },
        }
    }

    /// One-line JSON error object for standard error.
    pub fn to_json(&self) -> String {
        let doc = ErrorDocument {
            schema: RESULT_SCHEMA,
            error: ErrorBody {
                kind: self.kind(),
                message: self.to_string(),
                exit_code: self.exit_code(),
            },
        };
        serde_json::to_string(&doc).expect("error document serializes")
    }
}
