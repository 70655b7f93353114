//! Types shared by every pricer and oracle.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptionKind {
    Call,
    Put,
}

/// A European option: strike, time to maturity `T - t`, call or put.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionSpec {
    pub strike: f64,
    pub tau: f64,
    pub kind: OptionKind,
}

impl OptionSpec {
    pub fn call(strike: f64, tau: f64) -> Self {
        Self {
            strike,
            tau,
            kind: OptionKind::Call,
        }
    }

    pub fn put(strike: f64, tau: f64) -> Self {
        Self {
            strike,
            tau,
            kind: OptionKind::Put,
        }
    }
}

/// How a price was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
    Series,
    FiniteDifference,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte_carlo",
            Method::Series => "series",
            Method::FiniteDifference => "finite_difference",
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Method-specific diagnostics. Unset fields are omitted when serialized.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abscissae: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_terms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<(usize, usize)>,
    /// Spot sits on a barrier; the claim settled immediately.
    #[serde(default, skip_serializing_if = "is_false")]
    pub settled: bool,
    /// Zero time to maturity; intrinsic value returned.
    #[serde(default, skip_serializing_if = "is_false")]
    pub expired: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub strike_at_boundary: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub strike_outside_channel: bool,
    /// Series path skipped in favour of the finite-difference solver.
    #[serde(default, skip_serializing_if = "is_false")]
    pub small_tau_fallback: bool,
}

impl Diagnostics {
    /// Combine two constituent diagnostics (used by the rebate decompositions).
    pub fn merge(&self, other: &Diagnostics) -> Diagnostics {
        fn add<T: std::ops::Add<Output = T> + Copy>(a: Option<T>, b: Option<T>) -> Option<T> {
            match (a, b) {
                (Some(x), Some(y)) => Some(x + y),
                (x, None) => x,
                (None, y) => y,
            }
        }
        Diagnostics {
            abscissae: add(self.abscissae, other.abscissae),
            series_terms: add(self.series_terms, other.series_terms),
            truncation_bound: add(self.truncation_bound, other.truncation_bound),
            quadrature_error: add(self.quadrature_error, other.quadrature_error),
            std_error: add(self.std_error, other.std_error),
            paths: self.paths.or(other.paths),
            grid: self.grid.or(other.grid),
            settled: self.settled || other.settled,
            expired: self.expired || other.expired,
            strike_at_boundary: self.strike_at_boundary || other.strike_at_boundary,
            strike_outside_channel: self.strike_outside_channel || other.strike_outside_channel,
            small_tau_fallback: self.small_tau_fallback || other.small_tau_fallback,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceResult {
    pub price: f64,
    pub method: Method,
    pub diag: Diagnostics,
}

impl PriceResult {
    pub fn new(price: f64, method: Method) -> Self {
        Self {
            price,
            method,
            diag: Diagnostics::default(),
        }
    }

    pub fn with_diag(price: f64, method: Method, diag: Diagnostics) -> Self {
        Self {
            price,
            method,
            diag,
        }
    }
}
