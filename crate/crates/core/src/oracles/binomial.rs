//! Single-step binomial valuation and the reflecting-boundary arbitrage.

use crate::error::{PricingError, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinomialValue {
    pub f_now: f64,
    pub q: f64,
    /// Set when `q` falls outside (0, 1): one branch dominates the risk-free
    /// growth of the stock and a riskless profit exists.
    pub arbitrage: bool,
}

/// Risk-neutral value of a one-step claim paying `f_up` or `f_down`.
pub fn binomial_claim_price(
    s_now: f64,
    s_up: f64,
    s_down: f64,
    f_up: f64,
    f_down: f64,
    r: f64,
    dt: f64,
) -> Result<BinomialValue> {
    if s_up == s_down {
        return Err(PricingError::DegenerateBranch {
            up: s_up,
            down: s_down,
        });
    }
    if !(s_down < s_up) {
        return Err(PricingError::InvalidParams(format!(
            "branches must satisfy s_down < s_up, got {s_down} and {s_up}"
        )));
    }
    let growth = (r * dt).exp() * s_now;
    let q = (growth - s_down) / (s_up - s_down);
    Ok(BinomialValue {
        f_now: (-r * dt).exp() * (q * f_up + (1.0 - q) * f_down),
        q,
        // Compared on the prices themselves so rounding in `q` cannot flip the flag.
        arbitrage: s_down >= growth || s_up <= growth,
    })
}

/// Riskless profit from buying at a reflecting lower barrier, where only the
/// up move exists: `S_up - exp(r dt) S_now`.
pub fn detect_boundary_arbitrage(s_now: f64, s_up: f64, r: f64, dt: f64) -> f64 {
    s_up - (r * dt).exp() * s_now
}

/// Mirror at a reflecting upper barrier (short the stock): `exp(r dt) S_now - S_down`.
pub fn detect_upper_boundary_arbitrage(s_now: f64, s_down: f64, r: f64, dt: f64) -> f64 {
    (r * dt).exp() * s_now - s_down
}
