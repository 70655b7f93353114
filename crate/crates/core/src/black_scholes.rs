//! Generalised Black–Scholes–Merton prices with cost of carry `b`.

use crate::normal::cdf;
use crate::types::OptionKind;

/// European price under GBM with rate `r`, carry `b` and volatility `sigma`.
///
/// `b = r` is a non-dividend stock, `b = r - q` a continuous yield `q`.
pub fn bsm_price(
    kind: OptionKind,
    spot: f64,
    strike: f64,
    tau: f64,
    r: f64,
    b: f64,
    sigma: f64,
) -> f64 {
    if tau <= 0.0 {
        return match kind {
            OptionKind::Call => (spot - strike).max(0.0),
            OptionKind::Put => (strike - spot).max(0.0),
        };
    }
    let vol = sigma * tau.sqrt();
    let d1 = ((spot / strike).ln() + (b + 0.5 * sigma * sigma) * tau) / vol;
    let d2 = d1 - vol;
    let carry = ((b - r) * tau).exp();
    let disc = (-r * tau).exp();
    match kind {
        OptionKind::Call => spot * carry * cdf(d1) - strike * disc * cdf(d2),
        OptionKind::Put => strike * disc * cdf(-d2) - spot * carry * cdf(-d1),
    }
}
