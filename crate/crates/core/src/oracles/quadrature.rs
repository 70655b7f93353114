//! Channel option prices by direct integration of the payoff against the
//! transition density.

use crate::channel_model::{density, s_of_x, x_of_s, ChannelParams};
use crate::error::{PricingError, Result};
use crate::integrate::{integrate, uniform_breaks, QuadConfig};
use crate::types::{Diagnostics, Method, OptionKind, OptionSpec, PriceResult};

/// Width of the integration window in transition standard deviations
/// beyond the drift excursion.
const WINDOW_SIGMAS: f64 = 14.0;
const MAX_PANELS: usize = 4096;

pub fn quad_config() -> QuadConfig {
    QuadConfig {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_panels: MAX_PANELS,
    }
}

/// `∫ P(x, x0; tau) payoff(w(x)) dx` with the strike state as a breakpoint.
///
/// The window spans the kink and extends `|mu*| tau + 14 sigma sqrt(tau)`
/// beyond both the spot and strike states; panels are no wider than one
/// transition standard deviation.
pub fn quad_price(s_t: f64, spec: &OptionSpec, p: &ChannelParams) -> Result<PriceResult> {
    p.validate()?;
    if !(spec.tau > 0.0) {
        return Err(PricingError::NonpositiveTime(spec.tau));
    }
    let x0 = x_of_s(s_t, p)?;
    let k = spec.strike;
    let x1 = x_of_s(k, p).map_err(|_| PricingError::StrikeOutsideChannel {
        strike: k,
        lower: p.s_minus(),
        upper: p.s_plus(),
    })?;
    let sd = p.sigma * spec.tau.sqrt();
    let reach = p.mu_star().abs() * spec.tau + WINDOW_SIGMAS * sd;
    let (a, b) = match spec.kind {
        OptionKind::Call => (x1, x0.max(x1) + reach),
        OptionKind::Put => (x0.min(x1) - reach, x1),
    };
    let tau = spec.tau;
    let kind = spec.kind;
    let integrand = move |x: f64| {
        let payoff = match kind {
            OptionKind::Call => (s_of_x(x, p) - k).max(0.0),
            OptionKind::Put => (k - s_of_x(x, p)).max(0.0),
        };
        if payoff == 0.0 {
            0.0
        } else {
            payoff * density(x, x0, tau, p).unwrap_or(0.0)
        }
    };
    let mut breaks = uniform_breaks(a, b, sd, MAX_PANELS / 4);
    breaks.push(x1);
    let r = integrate(integrand, a, b, &breaks, &quad_config())?;
    Ok(PriceResult::with_diag(
        r.value,
        Method::Quadrature,
        Diagnostics {
            abscissae: Some(r.evaluations),
            quadrature_error: Some(r.error),
            ..Diagnostics::default()
        },
    ))
}

/// `∫ P(x, x0; tau) f(x) dx` over the bulk of the density; used for the
/// normalization and martingale checks.
pub fn density_moment<F: Fn(f64) -> f64>(
    f: F,
    x0: f64,
    tau: f64,
    p: &ChannelParams,
) -> Result<f64> {
    p.validate()?;
    if !(tau > 0.0) {
        return Err(PricingError::NonpositiveTime(tau));
    }
    let sd = p.sigma * tau.sqrt();
    let reach = p.mu_star().abs() * tau + WINDOW_SIGMAS * sd;
    let (a, b) = (x0 - reach, x0 + reach);
    let breaks = uniform_breaks(a, b, sd, MAX_PANELS / 4);
    let r = integrate(
        |x| f(x) * density(x, x0, tau, p).unwrap_or(0.0),
        a,
        b,
        &breaks,
        &quad_config(),
    )?;
    Ok(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ChannelParams {
        ChannelParams::new(100.0, 20.0, 1.0, 0.2).unwrap()
    }

    #[test]
    fn default_call_value() {
        // mpmath quadrature of the same integral at 30 digits.
        let r = quad_price(100.0, &OptionSpec::call(110.0, 1.0), &base()).unwrap();
        assert_eq!(r.method, Method::Quadrature);
        assert!(r.diag.quadrature_error.unwrap() < 1e-10);
        assert!((r.price / 3.097_871_469_724_962_3e-3 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn strike_near_top_is_worthless() {
        let p = base();
        let k = p.s_plus() - 1e-9;
        let r = quad_price(100.0, &OptionSpec::call(k, 1.0), &p).unwrap();
        assert!(r.price < 1e-12);
    }

    #[test]
    fn quadrature_parity() {
        let p = base().with_center(0.3);
        for &(s, k, tau) in &[(100.0, 110.0, 1.0), (90.0, 85.0, 0.2), (115.0, 100.0, 7.0)] {
            let c = quad_price(s, &OptionSpec::call(k, tau), &p).unwrap().price;
            let v = quad_price(s, &OptionSpec::put(k, tau), &p).unwrap().price;
            assert!((c - v - s + k).abs() < 1e-10, "{c} {v}");
        }
    }

    #[test]
    fn moments() {
        let p = base();
        let norm = density_moment(|_| 1.0, 0.4, 2.0, &p).unwrap();
        let mart = density_moment(|x| s_of_x(x, &p), 0.4, 2.0, &p).unwrap();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!((mart - s_of_x(0.4, &p)).abs() < 1e-10);
    }

    #[test]
    fn rejects_outside_strike() {
        let r = quad_price(100.0, &OptionSpec::call(125.0, 1.0), &base());
        assert!(matches!(r, Err(PricingError::StrikeOutsideChannel { .. })));
    }
}
