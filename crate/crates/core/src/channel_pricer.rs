//! Closed-form European prices in the channel model at zero interest rate.

use crate::channel_model::{x_of_s, ChannelParams};
use crate::error::{PricingError, Result};
use crate::normal::cdf;
use crate::types::{Diagnostics, Method, OptionKind, OptionSpec, PriceResult};

/// Where the strike sits relative to the channel.
enum StrikeRegime {
    Interior,
    AtOrAbove { at: bool },
    AtOrBelow { at: bool },
}

fn strike_regime(k: f64, p: &ChannelParams) -> StrikeRegime {
    if k >= p.s_plus() {
        StrikeRegime::AtOrAbove {
            at: k == p.s_plus(),
        }
    } else if k <= p.s_minus() {
        StrikeRegime::AtOrBelow {
            at: k == p.s_minus(),
        }
    } else {
        StrikeRegime::Interior
    }
}

fn check_inputs(s_t: f64, tau: f64, p: &ChannelParams) -> Result<()> {
    p.validate()?;
    if tau < 0.0 || tau.is_nan() {
        return Err(PricingError::NegativeTime(tau));
    }
    p.check_in_channel(s_t)
}

/// `d±` for an interior strike.
fn d_pm(s_t: f64, k: f64, tau: f64, p: &ChannelParams) -> Result<(f64, f64)> {
    let x0 = x_of_s(s_t, p)?;
    let x1 = x_of_s(k, p)?;
    let vol = p.sigma * tau.sqrt();
    let core = (x0 - x1) / vol;
    let shift = p.nu * vol;
    Ok((core + shift, core - shift))
}

fn boundary_diag(at: bool) -> Diagnostics {
    Diagnostics {
        strike_at_boundary: at,
        strike_outside_channel: !at,
        ..Diagnostics::default()
    }
}

/// European call on the channel price.
///
/// Strikes outside the open channel settle to their certain payoff and are
/// flagged in the diagnostics; `tau = 0` returns intrinsic value.
pub fn call_price(s_t: f64, strike: f64, tau: f64, p: &ChannelParams) -> Result<PriceResult> {
    check_inputs(s_t, tau, p)?;
    match strike_regime(strike, p) {
        StrikeRegime::AtOrAbove { at } => {
            return Ok(PriceResult::with_diag(0.0, Method::ClosedForm, boundary_diag(at)))
        }
        StrikeRegime::AtOrBelow { at } => {
            return Ok(PriceResult::with_diag(
                s_t - strike,
                Method::ClosedForm,
                boundary_diag(at),
            ))
        }
        StrikeRegime::Interior => {}
    }
    if tau == 0.0 {
        return Ok(expired((s_t - strike).max(0.0)));
    }
    let (d_plus, d_minus) = d_pm(s_t, strike, tau, p)?;
    let (lo, hi) = (p.s_minus(), p.s_plus());
    let up = (s_t - lo) * (hi - strike);
    let down = (hi - s_t) * (strike - lo);
    let price = (up * cdf(d_plus) - down * cdf(d_minus)) / (hi - lo);
    Ok(PriceResult::new(price.max(0.0), Method::ClosedForm))
}

/// European put on the channel price.
///
/// Evaluated through the complementary CDFs, which is algebraically
/// `call - S_t + K` but keeps precision for deep out-of-the-money puts.
pub fn put_price(s_t: f64, strike: f64, tau: f64, p: &ChannelParams) -> Result<PriceResult> {
    check_inputs(s_t, tau, p)?;
    match strike_regime(strike, p) {
        StrikeRegime::AtOrAbove { at } => {
            return Ok(PriceResult::with_diag(
                strike - s_t,
                Method::ClosedForm,
                boundary_diag(at),
            ))
        }
        StrikeRegime::AtOrBelow { at } => {
            return Ok(PriceResult::with_diag(0.0, Method::ClosedForm, boundary_diag(at)))
        }
        StrikeRegime::Interior => {}
    }
    if tau == 0.0 {
        return Ok(expired((strike - s_t).max(0.0)));
    }
    let (d_plus, d_minus) = d_pm(s_t, strike, tau, p)?;
    let (lo, hi) = (p.s_minus(), p.s_plus());
    let up = (s_t - lo) * (hi - strike);
    let down = (hi - s_t) * (strike - lo);
    let price = (down * cdf(-d_minus) - up * cdf(-d_plus)) / (hi - lo);
    Ok(PriceResult::new(price.max(0.0), Method::ClosedForm))
}

fn expired(value: f64) -> PriceResult {
    PriceResult::with_diag(
        value,
        Method::ClosedForm,
        Diagnostics {
            expired: true,
            ..Diagnostics::default()
        },
    )
}

/// Dispatch on `spec.kind`.
pub fn price(s_t: f64, spec: &OptionSpec, p: &ChannelParams) -> Result<PriceResult> {
    match spec.kind {
        OptionKind::Call => call_price(s_t, spec.strike, spec.tau, p),
        OptionKind::Put => put_price(s_t, spec.strike, spec.tau, p),
    }
}

/// The call in its cosh-ratio form. Kept for cross-checking the production
/// form; requires interior strike and `tau > 0`.
pub fn call_price_cosh_form(s_t: f64, strike: f64, tau: f64, p: &ChannelParams) -> Result<f64> {
    check_inputs(s_t, tau, p)?;
    if !(tau > 0.0) {
        return Err(PricingError::NonpositiveTime(tau));
    }
    let u0 = x_of_s(s_t, p)? - p.x_star;
    let u1 = x_of_s(strike, p).map_err(|_| PricingError::StrikeOutsideChannel {
        strike,
        lower: p.s_minus(),
        upper: p.s_plus(),
    })? - p.x_star;
    let vol = p.sigma * tau.sqrt();
    let d_plus = (u0 - u1) / vol + p.nu * vol;
    let d_minus = (u0 - u1) / vol - p.nu * vol;
    let gap = p.nu * (u0 - u1);
    let num = gap.exp() * cdf(d_plus) - (-gap).exp() * cdf(d_minus);
    Ok(p.b * num / (2.0 * (p.nu * u0).cosh() * (p.nu * u1).cosh()))
}

/// Large-maturity limit of the call: `(S_t - S-)(S+ - K)/(S+ - S-)`.
pub fn call_price_asymptotic(s_t: f64, strike: f64, p: &ChannelParams) -> Result<f64> {
    p.validate()?;
    p.check_in_channel(s_t)?;
    let (lo, hi) = (p.s_minus(), p.s_plus());
    Ok(match strike_regime(strike, p) {
        StrikeRegime::AtOrAbove { .. } => 0.0,
        StrikeRegime::AtOrBelow { .. } => s_t - strike,
        StrikeRegime::Interior => (s_t - lo) * (hi - strike) / (hi - lo),
    })
}

/// Probabilities of ending pinned to the upper and lower boundary.
pub fn hitting_weights(s_t: f64, p: &ChannelParams) -> Result<(f64, f64)> {
    p.validate()?;
    p.check_in_channel(s_t)?;
    let plus = (s_t - p.s_minus()) / (p.s_plus() - p.s_minus());
    Ok((plus, 1.0 - plus))
}

/// Spot delta of the call. The density terms of the derivative cancel,
/// leaving `[(S+ - K) N(d+) + (K - S-) N(d-)] / (S+ - S-)`.
pub fn call_delta(s_t: f64, strike: f64, tau: f64, p: &ChannelParams) -> Result<f64> {
    check_inputs(s_t, tau, p)?;
    match strike_regime(strike, p) {
        StrikeRegime::AtOrAbove { .. } => return Ok(0.0),
        StrikeRegime::AtOrBelow { .. } => return Ok(1.0),
        StrikeRegime::Interior => {}
    }
    if tau == 0.0 {
        return Ok(if s_t > strike { 1.0 } else { 0.0 });
    }
    let (d_plus, d_minus) = d_pm(s_t, strike, tau, p)?;
    let (lo, hi) = (p.s_minus(), p.s_plus());
    Ok(((hi - strike) * cdf(d_plus) + (strike - lo) * cdf(d_minus)) / (hi - lo))
}

pub fn put_delta(s_t: f64, strike: f64, tau: f64, p: &ChannelParams) -> Result<f64> {
    Ok(call_delta(s_t, strike, tau, p)? - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn base() -> ChannelParams {
        ChannelParams::new(100.0, 20.0, 1.0, 0.2).unwrap()
    }

    #[test]
    fn strike_limits() {
        let p = base();
        let near_top = call_price(100.0, 120.0 - 1e-9, 1.0, &p).unwrap().price;
        assert!(near_top < 1e-9);
        let near_bottom = call_price(100.0, 80.0 + 1e-9, 1.0, &p).unwrap().price;
        assert!((near_bottom - 20.0).abs() < 1e-8);
        let put_bottom = put_price(100.0, 80.0 + 1e-9, 1.0, &p).unwrap().price;
        assert!(put_bottom < 1e-8);
        let put_top = put_price(100.0, 120.0 - 1e-9, 1.0, &p).unwrap().price;
        assert!((put_top - 20.0).abs() < 1e-8);
    }

    #[test]
    fn strike_outside_channel_settles_with_flags() {
        let p = base();
        let at = call_price(100.0, 120.0, 1.0, &p).unwrap();
        assert_eq!(at.price, 0.0);
        assert!(at.diag.strike_at_boundary);
        let above = put_price(95.0, 130.0, 1.0, &p).unwrap();
        assert_eq!(above.price, 35.0);
        assert!(above.diag.strike_outside_channel);
        let below = call_price(95.0, 70.0, 1.0, &p).unwrap();
        assert_eq!(below.price, 25.0);
        assert_eq!(put_price(95.0, 80.0, 1.0, &p).unwrap().price, 0.0);
    }

    #[test]
    fn spot_outside_channel_is_an_error() {
        let p = base();
        assert!(matches!(
            call_price(120.0, 100.0, 1.0, &p),
            Err(PricingError::PriceOutsideChannel { .. })
        ));
        assert!(put_price(79.0, 100.0, 1.0, &p).is_err());
        assert!(matches!(
            call_price(100.0, 100.0, -1.0, &p),
            Err(PricingError::NegativeTime(_))
        ));
    }

    #[test]
    fn zero_and_small_maturity() {
        let p = base();
        let r = call_price(105.0, 100.0, 0.0, &p).unwrap();
        assert_eq!(r.price, 5.0);
        assert!(r.diag.expired);
        assert_eq!(put_price(105.0, 100.0, 0.0, &p).unwrap().price, 0.0);
        let small = call_price(105.0, 100.0, 1e-10, &p).unwrap().price;
        assert!((small - 5.0).abs() < 1e-9);
    }

    #[test]
    fn parity_at_center() {
        let p = base();
        let c = call_price(100.0, 100.0, 0.7, &p).unwrap().price;
        let q = put_price(100.0, 100.0, 0.7, &p).unwrap().price;
        assert!((c - q).abs() < 1e-13);
    }

    #[test]
    fn asymptotic_examples() {
        let p = base();
        assert_eq!(call_price_asymptotic(100.0, 110.0, &p).unwrap(), 5.0);
        assert!(call_price_asymptotic(80.0 + 1e-12, 110.0, &p).unwrap() < 1e-11);
        let tau = 400.0 / (p.sigma * p.sigma * p.nu * p.nu);
        let c = call_price(100.0, 110.0, tau, &p).unwrap().price;
        assert!((c - 5.0).abs() < 1e-4);
    }

    #[test]
    fn weights() {
        let p = base();
        assert_eq!(hitting_weights(100.0, &p).unwrap(), (0.5, 0.5));
        assert_eq!(hitting_weights(110.0, &p).unwrap(), (0.75, 0.25));
        let mut s = 80.0 + 1e-6;
        for _ in 0..1000 {
            let (a, b) = hitting_weights(s, &p).unwrap();
            assert_eq!(a + b, 1.0);
            s += 39.99 / 1000.0;
        }
    }

    #[test]
    fn delta_matches_finite_differences() {
        let p = ChannelParams::new(100.0, 20.0, 1.4, 0.3).unwrap().with_center(-0.2);
        for &(s, k, tau) in &[(100.0, 110.0, 1.0), (90.0, 95.0, 0.1), (113.0, 100.0, 4.0)] {
            let h = 1e-4;
            let up = call_price(s + h, k, tau, &p).unwrap().price;
            let dn = call_price(s - h, k, tau, &p).unwrap().price;
            let fd = (up - dn) / (2.0 * h);
            let d = call_delta(s, k, tau, &p).unwrap();
            assert!((d - fd).abs() < 1e-7, "{d} vs {fd}");
            assert!((put_delta(s, k, tau, &p).unwrap() - (d - 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn center_shift_is_a_translation() {
        let p0 = ChannelParams::new(100.0, 20.0, 1.3, 0.25).unwrap();
        let p1 = p0.with_center(0.75);
        for &(s, k, tau) in &[(100.0, 110.0, 1.0), (85.0, 90.0, 0.3), (117.0, 101.0, 5.0)] {
            let a = call_price(s, k, tau, &p0).unwrap().price;
            let b = call_price(s, k, tau, &p1).unwrap().price;
            assert!((a - b).abs() <= 1e-13 * a.max(1.0));
            let a = call_price_cosh_form(s, k, tau, &p0).unwrap();
            let b = call_price_cosh_form(s, k, tau, &p1).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }

    fn arb_params() -> impl Strategy<Value = (ChannelParams, f64, f64, f64)> {
        (
            50.0f64..150.0,
            0.05f64..0.4,
            0.2f64..5.0,
            0.05f64..0.6,
            0.05f64..10.0,
            0.02f64..0.98,
            0.02f64..0.98,
        )
            .prop_map(|(a, w, nu, sigma, tau, us, uk)| {
                let p = ChannelParams::new(a, w * a, nu, sigma).unwrap();
                let span = p.s_plus() - p.s_minus();
                (p, p.s_minus() + us * span, p.s_minus() + uk * span, tau)
            })
    }

    proptest! {
        #[test]
        fn forms_agree((p, s, k, tau) in arb_params()) {
            let a = call_price(s, k, tau, &p).unwrap().price;
            let b = call_price_cosh_form(s, k, tau, &p).unwrap();
            let scale = a.abs().max(b.abs()).max(1.0);
            prop_assert!((a - b).abs() <= 1e-12 * scale, "{} vs {}", a, b);
        }

        #[test]
        fn bounds_hold((p, s, k, tau) in arb_params()) {
            let c = call_price(s, k, tau, &p).unwrap().price;
            let upper = call_price_asymptotic(s, k, &p).unwrap();
            prop_assert!(c >= (s - k).max(0.0) - 1e-12 * s);
            prop_assert!(c <= upper + 1e-12 * s);
            let put = put_price(s, k, tau, &p).unwrap().price;
            prop_assert!(put >= 0.0);
            prop_assert!((c - put - (s - k)).abs() < 1e-10);
        }

        #[test]
        fn monotone_in_strike_and_spot((p, s, k, tau) in arb_params(), dk in 0.001f64..0.05) {
            let span = p.s_plus() - p.s_minus();
            let k2 = (k + dk * span).min(p.s_plus() - 1e-9 * span);
            let s2 = (s + dk * span).min(p.s_plus() - 1e-9 * span);
            let c = call_price(s, k, tau, &p).unwrap().price;
            prop_assert!(call_price(s, k2, tau, &p).unwrap().price <= c + 1e-12);
            prop_assert!(call_price(s2, k, tau, &p).unwrap().price >= c - 1e-12);
            let q = put_price(s, k, tau, &p).unwrap().price;
            prop_assert!(put_price(s, k2, tau, &p).unwrap().price >= q - 1e-12);
        }
    }

    #[test]
    fn large_tau_gap_shrinks() {
        let p = base();
        let cross = 1.0 / (p.sigma * p.nu).powi(2);
        let limit = call_price_asymptotic(100.0, 110.0, &p).unwrap();
        let mut prev = f64::INFINITY;
        for i in 1..=40 {
            let tau = cross * i as f64;
            let gap = (call_price(100.0, 110.0, tau, &p).unwrap().price - limit).abs();
            assert!(gap < prev, "tau {tau}");
            prev = gap;
        }
    }
}
