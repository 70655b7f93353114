//! Attainable-boundary channel options under geometric Brownian motion.
//!
//! A channel call is a double-barrier knockout call plus a rebate of
//! `upper - K` paid the moment the upper barrier is touched; the put mirrors
//! it at the lower barrier. The knockouts use the flat-barrier image series
//! of Kunitomo and Ikeda. The one-touch claims are a steady state plus a sine
//! eigen-expansion of the transient in `ln(S / lower)`.

use crate::error::{PricingError, Result};
use crate::normal::cdf_diff;
use crate::oracles::pde::{pde_solve, BoundaryProblem};
use crate::types::{Diagnostics, Method, PriceResult};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Terms smaller than this end a series.
pub const TERM_TOL: f64 = 1e-12;
/// A series whose first neglected term still exceeds this is an error.
pub const SERIES_FAIL_TOL: f64 = 1e-9;
pub const MAX_IMAGE_PAIRS: usize = 32;
pub const MAX_EIGENMODES: usize = 512;
/// Below this `tau sigma^2` the one-touch claims go to the PDE solver.
pub const SMALL_TAU_SIGMA2: f64 = 1e-4;
/// Grid used by the small-`tau` fallback.
pub const FALLBACK_GRID: (usize, usize) = (1000, 400);

/// GBM market between two absorbing barriers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierMarket {
    pub spot: f64,
    pub sigma: f64,
    /// Risk-free rate.
    pub rate: f64,
    /// Cost of carry: `rate` for a non-dividend stock, `rate - q` with yield `q`.
    pub carry: f64,
    pub lower: f64,
    pub upper: f64,
}

impl BarrierMarket {
    pub fn new(spot: f64, sigma: f64, rate: f64, carry: f64, lower: f64, upper: f64) -> Result<Self> {
        let m = Self {
            spot,
            sigma,
            rate,
            carry,
            lower,
            upper,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_spot(self, spot: f64) -> Self {
        Self { spot, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.spot, self.sigma, self.rate, self.carry, self.lower, self.upper]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(PricingError::InvalidParams(
                "market parameters must be finite".into(),
            ));
        }
        if !(self.lower > 0.0 && self.lower < self.upper) {
            return Err(PricingError::InvalidParams(format!(
                "barriers must satisfy 0 < lower < upper, got ({}, {})",
                self.lower, self.upper
            )));
        }
        if !(self.sigma > 0.0) {
            return Err(PricingError::InvalidParams(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if !(self.spot >= self.lower && self.spot <= self.upper) {
            return Err(PricingError::PriceOutsideChannel {
                price: self.spot,
                lower: self.lower,
                upper: self.upper,
            });
        }
        Ok(())
    }

    fn on_upper(&self) -> bool {
        self.spot == self.upper
    }

    fn on_lower(&self) -> bool {
        self.spot == self.lower
    }
}

/// The six claims priced on a barrier market.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierClaim {
    DkoCall,
    DkoPut,
    OneTouchUpper,
    OneTouchLower,
    ChannelCall,
    ChannelPut,
}

impl BarrierClaim {
    pub const ALL: [BarrierClaim; 6] = [
        BarrierClaim::DkoCall,
        BarrierClaim::DkoPut,
        BarrierClaim::OneTouchUpper,
        BarrierClaim::OneTouchLower,
        BarrierClaim::ChannelCall,
        BarrierClaim::ChannelPut,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BarrierClaim::DkoCall => "dko_call",
            BarrierClaim::DkoPut => "dko_put",
            BarrierClaim::OneTouchUpper => "one_touch_upper",
            BarrierClaim::OneTouchLower => "one_touch_lower",
            BarrierClaim::ChannelCall => "channel_call",
            BarrierClaim::ChannelPut => "channel_put",
        }
    }
}

/// Price any claim; `strike` is ignored by the one-touch claims.
pub fn price_claim(mkt: &BarrierMarket, claim: BarrierClaim, strike: f64, tau: f64) -> Result<PriceResult> {
    match claim {
        BarrierClaim::DkoCall => dko_call(mkt, strike, tau),
        BarrierClaim::DkoPut => dko_put(mkt, strike, tau),
        BarrierClaim::OneTouchUpper => one_touch_upper(mkt, tau),
        BarrierClaim::OneTouchLower => one_touch_lower(mkt, tau),
        BarrierClaim::ChannelCall => channel_call(mkt, strike, tau),
        BarrierClaim::ChannelPut => channel_put(mkt, strike, tau),
    }
}

fn check_time(tau: f64) -> Result<()> {
    if tau < 0.0 || tau.is_nan() {
        return Err(PricingError::NegativeTime(tau));
    }
    Ok(())
}

fn check_strike(mkt: &BarrierMarket, strike: f64) -> Result<()> {
    if !(strike > mkt.lower && strike < mkt.upper) {
        return Err(PricingError::InvalidStrike {
            strike,
            lower: mkt.lower,
            upper: mkt.upper,
        });
    }
    Ok(())
}

fn settled(value: f64) -> PriceResult {
    PriceResult::with_diag(
        value,
        Method::ClosedForm,
        Diagnostics {
            settled: true,
            ..Diagnostics::default()
        },
    )
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

/// `exp(ln_w) * diff` without overflowing the weight when `diff` is tiny.
#[inline]
fn weighted(ln_w: f64, diff: f64) -> f64 {
    if diff <= 0.0 {
        0.0
    } else {
        (ln_w + diff.ln()).exp()
    }
}

/// Image-series probabilities that the terminal price lands in `[c_lo, c_hi]`
/// with neither barrier touched, under the share measure and the risk-neutral
/// measure respectively. Each image term is a pair of Gaussian slabs.
struct ImageSums {
    asset: f64,
    cash: f64,
    terms: usize,
    bound: f64,
}

fn image_sums(mkt: &BarrierMarket, c_lo: f64, c_hi: f64, tau: f64) -> Result<ImageSums> {
    let (s, l, u) = (mkt.spot, mkt.lower, mkt.upper);
    let sig2 = mkt.sigma * mkt.sigma;
    let vol = mkt.sigma * tau.sqrt();
    let drift = (mkt.carry + 0.5 * sig2) * tau;
    let mu = 2.0 * mkt.carry / sig2 + 1.0;
    let z = (u / l).ln();
    let asset_scale = s * ((mkt.carry - mkt.rate) * tau).exp();
    let cash_scale = (-mkt.rate * tau).exp();

    let term = |n: f64| -> (f64, f64) {
        let direct_lo = ((s / c_lo).ln() + 2.0 * n * z + drift) / vol;
        let direct_hi = ((s / c_hi).ln() + 2.0 * n * z + drift) / vol;
        let mirror_lo = ((l * l / (c_lo * s)).ln() - 2.0 * n * z + drift) / vol;
        let mirror_hi = ((l * l / (c_hi * s)).ln() - 2.0 * n * z + drift) / vol;
        let ln_direct = n * z;
        let ln_mirror = (l / s).ln() - n * z;

        let asset = weighted(mu * ln_direct, cdf_diff(direct_lo, direct_hi))
            - weighted(mu * ln_mirror, cdf_diff(mirror_lo, mirror_hi));
        let cash = weighted((mu - 2.0) * ln_direct, cdf_diff(direct_lo - vol, direct_hi - vol))
            - weighted(
                (mu - 2.0) * ln_mirror,
                cdf_diff(mirror_lo - vol, mirror_hi - vol),
            );
        (asset, cash)
    };
    // Contribution of a term to the option value, in currency.
    let size = |(a, c): (f64, f64)| asset_scale * a.abs() + c_hi * cash_scale * c.abs();

    let (mut asset, mut cash) = term(0.0);
    let mut terms = 1;
    let mut n = 1;
    let bound = loop {
        let (ap, cp) = term(n as f64);
        let (am, cm) = term(-(n as f64));
        let pair = (ap + am, cp + cm);
        if n > MAX_IMAGE_PAIRS {
            let b = size(pair);
            if b > SERIES_FAIL_TOL {
                return Err(PricingError::SeriesNotConverged { terms, bound: b });
            }
            break b;
        }
        if size(pair) < TERM_TOL {
            break size(pair);
        }
        asset += pair.0;
        cash += pair.1;
        terms += 2;
        n += 1;
    };
    Ok(ImageSums {
        asset,
        cash,
        terms,
        bound,
    })
}

/// Double-barrier knockout call paying `(S_T - K)+` if neither barrier is
/// touched before expiry.
pub fn dko_call(mkt: &BarrierMarket, strike: f64, tau: f64) -> Result<PriceResult> {
    dko(mkt, strike, tau, true)
}

/// Double-barrier knockout put paying `(K - S_T)+`.
pub fn dko_put(mkt: &BarrierMarket, strike: f64, tau: f64) -> Result<PriceResult> {
    dko(mkt, strike, tau, false)
}

fn dko(mkt: &BarrierMarket, strike: f64, tau: f64, call: bool) -> Result<PriceResult> {
    mkt.validate()?;
    check_time(tau)?;
    check_strike(mkt, strike)?;
    if mkt.on_lower() || mkt.on_upper() {
        return Ok(settled(0.0));
    }
    let intrinsic = if call {
        (mkt.spot - strike).max(0.0)
    } else {
        (strike - mkt.spot).max(0.0)
    };
    if tau == 0.0 {
        return Ok(expired(intrinsic));
    }
    let asset_scale = mkt.spot * ((mkt.carry - mkt.rate) * tau).exp();
    let cash_scale = strike * (-mkt.rate * tau).exp();
    let (price, sums) = if call {
        let s = image_sums(mkt, strike, mkt.upper, tau)?;
        (asset_scale * s.asset - cash_scale * s.cash, s)
    } else {
        let s = image_sums(mkt, mkt.lower, strike, tau)?;
        (cash_scale * s.cash - asset_scale * s.asset, s)
    };
    Ok(PriceResult::with_diag(
        price.max(0.0),
        Method::Series,
        Diagnostics {
            series_terms: Some(sums.terms),
            truncation_bound: Some(sums.bound),
            ..Diagnostics::default()
        },
    ))
}

/// `sinh(theta x) / sinh(theta z)` for `0 <= x <= z`, including `theta -> 0`
/// and the oscillatory branch `theta^2 < 0`.
fn sinh_ratio(theta2: f64, x: f64, z: f64) -> f64 {
    if theta2 > 0.0 {
        let t = theta2.sqrt();
        // e^{t(x - z)} (1 - e^{-2tx}) / (1 - e^{-2tz})
        (t * (x - z)).exp() * ((-2.0 * t * x).exp_m1() / (-2.0 * t * z).exp_m1())
    } else if theta2 == 0.0 {
        x / z
    } else {
        let w = (-theta2).sqrt();
        (w * x).sin() / (w * z).sin()
    }
}

/// One-touch claims in log coordinates `x = ln(S / lower)`, `z = ln(upper / lower)`.
///
/// With `alpha = -(b - sigma^2/2) / sigma^2` and
/// `theta^2 = ((b - sigma^2/2)^2 + 2 r sigma^2) / sigma^4`, `V = e^{alpha x} W`
/// turns the pricing equation into `W_tau = sigma^2/2 (W_xx - theta^2 W)`, whose
/// transient decays through the modes `sin(k_i x)`, `k_i = i pi / z`.
fn one_touch(mkt: &BarrierMarket, tau: f64, upper: bool) -> Result<PriceResult> {
    mkt.validate()?;
    check_time(tau)?;
    if mkt.on_upper() {
        return Ok(settled(if upper { 1.0 } else { 0.0 }));
    }
    if mkt.on_lower() {
        return Ok(settled(if upper { 0.0 } else { 1.0 }));
    }
    if tau == 0.0 {
        return Ok(expired(0.0));
    }
    let sig2 = mkt.sigma * mkt.sigma;
    if tau * sig2 < SMALL_TAU_SIGMA2 {
        let problem = if upper {
            BoundaryProblem::one_touch_upper()
        } else {
            BoundaryProblem::one_touch_lower()
        };
        let sol = pde_solve(&problem, mkt, tau, FALLBACK_GRID)?;
        return Ok(PriceResult::with_diag(
            sol.value_at(mkt.spot)?.clamp(0.0, 1.0),
            Method::FiniteDifference,
            Diagnostics {
                grid: Some(FALLBACK_GRID),
                small_tau_fallback: true,
                ..Diagnostics::default()
            },
        ));
    }

    let x = (mkt.spot / mkt.lower).ln();
    let z = (mkt.upper / mkt.lower).ln();
    let m = mkt.carry - 0.5 * sig2;
    let alpha = -m / sig2;
    let theta2 = (m * m + 2.0 * mkt.rate * sig2) / (sig2 * sig2);
    if theta2 < 0.0 && (-theta2).sqrt() * z >= PI {
        return Err(PricingError::InvalidParams(
            "negative rate too large for a stationary one-touch value on this strip".into(),
        ));
    }

    let (prefactor, steady) = if upper {
        let pf = (alpha * (x - z)).exp();
        (pf, pf * sinh_ratio(theta2, x, z))
    } else {
        let pf = (alpha * x).exp();
        (pf, pf * sinh_ratio(theta2, z - x, z))
    };

    let mode = |i: usize| -> (f64, f64) {
        let k = i as f64 * PI / z;
        let envelope = prefactor * (2.0 * k / z) / (theta2 + k * k)
            * (-0.5 * sig2 * (k * k + theta2) * tau).exp();
        let sign = if !upper {
            -1.0
        } else if i % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        (sign * envelope * (k * x).sin(), envelope.abs())
    };

    let mut transient = 0.0;
    let mut terms = 0;
    let mut i = 1;
    let bound = loop {
        let (t, env) = mode(i);
        let k = i as f64 * PI / z;
        if k * k >= theta2 && env < TERM_TOL {
            break env;
        }
        if i > MAX_EIGENMODES {
            if env > SERIES_FAIL_TOL {
                return Err(PricingError::SeriesNotConverged { terms, bound: env });
            }
            break env;
        }
        transient += t;
        terms += 1;
        i += 1;
    };
    Ok(PriceResult::with_diag(
        (steady + transient).clamp(0.0, 1.0),
        Method::Series,
        Diagnostics {
            series_terms: Some(terms),
            truncation_bound: Some(bound),
            ..Diagnostics::default()
        },
    ))
}

/// Pays 1 the moment the upper barrier is touched, provided the lower one
/// has not been touched first and the touch happens before expiry.
pub fn one_touch_upper(mkt: &BarrierMarket, tau: f64) -> Result<PriceResult> {
    one_touch(mkt, tau, true)
}

/// Pays 1 the moment the lower barrier is touched, knocked out at the upper one.
pub fn one_touch_lower(mkt: &BarrierMarket, tau: f64) -> Result<PriceResult> {
    one_touch(mkt, tau, false)
}

fn combine(knockout: PriceResult, rebate: f64, touch: PriceResult) -> PriceResult {
    let method = if touch.method == Method::FiniteDifference {
        Method::FiniteDifference
    } else {
        Method::Series
    };
    PriceResult::with_diag(
        knockout.price + rebate * touch.price,
        method,
        knockout.diag.merge(&touch.diag),
    )
}

/// Channel call: knockout call plus `upper - K` paid on touching the upper barrier.
pub fn channel_call(mkt: &BarrierMarket, strike: f64, tau: f64) -> Result<PriceResult> {
    mkt.validate()?;
    check_time(tau)?;
    check_strike(mkt, strike)?;
    if mkt.on_upper() {
        return Ok(settled(mkt.upper - strike));
    }
    if mkt.on_lower() {
        return Ok(settled(0.0));
    }
    if tau == 0.0 {
        return Ok(expired((mkt.spot - strike).max(0.0)));
    }
    Ok(combine(
        dko_call(mkt, strike, tau)?,
        mkt.upper - strike,
        one_touch_upper(mkt, tau)?,
    ))
}

/// Channel put: knockout put plus `K - lower` paid on touching the lower barrier.
pub fn channel_put(mkt: &BarrierMarket, strike: f64, tau: f64) -> Result<PriceResult> {
    mkt.validate()?;
    check_time(tau)?;
    check_strike(mkt, strike)?;
    if mkt.on_lower() {
        return Ok(settled(strike - mkt.lower));
    }
    if mkt.on_upper() {
        return Ok(settled(0.0));
    }
    if tau == 0.0 {
        return Ok(expired((strike - mkt.spot).max(0.0)));
    }
    Ok(combine(
        dko_put(mkt, strike, tau)?,
        strike - mkt.lower,
        one_touch_lower(mkt, tau)?,
    ))
}
