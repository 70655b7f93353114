//! The unattainable-boundary channel model.
//!
//! The state `X` follows `dX = mu(X) dt + sigma dW` with the mean-repelling
//! drift `mu(x) = nu sigma^2 tanh(nu (x - x*))`. The price `S = A + B tanh(nu (x - x*))`
//! is then a martingale confined to the open band `(A - B, A + B)`, and the
//! transition density is a two-Gaussian mixture.

use crate::error::{PricingError, Result};
use crate::integrate::{integrate, QuadConfig};
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

/// Parameters of the tanh channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Channel centre price `A`.
    pub a: f64,
    /// Half-width `B`; boundaries sit at `A ± B`.
    pub b: f64,
    /// Stiffness `nu` (inverse state units).
    pub nu: f64,
    /// State volatility per square-root time.
    pub sigma: f64,
    /// Channel centre in state space.
    #[serde(default)]
    pub x_star: f64,
}

impl ChannelParams {
    pub fn new(a: f64, b: f64, nu: f64, sigma: f64) -> Result<Self> {
        let p = Self {
            a,
            b,
            nu,
            sigma,
            x_star: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_center(mut self, x_star: f64) -> Self {
        self.x_star = x_star;
        self
    }

    /// Build from the channel boundaries instead of centre and half-width.
    pub fn from_bounds(lower: f64, upper: f64, nu: f64, sigma: f64) -> Result<Self> {
        Self::new(0.5 * (lower + upper), 0.5 * (upper - lower), nu, sigma)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.a, self.b, self.nu, self.sigma, self.x_star]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(PricingError::InvalidParams(
                "channel parameters must be finite".into(),
            ));
        }
        if !(self.a > self.b && self.b > 0.0) {
            return Err(PricingError::InvalidParams(format!(
                "channel requires A > B > 0, got A = {}, B = {}",
                self.a, self.b
            )));
        }
        if !(self.nu > 0.0 && self.sigma > 0.0) {
            return Err(PricingError::InvalidParams(format!(
                "channel requires nu > 0 and sigma > 0, got nu = {}, sigma = {}",
                self.nu, self.sigma
            )));
        }
        Ok(())
    }

    /// Lower boundary `S- = A - B`.
    pub fn s_minus(&self) -> f64 {
        self.a - self.b
    }

    /// Upper boundary `S+ = A + B`.
    pub fn s_plus(&self) -> f64 {
        self.a + self.b
    }

    /// `mu* = sigma^2 nu`, the asymptotic drift magnitude.
    pub fn mu_star(&self) -> f64 {
        self.sigma * self.sigma * self.nu
    }

    pub(crate) fn check_in_channel(&self, s: f64) -> Result<()> {
        if s > self.s_minus() && s < self.s_plus() {
            Ok(())
        } else {
            Err(PricingError::PriceOutsideChannel {
                price: s,
                lower: self.s_minus(),
                upper: self.s_plus(),
            })
        }
    }
}

/// `ln cosh z`, finite for any finite `z`.
#[inline]
pub fn ln_cosh(z: f64) -> f64 {
    let a = z.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// Drift `nu sigma^2 tanh(nu (x - x*))`.
#[inline]
pub fn drift_mu(x: f64, p: &ChannelParams) -> f64 {
    p.nu * p.sigma * p.sigma * (p.nu * (x - p.x_star)).tanh()
}

/// Price as a function of state: `A + B tanh(nu (x - x*))`.
#[inline]
pub fn s_of_x(x: f64, p: &ChannelParams) -> f64 {
    p.a + p.b * (p.nu * (x - p.x_star)).tanh()
}

/// Inverse of [`s_of_x`] on the open channel.
pub fn x_of_s(s: f64, p: &ChannelParams) -> Result<f64> {
    p.check_in_channel(s)?;
    Ok(p.x_star + ((s - p.a) / p.b).atanh() / p.nu)
}

/// Transition density of the state from `x0` to `x` over elapsed time `tau`.
pub fn density(x: f64, x0: f64, tau: f64, p: &ChannelParams) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(PricingError::NonpositiveTime(tau));
    }
    Ok(ln_density(x, x0, tau, p).exp())
}

/// Log of the transition density; `tau > 0` is assumed.
pub fn ln_density(x: f64, x0: f64, tau: f64, p: &ChannelParams) -> f64 {
    let var = p.sigma * p.sigma * tau;
    let dx = x - x0;
    -0.5 * (2.0 * PI * var).ln() + ln_cosh(p.nu * (x - p.x_star))
        - ln_cosh(p.nu * (x0 - p.x_star))
        - dx * dx / (2.0 * var)
        - 0.5 * p.nu * p.nu * var
}

/// The density as a weighted pair of drifted Gaussians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureDecomposition {
    /// Probability of being pushed to the upper boundary.
    pub weight_plus: f64,
    pub weight_minus: f64,
    pub mu_star: f64,
    /// (mean, variance) of the upward-drifting component.
    pub gaussian_plus: (f64, f64),
    pub gaussian_minus: (f64, f64),
}

impl MixtureDecomposition {
    /// Mixture density at `x`.
    pub fn pdf(&self, x: f64) -> f64 {
        let g = |(mean, var): (f64, f64)| {
            let d = x - mean;
            (-d * d / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
        };
        self.weight_plus * g(self.gaussian_plus) + self.weight_minus * g(self.gaussian_minus)
    }
}

pub fn mixture_decomposition(
    x0: f64,
    tau: f64,
    p: &ChannelParams,
) -> Result<MixtureDecomposition> {
    if !(tau > 0.0) {
        return Err(PricingError::NonpositiveTime(tau));
    }
    // (1 + tanh(nu u0)) / 2 as a logistic; the smaller weight keeps full relative precision.
    let z = 2.0 * p.nu * (x0 - p.x_star);
    let (weight_plus, weight_minus) = if z >= 0.0 {
        let minus = 1.0 / (1.0 + z.exp());
        (1.0 - minus, minus)
    } else {
        let plus = 1.0 / (1.0 + (-z).exp());
        (plus, 1.0 - plus)
    };
    let mu_star = p.mu_star();
    let var = p.sigma * p.sigma * tau;
    Ok(MixtureDecomposition {
        weight_plus,
        weight_minus,
        mu_star,
        gaussian_plus: (x0 + mu_star * tau, var),
        gaussian_minus: (x0 - mu_star * tau, var),
    })
}

/// Zero-mode martingale of an arbitrary drift, by nested quadrature.
///
/// Returns `w(x) = ∫_{x_ref}^{x} g(u) du / ∫_{x_ref}^{x_ref+1} g(u) du` with
/// `g(u) = exp(-(2/sigma^2) ∫_0^u mu(y) dy)`, so `w(x_ref) = 0` and
/// `w(x_ref + 1) = 1`.
pub fn zero_mode_martingale<M>(mu: M, x: f64, x_ref: f64, p: &ChannelParams) -> Result<f64>
where
    M: Fn(f64) -> f64,
{
    let inner_cfg = QuadConfig {
        abs_tol: 1e-15,
        rel_tol: 1e-14,
        max_panels: 512,
    };
    let outer_cfg = QuadConfig {
        abs_tol: 1e-14,
        rel_tol: 1e-13,
        max_panels: 2048,
    };
    let scale = -2.0 / (p.sigma * p.sigma);
    // The outer integrand cannot return Result, so remember the first failure.
    let failure = std::cell::Cell::new(None);
    let g = |u: f64| match integrate(&mu, 0.0, u, &[], &inner_cfg) {
        Ok(r) => (scale * r.value).exp(),
        Err(e) => {
            if failure.get().is_none() {
                if let PricingError::QuadratureFailure { estimate, error } = e {
                    failure.set(Some((estimate, error)));
                }
            }
            f64::NAN
        }
    };
    let norm = integrate(&g, x_ref, x_ref + 1.0, &[], &outer_cfg)?;
    let num = integrate(&g, x_ref, x, &[], &outer_cfg)?;
    if let Some((estimate, error)) = failure.get() {
        return Err(PricingError::QuadratureFailure { estimate, error });
    }
    Ok(num.value / norm.value)
}

/// Time-inhomogeneous martingale `exp(±λx) / cosh(nu (x - x*)) · exp(-ρ σ² t / 2)`,
/// with `λ = sqrt(ρ + nu²)`.
pub fn exp_martingale(rho: f64, sign: f64, x: f64, t: f64, p: &ChannelParams) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(PricingError::NonpositiveRho(rho));
    }
    let lambda = (rho + p.nu * p.nu).sqrt();
    let s = if sign < 0.0 { -1.0 } else { 1.0 };
    let ln_w = s * lambda * x - ln_cosh(p.nu * (x - p.x_star)) - 0.5 * rho * p.sigma * p.sigma * t;
    Ok(ln_w.exp())
}

/// Drift that keeps the channel boundaries static under a non-zero rate `r`.
///
/// `mu(x) = r φ/φ' + nu σ² tanh(nu (x - x*))` with `φ = A + B tanh(nu (x - x*))`.
/// Grows without bound in `|x|` when `r != 0`.
pub fn drift_nonzero_rate(r: f64, x: f64, p: &ChannelParams) -> f64 {
    let z = p.nu * (x - p.x_star);
    let base = drift_mu(x, p);
    if r == 0.0 {
        return base;
    }
    let phi = p.a + p.b * z.tanh();
    let cosh = z.cosh();
    r * phi * cosh * cosh / (p.b * p.nu) + base
}
