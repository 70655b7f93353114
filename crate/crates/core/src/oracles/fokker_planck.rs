//! Finite-difference residual of the forward Kolmogorov equation
//! `P_t + (mu P)_x - sigma^2/2 P_xx = 0` evaluated on a closed-form density.

use crate::channel_model::{density, drift_mu, ChannelParams};

/// Uniform `(x, t)` lattice; residuals are taken at interior nodes with the
/// lattice spacing as the difference step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpGrid {
    pub nx: usize,
    pub nt: usize,
    pub x_range: (f64, f64),
    pub t_range: (f64, f64),
    /// Initial state of the density.
    pub x0: f64,
}

impl FpGrid {
    /// `x` in `x* ± 4/nu`, `t` in `[0.1, 2]`, started from the channel centre.
    pub fn standard(p: &ChannelParams, nx: usize, nt: usize) -> Self {
        Self {
            nx,
            nt,
            x_range: (p.x_star - 4.0 / p.nu, p.x_star + 4.0 / p.nu),
            t_range: (0.1, 2.0),
            x0: p.x_star,
        }
    }

    /// Same window with both spacings halved.
    pub fn refined(&self) -> Self {
        Self {
            nx: 2 * self.nx - 1,
            nt: 2 * self.nt - 1,
            ..*self
        }
    }

    fn hx(&self) -> f64 {
        (self.x_range.1 - self.x_range.0) / (self.nx - 1) as f64
    }

    fn ht(&self) -> f64 {
        (self.t_range.1 - self.t_range.0) / (self.nt - 1) as f64
    }
}

/// Max-norm residual for an arbitrary density `pdf(x, t)` and drift.
pub fn fp_residual_with<P, M>(pdf: P, drift: M, sigma: f64, grid: &FpGrid) -> f64
where
    P: Fn(f64, f64) -> f64,
    M: Fn(f64) -> f64,
{
    assert!(grid.nx >= 3 && grid.nt >= 3, "grid needs interior nodes");
    let (hx, ht) = (grid.hx(), grid.ht());
    let diff = 0.5 * sigma * sigma;
    let mut worst: f64 = 0.0;
    for j in 1..grid.nt - 1 {
        let t = grid.t_range.0 + j as f64 * ht;
        for i in 1..grid.nx - 1 {
            let x = grid.x_range.0 + i as f64 * hx;
            let (xl, xr) = (x - hx, x + hx);
            let p_c = pdf(x, t);
            let (p_l, p_r) = (pdf(xl, t), pdf(xr, t));
            let p_t = (pdf(x, t + ht) - pdf(x, t - ht)) / (2.0 * ht);
            let flux_x = (drift(xr) * p_r - drift(xl) * p_l) / (2.0 * hx);
            let p_xx = (p_r - 2.0 * p_c + p_l) / (hx * hx);
            worst = worst.max((p_t + flux_x - diff * p_xx).abs());
        }
    }
    worst
}

/// Residual of the channel transition density on `grid`.
pub fn fp_residual(p: &ChannelParams, grid: &FpGrid) -> f64 {
    fp_residual_with(
        |x, t| density(x, grid.x0, t, p).unwrap_or(0.0),
        |x| drift_mu(x, p),
        p.sigma,
        grid,
    )
}

/// `residual(grid) / residual(grid.refined())`; near 4 for a second-order stencil.
pub fn fp_refinement_ratio(p: &ChannelParams, grid: &FpGrid) -> f64 {
    fp_residual(p, grid) / fp_residual(p, &grid.refined())
}
