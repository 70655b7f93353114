//! Crank–Nicolson solver for the Black–Scholes–Merton equation on a
//! log-price strip with Dirichlet barriers.
//!
//! The grid is uniform in `x = ln S` with both barriers on nodes. The first
//! two Crank–Nicolson steps are replaced by four implicit half-steps
//! (Rannacher start) so the payoff kink does not excite oscillations, and
//! the terminal payoff is averaged over each cell.

use crate::barrier_pricer::BarrierMarket;
use crate::error::{PricingError, Result};

/// Smallest accepted grid, in space intervals and time steps.
pub const MIN_GRID: (usize, usize) = (200, 200);

const RANNACHER_HALF_STEPS: usize = 4;

/// Terminal payoff of a boundary-value problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Payoff {
    Zero,
    Call { strike: f64 },
    Put { strike: f64 },
}

impl Payoff {
    /// Mean of the payoff over the log-price cell `[a, c]`.
    fn cell_average(&self, a: f64, c: f64) -> f64 {
        let h = c - a;
        match *self {
            Payoff::Zero => 0.0,
            Payoff::Call { strike } => {
                let l = a.max(strike.ln());
                if l >= c {
                    0.0
                } else {
                    (c.exp() - l.exp() - strike * (c - l)) / h
                }
            }
            Payoff::Put { strike } => {
                let u = c.min(strike.ln());
                if u <= a {
                    0.0
                } else {
                    (strike * (u - a) - (u.exp() - a.exp())) / h
                }
            }
        }
    }
}

/// Terminal payoff plus constant values held on each barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryProblem {
    pub payoff: Payoff,
    pub lower_value: f64,
    pub upper_value: f64,
}

impl BoundaryProblem {
    pub fn dko_call(strike: f64) -> Self {
        Self {
            payoff: Payoff::Call { strike },
            lower_value: 0.0,
            upper_value: 0.0,
        }
    }

    pub fn dko_put(strike: f64) -> Self {
        Self {
            payoff: Payoff::Put { strike },
            lower_value: 0.0,
            upper_value: 0.0,
        }
    }

    pub fn one_touch_upper() -> Self {
        Self {
            payoff: Payoff::Zero,
            lower_value: 0.0,
            upper_value: 1.0,
        }
    }

    pub fn one_touch_lower() -> Self {
        Self {
            payoff: Payoff::Zero,
            lower_value: 1.0,
            upper_value: 0.0,
        }
    }
}

/// Values at time-to-maturity `tau` on every log-price node.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeSolution {
    pub x_lower: f64,
    pub h: f64,
    pub values: Vec<f64>,
    pub grid: (usize, usize),
}

impl PdeSolution {
    /// Cubic Lagrange interpolation in log price.
    pub fn value_at(&self, spot: f64) -> Result<f64> {
        let n = self.values.len() - 1;
        let x_upper = self.x_lower + n as f64 * self.h;
        let x = spot.ln();
        if !(x >= self.x_lower - 1e-12 && x <= x_upper + 1e-12) {
            return Err(PricingError::PriceOutsideChannel {
                price: spot,
                lower: self.x_lower.exp(),
                upper: x_upper.exp(),
            });
        }
        let s = ((x - self.x_lower) / self.h).clamp(0.0, n as f64);
        let base = (s.floor() as usize).saturating_sub(1).min(n - 3);
        let mut v = 0.0;
        for i in 0..4 {
            let mut w = 1.0;
            for j in 0..4 {
                if i != j {
                    w *= (s - (base + j) as f64) / (i as f64 - j as f64);
                }
            }
            v += w * self.values[base + i];
        }
        Ok(v)
    }
}

/// Solves `V_tau = sigma^2/2 V_xx + (b - sigma^2/2) V_x - r V` on
/// `[ln lower, ln upper]`; `grid = (space intervals, time steps)`.
pub fn pde_solve(
    problem: &BoundaryProblem,
    mkt: &BarrierMarket,
    tau: f64,
    grid: (usize, usize),
) -> Result<PdeSolution> {
    mkt.validate()?;
    if grid.0 < MIN_GRID.0 || grid.1 < MIN_GRID.1 {
        return Err(PricingError::GridTooCoarse {
            space: grid.0,
            time: grid.1,
        });
    }
    if !(tau > 0.0) {
        return Err(PricingError::NonpositiveTime(tau));
    }
    let (nx, nt) = grid;
    let x_lower = mkt.lower.ln();
    let h = (mkt.upper.ln() - x_lower) / nx as f64;

    let mut v: Vec<f64> = (0..=nx)
        .map(|j| {
            let xj = x_lower + j as f64 * h;
            problem.payoff.cell_average(xj - 0.5 * h, xj + 0.5 * h)
        })
        .collect();
    v[0] = problem.lower_value;
    v[nx] = problem.upper_value;

    let a = 0.5 * mkt.sigma * mkt.sigma;
    let m = mkt.carry - a;
    let sub = a / (h * h) - m / (2.0 * h);
    let diag = -2.0 * a / (h * h) - mkt.rate;
    let sup = a / (h * h) + m / (2.0 * h);

    let dt = tau / nt as f64;
    let mut stepper = Stepper::new(nx);
    for _ in 0..RANNACHER_HALF_STEPS {
        stepper.step(&mut v, (sub, diag, sup), 0.5 * dt, 1.0, problem);
    }
    for _ in 0..nt.saturating_sub(RANNACHER_HALF_STEPS / 2) {
        stepper.step(&mut v, (sub, diag, sup), dt, 0.5, problem);
    }
    Ok(PdeSolution {
        x_lower,
        h,
        values: v,
        grid,
    })
}

/// Scratch space for the theta-scheme and the Thomas sweep.
struct Stepper {
    rhs: Vec<f64>,
    c_prime: Vec<f64>,
}

impl Stepper {
    fn new(nx: usize) -> Self {
        Self {
            rhs: vec![0.0; nx + 1],
            c_prime: vec![0.0; nx + 1],
        }
    }

    /// One theta-step: `(I - theta dt L) v' = (I + (1 - theta) dt L) v`.
    fn step(
        &mut self,
        v: &mut [f64],
        (sub, diag, sup): (f64, f64, f64),
        dt: f64,
        theta: f64,
        problem: &BoundaryProblem,
    ) {
        let nx = v.len() - 1;
        let ex = (1.0 - theta) * dt;
        for j in 1..nx {
            self.rhs[j] = v[j] + ex * (sub * v[j - 1] + diag * v[j] + sup * v[j + 1]);
        }
        let im = theta * dt;
        let (l, d, u) = (-im * sub, 1.0 - im * diag, -im * sup);
        self.rhs[1] -= l * problem.lower_value;
        self.rhs[nx - 1] -= u * problem.upper_value;

        // Thomas algorithm on the interior nodes 1..nx-1.
        self.c_prime[1] = u / d;
        self.rhs[1] /= d;
        for j in 2..nx {
            let denom = d - l * self.c_prime[j - 1];
            self.c_prime[j] = u / denom;
            self.rhs[j] = (self.rhs[j] - l * self.rhs[j - 1]) / denom;
        }
        v[nx - 1] = self.rhs[nx - 1];
        for j in (1..nx - 1).rev() {
            v[j] = self.rhs[j] - self.c_prime[j] * v[j + 1];
        }
        v[0] = problem.lower_value;
        v[nx] = problem.upper_value;
    }
}

/// `(V(g) - V(2g)) / (V(2g) - V(4g))` at the market spot, with `g` the base
/// grid and each refinement doubling both axes. Tends to 4 for a second-order
/// scheme.
pub fn richardson_ratio(
    problem: &BoundaryProblem,
    mkt: &BarrierMarket,
    tau: f64,
    base: (usize, usize),
) -> Result<f64> {
    let at = |k: usize| -> Result<f64> {
        pde_solve(problem, mkt, tau, (base.0 * k, base.1 * k))?.value_at(mkt.spot)
    };
    let (v1, v2, v4) = (at(1)?, at(2)?, at(4)?);
    Ok((v1 - v2) / (v2 - v4))
}
