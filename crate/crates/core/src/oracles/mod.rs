//! Independent engines used to check the closed-form and series prices.

pub mod binomial;
pub mod fokker_planck;
pub mod monte_carlo;
pub mod pde;
pub mod quadrature;

pub use binomial::{
    binomial_claim_price, detect_boundary_arbitrage, detect_upper_boundary_arbitrage,
    BinomialValue,
};
pub use fokker_planck::{fp_refinement_ratio, fp_residual, fp_residual_with, FpGrid};
pub use monte_carlo::{
    mc_barrier, mc_barrier_all, mc_channel, mc_channel_martingale, HitStats, McConfig, McEstimate,
};
pub use pde::{pde_solve, richardson_ratio, BoundaryProblem, Payoff, PdeSolution};
pub use quadrature::{density_moment, quad_price};
