//! Dispatch from a resolved config to the pricer or oracle that prices it.

use crate::config::{Engine, Model, RunConfig};
use channelpx_core::barrier_pricer::price_claim;
use channelpx_core::channel_pricer;
use channelpx_core::oracles::{mc_barrier, mc_channel, pde_solve, quad_price, BoundaryProblem, Payoff};
use channelpx_core::{
    BarrierClaim, BarrierMarket, Diagnostics, McEstimate, Method, OptionSpec, PriceResult, PricingError, Result,
};

pub fn price(cfg: &RunConfig) -> Result<PriceResult> {
    match cfg.model {
        Model::Channel => channel(cfg),
        Model::Barrier => barrier(cfg),
    }
}

fn channel(cfg: &RunConfig) -> Result<PriceResult> {
    let p = cfg.channel_params();
    let spec = OptionSpec {
        strike: cfg.strike,
        tau: cfg.tau,
        kind: cfg.kind,
    };
    match cfg.engine {
        Engine::Analytic => channel_pricer::price(cfg.spot, &spec, p),
        Engine::Quadrature => quad_price(cfg.spot, &spec, p),
        Engine::MonteCarlo => mc_channel(cfg.spot, &spec, p, &cfg.mc).map(mc_result),
        Engine::Pde => unreachable!("rejected while resolving the config"),
    }
}

fn barrier(cfg: &RunConfig) -> Result<PriceResult> {
    let mkt = cfg.market();
    let claim = cfg.claim();
    if cfg.engine != Engine::Analytic && uses_strike(claim) {
        check_strike(&mkt, cfg.strike)?;
    }
    match cfg.engine {
        Engine::Analytic => price_claim(&mkt, claim, cfg.strike, cfg.tau),
        Engine::MonteCarlo => mc_barrier(&mkt, claim, cfg.strike, cfg.tau, &cfg.mc).map(mc_result),
        Engine::Pde => {
            let grid = (cfg.pde_grid[0], cfg.pde_grid[1]);
            let sol = pde_solve(&boundary_problem(&mkt, claim, cfg.strike), &mkt, cfg.tau, grid)?;
            Ok(PriceResult::with_diag(
                sol.value_at(mkt.spot)?,
                Method::FiniteDifference,
                Diagnostics {
                    grid: Some(grid),
                    ..Diagnostics::default()
                },
            ))
        }
        Engine::Quadrature => unreachable!("rejected while resolving the config"),
    }
}

fn uses_strike(claim: BarrierClaim) -> bool {
    !matches!(claim, BarrierClaim::OneTouchUpper | BarrierClaim::OneTouchLower)
}

fn check_strike(mkt: &BarrierMarket, strike: f64) -> Result<()> {
    if strike > mkt.lower && strike < mkt.upper {
        Ok(())
    } else {
        Err(PricingError::InvalidStrike {
            strike,
            lower: mkt.lower,
            upper: mkt.upper,
        })
    }
}

/// Boundary-value problem of a claim; rebates are held on the barrier they pay at.
pub fn boundary_problem(mkt: &BarrierMarket, claim: BarrierClaim, strike: f64) -> BoundaryProblem {
    match claim {
        BarrierClaim::DkoCall => BoundaryProblem::dko_call(strike),
        BarrierClaim::DkoPut => BoundaryProblem::dko_put(strike),
        BarrierClaim::OneTouchUpper => BoundaryProblem::one_touch_upper(),
        BarrierClaim::OneTouchLower => BoundaryProblem::one_touch_lower(),
        BarrierClaim::ChannelCall => BoundaryProblem {
            payoff: Payoff::Call { strike },
            lower_value: 0.0,
            upper_value: mkt.upper - strike,
        },
        BarrierClaim::ChannelPut => BoundaryProblem {
            payoff: Payoff::Put { strike },
            lower_value: strike - mkt.lower,
            upper_value: 0.0,
        },
    }
}

pub fn mc_result(e: McEstimate) -> PriceResult {
    PriceResult::with_diag(
        e.value,
        Method::MonteCarlo,
        Diagnostics {
            std_error: Some(e.std_error),
            paths: Some(e.paths_used),
            ..Diagnostics::default()
        },
    )
}
