//! Fixtures shared by the benchmarks.

use channelpx_core::{BarrierMarket, ChannelParams};

/// `A = 100, B = 20, nu = 1, sigma = 0.2`.
pub fn channel() -> ChannelParams {
    ChannelParams::new(100.0, 20.0, 1.0, 0.2).expect("valid channel")
}

/// Spot 100 between barriers at 80 and 120, `r = b = 0.02`, `sigma = 0.25`.
pub fn market() -> BarrierMarket {
    BarrierMarket::new(100.0, 0.25, 0.02, 0.02, 80.0, 120.0).expect("valid market")
}

/// Strikes spread across the interior of `(lower, upper)`.
pub fn strikes(lower: f64, upper: f64, n: usize) -> Vec<f64> {
    let step = (upper - lower) / (n + 1) as f64;
    (1..=n).map(|i| lower + i as f64 * step).collect()
}
