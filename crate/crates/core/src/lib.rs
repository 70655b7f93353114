//! Pricing for European options on instruments confined to a price channel.

pub mod barrier_pricer;
pub mod black_scholes;
pub mod channel_model;
pub mod channel_pricer;
pub mod error;
pub mod integrate;
pub mod normal;
pub mod oracles;
pub mod types;

pub use barrier_pricer::{BarrierClaim, BarrierMarket};
pub use channel_model::{ChannelParams, MixtureDecomposition};
pub use error::{PricingError, Result};
pub use oracles::{McConfig, McEstimate};
pub use types::{Diagnostics, Method, OptionKind, OptionSpec, PriceResult};
