use crate::config::{Engine, Format, Model, Suite, SweepVar};
use channelpx_core::{BarrierClaim, OptionKind};
use clap::builder::{EnumValueParser, TypedValueParser};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "channelpx", version, about = "Price European options on instruments confined to a price channel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price one option and print a JSON result.
    Price(Overrides),
    /// Sweep spot, strike or time to maturity and print one row per point.
    Curve(Overrides),
    /// Run a verification suite; exits 3 if any check fails.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum ClaimArg {
    DkoCall,
    DkoPut,
    OneTouchUpper,
    OneTouchLower,
    ChannelCall,
    ChannelPut,
}

impl From<ClaimArg> for BarrierClaim {
    fn from(c: ClaimArg) -> Self {
        match c {
            ClaimArg::DkoCall => BarrierClaim::DkoCall,
            ClaimArg::DkoPut => BarrierClaim::DkoPut,
            ClaimArg::OneTouchUpper => BarrierClaim::OneTouchUpper,
            ClaimArg::OneTouchLower => BarrierClaim::OneTouchLower,
            ClaimArg::ChannelCall => BarrierClaim::ChannelCall,
            ClaimArg::ChannelPut => BarrierClaim::ChannelPut,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Call,
    Put,
}

impl From<KindArg> for OptionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Call => OptionKind::Call,
            KindArg::Put => OptionKind::Put,
        }
    }
}

/// `--config` plus per-field overrides; flags win over the file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON config document.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    #[arg(long, value_parser = EnumValueParser::<KindArg>::new().map(OptionKind::from))]
    pub kind: Option<OptionKind>,
    /// Barrier claim; defaults to the channel call or put matching `--kind`.
    #[arg(long, value_parser = EnumValueParser::<ClaimArg>::new().map(BarrierClaim::from))]
    pub claim: Option<BarrierClaim>,
    #[arg(long, value_enum)]
    pub engine: Option<Engine>,
    #[arg(long, allow_negative_numbers = true)]
    pub spot: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub strike: Option<f64>,
    /// Time to maturity `T - t`.
    #[arg(long, allow_negative_numbers = true)]
    pub tau: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub valuation_time: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub maturity: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lower: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub upper: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rate: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub carry: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    #[arg(long = "center-a", allow_negative_numbers = true)]
    pub center_a: Option<f64>,
    #[arg(long = "half-width-b", allow_negative_numbers = true)]
    pub half_width_b: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub paths: Option<u64>,
    /// Monte Carlo time steps per unit time.
    #[arg(long)]
    pub steps: Option<u32>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Variable swept by `curve`.
    #[arg(long, value_enum)]
    pub sweep: Option<SweepVar>,
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}
