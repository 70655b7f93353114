//! Run configuration: a JSON document, overridden field by field by flags,
//! resolved into a complete [`RunConfig`].
//!
//! A resolved config serializes to a document that parses back to the same
//! run, so every output can carry its own reproducible inputs.

use crate::args::Overrides;
use crate::error::CliError;
use channelpx_core::{BarrierClaim, BarrierMarket, ChannelParams, McConfig, OptionKind};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

pub const CONFIG_SCHEMA: &str = "channelpx.config.v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Channel,
    Barrier,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Channel => "channel",
            Model::Barrier => "barrier",
        }
    }
}

/// Numerical route for `price` and `curve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Engine {
    /// Closed form (channel) or image and eigenfunction series (barrier).
    Analytic,
    /// Payoff integrated against the transition density; channel only.
    Quadrature,
    MonteCarlo,
    /// Crank–Nicolson; barrier only.
    Pde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    Spot,
    Strike,
    Tau,
}

impl SweepVar {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVar::Spot => "spot",
            SweepVar::Strike => "strike",
            SweepVar::Tau => "tau",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Suite {
    Density,
    Martingale,
    Parity,
    OracleChannel,
    OracleBarrier,
    ArbitrageDemo,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Density => "density",
            Suite::Martingale => "martingale",
            Suite::Parity => "parity",
            Suite::OracleChannel => "oracle_channel",
            Suite::OracleBarrier => "oracle_barrier",
            Suite::ArbitrageDemo => "arbitrage_demo",
        }
    }

    fn required_model(self) -> Option<Model> {
        match self {
            Suite::Density | Suite::Martingale | Suite::OracleChannel => Some(Model::Channel),
            Suite::OracleBarrier => Some(Model::Barrier),
            Suite::Parity | Suite::ArbitrageDemo => None,
        }
    }
}

/// Which command the config is resolved for; decides the command-specific sections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Price,
    Curve,
    Verify(Suite),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierSection {
    pub lower: f64,
    pub upper: f64,
    pub rate: f64,
    pub carry: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub var: SweepVar,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl CurveSpec {
    /// Evenly spaced sweep values; the last equals `to` exactly.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.from];
        }
        let step = (self.to - self.from) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.to
                } else {
                    self.from + i as f64 * step
                }
            })
            .collect()
    }
}

/// One-step market for the reflecting-barrier demonstration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArbitrageSpec {
    pub s_now: f64,
    pub s_up: f64,
    /// At a reflecting lower barrier the down move is pinned to `s_now`.
    pub s_down: f64,
    pub rate: f64,
    pub dt: f64,
}

impl Default for ArbitrageSpec {
    fn default() -> Self {
        Self {
            s_now: 80.0,
            s_up: 81.0,
            s_down: 80.0,
            rate: 0.05,
            dt: 0.01,
        }
    }
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub schema: String,
    pub model: Model,
    pub kind: OptionKind,
    pub spot: f64,
    pub strike: f64,
    pub tau: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claim: Option<BarrierClaim>,
    pub engine: Engine,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barrier: Option<BarrierSection>,
    pub mc: McConfig,
    pub pde_grid: [usize; 2],
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arbitrage: Option<ArbitrageSpec>,
}

impl RunConfig {
    pub fn channel_params(&self) -> &ChannelParams {
        self.channel.as_ref().expect("channel model carries channel parameters")
    }

    pub fn market(&self) -> BarrierMarket {
        let b = self.barrier.expect("barrier model carries a market");
        BarrierMarket {
            spot: self.spot,
            sigma: b.sigma,
            rate: b.rate,
            carry: b.carry,
            lower: b.lower,
            upper: b.upper,
        }
    }

    pub fn claim(&self) -> BarrierClaim {
        self.claim.unwrap_or(match self.kind {
            OptionKind::Call => BarrierClaim::ChannelCall,
            OptionKind::Put => BarrierClaim::ChannelPut,
        })
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    a: Option<f64>,
    b: Option<f64>,
    nu: Option<f64>,
    sigma: Option<f64>,
    x_star: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBarrier {
    lower: Option<f64>,
    upper: Option<f64>,
    rate: Option<f64>,
    carry: Option<f64>,
    sigma: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMc {
    paths: Option<u64>,
    steps: Option<u32>,
    seed: Option<u64>,
    bridge_correction: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurve {
    var: Option<SweepVar>,
    from: Option<f64>,
    to: Option<f64>,
    points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArbitrage {
    s_now: Option<f64>,
    s_up: Option<f64>,
    s_down: Option<f64>,
    rate: Option<f64>,
    dt: Option<f64>,
}

/// The config document as written: every field optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema: Option<String>,
    model: Option<Model>,
    kind: Option<OptionKind>,
    spot: Option<f64>,
    strike: Option<f64>,
    tau: Option<f64>,
    valuation_time: Option<f64>,
    maturity: Option<f64>,
    claim: Option<BarrierClaim>,
    engine: Option<Engine>,
    channel: Option<RawChannel>,
    barrier: Option<RawBarrier>,
    mc: Option<RawMc>,
    pde_grid: Option<[usize; 2]>,
    format: Option<Format>,
    curve: Option<RawCurve>,
    arbitrage: Option<RawArbitrage>,
}

const DEFAULT_POINTS: usize = 21;
const DEFAULT_PDE_GRID: [usize; 2] = [2000, 2000];

/// Parse a config document and apply flag overrides.
pub fn resolve(document: Option<&str>, flags: &Overrides, purpose: Purpose) -> Result<RunConfig, CliError> {
    let mut raw: RawConfig = match document {
        Some(text) => serde_json::from_str(text).map_err(|e| CliError::Parse(format!("config: {e}")))?,
        None => RawConfig::default(),
    };
    if let Some(s) = &raw.schema {
        if s != CONFIG_SCHEMA {
            return Err(CliError::Parse(format!(
                "config schema {s:?} is not {CONFIG_SCHEMA:?}"
            )));
        }
    }
    apply_flags(&mut raw, flags)?;
    build(raw, purpose)
}

fn apply_flags(raw: &mut RawConfig, f: &Overrides) -> Result<(), CliError> {
    fn set<T: Copy>(slot: &mut Option<T>, v: Option<T>) {
        if v.is_some() {
            *slot = v;
        }
    }
    set(&mut raw.model, f.model);
    set(&mut raw.kind, f.kind);
    set(&mut raw.claim, f.claim);
    set(&mut raw.engine, f.engine);
    set(&mut raw.spot, f.spot);
    set(&mut raw.strike, f.strike);
    set(&mut raw.tau, f.tau);
    set(&mut raw.valuation_time, f.valuation_time);
    set(&mut raw.maturity, f.maturity);
    set(&mut raw.format, f.format);

    let model = raw.model.unwrap_or(Model::Channel);
    let channel_only = [
        ("--nu", f.nu.is_some()),
        ("--center-a", f.center_a.is_some()),
        ("--half-width-b", f.half_width_b.is_some()),
    ];
    let barrier_only = [
        ("--lower", f.lower.is_some()),
        ("--upper", f.upper.is_some()),
        ("--rate", f.rate.is_some()),
        ("--carry", f.carry.is_some()),
    ];
    let (foreign, owner) = match model {
        Model::Channel => (&barrier_only[..], Model::Barrier),
        Model::Barrier => (&channel_only[..], Model::Channel),
    };
    if let Some((flag, _)) = foreign.iter().find(|(_, used)| *used) {
        return Err(CliError::Parse(format!(
            "{flag} applies to the {} model, not {}",
            owner.as_str(),
            model.as_str()
        )));
    }
    match model {
        Model::Channel => {
            let c = raw.channel.get_or_insert_with(RawChannel::default);
            set(&mut c.a, f.center_a);
            set(&mut c.b, f.half_width_b);
            set(&mut c.nu, f.nu);
            set(&mut c.sigma, f.sigma);
        }
        Model::Barrier => {
            let b = raw.barrier.get_or_insert_with(RawBarrier::default);
            set(&mut b.lower, f.lower);
            set(&mut b.upper, f.upper);
            set(&mut b.rate, f.rate);
            set(&mut b.carry, f.carry);
            set(&mut b.sigma, f.sigma);
        }
    }
    if f.seed.is_some() || f.paths.is_some() || f.steps.is_some() {
        let m = raw.mc.get_or_insert_with(RawMc::default);
        set(&mut m.seed, f.seed);
        set(&mut m.paths, f.paths);
        set(&mut m.steps, f.steps);
    }
    if f.sweep.is_some() || f.from.is_some() || f.to.is_some() || f.points.is_some() {
        let c = raw.curve.get_or_insert_with(RawCurve::default);
        set(&mut c.var, f.sweep);
        set(&mut c.from, f.from);
        set(&mut c.to, f.to);
        set(&mut c.points, f.points);
    }
    Ok(())
}

fn claim_kind(claim: BarrierClaim) -> Option<OptionKind> {
    match claim {
        BarrierClaim::DkoCall | BarrierClaim::ChannelCall => Some(OptionKind::Call),
        BarrierClaim::DkoPut | BarrierClaim::ChannelPut => Some(OptionKind::Put),
        BarrierClaim::OneTouchUpper | BarrierClaim::OneTouchLower => None,
    }
}

fn resolve_tau(raw: &RawConfig, default: f64) -> Result<f64, CliError> {
    match (raw.valuation_time, raw.maturity) {
        (Some(t), Some(big_t)) => {
            let tau = big_t - t;
            if let Some(given) = raw.tau {
                if given != tau {
                    return Err(CliError::Parse(format!(
                        "tau = {given} contradicts maturity - valuation_time = {tau}"
                    )));
                }
            }
            Ok(tau)
        }
        (None, None) => Ok(raw.tau.unwrap_or(default)),
        _ => Err(CliError::Parse(
            "valuation_time and maturity must be given together".into(),
        )),
    }
}

fn build(raw: RawConfig, purpose: Purpose) -> Result<RunConfig, CliError> {
    let model = raw.model.unwrap_or(Model::Channel);
    let engine = raw.engine.unwrap_or(Engine::Analytic);
    match (model, engine) {
        (Model::Channel, Engine::Pde) => {
            return Err(CliError::Parse("engine pde is available for the barrier model only".into()))
        }
        (Model::Barrier, Engine::Quadrature) => {
            return Err(CliError::Parse(
                "engine quadrature is available for the channel model only".into(),
            ))
        }
        _ => {}
    }
    if let Purpose::Verify(suite) = purpose {
        if let Some(need) = suite.required_model() {
            if need != model {
                return Err(CliError::Parse(format!(
                    "suite {} needs the {} model",
                    suite.as_str(),
                    need.as_str()
                )));
            }
        }
    }

    let (channel, barrier, spot, strike, tau) = match model {
        Model::Channel => {
            if raw.barrier.is_some() || raw.claim.is_some() {
                return Err(CliError::Parse(
                    "barrier section and claim need model = barrier".into(),
                ));
            }
            let c = raw.channel.clone().unwrap_or_default();
            let p = ChannelParams {
                a: c.a.unwrap_or(100.0),
                b: c.b.unwrap_or(20.0),
                nu: c.nu.unwrap_or(1.0),
                sigma: c.sigma.unwrap_or(0.2),
                x_star: c.x_star.unwrap_or(0.0),
            };
            let tau = resolve_tau(&raw, 1.0)?;
            (Some(p), None, raw.spot.unwrap_or(100.0), raw.strike.unwrap_or(110.0), tau)
        }
        Model::Barrier => {
            if raw.channel.is_some() {
                return Err(CliError::Parse("channel section needs model = channel".into()));
            }
            let b = raw.barrier.clone().unwrap_or_default();
            let rate = b.rate.unwrap_or(0.02);
            let m = BarrierSection {
                lower: b.lower.unwrap_or(80.0),
                upper: b.upper.unwrap_or(120.0),
                rate,
                carry: b.carry.unwrap_or(rate),
                sigma: b.sigma.unwrap_or(0.25),
            };
            let tau = resolve_tau(&raw, 0.5)?;
            (None, Some(m), raw.spot.unwrap_or(100.0), raw.strike.unwrap_or(100.0), tau)
        }
    };

    let claim = raw.claim;
    let kind = match (raw.kind, claim.and_then(claim_kind)) {
        (Some(k), Some(ck)) if k != ck => {
            return Err(CliError::Parse(format!(
                "kind {k:?} contradicts claim {}",
                claim.map(|c| c.as_str()).unwrap_or_default()
            )))
        }
        (Some(k), _) => k,
        (None, Some(ck)) => ck,
        (None, None) => OptionKind::Call,
    };

    let rm = raw.mc.clone().unwrap_or_default();
    let base = McConfig::default();
    let mc = McConfig {
        paths: rm.paths.unwrap_or(base.paths),
        steps: rm.steps.unwrap_or(base.steps),
        seed: rm.seed.unwrap_or(base.seed),
        bridge_correction: rm.bridge_correction.unwrap_or(base.bridge_correction),
    };
    mc.validate().map_err(|e| CliError::Parse(e.to_string()))?;
    let pde_grid = raw.pde_grid.unwrap_or(DEFAULT_PDE_GRID);

    let format = raw.format.unwrap_or(match purpose {
        Purpose::Curve => Format::Csv,
        _ => Format::Json,
    });

    let mut cfg = RunConfig {
        schema: CONFIG_SCHEMA.to_string(),
        model,
        kind,
        spot,
        strike,
        tau,
        claim,
        engine,
        channel,
        barrier,
        mc,
        pde_grid,
        format,
        curve: None,
        arbitrage: None,
    };
    if purpose == Purpose::Curve {
        cfg.curve = Some(curve_spec(&cfg, raw.curve.unwrap_or_default())?);
    }
    if purpose == Purpose::Verify(Suite::ArbitrageDemo) {
        let a = raw.arbitrage.unwrap_or_default();
        let d = ArbitrageSpec::default();
        let s_now = a.s_now.unwrap_or(d.s_now);
        cfg.arbitrage = Some(ArbitrageSpec {
            s_now,
            s_up: a.s_up.unwrap_or(d.s_up),
            s_down: a.s_down.unwrap_or(s_now),
            rate: a.rate.unwrap_or(d.rate),
            dt: a.dt.unwrap_or(d.dt),
        });
    }
    Ok(cfg)
}

/// Default range per sweep variable: the whole barrier strip for spot,
/// an interior band for strikes and for the open channel, `(tau/10, 2 tau)`
/// for time.
fn curve_spec(cfg: &RunConfig, raw: RawCurve) -> Result<CurveSpec, CliError> {
    let var = raw.var.unwrap_or(SweepVar::Spot);
    let (lo, hi) = match (cfg.channel, cfg.barrier) {
        (Some(p), _) => (p.s_minus(), p.s_plus()),
        (None, Some(b)) => (b.lower, b.upper),
        (None, None) => unreachable!("every model carries bounds"),
    };
    let band = 0.01 * (hi - lo);
    let (from, to) = match (var, cfg.model) {
        (SweepVar::Spot, Model::Barrier) => (lo, hi),
        (SweepVar::Spot, Model::Channel) | (SweepVar::Strike, _) => (lo + band, hi - band),
        (SweepVar::Tau, _) => (0.1 * cfg.tau, 2.0 * cfg.tau),
    };
    let spec = CurveSpec {
        var,
        from: raw.from.unwrap_or(from),
        to: raw.to.unwrap_or(to),
        points: raw.points.unwrap_or(DEFAULT_POINTS),
    };
    if spec.points == 0 {
        return Err(CliError::Parse("curve needs at least one point".into()));
    }
    if !(spec.from.is_finite() && spec.to.is_finite()) {
        return Err(CliError::Parse("curve range must be finite".into()));
    }
    Ok(spec)
}
