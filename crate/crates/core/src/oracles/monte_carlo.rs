//! Seeded Monte Carlo for the channel SDE and for GBM between barriers.
//!
//! Path `i` draws from ChaCha8 stream `i` of the configured seed, so its
//! normals do not depend on scheduling. Paths are grouped in fixed-size
//! chunks, each chunk is accumulated sequentially, and chunk statistics are
//! merged in chunk order: estimates are bit-identical across thread counts.

use crate::barrier_pricer::{BarrierClaim, BarrierMarket};
use crate::channel_model::{s_of_x, x_of_s, ChannelParams};
use crate::error::{PricingError, Result};
use crate::normal::inv_cdf;
use crate::types::{OptionKind, OptionSpec};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const CHUNK: u64 = 4096;
/// Bridge hit probabilities below `exp(-BRIDGE_CUTOFF)` are treated as zero.
const BRIDGE_CUTOFF: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub paths: u64,
    /// Time steps per unit time; a path over `tau` takes `ceil(steps * tau)` steps.
    pub steps: u32,
    pub seed: u64,
    pub bridge_correction: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            paths: 100_000,
            steps: 256,
            seed: 42,
            bridge_correction: true,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 || self.steps == 0 {
            return Err(PricingError::InvalidConfig(format!(
                "paths and steps must be at least 1, got {} and {}",
                self.paths, self.steps
            )));
        }
        Ok(())
    }

    fn step_count(&self, tau: f64) -> usize {
        ((self.steps as f64 * tau).ceil() as usize).max(1)
    }
}

/// How barrier paths ended.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitStats {
    pub upper: u64,
    pub lower: u64,
    pub expired: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub paths_used: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hit_stats: Option<HitStats>,
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64 * o.n as f64 / n as f64),
        }
    }

    fn estimate(&self, hit_stats: Option<HitStats>) -> McEstimate {
        let std_error = if self.n >= 2 {
            (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
        } else {
            0.0
        };
        McEstimate {
            value: self.mean,
            std_error,
            paths_used: self.n,
            hit_stats,
        }
    }
}

/// Per-path generator of uniforms in (0, 1) and standard normals.
struct PathRng(ChaCha8Rng);

impl PathRng {
    fn new(seed: u64, path: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(path);
        Self(rng)
    }

    #[inline]
    fn uniform(&mut self) -> f64 {
        ((self.0.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    fn normal(&mut self) -> f64 {
        inv_cdf(self.uniform())
    }
}

/// Runs `group(first, count, emit)` over consecutive blocks of path indices
/// and reduces the `N` payoffs per path in path order. `emit` must be called
/// once per path, in index order; its tag is counted into `HitStats`.
fn simulate<const N: usize, G>(cfg: &McConfig, block: u64, group: G) -> ([Moments; N], HitStats)
where
    G: Fn(u64, usize, &mut dyn FnMut([f64; N], PathEnd)) + Sync,
{
    let chunks = cfg.paths.div_ceil(CHUNK);
    let partial: Vec<([Moments; N], HitStats)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = [Moments::default(); N];
            let mut hits = HitStats::default();
            let end = ((c + 1) * CHUNK).min(cfg.paths);
            let mut emit = |values: [f64; N], tag: PathEnd| {
                for (m, v) in acc.iter_mut().zip(values) {
                    m.push(v);
                }
                match tag {
                    PathEnd::Upper => hits.upper += 1,
                    PathEnd::Lower => hits.lower += 1,
                    PathEnd::Expired => hits.expired += 1,
                }
            };
            let mut first = c * CHUNK;
            while first < end {
                let count = block.min(end - first);
                group(first, count as usize, &mut emit);
                first += count;
            }
            (acc, hits)
        })
        .collect();
    let mut total = [Moments::default(); N];
    let mut hits = HitStats::default();
    for (acc, h) in partial {
        for (t, a) in total.iter_mut().zip(acc) {
            *t = t.merge(a);
        }
        hits.upper += h.upper;
        hits.lower += h.lower;
        hits.expired += h.expired;
    }
    (total, hits)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PathEnd {
    Upper,
    Lower,
    Expired,
}

/// `tanh` through one `expm1`; `|z| > 20` already rounds to ±1.
#[inline]
fn tanh(z: f64) -> f64 {
    let e = (2.0 * z.clamp(-20.0, 20.0)).exp_m1();
    e / (e + 2.0)
}

/// Paths advanced in lockstep; independent lanes hide the latency of the
/// drift evaluation.
const LANES: usize = 4;

/// Euler–Maruyama terminal states of up to `LANES` channel paths starting at
/// path index `first`. Lanes past `count` replay the last path and are ignored.
fn channel_terminals(
    cfg: &McConfig,
    first: u64,
    count: usize,
    x0: f64,
    n: usize,
    dt: f64,
    p: &ChannelParams,
) -> [f64; LANES] {
    let mut rngs: [PathRng; LANES] =
        std::array::from_fn(|l| PathRng::new(cfg.seed, first + l.min(count - 1) as u64));
    let vol = p.sigma * dt.sqrt();
    let mu_dt = p.mu_star() * dt;
    let mut x = [x0; LANES];
    for _ in 0..n {
        for l in 0..LANES {
            x[l] += mu_dt * tanh(p.nu * (x[l] - p.x_star)) + vol * rngs[l].normal();
        }
    }
    x
}

fn channel_run<F>(s_t: f64, tau: f64, p: &ChannelParams, cfg: &McConfig, payoff: F) -> Result<McEstimate>
where
    F: Fn(f64) -> f64 + Sync,
{
    cfg.validate()?;
    p.validate()?;
    if !(tau > 0.0) {
        return Err(PricingError::NonpositiveTime(tau));
    }
    let x0 = x_of_s(s_t, p)?;
    let n = cfg.step_count(tau);
    let dt = tau / n as f64;
    let ([m], _) = simulate::<1, _>(cfg, LANES as u64, |first, count, emit| {
        let xs = channel_terminals(cfg, first, count, x0, n, dt, p);
        for &x in &xs[..count] {
            emit([payoff(s_of_x(x, p))], PathEnd::Expired);
        }
    });
    Ok(m.estimate(None))
}

/// Mean discounted-at-zero-rate payoff of the channel option.
pub fn mc_channel(s_t: f64, spec: &OptionSpec, p: &ChannelParams, cfg: &McConfig) -> Result<McEstimate> {
    let k = spec.strike;
    match spec.kind {
        OptionKind::Call => channel_run(s_t, spec.tau, p, cfg, |s| (s - k).max(0.0)),
        OptionKind::Put => channel_run(s_t, spec.tau, p, cfg, |s| (k - s).max(0.0)),
    }
}

/// Sample mean of the terminal channel price; equals `s_t` for a martingale.
pub fn mc_channel_martingale(s_t: f64, tau: f64, p: &ChannelParams, cfg: &McConfig) -> Result<McEstimate> {
    channel_run(s_t, tau, p, cfg, |s| s)
}

/// Estimates of all six barrier claims from one set of paths, in
/// [`BarrierClaim::ALL`] order.
pub fn mc_barrier_all(
    mkt: &BarrierMarket,
    strike: f64,
    tau: f64,
    cfg: &McConfig,
) -> Result<[McEstimate; 6]> {
    cfg.validate()?;
    mkt.validate()?;
    if !(tau > 0.0) {
        return Err(PricingError::NonpositiveTime(tau));
    }
    let n = cfg.step_count(tau);
    let dt = tau / n as f64;
    let sig2 = mkt.sigma * mkt.sigma;
    let step_drift = (mkt.carry - 0.5 * sig2) * dt;
    let step_vol = mkt.sigma * dt.sqrt();
    let (ln_lo, ln_hi) = (mkt.lower.ln(), mkt.upper.ln());
    let bridge_scale = 2.0 / (sig2 * dt);
    let r = mkt.rate;
    let disc_t = (-r * tau).exp();
    let (up_rebate, down_rebate) = (mkt.upper - strike, strike - mkt.lower);

    // Payoff vector ordered as BarrierClaim::ALL.
    let on_hit = |upper: bool, t_hit: f64| -> [f64; 6] {
        let d = (-r * t_hit).exp();
        if upper {
            [0.0, 0.0, d, 0.0, up_rebate * d, 0.0]
        } else {
            [0.0, 0.0, 0.0, d, 0.0, down_rebate * d]
        }
    };

    let path = |rng: &mut PathRng| -> ([f64; 6], PathEnd) {
        let x_start = mkt.spot.ln();
        if x_start >= ln_hi {
            return (on_hit(true, 0.0), PathEnd::Upper);
        }
        if x_start <= ln_lo {
            return (on_hit(false, 0.0), PathEnd::Lower);
        }
        let mut x = x_start;
        for k in 0..n {
            let next = x + step_drift + step_vol * rng.normal();
            let t_end = (k + 1) as f64 * dt;
            if next >= ln_hi {
                return (on_hit(true, t_end), PathEnd::Upper);
            }
            if next <= ln_lo {
                return (on_hit(false, t_end), PathEnd::Lower);
            }
            if cfg.bridge_correction {
                let t_mid = (k as f64 + 0.5) * dt;
                for (upper, b) in [(true, ln_hi), (false, ln_lo)] {
                    let e = bridge_scale * (x - b) * (next - b);
                    if e < BRIDGE_CUTOFF && rng.uniform() < (-e).exp() {
                        let end = if upper { PathEnd::Upper } else { PathEnd::Lower };
                        return (on_hit(upper, t_mid), end);
                    }
                }
            }
            x = next;
        }
        let s = x.exp();
        let call = disc_t * (s - strike).max(0.0);
        let put = disc_t * (strike - s).max(0.0);
        ([call, put, 0.0, 0.0, call, put], PathEnd::Expired)
    };
    let (moments, hits) = simulate::<6, _>(cfg, 1, |first, _, emit| {
        let (values, end) = path(&mut PathRng::new(cfg.seed, first));
        emit(values, end);
    });
    Ok(moments.map(|m| m.estimate(Some(hits))))
}

/// Estimate of one barrier claim.
pub fn mc_barrier(
    mkt: &BarrierMarket,
    claim: BarrierClaim,
    strike: f64,
    tau: f64,
    cfg: &McConfig,
) -> Result<McEstimate> {
    let all = mc_barrier_all(mkt, strike, tau, cfg)?;
    let i = BarrierClaim::ALL
        .iter()
        .position(|&c| c == claim)
        .expect("claim listed in ALL");
    Ok(all[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::black_scholes::bsm_price;

    fn cfg(paths: u64, steps: u32) -> McConfig {
        McConfig {
            paths,
            steps,
            seed: 7,
            bridge_correction: true,
        }
    }

    #[test]
    fn moments_merge_matches_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..333].iter().for_each(|&x| a.push(x));
        xs[333..].iter().for_each(|&x| b.push(x));
        let merged = a.merge(b);
        assert!((merged.mean - whole.mean).abs() < 1e-13);
        assert!((merged.m2 / whole.m2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fast_tanh_matches_std() {
        for i in -4000..=4000 {
            let z = i as f64 * 0.01;
            assert!((tanh(z) - z.tanh()).abs() < 4e-16, "{z}");
        }
        assert_eq!(tanh(1e300), 1.0);
        assert_eq!(tanh(-1e300), -1.0);
    }

    #[test]
    fn uniforms_stay_open() {
        let mut r = PathRng::new(1, 0);
        for _ in 0..10_000 {
            let u = r.uniform();
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn deterministic_for_equal_seeds() {
        let p = ChannelParams::new(100.0, 20.0, 1.0, 0.2).unwrap();
        let spec = OptionSpec::call(105.0, 1.0);
        let a = mc_channel(100.0, &spec, &p, &cfg(10_000, 64)).unwrap();
        let b = mc_channel(100.0, &spec, &p, &cfg(10_000, 64)).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let c = mc_channel(100.0, &spec, &p, &McConfig { seed: 8, ..cfg(10_000, 64) }).unwrap();
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn tiny_volatility_gives_intrinsic() {
        let p = ChannelParams::new(100.0, 20.0, 1.0, 1e-6).unwrap();
        let est = mc_channel(104.0, &OptionSpec::call(100.0, 1.0), &p, &cfg(2000, 64)).unwrap();
        assert!((est.value - 4.0).abs() < 1e-4);
    }

    #[test]
    fn hit_stats_partition_paths() {
        let m = BarrierMarket::new(100.0, 0.25, 0.02, 0.02, 80.0, 120.0).unwrap();
        let all = mc_barrier_all(&m, 100.0, 0.5, &cfg(20_000, 128)).unwrap();
        let h = all[0].hit_stats.unwrap();
        assert_eq!(h.upper + h.lower + h.expired, 20_000);
        assert!(all.iter().all(|e| e.paths_used == 20_000));
    }

    #[test]
    fn far_barriers_recover_black_scholes() {
        let m = BarrierMarket::new(100.0, 0.2, 0.03, 0.03, 1e-9, 1e9).unwrap();
        let est = mc_barrier(&m, BarrierClaim::DkoCall, 100.0, 1.0, &cfg(50_000, 16)).unwrap();
        let bs = bsm_price(OptionKind::Call, 100.0, 100.0, 1.0, 0.03, 0.03, 0.2);
        assert!((est.value - bs).abs() < 3.0 * est.std_error, "{} vs {bs}", est.value);
        assert_eq!(est.hit_stats.unwrap().expired, 50_000);
    }

    #[test]
    fn standard_error_falls_as_root_paths() {
        let p = ChannelParams::new(100.0, 20.0, 1.0, 0.2).unwrap();
        let spec = OptionSpec::call(100.0, 0.5);
        let pts: Vec<(f64, f64)> = [10_000u64, 100_000, 1_000_000]
            .iter()
            .map(|&n| {
                let e = mc_channel(100.0, &spec, &p, &cfg(n, 16)).unwrap();
                ((n as f64).ln(), e.std_error.ln())
            })
            .collect();
        let mx = pts.iter().map(|q| q.0).sum::<f64>() / 3.0;
        let my = pts.iter().map(|q| q.1).sum::<f64>() / 3.0;
        let sxy: f64 = pts.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|q| (q.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        assert!((slope + 0.5).abs() <= 0.05, "{slope}");
    }

    #[test]
    fn bridge_beats_finer_discrete_monitoring() {
        use crate::oracles::pde::{pde_solve, BoundaryProblem};
        let m = BarrierMarket::new(100.0, 0.25, 0.02, 0.02, 80.0, 120.0).unwrap();
        let exact = pde_solve(&BoundaryProblem::one_touch_upper(), &m, 0.5, (2000, 2000))
            .unwrap()
            .value_at(100.0)
            .unwrap();
        let run = |steps, bridge_correction| {
            let c = McConfig {
                bridge_correction,
                ..cfg(200_000, steps)
            };
            mc_barrier(&m, BarrierClaim::OneTouchUpper, 100.0, 0.5, &c).unwrap().value
        };
        let bridged = (run(128, true) - exact).abs();
        let discrete = (run(512, false) - exact).abs();
        assert!(bridged < discrete, "bridge {bridged:e}, discrete {discrete:e}");
    }

    #[test]
    fn rejects_empty_config() {
        let m = BarrierMarket::new(100.0, 0.2, 0.0, 0.0, 80.0, 120.0).unwrap();
        assert!(mc_barrier_all(&m, 100.0, 1.0, &cfg(0, 10)).is_err());
    }
}
