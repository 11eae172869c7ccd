//! Paired current-vs-hybrid Monte Carlo engine.
//!
//! Each day draws a volume, a possible bank failure (with a frozen reserve
//! fraction), a possible mass redemption and Gaussian noise. The same draws
//! drive both regimes; the hybrid regime scales the volume, reserve and
//! redemption impacts by its fractions. Prices follow
//!
//! ```text
//! P[t+1] = P[t] + alpha (1 - P[t]) + beta V[t]/v_bar + gamma L[t] - delta R[t]/MktCap[t] + eps[t]
//! ```
//!
//! clamped at the configured price floor.

use chrono::NaiveDate;
use rand::Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::{HybridFractions, ShockCalibration};
use crate::error::{Error, Result};
use crate::rng::{Channel, DayKey, StreamKey};

/// Human-readable form of the price recursion, recorded in run manifests.
pub const RECURSION: &str =
    "P[t+1] = P[t] + alpha*(1 - P[t]) + beta*V[t]/v_bar + gamma*L[t] - delta*R[t]/MktCap[t] + eps[t]";

/// Frozen-fraction draw `L ~ LogNormal(-3, 0.5)`.
pub const FROZEN_LN_MU: f64 = -3.0;
pub const FROZEN_LN_SIGMA: f64 = 0.5;
/// Redemption size is centred at this share of mean market cap, log-sd 1.
pub const REDEMPTION_SHARE: f64 = 0.05;
pub const REDEMPTION_LN_SIGMA: f64 = 1.0;

pub const DEFAULT_TRIALS: usize = 20_000;
pub const DEFAULT_MULTIPLIER: f64 = 100.0;
pub const SIM_OFF_PEG_TOLERANCE: f64 = 0.01;

pub fn default_window() -> (NaiveDate, NaiveDate) {
    (
        NaiveDate::from_ymd_opt(2019, 11, 1).unwrap(),
        NaiveDate::from_ymd_opt(2025, 4, 30).unwrap(),
    )
}

/// Number of daily steps so that `P_0` falls on `start` and `P_T` on `end`.
pub fn horizon_days(start: NaiveDate, end: NaiveDate) -> usize {
    (end - start).num_days().max(0) as usize
}

/// Enables the price impact of each shock channel. Volumes are drawn even
/// when the volume impact is off, since they decide extreme days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelSwitches {
    pub volume: bool,
    pub reserve: bool,
    pub redemption: bool,
}

impl Default for ChannelSwitches {
    fn default() -> Self {
        Self {
            volume: true,
            reserve: true,
            redemption: true,
        }
    }
}

impl ChannelSwitches {
    pub fn reserve_only() -> Self {
        Self {
            volume: false,
            reserve: true,
            redemption: false,
        }
    }
}

/// Market cap used as the redemption-impact divisor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "mode", content = "path")]
pub enum MarketCapPath {
    /// Hold at the calibrated mean.
    #[default]
    Mean,
    /// Replay a path; day `t` uses entry `t mod len`.
    Replay(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Steps per trial; paths hold `days + 1` prices.
    pub days: usize,
    pub trials: usize,
    pub seed: u64,
    /// Failure-probability multiplier on extreme-volume days.
    pub multiplier: f64,
    pub off_peg_tolerance: f64,
    pub fractions: HybridFractions,
    pub noise_enabled: bool,
    pub price_floor: f64,
    pub channels: ChannelSwitches,
    pub market_cap: MarketCapPath,
}

impl Default for SimConfig {
    fn default() -> Self {
        let (start, end) = default_window();
        Self {
            days: horizon_days(start, end),
            trials: DEFAULT_TRIALS,
            seed: 42,
            multiplier: DEFAULT_MULTIPLIER,
            off_peg_tolerance: SIM_OFF_PEG_TOLERANCE,
            fractions: HybridFractions::BASELINE,
            noise_enabled: true,
            price_floor: 0.0,
            channels: ChannelSwitches::default(),
            market_cap: MarketCapPath::Mean,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.days < 1 {
            return Err(Error::Validation("days must be >= 1".into()));
        }
        if self.trials < 1 {
            return Err(Error::Validation("trials must be >= 1".into()));
        }
        if !(self.off_peg_tolerance > 0.0) {
            return Err(Error::Validation("off-peg tolerance must be > 0".into()));
        }
        if !(self.multiplier >= 0.0) || !self.multiplier.is_finite() {
            return Err(Error::Validation(format!("invalid multiplier {}", self.multiplier)));
        }
        if !self.price_floor.is_finite() {
            return Err(Error::Validation("price floor must be finite".into()));
        }
        if let MarketCapPath::Replay(path) = &self.market_cap {
            if path.is_empty() || path.iter().any(|m| !(*m > 0.0)) {
                return Err(Error::Validation("replayed market caps must be non-empty and > 0".into()));
            }
        }
        self.fractions.validate()
    }
}

/// One day's random shocks.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DailyShocks {
    pub volume: f64,
    pub failure: bool,
    /// Frozen reserve fraction, in `[0, 1]`; zero without a failure.
    pub frozen_fraction: f64,
    pub redemption: bool,
    pub redemption_usd: f64,
    pub noise: f64,
}

/// Pre-built distributions for drawing [`DailyShocks`].
#[derive(Debug, Clone, Copy)]
pub struct ShockSampler {
    volume: LogNormal<f64>,
    frozen: LogNormal<f64>,
    redemption: LogNormal<f64>,
    noise: Normal<f64>,
    v95: f64,
    p_base: f64,
    p_extreme: f64,
    p_red: f64,
    noise_enabled: bool,
    reserve_enabled: bool,
    redemption_enabled: bool,
}

impl ShockSampler {
    pub fn new(cal: &ShockCalibration, cfg: &SimConfig) -> Result<Self> {
        cal.validate()?;
        let dist = |e: rand_distr::NormalError| Error::Domain(format!("distribution: {e}"));
        Ok(Self {
            volume: LogNormal::new(cal.mu_ln_v, cal.sigma_ln_v).map_err(dist)?,
            frozen: LogNormal::new(FROZEN_LN_MU, FROZEN_LN_SIGMA).map_err(dist)?,
            redemption: LogNormal::new((REDEMPTION_SHARE * cal.mktcap_bar).ln(), REDEMPTION_LN_SIGMA)
                .map_err(dist)?,
            noise: Normal::new(0.0, cal.sigma_eps).map_err(dist)?,
            v95: cal.v95,
            p_base: cal.p_base,
            p_extreme: (cfg.multiplier * cal.p_base).min(1.0),
            p_red: cal.p_red,
            noise_enabled: cfg.noise_enabled,
            reserve_enabled: cfg.channels.reserve,
            redemption_enabled: cfg.channels.redemption,
        })
    }

    /// Failure probability for a day with volume `v`.
    pub fn failure_probability(&self, v: f64) -> f64 {
        if v > self.v95 {
            self.p_extreme
        } else {
            self.p_base
        }
    }

    pub fn draw(&self, day: DayKey) -> DailyShocks {
        let volume = self.volume.sample(&mut day.channel(Channel::Volume));
        let p = self.failure_probability(volume);
        let failure = self.reserve_enabled
            && p > 0.0
            && day.channel(Channel::FailureFlag).random::<f64>() < p;
        let frozen_fraction = if failure {
            self.frozen
                .sample(&mut day.channel(Channel::FrozenFraction))
                .min(1.0)
        } else {
            0.0
        };
        let redemption = self.redemption_enabled
            && self.p_red > 0.0
            && day.channel(Channel::RedemptionFlag).random::<f64>() < self.p_red;
        let redemption_usd = if redemption {
            self.redemption
                .sample(&mut day.channel(Channel::RedemptionSize))
        } else {
            0.0
        };
        let noise = if self.noise_enabled {
            self.noise.sample(&mut day.channel(Channel::Noise))
        } else {
            0.0
        };
        DailyShocks {
            volume,
            failure,
            frozen_fraction,
            redemption,
            redemption_usd,
            noise,
        }
    }
}

/// Draws the shocks for `(trial, day)` under `cfg.seed`.
pub fn draw_daily_shocks(
    cal: &ShockCalibration,
    cfg: &SimConfig,
    trial: u64,
    day: u64,
) -> Result<DailyShocks> {
    let sampler = ShockSampler::new(cal, cfg)?;
    Ok(sampler.draw(StreamKey::new(cfg.seed).trial(trial).day(day)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Current,
    Hybrid,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Current => "current",
            Regime::Hybrid => "hybrid",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Coefficients actually applied in one regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub v_bar: f64,
}

impl EffectiveParams {
    pub fn for_regime(cal: &ShockCalibration, cfg: &SimConfig, regime: Regime) -> Self {
        let f = match regime {
            Regime::Current => HybridFractions::IDENTITY,
            Regime::Hybrid => cfg.fractions,
        };
        let beta = if cfg.channels.volume { cal.beta_sim } else { 0.0 };
        Self {
            alpha: cal.alpha,
            beta: f.f_beta * beta,
            gamma: f.f_gamma * cal.gamma,
            delta: f.f_delta * cal.delta,
            v_bar: cal.v_bar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub price: f64,
    pub clamped: bool,
}

/// One application of the price recursion.
pub fn step_price(
    price: f64,
    shocks: &DailyShocks,
    params: &EffectiveParams,
    mktcap: f64,
    floor: f64,
) -> Result<Step> {
    if !(mktcap > 0.0) {
        return Err(Error::Domain(format!("market cap must be > 0, got {mktcap}")));
    }
    let next = price
        + params.alpha * (1.0 - price)
        + params.beta * (shocks.volume / params.v_bar)
        + params.gamma * shocks.frozen_fraction
        - params.delta * (shocks.redemption_usd / mktcap)
        + shocks.noise;
    if !next.is_finite() {
        return Err(Error::Domain(format!("non-finite price from {price}")));
    }
    Ok(if next < floor {
        Step {
            price: floor,
            clamped: true,
        }
    } else {
        Step {
            price: next,
            clamped: false,
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub regime: Regime,
    pub peak_dev: f64,
    pub off_peg_days: usize,
    pub clamped_days: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialPath {
    pub regime: Regime,
    pub prices: Vec<f64>,
}

/// Running peak deviation and off-peg count.
#[derive(Debug, Clone, Copy)]
pub struct OutcomeAccumulator {
    tolerance: f64,
    peak: f64,
    off: usize,
    clamped: usize,
}

impl OutcomeAccumulator {
    pub fn new(tolerance: f64) -> Self {
        Self {
            tolerance,
            peak: 0.0,
            off: 0,
            clamped: 0,
        }
    }

    #[inline]
    pub fn push(&mut self, price: f64) {
        let dev = (price - 1.0).abs();
        if dev > self.peak {
            self.peak = dev;
        }
        if dev > self.tolerance {
            self.off += 1;
        }
    }

    pub fn finish(self, regime: Regime) -> TrialOutcome {
        TrialOutcome {
            regime,
            peak_dev: self.peak,
            off_peg_days: self.off,
            clamped_days: self.clamped,
        }
    }
}

/// Peak absolute deviation and off-peg day count over `P_0..P_T`.
pub fn outcome_metrics(path: &TrialPath, tolerance: f64) -> TrialOutcome {
    let mut acc = OutcomeAccumulator::new(tolerance);
    for &p in &path.prices {
        acc.push(p);
    }
    acc.finish(path.regime)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialPair {
    pub trial: u64,
    pub current: TrialOutcome,
    pub hybrid: TrialOutcome,
}

/// Calibration, configuration and derived samplers for repeated trials.
#[derive(Debug, Clone)]
pub struct Engine {
    cfg: SimConfig,
    key: StreamKey,
    sampler: ShockSampler,
    current: EffectiveParams,
    hybrid: EffectiveParams,
    mktcap_bar: f64,
}

impl Engine {
    pub fn new(cal: &ShockCalibration, cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg: cfg.clone(),
            key: StreamKey::new(cfg.seed),
            sampler: ShockSampler::new(cal, cfg)?,
            current: EffectiveParams::for_regime(cal, cfg, Regime::Current),
            hybrid: EffectiveParams::for_regime(cal, cfg, Regime::Hybrid),
            mktcap_bar: cal.mktcap_bar,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    #[inline]
    fn mktcap(&self, day: usize) -> f64 {
        match &self.cfg.market_cap {
            MarketCapPath::Mean => self.mktcap_bar,
            MarketCapPath::Replay(path) => path[day % path.len()],
        }
    }

    /// Steps both regimes through one trial, calling `visit` with
    /// `(t, current step, hybrid step)` for `t = 0..=days`.
    fn drive(&self, trial: u64, mut visit: impl FnMut(usize, Step, Step)) -> Result<()> {
        let tkey = self.key.trial(trial);
        let floor = self.cfg.price_floor;
        let start = Step {
            price: 1.0,
            clamped: false,
        };
        let (mut c, mut h) = (start, start);
        visit(0, c, h);
        for t in 0..self.cfg.days {
            let shocks = self.sampler.draw(tkey.day(t as u64));
            let mktcap = self.mktcap(t);
            let wrap = |e: Error| Error::Simulation {
                trial,
                day: t,
                message: e.to_string(),
            };
            c = step_price(c.price, &shocks, &self.current, mktcap, floor).map_err(wrap)?;
            h = step_price(h.price, &shocks, &self.hybrid, mktcap, floor).map_err(wrap)?;
            visit(t + 1, c, h);
        }
        Ok(())
    }

    pub fn run_pair(&self, trial: u64) -> Result<TrialPair> {
        let tol = self.cfg.off_peg_tolerance;
        let (mut ac, mut ah) = (OutcomeAccumulator::new(tol), OutcomeAccumulator::new(tol));
        self.drive(trial, |_, c, h| {
            ac.push(c.price);
            ah.push(h.price);
            ac.clamped += c.clamped as usize;
            ah.clamped += h.clamped as usize;
        })?;
        Ok(TrialPair {
            trial,
            current: ac.finish(Regime::Current),
            hybrid: ah.finish(Regime::Hybrid),
        })
    }

    /// Full price paths for one trial.
    pub fn run_paths(&self, trial: u64) -> Result<(TrialPath, TrialPath)> {
        let n = self.cfg.days + 1;
        let (mut pc, mut ph) = (Vec::with_capacity(n), Vec::with_capacity(n));
        self.drive(trial, |_, c, h| {
            pc.push(c.price);
            ph.push(h.price);
        })?;
        Ok((
            TrialPath {
                regime: Regime::Current,
                prices: pc,
            },
            TrialPath {
                regime: Regime::Hybrid,
                prices: ph,
            },
        ))
    }

    /// All trials on the current rayon pool, in trial order.
    pub fn run_all(&self) -> Result<Vec<TrialPair>> {
        let results: Vec<Result<TrialPair>> = (0..self.cfg.trials as u64)
            .into_par_iter()
            .map(|i| self.run_pair(i))
            .collect();
        let mut pairs = Vec::with_capacity(results.len());
        let mut failed = 0;
        let mut first = None;
        for r in results {
            match r {
                Ok(p) => pairs.push(p),
                Err(e) => {
                    failed += 1;
                    first.get_or_insert(e);
                }
            }
        }
        match first {
            None => Ok(pairs),
            Some(e) => Err(Error::TrialsFailed {
                failed,
                first: Box::new(e),
            }),
        }
    }
}

pub fn run_trial_pair(cal: &ShockCalibration, cfg: &SimConfig, trial: u64) -> Result<TrialPair> {
    if trial >= cfg.trials as u64 {
        return Err(Error::Validation(format!(
            "trial index {trial} out of range for {} trials",
            cfg.trials
        )));
    }
    Engine::new(cal, cfg)?.run_pair(trial)
}

pub fn run_simulation(cal: &ShockCalibration, cfg: &SimConfig) -> Result<Vec<TrialPair>> {
    Engine::new(cal, cfg)?.run_all()
}

/// Like [`run_simulation`] on a dedicated pool of `workers` threads.
pub fn run_simulation_with_workers(
    cal: &ShockCalibration,
    cfg: &SimConfig,
    workers: usize,
) -> Result<Vec<TrialPair>> {
    let engine = Engine::new(cal, cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    pool.install(|| engine.run_all())
}
