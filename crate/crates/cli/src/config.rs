//! Run configuration: a single JSON file plus command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use pegstress::analysis::{self, SweepParameter};
use pegstress::calibration::{CalibrationOverrides, CalibrationSettings, GammaMethod, HybridFractions};
use pegstress::econometrics::{Deterministic, LagOrder};
use pegstress::ingest::{Frequency, HeaderAliases};
use pegstress::metrics::{self, StdDivisor};
use pegstress::simulator::{self, ChannelSwitches, MarketCapPath, SimConfig};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacroSource {
    pub series_id: String,
    pub path: PathBuf,
    pub frequency: Frequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataPaths {
    /// Coin id to CoinGecko-style CSV export.
    pub coins: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub macro_series: Vec<MacroSource>,
    pub failed_banks: PathBuf,
    pub total_banks: PathBuf,
    #[serde(default)]
    pub header_aliases: HeaderAliases,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsSection {
    pub off_peg_tolerance: f64,
    pub exact_peg_tolerance: f64,
    pub volatility_window: usize,
    pub std_divisor: StdDivisor,
}

impl Default for MetricsSection {
    fn default() -> Self {
        Self {
            off_peg_tolerance: metrics::DEFAULT_OFF_PEG_TOLERANCE,
            exact_peg_tolerance: metrics::DEFAULT_EXACT_PEG_TOLERANCE,
            volatility_window: 7,
            std_divisor: StdDivisor::Sample,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RegressionSection {
    /// Macro series ids added to the peg model at lag 0.
    pub extra_regressors: Vec<String>,
    pub adf_lags: LagOrder,
    pub adf_deterministic: Deterministic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSection {
    pub event_date: NaiveDate,
    pub event_window_days: u64,
    pub p_red: f64,
    pub delta: f64,
    /// Per-coin gamma method; coins not listed use `default_gamma_method`.
    pub gamma_methods: BTreeMap<String, GammaMethod>,
    pub default_gamma_method: GammaMethod,
    pub overrides: BTreeMap<String, CalibrationOverrides>,
}

impl Default for CalibrationSection {
    fn default() -> Self {
        let reserve = CalibrationSettings::reserve_event();
        let assumed = CalibrationSettings::assumed_fraction();
        Self {
            event_date: reserve.event_date,
            event_window_days: reserve.event_window_days,
            p_red: reserve.p_red,
            delta: reserve.delta,
            gamma_methods: BTreeMap::from([("usdc".to_string(), reserve.gamma_method)]),
            default_gamma_method: assumed.gamma_method,
            overrides: BTreeMap::new(),
        }
    }
}

impl CalibrationSection {
    pub fn settings_for(&self, coin: &str) -> CalibrationSettings {
        CalibrationSettings {
            event_date: self.event_date,
            event_window_days: self.event_window_days,
            gamma_method: self.gamma_methods.get(coin).copied().unwrap_or(self.default_gamma_method),
            p_red: self.p_red,
            delta: self.delta,
            overrides: self.overrides.get(coin).cloned().unwrap_or_default(),
        }
    }
}

/// Simulation settings. The horizon is `days` when given, otherwise the
/// number of days between `start` and `end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    pub days: Option<usize>,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub trials: usize,
    pub seed: u64,
    pub multiplier: f64,
    pub off_peg_tolerance: f64,
    pub fractions: HybridFractions,
    pub noise_enabled: bool,
    pub price_floor: f64,
    pub channels: ChannelSwitches,
    pub market_cap: MarketCapPath,
}

impl Default for SimulationSection {
    fn default() -> Self {
        let d = SimConfig::default();
        let (start, end) = simulator::default_window();
        Self {
            days: None,
            start,
            end,
            trials: d.trials,
            seed: d.seed,
            multiplier: d.multiplier,
            off_peg_tolerance: d.off_peg_tolerance,
            fractions: d.fractions,
            noise_enabled: d.noise_enabled,
            price_floor: d.price_floor,
            channels: d.channels,
            market_cap: d.market_cap,
        }
    }
}

impl SimulationSection {
    pub fn to_sim_config(&self) -> SimConfig {
        SimConfig {
            days: self.days.unwrap_or_else(|| simulator::horizon_days(self.start, self.end)),
            trials: self.trials,
            seed: self.seed,
            multiplier: self.multiplier,
            off_peg_tolerance: self.off_peg_tolerance,
            fractions: self.fractions,
            noise_enabled: self.noise_enabled,
            price_floor: self.price_floor,
            channels: self.channels,
            market_cap: self.market_cap.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub epsilon: f64,
    pub m_values: Vec<f64>,
    pub grid: Vec<f64>,
    /// Fixed fractions per swept parameter; missing entries use the
    /// per-sweep defaults.
    pub sweep_fixed: BTreeMap<SweepParameter, HybridFractions>,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            epsilon: analysis::DEFAULT_EPSILON,
            m_values: analysis::DEFAULT_M_VALUES.to_vec(),
            grid: analysis::default_grid(),
            sweep_fixed: BTreeMap::new(),
        }
    }
}

impl AnalysisSection {
    pub fn fixed_for(&self, p: SweepParameter) -> HybridFractions {
        self.sweep_fixed.get(&p).copied().unwrap_or_else(|| p.default_fixed())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataPaths,
    /// Coins to process, in report order. Defaults to every coin in `data`.
    #[serde(default)]
    pub coins: Vec<String>,
    /// Data window for statistics, regression and calibration. Defaults to
    /// each series' full history.
    #[serde(default)]
    pub window: Option<Window>,
    #[serde(default)]
    pub metrics: MetricsSection,
    #[serde(default)]
    pub regression: RegressionSection,
    #[serde(default)]
    pub calibration: CalibrationSection,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_true")]
    pub figures: bool,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_true() -> bool {
    true
}

/// A parsed configuration, its digest and the directory relative paths
/// resolve against.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub digest: String,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        let config: RunConfig = serde_json::from_slice(&bytes)
            .map_err(|e| CliError::input(format!("invalid config {}: {e}", path.display())))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let loaded = Self {
            digest: crate::manifest::config_digest(&config),
            config,
            base_dir,
        };
        loaded.validate()?;
        Ok(loaded)
    }

    fn validate(&self) -> Result<(), CliError> {
        let c = &self.config;
        if c.data.coins.is_empty() {
            return Err(CliError::input("config lists no coin data files"));
        }
        for coin in &c.coins {
            if !c.data.coins.contains_key(coin) {
                return Err(CliError::input(format!("coin {coin:?} has no data path")));
            }
        }
        if let Some(w) = c.window {
            if w.start > w.end {
                return Err(CliError::input(format!("window start {} is after end {}", w.start, w.end)));
            }
        }
        let s = &c.simulation;
        if s.days.is_none() && s.start > s.end {
            return Err(CliError::input("simulation start is after end"));
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn coin_path(&self, coin: &str) -> Result<PathBuf, CliError> {
        self.config
            .data
            .coins
            .get(coin)
            .map(|p| self.resolve(p))
            .ok_or_else(|| CliError::input(format!("unknown coin {coin:?}")))
    }

    /// Requested coins, or the configured list, or every coin with data.
    pub fn select_coins(&self, requested: &[String]) -> Result<Vec<String>, CliError> {
        let coins: Vec<String> = if !requested.is_empty() {
            requested.iter().map(|c| c.trim().to_lowercase()).collect()
        } else if !self.config.coins.is_empty() {
            self.config.coins.clone()
        } else {
            self.config.data.coins.keys().cloned().collect()
        };
        for c in &coins {
            self.coin_path(c)?;
        }
        Ok(coins)
    }

    pub fn output_dir(&self, flag: Option<&Path>) -> PathBuf {
        match flag {
            Some(p) => p.to_path_buf(),
            None => self.resolve(&self.config.output_dir),
        }
    }
}
