//! Paired-outcome summaries, one-dimensional sensitivity sweeps and the
//! Diamond-Dybvig run-equilibrium example.

use serde::{Deserialize, Serialize};

use crate::calibration::{nearest_rank, HybridFractions, ShockCalibration};
use crate::error::{Error, Result};
use crate::simulator::{run_simulation, SimConfig, TrialOutcome, TrialPair};

/// Calm-trial cutoff on the current-regime peak deviation.
pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_M_VALUES: [f64; 4] = [50.0, 100.0, 200.0, 500.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub pct_peak: f64,
    pub pct_off: f64,
    /// Current peak below epsilon; `pct_peak` is 0 and left out of means.
    pub peak_excluded: bool,
    /// Current regime had no off-peg days; `pct_off` is 0 and left out of means.
    pub off_excluded: bool,
}

pub fn percent_improvement(current: &TrialOutcome, hybrid: &TrialOutcome, epsilon: f64) -> Improvement {
    let (peak_excluded, pct_peak) = if current.peak_dev >= epsilon && current.peak_dev > 0.0 {
        (false, 100.0 * (current.peak_dev - hybrid.peak_dev) / current.peak_dev)
    } else {
        (true, 0.0)
    };
    let (off_excluded, pct_off) = if current.off_peg_days == 0 {
        (true, 0.0)
    } else {
        let c = current.off_peg_days as f64;
        (false, 100.0 * (c - hybrid.off_peg_days as f64) / c)
    };
    Improvement {
        pct_peak,
        pct_off,
        peak_excluded,
        off_excluded,
    }
}

/// Mean and sample SD of `values` after sorting, so the result does not
/// depend on input order. SD is 0 for fewer than two values.
fn mean_sd(mut values: Vec<f64>) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    values.sort_by(f64::total_cmp);
    if values[0] == values[values.len() - 1] {
        return (values[0], 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSummary {
    pub mean_peak_dev: f64,
    pub p95_peak_dev: f64,
    pub mean_off_peg_days: f64,
    pub median_off_peg_days: f64,
    pub clamped_days: u64,
}

fn regime_summary<'a>(outcomes: impl Iterator<Item = &'a TrialOutcome>) -> RegimeSummary {
    let (mut peaks, mut offs, mut clamped) = (Vec::new(), Vec::new(), 0u64);
    for o in outcomes {
        peaks.push(o.peak_dev);
        offs.push(o.off_peg_days as f64);
        clamped += o.clamped_days as u64;
    }
    let (mean_peak_dev, _) = mean_sd(peaks.clone());
    let (mean_off_peg_days, _) = mean_sd(offs.clone());
    peaks.sort_by(f64::total_cmp);
    offs.sort_by(f64::total_cmp);
    RegimeSummary {
        mean_peak_dev,
        p95_peak_dev: nearest_rank(&peaks, 0.95),
        mean_off_peg_days,
        median_off_peg_days: median_sorted(&offs),
        clamped_days: clamped,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSummary {
    pub coin_id: String,
    pub trials: usize,
    pub epsilon: f64,
    pub pct_peak_mean: f64,
    pub pct_peak_sd: f64,
    pub pct_off_mean: f64,
    pub pct_off_sd: f64,
    pub peak_included: usize,
    pub peak_excluded: usize,
    pub off_included: usize,
    pub off_excluded: usize,
    pub current: RegimeSummary,
    pub hybrid: RegimeSummary,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Per-trial %ΔPeak of the trials that pass the epsilon rule.
pub fn peak_improvements(pairs: &[TrialPair], epsilon: f64) -> Vec<f64> {
    pairs
        .iter()
        .map(|p| percent_improvement(&p.current, &p.hybrid, epsilon))
        .filter(|i| !i.peak_excluded)
        .map(|i| i.pct_peak)
        .collect()
}

pub fn summarize(coin_id: &str, pairs: &[TrialPair], epsilon: f64) -> Result<PairedSummary> {
    if pairs.is_empty() {
        return Err(Error::InsufficientData("no trials to summarize".into()));
    }
    let (mut peak, mut off) = (Vec::new(), Vec::new());
    for p in pairs {
        let imp = percent_improvement(&p.current, &p.hybrid, epsilon);
        if !imp.peak_excluded {
            peak.push(imp.pct_peak);
        }
        if !imp.off_excluded {
            off.push(imp.pct_off);
        }
    }
    let mut warnings = Vec::new();
    if peak.is_empty() {
        warnings.push(format!(
            "all {} trials had current peak deviation below {epsilon}; %ΔPeak undefined",
            pairs.len()
        ));
    }
    if off.is_empty() {
        warnings.push("no trial had a current-regime off-peg day; %ΔOff undefined".to_string());
    }
    let (peak_included, off_included) = (peak.len(), off.len());
    let (pct_peak_mean, pct_peak_sd) = mean_sd(peak);
    let (pct_off_mean, pct_off_sd) = mean_sd(off);
    Ok(PairedSummary {
        coin_id: coin_id.to_string(),
        trials: pairs.len(),
        epsilon,
        pct_peak_mean,
        pct_peak_sd,
        pct_off_mean,
        pct_off_sd,
        peak_included,
        peak_excluded: pairs.len() - peak_included,
        off_included,
        off_excluded: pairs.len() - off_included,
        current: regime_summary(pairs.iter().map(|p| &p.current)),
        hybrid: regime_summary(pairs.iter().map(|p| &p.hybrid)),
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SweepParameter {
    #[serde(rename = "f_beta")]
    FBeta,
    #[serde(rename = "f_gamma")]
    FGamma,
    #[serde(rename = "f_delta")]
    FDelta,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 3] = [SweepParameter::FBeta, SweepParameter::FGamma, SweepParameter::FDelta];

    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::FBeta => "f_beta",
            SweepParameter::FGamma => "f_gamma",
            SweepParameter::FDelta => "f_delta",
        }
    }

    /// Values held fixed while this fraction is swept. The f_delta sweep
    /// holds f_gamma at 0.2, not the 0.1 baseline.
    pub fn default_fixed(self) -> HybridFractions {
        match self {
            SweepParameter::FBeta => HybridFractions { f_beta: 0.5, f_gamma: 0.1, f_delta: 0.2 },
            SweepParameter::FGamma => HybridFractions { f_beta: 0.5, f_gamma: 0.1, f_delta: 0.2 },
            SweepParameter::FDelta => HybridFractions { f_beta: 0.5, f_gamma: 0.2, f_delta: 0.2 },
        }
    }

    /// `fixed` with this parameter replaced by `value`.
    pub fn apply(self, fixed: HybridFractions, value: f64) -> HybridFractions {
        let mut f = fixed;
        match self {
            SweepParameter::FBeta => f.f_beta = value,
            SweepParameter::FGamma => f.f_gamma = value,
            SweepParameter::FDelta => f.f_delta = value,
        }
        f
    }
}

impl std::fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f_beta" | "beta" => Ok(SweepParameter::FBeta),
            "f_gamma" | "gamma" => Ok(SweepParameter::FGamma),
            "f_delta" | "delta" => Ok(SweepParameter::FDelta),
            other => Err(Error::Validation(format!(
                "unknown sweep parameter {other:?}; expected f_beta, f_gamma or f_delta"
            ))),
        }
    }
}

/// `0.0, 0.1, ..., 1.0`.
pub fn default_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub multiplier: f64,
    pub fixed: HybridFractions,
    pub grid: Vec<f64>,
    /// One summary per grid value.
    pub summaries: Vec<PairedSummary>,
}

/// One paired simulation per `(M, grid value)`, all under `cfg.seed`.
pub fn sweep(
    cal: &ShockCalibration,
    cfg: &SimConfig,
    parameter: SweepParameter,
    grid: &[f64],
    fixed: HybridFractions,
    m_values: &[f64],
    epsilon: f64,
) -> Result<Vec<SweepResult>> {
    if grid.is_empty() || m_values.is_empty() {
        return Err(Error::Validation("sweep grid and multiplier list must be nonempty".into()));
    }
    if grid.iter().any(|g| !(0.0..=1.0).contains(g)) {
        return Err(Error::Validation("sweep grid values must lie in [0, 1]".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation("sweep grid must be strictly increasing".into()));
    }
    fixed.validate()?;
    let mut out = Vec::with_capacity(m_values.len());
    for &m in m_values {
        let mut summaries = Vec::with_capacity(grid.len());
        for &value in grid {
            let run_cfg = SimConfig {
                multiplier: m,
                fractions: parameter.apply(fixed, value),
                ..cfg.clone()
            };
            let pairs = run_simulation(cal, &run_cfg)?;
            summaries.push(summarize(&cal.coin_id, &pairs, epsilon)?);
        }
        out.push(SweepResult {
            parameter,
            multiplier: m,
            fixed,
            grid: grid.to_vec(),
            summaries,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equilibrium {
    NoRun,
    Run,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEquilibrium {
    pub hold_value: f64,
    pub fire_sale_value: f64,
    pub insured: bool,
    pub equilibria: Vec<Equilibrium>,
}

/// Equilibria of the two-depositor withdrawal game with a $1 claim.
///
/// Waiting is a best response to waiting when the held asset covers the
/// claim (or the deposit is insured). Withdrawing is a best response to a
/// run when a waiting depositor would be left with less than the claim,
/// which happens only without insurance and with a fire-sale value below 1.
pub fn dybvig_equilibria(hold_value: f64, fire_sale_value: f64, insured: bool) -> Result<RunEquilibrium> {
    if !hold_value.is_finite() || !fire_sale_value.is_finite() || hold_value < 0.0 || fire_sale_value < 0.0 {
        return Err(Error::Domain(format!(
            "asset values must be finite and non-negative, got hold {hold_value}, fire sale {fire_sale_value}"
        )));
    }
    if fire_sale_value > hold_value {
        return Err(Error::Domain(format!(
            "fire-sale value {fire_sale_value} exceeds hold value {hold_value}"
        )));
    }
    let mut equilibria = Vec::with_capacity(2);
    if insured || hold_value >= 1.0 {
        equilibria.push(Equilibrium::NoRun);
    }
    if !insured && fire_sale_value < 1.0 {
        equilibria.push(Equilibrium::Run);
    }
    Ok(RunEquilibrium {
        hold_value,
        fire_sale_value,
        insured,
        equilibria,
    })
}
