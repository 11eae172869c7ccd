//! Shock-parameter calibration.
//!
//! Every simulator input is derived here from history: the lognormal volume
//! fit, daily bank-failure probability, mean reversion and volume impact
//! from the peg-deviation regression, the reserve-shock coefficient from a
//! depeg event, and the residual noise scale. Each field of the resulting
//! [`ShockCalibration`] records where its value came from.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::econometrics::OlsResult;
use crate::error::{Error, Result};
use crate::ingest::{BankFailureTable, CoinSeries};

pub const MIN_VOLUME_OBSERVATIONS: usize = 30;
pub const MIN_NOISE_OBSERVATIONS: usize = 100;
pub const DEFAULT_P_RED: f64 = 0.001;
pub const DEFAULT_DELTA: f64 = 1.0;

/// Multipliers in `[0, 1]` applied to the volume, reserve and redemption
/// impacts under the hybrid design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridFractions {
    pub f_beta: f64,
    pub f_gamma: f64,
    pub f_delta: f64,
}

impl HybridFractions {
    pub const BASELINE: HybridFractions = HybridFractions {
        f_beta: 0.5,
        f_gamma: 0.1,
        f_delta: 0.2,
    };
    pub const IDENTITY: HybridFractions = HybridFractions {
        f_beta: 1.0,
        f_gamma: 1.0,
        f_delta: 1.0,
    };

    pub fn new(f_beta: f64, f_gamma: f64, f_delta: f64) -> Result<Self> {
        let f = Self {
            f_beta,
            f_gamma,
            f_delta,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("f_beta", self.f_beta),
            ("f_gamma", self.f_gamma),
            ("f_delta", self.f_delta),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

impl Default for HybridFractions {
    fn default() -> Self {
        Self::BASELINE
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeFit {
    pub mu_ln: f64,
    pub sigma_ln: f64,
    pub v_bar: f64,
    /// Nearest-rank 95th percentile.
    pub v95: f64,
    pub v_median: f64,
    pub used: usize,
    /// Zero or missing volumes left out of the fit.
    pub excluded: usize,
}

/// Nearest-rank percentile of already sorted data, `q` in (0, 1].
pub fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

pub fn fit_volume_lognormal(series: &CoinSeries) -> Result<VolumeFit> {
    let volumes: Vec<Option<f64>> = series.rows().iter().map(|r| r.total_volume).collect();
    fit_volume_values(&volumes)
}

/// Lognormal fit over strictly positive volumes. `sigma_ln` uses the
/// `n - 1` divisor.
pub fn fit_volume_values(volumes: &[Option<f64>]) -> Result<VolumeFit> {
    let mut pos: Vec<f64> = volumes
        .iter()
        .filter_map(|v| *v)
        .filter(|v| v.is_finite() && *v > 0.0)
        .collect();
    let excluded = volumes.len() - pos.len();
    if pos.len() < MIN_VOLUME_OBSERVATIONS {
        return Err(Error::InsufficientData(format!(
            "{} positive volume observations, need {MIN_VOLUME_OBSERVATIONS}",
            pos.len()
        )));
    }
    pos.sort_by(f64::total_cmp);
    let n = pos.len() as f64;
    let logs: Vec<f64> = pos.iter().map(|v| v.ln()).collect();
    let mu_ln = logs.iter().sum::<f64>() / n;
    let sigma_ln = (logs.iter().map(|l| (l - mu_ln).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    if sigma_ln <= 1e-12 * mu_ln.abs().max(1.0) {
        return Err(Error::Domain("degenerate fit: volume log-std is zero".into()));
    }
    Ok(VolumeFit {
        mu_ln,
        sigma_ln,
        v_bar: pos.iter().sum::<f64>() / n,
        v95: nearest_rank(&pos, 0.95),
        v_median: nearest_rank(&pos, 0.5),
        used: pos.len(),
        excluded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureProbability {
    /// Pooled annual failure rate.
    pub rho: f64,
    /// Daily failure probability `1 - (1 - rho)^(1/365)`.
    pub p_base: f64,
}

/// `1 - (1 - rho)^(1/365)`, evaluated without cancellation.
pub fn daily_failure_probability(rho: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::Domain(format!("annual failure rate {rho} outside [0, 1)")));
    }
    Ok(-((-rho).ln_1p() / 365.0).exp_m1())
}

pub fn bank_failure_probability(table: &BankFailureTable) -> Result<FailureProbability> {
    let banks = table.total_banks();
    if banks == 0 {
        return Err(Error::Domain("bank failure table has no banks".into()));
    }
    let rho = table.total_failures() as f64 / banks as f64;
    Ok(FailureProbability {
        rho,
        p_base: daily_failure_probability(rho)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    pub gamma: f64,
    /// Frozen share of reserves `L`.
    pub frozen_fraction: f64,
    pub observed_drop: f64,
    pub volume_impact: f64,
    pub residual_drop: f64,
}

/// Reserve-shock coefficient from an observed depeg:
/// `gamma = (dP_obs - beta_sim * V_event / v_bar) / (frozen / base)`.
pub fn calibrate_gamma_usdc(
    series: &CoinSeries,
    beta_sim: f64,
    v_bar: f64,
    event_date: NaiveDate,
    frozen_usd: f64,
    base_usd: f64,
) -> Result<GammaEstimate> {
    if !(base_usd > 0.0) || !(frozen_usd > 0.0) {
        return Err(Error::Domain(format!(
            "frozen fraction {frozen_usd}/{base_usd} must be positive"
        )));
    }
    let frozen_fraction = frozen_usd / base_usd;
    let row = series.get(event_date).ok_or_else(|| {
        Error::InsufficientData(format!("{} has no observation on {event_date}", series.coin_id))
    })?;
    let volume = row.total_volume.ok_or_else(|| {
        Error::InsufficientData(format!("{} has no volume on {event_date}", series.coin_id))
    })?;
    if !(v_bar > 0.0) {
        return Err(Error::Domain(format!("mean volume {v_bar} must be positive")));
    }
    let observed_drop = row.price - 1.0;
    let volume_impact = beta_sim * volume / v_bar;
    let residual_drop = observed_drop - volume_impact;
    Ok(GammaEstimate {
        gamma: residual_drop / frozen_fraction,
        frozen_fraction,
        observed_drop,
        volume_impact,
        residual_drop,
    })
}

/// Reserve-shock coefficient under an assumed frozen fraction.
pub fn calibrate_gamma_generic(assumed_frozen_fraction: f64, reference_drop: f64) -> Result<f64> {
    if !(assumed_frozen_fraction > 0.0) {
        return Err(Error::Domain(format!(
            "assumed frozen fraction must be positive, got {assumed_frozen_fraction}"
        )));
    }
    Ok(reference_drop / assumed_frozen_fraction)
}

/// Minimum price over `[event_date, event_date + window_days]` minus one.
pub fn event_window_drop(series: &CoinSeries, event_date: NaiveDate, window_days: u64) -> Result<f64> {
    let end = event_date + chrono::Days::new(window_days);
    series
        .rows()
        .iter()
        .filter(|r| r.date >= event_date && r.date <= end)
        .map(|r| r.price)
        .min_by(f64::total_cmp)
        .map(|p| p - 1.0)
        .ok_or_else(|| {
            Error::InsufficientData(format!(
                "{} has no observations in {event_date}..={end}",
                series.coin_id
            ))
        })
}

fn find_coefficient<'a>(ols: &'a OlsResult, suffix: &str) -> Option<&'a crate::econometrics::Coefficient> {
    ols.coefficients
        .iter()
        .find(|c| c.name == suffix || c.name.ends_with(&format!(".{suffix}")))
}

/// `alpha = 1 - phi` from the lag-one deviation coefficient and
/// `beta_sim = b_vol * v_bar` from the contemporaneous volume coefficient.
pub fn derive_alpha_beta(ols: &OlsResult, v_bar: f64) -> Result<(f64, f64)> {
    let phi = find_coefficient(ols, "peg_dev_lag1")
        .ok_or_else(|| Error::MissingColumn {
            column: "peg_dev_lag1".into(),
        })?
        .estimate;
    let b_vol = find_coefficient(ols, "total_volume")
        .ok_or_else(|| Error::MissingColumn {
            column: "total_volume".into(),
        })?
        .estimate;
    alpha_beta_from(phi, b_vol, v_bar)
}

pub fn alpha_beta_from(phi: f64, b_vol: f64, v_bar: f64) -> Result<(f64, f64)> {
    if !(phi.abs() < 1.0) {
        return Err(Error::Domain(format!("non-mean-reverting fit: phi = {phi}")));
    }
    Ok((1.0 - phi, b_vol * v_bar))
}

/// Standard deviation (n - 1 divisor) of `(P_{t+1} - P_t) - alpha (1 - P_t)`
/// over consecutive-day pairs.
pub fn estimate_noise(series: &CoinSeries, alpha: f64) -> Result<f64> {
    let rows = series.rows();
    let mut longest = usize::from(!rows.is_empty());
    let mut run = longest;
    let mut residuals = Vec::with_capacity(rows.len());
    for w in rows.windows(2) {
        if (w[1].date - w[0].date).num_days() == 1 {
            run += 1;
            residuals.push((w[1].price - w[0].price) - alpha * (1.0 - w[0].price));
        } else {
            run = 1;
        }
        longest = longest.max(run);
    }
    if longest < MIN_NOISE_OBSERVATIONS {
        return Err(Error::InsufficientData(format!(
            "noise estimate needs {MIN_NOISE_OBSERVATIONS} consecutive observations, longest run is {longest}"
        )));
    }
    let n = residuals.len() as f64;
    let mean = residuals.iter().sum::<f64>() / n;
    Ok((residuals.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt())
}

/// Complete parameter set for one coin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockCalibration {
    pub coin_id: String,
    /// Daily mean-reversion rate.
    pub alpha: f64,
    /// Price impact of one unit of `V_t / v_bar`.
    pub beta_sim: f64,
    /// Price impact per unit of frozen-reserve fraction (negative depresses).
    pub gamma: f64,
    /// Magnitude of the redemption impact; applied with a negative sign.
    pub delta: f64,
    pub mu_ln_v: f64,
    pub sigma_ln_v: f64,
    pub v_bar: f64,
    pub v95: f64,
    pub p_base: f64,
    pub p_red: f64,
    pub sigma_eps: f64,
    pub mktcap_bar: f64,
    pub provenance: BTreeMap<String, String>,
}

impl ShockCalibration {
    pub const FIELDS: [&'static str; 12] = [
        "alpha",
        "beta_sim",
        "gamma",
        "delta",
        "mu_ln_v",
        "sigma_ln_v",
        "v_bar",
        "v95",
        "p_base",
        "p_red",
        "sigma_eps",
        "mktcap_bar",
    ];

    pub fn validate(&self) -> Result<()> {
        let values = [
            self.alpha,
            self.beta_sim,
            self.gamma,
            self.delta,
            self.mu_ln_v,
            self.sigma_ln_v,
            self.v_bar,
            self.v95,
            self.p_base,
            self.p_red,
            self.sigma_eps,
            self.mktcap_bar,
        ];
        if let Some((name, v)) = Self::FIELDS.iter().zip(values).find(|(_, v)| !v.is_finite()) {
            return Err(Error::Domain(format!("{}: {name} = {v} is not finite", self.coin_id)));
        }
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Domain(format!("{}: {what}", self.coin_id)))
            }
        };
        check(self.sigma_ln_v > 0.0, "sigma_ln_v must be > 0")?;
        check((0.0..=1.0).contains(&self.p_base), "p_base outside [0, 1]")?;
        check((0.0..=1.0).contains(&self.p_red), "p_red outside [0, 1]")?;
        check(self.sigma_eps >= 0.0, "sigma_eps must be >= 0")?;
        check(self.v_bar > 0.0 && self.v95 > 0.0, "volume scale must be > 0")?;
        check(self.mktcap_bar > 0.0, "mktcap_bar must be > 0")?;
        Ok(())
    }

    /// Fields missing a provenance note.
    pub fn missing_provenance(&self) -> Vec<&'static str> {
        Self::FIELDS
            .iter()
            .copied()
            .filter(|f| self.provenance.get(*f).is_none_or(|s| s.trim().is_empty()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum GammaMethod {
    /// Direct exposure: `frozen_usd` of reserves stuck against `base_usd`.
    ReserveEvent { frozen_usd: f64, base_usd: f64 },
    /// Assumed frozen share with the drop read from the event window.
    AssumedFraction { fraction: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrationOverrides {
    pub alpha: Option<f64>,
    pub beta_sim: Option<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub sigma_eps: Option<f64>,
    pub p_base: Option<f64>,
    pub p_red: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSettings {
    pub event_date: NaiveDate,
    pub event_window_days: u64,
    pub gamma_method: GammaMethod,
    pub p_red: f64,
    pub delta: f64,
    pub overrides: CalibrationOverrides,
}

impl CalibrationSettings {
    pub fn reserve_event() -> Self {
        Self {
            event_date: NaiveDate::from_ymd_opt(2023, 3, 10).unwrap(),
            event_window_days: 3,
            gamma_method: GammaMethod::ReserveEvent {
                frozen_usd: 3.3e9,
                base_usd: 56.41e9,
            },
            p_red: DEFAULT_P_RED,
            delta: DEFAULT_DELTA,
            overrides: CalibrationOverrides::default(),
        }
    }

    pub fn assumed_fraction() -> Self {
        Self {
            gamma_method: GammaMethod::AssumedFraction { fraction: 0.01 },
            ..Self::reserve_event()
        }
    }
}

/// Runs the full calibration for one coin. `ols` is the peg-deviation model
/// fit; it may be omitted only when both `alpha` and `beta_sim` are
/// overridden.
pub fn calibrate_coin(
    series: &CoinSeries,
    ols: Option<&OlsResult>,
    failures: &BankFailureTable,
    settings: &CalibrationSettings,
) -> Result<ShockCalibration> {
    let mut prov: BTreeMap<String, String> = BTreeMap::new();
    let mut note = |k: &str, v: String| {
        prov.insert(k.to_string(), v);
    };

    let vol = fit_volume_lognormal(series)?;
    let vol_note = format!(
        "lognormal fit to {} positive daily volumes ({} excluded)",
        vol.used, vol.excluded
    );
    note("mu_ln_v", format!("mean log volume; {vol_note}"));
    note("sigma_ln_v", format!("std of log volume; {vol_note}"));
    note("v_bar", "arithmetic mean of positive daily volumes".into());
    note("v95", "nearest-rank 95th percentile of positive daily volumes".into());

    let caps: Vec<f64> = series.rows().iter().filter_map(|r| r.market_cap).filter(|m| *m > 0.0).collect();
    if caps.is_empty() {
        return Err(Error::InsufficientData(format!("{} has no market cap data", series.coin_id)));
    }
    let mktcap_bar = caps.iter().sum::<f64>() / caps.len() as f64;
    note("mktcap_bar", format!("mean of {} positive daily market caps", caps.len()));

    let fp = bank_failure_probability(failures)?;
    let years: Vec<String> = failures.years().keys().map(|y| y.to_string()).collect();
    let mut p_base = fp.p_base;
    note(
        "p_base",
        format!(
            "1-(1-rho)^(1/365) with rho = {}/{} over years {}",
            failures.total_failures(),
            failures.total_banks(),
            years.join(",")
        ),
    );

    let ovr = &settings.overrides;
    let (alpha, beta_sim) = match (ovr.alpha, ovr.beta_sim, ols) {
        (Some(a), Some(b), _) => {
            note("alpha", "config override".into());
            note("beta_sim", "config override".into());
            (a, b)
        }
        (a, b, Some(ols)) => {
            let (da, db) = derive_alpha_beta(ols, vol.v_bar)?;
            note(
                "alpha",
                if a.is_some() { "config override".into() } else { "1 - phi (lag-1 peg deviation coefficient)".into() },
            );
            note(
                "beta_sim",
                if b.is_some() {
                    "config override".into()
                } else {
                    "b_vol * v_bar (contemporaneous volume coefficient)".into()
                },
            );
            (a.unwrap_or(da), b.unwrap_or(db))
        }
        _ => {
            return Err(Error::InsufficientData(
                "alpha/beta need a regression fit or explicit overrides".into(),
            ))
        }
    };

    let gamma = if let Some(g) = ovr.gamma {
        note("gamma", "config override".into());
        g
    } else {
        match settings.gamma_method {
            GammaMethod::ReserveEvent { frozen_usd, base_usd } => {
                let est = calibrate_gamma_usdc(series, beta_sim, vol.v_bar, settings.event_date, frozen_usd, base_usd)?;
                note(
                    "gamma",
                    format!(
                        "residual drop {:.6} on {} over frozen fraction {}/{} = {:.6}",
                        est.residual_drop, settings.event_date, frozen_usd, base_usd, est.frozen_fraction
                    ),
                );
                est.gamma
            }
            GammaMethod::AssumedFraction { fraction } => {
                let raw = event_window_drop(series, settings.event_date, settings.event_window_days)?;
                let drop = raw.min(0.0);
                note(
                    "gamma",
                    format!(
                        "assumed {}% frozen; drop {:.6} = min price in {}+{}d minus 1 (capped at 0)",
                        fraction * 100.0,
                        drop,
                        settings.event_date,
                        settings.event_window_days
                    ),
                );
                calibrate_gamma_generic(fraction, drop)?
            }
        }
    };

    let sigma_eps = if let Some(s) = ovr.sigma_eps {
        note("sigma_eps", "config override".into());
        s
    } else {
        note("sigma_eps", "std of mean-reversion residuals over consecutive days".into());
        estimate_noise(series, alpha)?
    };

    if let Some(p) = ovr.p_base {
        p_base = p;
        note("p_base", "config override".into());
    }
    let p_red = ovr.p_red.unwrap_or(settings.p_red);
    note("p_red", if ovr.p_red.is_some() { "config override".into() } else { "default mass-redemption probability".into() });
    let delta = ovr.delta.unwrap_or(settings.delta);
    note("delta", if ovr.delta.is_some() { "config override".into() } else { "default redemption impact magnitude".into() });

    let cal = ShockCalibration {
        coin_id: series.coin_id.clone(),
        alpha,
        beta_sim,
        gamma,
        delta,
        mu_ln_v: vol.mu_ln,
        sigma_ln_v: vol.sigma_ln,
        v_bar: vol.v_bar,
        v95: vol.v95,
        p_base,
        p_red,
        sigma_eps,
        mktcap_bar,
        provenance: prov,
    };
    cal.validate()?;
    Ok(cal)
}
