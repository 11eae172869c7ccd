//! Augmented Dickey-Fuller unit-root test.
//!
//! Regresses `dy_t` on the chosen deterministic terms, `y_{t-1}` and `k`
//! lagged differences, and compares the t-ratio on `y_{t-1}` with fixed
//! asymptotic critical values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::ols::{ols_fit, Regressors};

pub const LEVEL_LAG: &str = "y_lag1";
pub const TREND: &str = "trend";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Deterministic {
    None,
    #[default]
    Constant,
    ConstantTrend,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    pub one: f64,
    pub five: f64,
    pub ten: f64,
}

impl Deterministic {
    /// Asymptotic MacKinnon critical values at 1/5/10%.
    pub fn critical_values(self) -> CriticalValues {
        match self {
            Deterministic::None => CriticalValues {
                one: -2.58,
                five: -1.95,
                ten: -1.62,
            },
            Deterministic::Constant => CriticalValues {
                one: -3.43,
                five: -2.86,
                ten: -2.57,
            },
            Deterministic::ConstantTrend => CriticalValues {
                one: -3.96,
                five: -3.41,
                ten: -3.12,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectFlags {
    pub one: bool,
    pub five: bool,
    pub ten: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method", content = "lags")]
pub enum LagOrder {
    Fixed(usize),
    /// Minimum AIC over `0..=max` on a common sample; `None` uses
    /// `floor(12 (n/100)^(1/4))`.
    Aic(Option<usize>),
}

impl Default for LagOrder {
    fn default() -> Self {
        LagOrder::Fixed(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub statistic: f64,
    pub lags: usize,
    pub deterministic: Deterministic,
    pub critical_values: CriticalValues,
    pub reject: RejectFlags,
    /// Coefficient on `y_{t-1}`.
    pub gamma: f64,
    pub n_obs: usize,
}

fn adf_regression(
    y: &[f64],
    k: usize,
    spec: Deterministic,
    skip: usize,
) -> Result<(Vec<f64>, Regressors, bool)> {
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    // dy[i] = y[i+1] - y[i]; the regression for dy[i] needs y[i] and dy[i-1..i-k].
    let first = k.max(skip);
    let rows: Vec<usize> = (first..dy.len()).collect();
    let response: Vec<f64> = rows.iter().map(|&i| dy[i]).collect();
    let mut cols: Vec<(String, Vec<f64>)> = Vec::with_capacity(k + 2);
    if spec == Deterministic::ConstantTrend {
        cols.push((TREND.into(), rows.iter().map(|&i| (i + 1) as f64).collect()));
    }
    cols.push((LEVEL_LAG.into(), rows.iter().map(|&i| y[i]).collect()));
    for lag in 1..=k {
        cols.push((format!("dy_lag{lag}"), rows.iter().map(|&i| dy[i - lag]).collect()));
    }
    let intercept = spec != Deterministic::None;
    Ok((response, Regressors::from_columns(cols)?, intercept))
}

fn schwert_max_lag(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

fn select_lag_aic(y: &[f64], max: usize, spec: Deterministic) -> Result<usize> {
    let mut best = (f64::INFINITY, 0usize);
    for k in 0..=max {
        let (resp, x, intercept) = adf_regression(y, k, spec, max)?;
        let fit = ols_fit(&resp, &x, intercept)?;
        let n = fit.n_obs as f64;
        let params = fit.coefficients.len() as f64;
        let aic = n * (fit.rss / n).ln() + 2.0 * params;
        if aic < best.0 {
            best = (aic, k);
        }
    }
    Ok(best.1)
}

pub fn adf_test(y: &[f64], lags: LagOrder, spec: Deterministic) -> Result<AdfResult> {
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite value in ADF series".into()));
    }
    let k = match lags {
        LagOrder::Fixed(k) => k,
        LagOrder::Aic(max) => {
            let max = max.unwrap_or_else(|| schwert_max_lag(y.len()));
            if y.len() <= max + 10 {
                return Err(Error::InsufficientData(format!(
                    "ADF needs more than {} observations, got {}",
                    max + 10,
                    y.len()
                )));
            }
            select_lag_aic(y, max, spec)?
        }
    };
    if y.len() <= k + 10 {
        return Err(Error::InsufficientData(format!(
            "ADF with {k} lag(s) needs more than {} observations, got {}",
            k + 10,
            y.len()
        )));
    }
    let (resp, x, intercept) = adf_regression(y, k, spec, 0)?;
    let fit = ols_fit(&resp, &x, intercept)?;
    let level = fit
        .coefficient(LEVEL_LAG)
        .expect("level lag is always a regressor");
    let statistic = level.t_stat;
    let cv = spec.critical_values();
    Ok(AdfResult {
        statistic,
        lags: k,
        deterministic: spec,
        critical_values: cv,
        reject: RejectFlags {
            one: statistic < cv.one,
            five: statistic < cv.five,
            ten: statistic < cv.ten,
        },
        gamma: level.estimate,
        n_obs: fit.n_obs,
    })
}
