//! Lagged design matrices built from an aligned panel.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{self, AlignedPanel};

use super::ols::Regressors;

/// A panel column entering a regression at a given lag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagTerm {
    pub column: String,
    pub lag: usize,
}

impl LagTerm {
    pub fn new(column: impl Into<String>, lag: usize) -> Self {
        Self {
            column: column.into(),
            lag,
        }
    }

    /// Column name as it appears in the fitted model.
    pub fn label(&self) -> String {
        if self.lag == 0 {
            self.column.clone()
        } else {
            format!("{}_lag{}", self.column, self.lag)
        }
    }
}

/// Shifted columns over the full panel plus the listwise-deletion mask.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub names: Vec<String>,
    pub columns: Vec<Vec<Option<f64>>>,
    /// `true` for rows where every column is present.
    pub mask: Vec<bool>,
}

impl DesignMatrix {
    pub fn n_used(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    fn dense_column(&self, j: usize) -> Vec<f64> {
        self.columns[j]
            .iter()
            .zip(&self.mask)
            .filter(|(_, m)| **m)
            .map(|(v, _)| v.expect("masked rows are complete"))
            .collect()
    }

    /// Dense regressors over the unmasked rows.
    pub fn to_regressors(&self) -> Regressors {
        let n = self.n_used();
        let mut data = Vec::with_capacity(n * self.names.len());
        for j in 0..self.names.len() {
            data.extend(self.dense_column(j));
        }
        Regressors {
            names: self.names.clone(),
            matrix: DMatrix::from_vec(n, self.names.len(), data),
        }
    }

    /// Splits off the named column as the response; the rest become regressors.
    pub fn split_response(&self, name: &str) -> Result<(Vec<f64>, Regressors)> {
        let j = self
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::MissingColumn {
                column: name.to_string(),
            })?;
        let y = self.dense_column(j);
        let rest = DesignMatrix {
            names: self
                .names
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != j)
                .map(|(_, n)| n.clone())
                .collect(),
            columns: self
                .columns
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != j)
                .map(|(_, c)| c.clone())
                .collect(),
            mask: self.mask.clone(),
        };
        Ok((y, rest.to_regressors()))
    }
}

/// Row `t` of a lag-`l` column holds the panel value at `t - l`; rows with
/// any missing entry (including the first `max lag` rows) are masked out.
pub fn build_lagged_design(panel: &AlignedPanel, terms: &[LagTerm]) -> Result<DesignMatrix> {
    let n = panel.len();
    let mut names = Vec::with_capacity(terms.len());
    let mut columns = Vec::with_capacity(terms.len());
    for term in terms {
        let src = panel.values(&term.column)?;
        let shifted: Vec<Option<f64>> = (0..n)
            .map(|t| if t >= term.lag { src[t - term.lag] } else { None })
            .collect();
        names.push(term.label());
        columns.push(shifted);
    }
    let mask: Vec<bool> = (0..n)
        .map(|t| columns.iter().all(|c| c[t].is_some()))
        .collect();
    if !mask.iter().any(|m| *m) {
        return Err(Error::InsufficientData(
            "every row of the lagged design has a missing value".into(),
        ));
    }
    Ok(DesignMatrix {
        names,
        columns,
        mask,
    })
}

/// Panel column holding a coin's daily peg deviation.
pub fn peg_deviation_column(coin: &str) -> String {
    format!("{coin}.peg_dev")
}

/// Adds the `<coin>.peg_dev` column derived from the coin's price.
pub fn add_peg_deviation(panel: &mut AlignedPanel, coin: &str) -> Result<()> {
    let values = panel
        .values(&ingest::price_column(coin))?
        .iter()
        .map(|p| p.map(|p| p - 1.0))
        .collect();
    panel.set_column(&peg_deviation_column(coin), values)
}

/// Response and regressor terms of the daily peg-deviation model: current
/// volume and market cap plus one-day lags of deviation, volume and market
/// cap. `extra` columns (e.g. macro series) enter at lag 0.
pub fn peg_model_terms(coin: &str, extra: &[String]) -> (LagTerm, Vec<LagTerm>) {
    let dev = peg_deviation_column(coin);
    let vol = ingest::volume_column(coin);
    let mcap = ingest::market_cap_column(coin);
    let mut terms = vec![
        LagTerm::new(vol.clone(), 0),
        LagTerm::new(mcap.clone(), 0),
        LagTerm::new(dev.clone(), 1),
        LagTerm::new(vol, 1),
        LagTerm::new(mcap, 1),
    ];
    terms.extend(extra.iter().map(|c| LagTerm::new(c.clone(), 0)));
    (LagTerm::new(dev, 0), terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{FillPolicy, PanelColumn};
    use chrono::NaiveDate;

    fn panel(cols: Vec<(&str, Vec<Option<f64>>)>) -> AlignedPanel {
        let n = cols[0].1.len();
        let start = NaiveDate::from_ymd_opt(2024, 1, 1).unwrap();
        AlignedPanel {
            dates: start.iter_days().take(n).collect(),
            columns: cols
                .into_iter()
                .map(|(name, values)| PanelColumn {
                    name: name.into(),
                    fill: FillPolicy::None,
                    values,
                })
                .collect(),
        }
    }

    #[test]
    fn lag_zero_is_identity() {
        let p = panel(vec![("x", vec![Some(1.0), Some(2.0), Some(3.0)])]);
        let d = build_lagged_design(&p, &[LagTerm::new("x", 0)]).unwrap();
        assert_eq!(d.columns[0], p.columns[0].values);
        assert_eq!(d.mask, vec![true; 3]);
    }

    #[test]
    fn lag_one_shifts_and_masks() {
        let p = panel(vec![("x", vec![Some(1.0), Some(2.0), Some(3.0)])]);
        let d = build_lagged_design(&p, &[LagTerm::new("x", 1)]).unwrap();
        assert_eq!(d.columns[0], vec![None, Some(1.0), Some(2.0)]);
        assert_eq!(d.mask, vec![false, true, true]);
        assert_eq!(d.names, vec!["x_lag1"]);
    }

    #[test]
    fn mixed_lags_use_listwise_deletion() {
        let p = panel(vec![("x", vec![Some(1.0), Some(2.0), None, Some(4.0), Some(5.0)])]);
        let d = build_lagged_design(&p, &[LagTerm::new("x", 0), LagTerm::new("x", 1)]).unwrap();
        // row 0: lag missing; row 2: lag0 missing; row 3: lag1 missing
        assert_eq!(d.mask, vec![false, true, false, false, true]);
        let (y, x) = d.split_response("x").unwrap();
        assert_eq!(y, vec![2.0, 5.0]);
        assert_eq!(x.matrix.column(0).iter().copied().collect::<Vec<_>>(), vec![1.0, 4.0]);
    }

    #[test]
    fn all_masked_is_an_error() {
        let p = panel(vec![("x", vec![Some(1.0), None])]);
        assert!(build_lagged_design(&p, &[LagTerm::new("x", 0), LagTerm::new("x", 1)]).is_err());
        assert!(matches!(
            build_lagged_design(&p, &[LagTerm::new("nope", 0)]),
            Err(Error::MissingColumn { .. })
        ));
    }
}
