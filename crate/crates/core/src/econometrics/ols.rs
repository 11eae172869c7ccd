//! Ordinary least squares via Householder QR.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Name given to the intercept column.
pub const CONSTANT: &str = "const";

/// A column is treated as collinear when the part of it orthogonal to the
/// preceding columns is below this fraction of its norm.
const RANK_TOLERANCE: f64 = 1e-10;

/// Dense regressor matrix with column names (intercept excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct Regressors {
    pub names: Vec<String>,
    pub matrix: DMatrix<f64>,
}

impl Regressors {
    pub fn new(names: Vec<String>, matrix: DMatrix<f64>) -> Result<Self> {
        if names.len() != matrix.ncols() {
            return Err(Error::Validation(format!(
                "{} names for {} regressor columns",
                names.len(),
                matrix.ncols()
            )));
        }
        Ok(Self { names, matrix })
    }

    /// Builds from column vectors of equal length.
    pub fn from_columns(columns: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let nrows = columns.first().map_or(0, |c| c.1.len());
        if columns.iter().any(|c| c.1.len() != nrows) {
            return Err(Error::Validation("regressor columns differ in length".into()));
        }
        let ncols = columns.len();
        let mut names = Vec::with_capacity(ncols);
        let mut data = Vec::with_capacity(nrows * ncols);
        for (name, values) in columns {
            names.push(name);
            data.extend(values);
        }
        Self::new(names, DMatrix::from_vec(nrows, ncols, data))
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Significance {
    #[serde(rename = "***")]
    P001,
    #[serde(rename = "**")]
    P01,
    #[serde(rename = "*")]
    P05,
    #[serde(rename = "n.s.")]
    NotSignificant,
}

impl Significance {
    pub fn from_p_value(p: f64) -> Self {
        if p < 0.001 {
            Significance::P001
        } else if p < 0.01 {
            Significance::P01
        } else if p < 0.05 {
            Significance::P05
        } else {
            Significance::NotSignificant
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Significance::P001 => "***",
            Significance::P01 => "**",
            Significance::P05 => "*",
            Significance::NotSignificant => "n.s.",
        }
    }
}

impl std::fmt::Display for Significance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_stat: f64,
    pub p_value: f64,
    pub significance: Significance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsResult {
    pub coefficients: Vec<Coefficient>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
    pub r_squared: f64,
    pub n_obs: usize,
    pub df_resid: usize,
    /// RSS / (n - p).
    pub sigma2: f64,
    pub rss: f64,
}

impl OlsResult {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn estimates(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.estimate).collect()
    }
}

/// Fits `y = X b + e`, prepending a [`CONSTANT`] column when `intercept` is set.
///
/// Coefficients come from a QR solve; standard errors from
/// `sigma2 * (X'X)^-1 = sigma2 * R^-1 R^-T`; p-values are two-sided under a
/// Student t with `n - p` degrees of freedom.
pub fn ols_fit(y: &[f64], x: &Regressors, intercept: bool) -> Result<OlsResult> {
    let n = y.len();
    if x.nrows() != n {
        return Err(Error::Validation(format!(
            "response has {n} rows but regressors have {}",
            x.nrows()
        )));
    }
    let mut names = Vec::with_capacity(x.names.len() + 1);
    let design = if intercept {
        names.push(CONSTANT.to_string());
        x.matrix.clone().insert_column(0, 1.0)
    } else {
        x.matrix.clone()
    };
    names.extend(x.names.iter().cloned());
    let p = design.ncols();
    if p == 0 {
        return Err(Error::Validation("no regressors".into()));
    }
    if n < p + 1 {
        return Err(Error::InsufficientData(format!(
            "{n} observations for {p} coefficients"
        )));
    }
    if y.iter().chain(design.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite value in regression data".into()));
    }

    let qr = design.clone().qr();
    let r = qr.r();
    let collinear: Vec<String> = (0..p)
        .filter(|&j| {
            let norm = design.column(j).norm();
            norm == 0.0 || r[(j, j)].abs() <= RANK_TOLERANCE * norm
        })
        .map(|j| names[j].clone())
        .collect();
    if !collinear.is_empty() {
        return Err(Error::Singular { columns: collinear });
    }

    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Singular { columns: names.clone() })?;
    let fitted = &design * &beta;
    let residuals: Vec<f64> = (&yv - &fitted).iter().copied().collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let df = n - p;
    let sigma2 = rss / df as f64;

    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(|| Error::Singular { columns: names.clone() })?;
    let t_dist = StudentsT::new(0.0, 1.0, df as f64)
        .map_err(|e| Error::Domain(format!("t distribution: {e}")))?;

    let coefficients = names
        .into_iter()
        .enumerate()
        .map(|(j, name)| {
            let var = sigma2 * r_inv.row(j).iter().map(|v| v * v).sum::<f64>();
            let std_error = var.sqrt();
            let estimate = beta[j];
            let t_stat = estimate / std_error;
            let p_value = if t_stat.is_nan() {
                f64::NAN
            } else {
                (2.0 * t_dist.sf(t_stat.abs())).min(1.0)
            };
            Coefficient {
                name,
                estimate,
                std_error,
                t_stat,
                p_value,
                significance: Significance::from_p_value(p_value),
            }
        })
        .collect();

    let tss = if intercept {
        let mean = y.iter().sum::<f64>() / n as f64;
        y.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
    } else {
        y.iter().map(|v| v * v).sum::<f64>()
    };
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };

    Ok(OlsResult {
        coefficients,
        residuals,
        r_squared,
        n_obs: n,
        df_resid: df,
        sigma2,
        rss,
    })
}
