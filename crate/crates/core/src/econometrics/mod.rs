//! Regression kernels: OLS, lagged designs and the ADF unit-root test.

pub mod adf;
pub mod design;
pub mod ols;

pub use adf::{adf_test, AdfResult, CriticalValues, Deterministic, LagOrder, RejectFlags};
pub use design::{build_lagged_design, DesignMatrix, LagTerm};
pub use ols::{ols_fit, Coefficient, OlsResult, Regressors, Significance, CONSTANT};
