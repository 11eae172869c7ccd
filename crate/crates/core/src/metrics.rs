//! Peg deviation, rolling volatility and descriptive statistics.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::CoinSeries;

/// Default threshold for counting a day as off-peg in historical summaries.
pub const DEFAULT_OFF_PEG_TOLERANCE: f64 = 0.001;
/// Default threshold for treating a quote as exactly $1.
pub const DEFAULT_EXACT_PEG_TOLERANCE: f64 = 5e-5;

/// Signed fractional distance from the $1 target.
pub fn peg_deviation(price: f64) -> Result<f64> {
    if !price.is_finite() {
        return Err(Error::Domain(format!("non-finite price {price}")));
    }
    if price < 0.0 {
        return Err(Error::Domain(format!("negative price {price}")));
    }
    Ok(price - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum StdDivisor {
    /// Divide by `n`.
    Population,
    /// Divide by `n - 1`.
    #[default]
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

/// Summary statistics over the finite entries of `values`; non-finite
/// entries are treated as nulls and dropped.
pub fn descriptive_stats<I>(values: I, divisor: StdDivisor) -> Result<DescriptiveStats>
where
    I: IntoIterator<Item = f64>,
{
    let mut xs: Vec<f64> = values.into_iter().filter(|v| v.is_finite()).collect();
    if xs.is_empty() {
        return Err(Error::InsufficientData("no values for descriptive statistics".into()));
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    let denom = match divisor {
        StdDivisor::Population => n as f64,
        StdDivisor::Sample if n > 1 => (n - 1) as f64,
        StdDivisor::Sample => 1.0,
    };
    let median = if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    };
    Ok(DescriptiveStats {
        count: n,
        mean,
        median,
        std: (ss / denom).sqrt(),
        min: xs[0],
        max: xs[n - 1],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolatilitySeries {
    pub window: usize,
    pub values: Vec<(NaiveDate, f64)>,
}

impl VolatilitySeries {
    pub fn mean(&self) -> Option<f64> {
        if self.values.is_empty() {
            None
        } else {
            Some(self.values.iter().map(|v| v.1).sum::<f64>() / self.values.len() as f64)
        }
    }
}

/// Rolling standard deviation of price over the most recent `window`
/// observations, normalised by `window`. The first value is emitted at the
/// `window`-th observation.
pub fn rolling_volatility(series: &CoinSeries, window: usize) -> Result<VolatilitySeries> {
    if window < 2 {
        return Err(Error::Domain(format!("rolling window must be >= 2, got {window}")));
    }
    let rows = series.rows();
    let n = window as f64;
    let values = rows
        .windows(window)
        .map(|w| {
            let mean = w.iter().map(|r| r.price).sum::<f64>() / n;
            let var = w.iter().map(|r| (r.price - mean).powi(2)).sum::<f64>() / n;
            (w[window - 1].date, var.sqrt())
        })
        .collect();
    Ok(VolatilitySeries { window, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PegStats {
    pub days: usize,
    pub avg_abs_deviation: f64,
    /// Sample standard deviation of price.
    pub price_std: f64,
    pub max_abs_deviation: f64,
    pub off_peg_day_share: f64,
    pub exact_peg_share: f64,
    /// Longest run of consecutive calendar days within the exact-peg band.
    pub longest_on_peg_run: usize,
}

pub fn peg_stats(series: &CoinSeries, off_peg_tolerance: f64, exact_peg_tolerance: f64) -> Result<PegStats> {
    if !(off_peg_tolerance >= 0.0) || !(exact_peg_tolerance >= 0.0) {
        return Err(Error::Domain(format!(
            "tolerances must be non-negative (off {off_peg_tolerance}, exact {exact_peg_tolerance})"
        )));
    }
    let rows = series.rows();
    if rows.is_empty() {
        return Err(Error::InsufficientData(format!("{} has no observations", series.coin_id)));
    }
    let mut abs_sum = 0.0;
    let mut max_abs: f64 = 0.0;
    let mut off = 0usize;
    let mut exact = 0usize;
    let mut run = 0usize;
    let mut best = 0usize;
    let mut prev: Option<NaiveDate> = None;
    for r in rows {
        let dev = peg_deviation(r.price)?.abs();
        abs_sum += dev;
        max_abs = max_abs.max(dev);
        if dev > off_peg_tolerance {
            off += 1;
        }
        let contiguous = prev.is_some_and(|p| (r.date - p).num_days() == 1);
        if dev <= exact_peg_tolerance {
            exact += 1;
            run = if contiguous { run + 1 } else { 1 };
        } else {
            run = 0;
        }
        best = best.max(run);
        prev = Some(r.date);
    }
    let n = rows.len();
    let mean = rows.iter().map(|r| r.price).sum::<f64>() / n as f64;
    let ss: f64 = rows.iter().map(|r| (r.price - mean).powi(2)).sum();
    let price_std = if n > 1 { (ss / (n - 1) as f64).sqrt() } else { 0.0 };
    Ok(PegStats {
        days: n,
        avg_abs_deviation: abs_sum / n as f64,
        price_std,
        max_abs_deviation: max_abs,
        off_peg_day_share: off as f64 / n as f64,
        exact_peg_share: exact as f64 / n as f64,
        longest_on_peg_run: best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::RawRow;
    use proptest::prelude::*;

    fn start() -> NaiveDate {
        NaiveDate::from_ymd_opt(2023, 1, 1).unwrap()
    }

    #[test]
    fn deviation_examples() {
        assert_eq!(peg_deviation(1.0).unwrap(), 0.0);
        assert!((peg_deviation(0.87).unwrap() + 0.13).abs() < 1e-15);
        assert!((peg_deviation(1.02).unwrap() - 0.02).abs() < 1e-15);
        assert!(peg_deviation(f64::NAN).is_err());
        assert!(peg_deviation(f64::INFINITY).is_err());
    }

    #[test]
    fn constant_price_has_zero_volatility() {
        let s = CoinSeries::from_prices("x", start(), &[1.0; 40]);
        for w in [2, 7, 30] {
            let v = rolling_volatility(&s, w).unwrap();
            assert_eq!(v.values.len(), 40 - w + 1);
            assert!(v.values.iter().all(|x| x.1 == 0.0));
        }
    }

    #[test]
    fn two_point_window() {
        let s = CoinSeries::from_prices("x", start(), &[1.00, 1.02]);
        let v = rolling_volatility(&s, 2).unwrap();
        assert_eq!(v.values.len(), 1);
        assert!((v.values[0].1 - 0.01).abs() < 1e-12);
    }

    #[test]
    fn window_longer_than_series_is_empty() {
        let s = CoinSeries::from_prices("x", start(), &[1.0, 1.0, 1.0]);
        assert!(rolling_volatility(&s, 7).unwrap().values.is_empty());
        assert!(rolling_volatility(&s, 1).is_err());
    }

    #[test]
    fn descriptive_examples() {
        let a = descriptive_stats([1.0, 1.0, 1.0], StdDivisor::Sample).unwrap();
        assert_eq!((a.mean, a.std), (1.0, 0.0));
        let b = descriptive_stats([3.0, 1.0, 2.0], StdDivisor::Sample).unwrap();
        assert_eq!((b.mean, b.std, b.median, b.min, b.max), (2.0, 1.0, 2.0, 1.0, 3.0));
        let c = descriptive_stats([1.0, 2.0, 3.0, f64::NAN], StdDivisor::Population).unwrap();
        assert_eq!(c.count, 3);
        assert!((c.std - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(descriptive_stats(Vec::<f64>::new(), StdDivisor::Sample).is_err());
    }

    #[test]
    fn peg_stats_examples() {
        let flat = CoinSeries::from_prices("x", start(), &[1.0; 10]);
        let p = peg_stats(&flat, 0.001, 5e-5).unwrap();
        assert_eq!(p.avg_abs_deviation, 0.0);
        assert_eq!(p.off_peg_day_share, 0.0);
        assert_eq!(p.longest_on_peg_run, 10);
        assert_eq!(p.exact_peg_share, 1.0);

        let dip = CoinSeries::from_prices("x", start(), &[1.0, 0.9, 1.0]);
        let p = peg_stats(&dip, 0.01, 5e-5).unwrap();
        assert!((p.off_peg_day_share - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.max_abs_deviation - 0.1).abs() < 1e-12);
        assert_eq!(p.longest_on_peg_run, 1);

        assert!(peg_stats(&dip, -0.1, 0.0).is_err());
    }

    #[test]
    fn missing_days_break_on_peg_runs() {
        let rows = [1, 2, 3, 5, 6]
            .iter()
            .map(|&day| RawRow {
                date: NaiveDate::from_ymd_opt(2023, 1, day).unwrap(),
                price: 1.0,
                market_cap: None,
                total_volume: None,
            })
            .collect();
        let s = CoinSeries::new("x", rows).unwrap();
        assert_eq!(peg_stats(&s, 0.001, 5e-5).unwrap().longest_on_peg_run, 3);
    }

    proptest! {
        #[test]
        fn deviation_is_price_minus_one(p in 0.0f64..10.0) {
            prop_assert_eq!(peg_deviation(p).unwrap(), p - 1.0);
        }

        #[test]
        fn volatility_ignores_level_shifts(
            prices in prop::collection::vec(0.9f64..1.1, 8..60),
            shift in -0.5f64..0.5,
            window in 2usize..8,
        ) {
            let a = rolling_volatility(&CoinSeries::from_prices("a", start(), &prices), window).unwrap();
            let shifted: Vec<f64> = prices.iter().map(|p| p + shift).collect();
            let b = rolling_volatility(&CoinSeries::from_prices("b", start(), &shifted), window).unwrap();
            for (x, y) in a.values.iter().zip(&b.values) {
                prop_assert!((x.1 - y.1).abs() < 1e-12);
            }
        }

        #[test]
        fn descriptive_stats_are_order_independent(mut xs in prop::collection::vec(-1e3f64..1e3, 1..200)) {
            let a = descriptive_stats(xs.iter().copied(), StdDivisor::Sample).unwrap();
            xs.reverse();
            let b = descriptive_stats(xs.iter().copied(), StdDivisor::Sample).unwrap();
            prop_assert!(a.min <= a.median && a.median <= a.max);
            prop_assert!(a.std >= 0.0);
            let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0);
            prop_assert!(close(a.mean, b.mean));
            prop_assert!(close(a.std, b.std));
            prop_assert_eq!(a.median, b.median);
        }
    }
}
