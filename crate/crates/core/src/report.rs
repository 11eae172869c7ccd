//! Plain-text and CSV renderings of result tables.

use crate::analysis::{PairedSummary, RunEquilibrium, SweepResult};
use crate::econometrics::{AdfResult, OlsResult};
use crate::error::{Error, Result};
use crate::metrics::{DescriptiveStats, PegStats};
use crate::simulator::{Regime, TrialOutcome, TrialPair};

/// A rectangular table of pre-formatted cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, headers: &[&str]) -> Self {
        Self {
            title: title.into(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// Column-aligned text: first column left-aligned, the rest right-aligned.
    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (c, w))| {
                    if i == 0 {
                        format!("{c:<w$}")
                    } else {
                        format!("{c:>w$}")
                    }
                })
                .collect();
            parts.join("  ").trim_end().to_string()
        };
        let rule = "-".repeat(widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1));
        let mut out = String::new();
        if !self.title.is_empty() {
            out.push_str(&self.title);
            out.push('\n');
        }
        out.push_str(&line(&self.headers));
        out.push('\n');
        out.push_str(&rule);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Validation(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn sci(v: f64) -> String {
    format!("{v:.4e}")
}

fn fixed(v: f64, digits: usize) -> String {
    format!("{v:.digits$}")
}

fn pct(share: f64) -> String {
    format!("{:.2}", 100.0 * share)
}

/// One row per (coin, variable).
pub fn descriptive_table(rows: &[(String, String, DescriptiveStats)]) -> Table {
    let mut t = Table::new(
        "Descriptive statistics",
        &["coin", "variable", "count", "mean", "median", "std", "min", "max"],
    );
    for (coin, var, s) in rows {
        let f = if var == "price" { |v| fixed(v, 6) } else { sci as fn(f64) -> String };
        t.push(vec![
            coin.clone(),
            var.clone(),
            s.count.to_string(),
            f(s.mean),
            f(s.median),
            f(s.std),
            f(s.min),
            f(s.max),
        ]);
    }
    t
}

pub fn peg_table(rows: &[(String, PegStats)], off_tolerance: f64) -> Table {
    let off = format!("off_peg_days_pct(>{off_tolerance})");
    let mut t = Table::new(
        "Deviation and peg statistics",
        &["coin", "days", "avg_abs_dev", "price_std", "max_abs_dev", &off, "exact_peg_pct", "longest_on_peg_run"],
    );
    for (coin, s) in rows {
        t.push(vec![
            coin.clone(),
            s.days.to_string(),
            fixed(s.avg_abs_deviation, 6),
            fixed(s.price_std, 6),
            fixed(s.max_abs_deviation, 6),
            pct(s.off_peg_day_share),
            pct(s.exact_peg_share),
            s.longest_on_peg_run.to_string(),
        ]);
    }
    t
}

/// `(coin, window, mean rolling volatility)`.
pub fn volatility_table(rows: &[(String, usize, Option<f64>)]) -> Table {
    let mut t = Table::new("Rolling volatility", &["coin", "window", "mean_volatility", "mean_volatility_pct"]);
    for (coin, window, mean) in rows {
        t.push(vec![
            coin.clone(),
            window.to_string(),
            mean.map_or("NA".into(), |v| fixed(v, 6)),
            mean.map_or("NA".into(), |v| format!("{:.2}", 100.0 * v)),
        ]);
    }
    t
}

pub fn regression_table(title: &str, fit: &OlsResult) -> Table {
    let mut t = Table::new(title, &["term", "estimate", "std_error", "t", "p", "sig"]);
    for c in &fit.coefficients {
        t.push(vec![
            c.name.clone(),
            sci(c.estimate),
            sci(c.std_error),
            fixed(c.t_stat, 3),
            format!("{:.4}", c.p_value),
            c.significance.code().to_string(),
        ]);
    }
    t.title = format!("{title} (n = {}, R^2 = {:.4})", fit.n_obs, fit.r_squared);
    t
}

pub fn adf_table(rows: &[(String, AdfResult)]) -> Table {
    let mut t = Table::new(
        "Augmented Dickey-Fuller test",
        &["series", "statistic", "lags", "n", "cv_1%", "cv_5%", "cv_10%", "reject_5%"],
    );
    for (name, r) in rows {
        t.push(vec![
            name.clone(),
            fixed(r.statistic, 4),
            r.lags.to_string(),
            r.n_obs.to_string(),
            fixed(r.critical_values.one, 2),
            fixed(r.critical_values.five, 2),
            fixed(r.critical_values.ten, 2),
            if r.reject.five { "yes" } else { "no" }.into(),
        ]);
    }
    t
}

const SUMMARY_HEADERS: [&str; 14] = [
    "trials",
    "pct_peak_mean",
    "pct_peak_sd",
    "pct_off_mean",
    "pct_off_sd",
    "peak_included",
    "off_included",
    "current_mean_peak",
    "current_p95_peak",
    "hybrid_mean_peak",
    "hybrid_p95_peak",
    "current_mean_off",
    "hybrid_mean_off",
    "hybrid_median_off",
];

fn summary_cells(s: &PairedSummary) -> Vec<String> {
    vec![
        s.trials.to_string(),
        fixed(s.pct_peak_mean, 3),
        fixed(s.pct_peak_sd, 3),
        fixed(s.pct_off_mean, 3),
        fixed(s.pct_off_sd, 3),
        s.peak_included.to_string(),
        s.off_included.to_string(),
        fixed(s.current.mean_peak_dev, 6),
        fixed(s.current.p95_peak_dev, 6),
        fixed(s.hybrid.mean_peak_dev, 6),
        fixed(s.hybrid.p95_peak_dev, 6),
        fixed(s.current.mean_off_peg_days, 2),
        fixed(s.hybrid.mean_off_peg_days, 2),
        fixed(s.hybrid.median_off_peg_days, 1),
    ]
}

pub fn simulation_table(rows: &[PairedSummary]) -> Table {
    let mut headers = vec!["coin"];
    headers.extend(SUMMARY_HEADERS);
    let mut t = Table::new("Monte Carlo summary (hybrid vs current)", &headers);
    for s in rows {
        let mut cells = vec![s.coin_id.clone()];
        cells.extend(summary_cells(s));
        t.push(cells);
    }
    t
}

/// One row per `(M, grid value)`.
pub fn sweep_table(results: &[SweepResult]) -> Table {
    let param = results.first().map_or("value", |r| r.parameter.as_str());
    let mut headers = vec!["coin", "multiplier", param, "f_beta", "f_gamma", "f_delta"];
    headers.extend(SUMMARY_HEADERS);
    let mut t = Table::new(format!("Sensitivity sweep over {param}"), &headers);
    for r in results {
        for (&value, s) in r.grid.iter().zip(&r.summaries) {
            let f = r.parameter.apply(r.fixed, value);
            let mut cells = vec![
                s.coin_id.clone(),
                r.multiplier.to_string(),
                value.to_string(),
                f.f_beta.to_string(),
                f.f_gamma.to_string(),
                f.f_delta.to_string(),
            ];
            cells.extend(summary_cells(s));
            t.push(cells);
        }
    }
    t
}

pub fn equilibrium_table(rows: &[RunEquilibrium]) -> Table {
    let mut t = Table::new("Diamond-Dybvig equilibria", &["hold_value", "fire_sale_value", "insured", "equilibria"]);
    for r in rows {
        let eq: Vec<&str> = r
            .equilibria
            .iter()
            .map(|e| match e {
                crate::analysis::Equilibrium::NoRun => "no-run",
                crate::analysis::Equilibrium::Run => "run",
            })
            .collect();
        t.push(vec![
            fixed(r.hold_value, 2),
            fixed(r.fire_sale_value, 2),
            r.insured.to_string(),
            eq.join(" + "),
        ]);
    }
    t
}

pub const OUTCOME_HEADER: [&str; 5] = ["trial", "regime", "peak_dev", "off_peg_days", "clamped_days"];

/// Two rows per trial, current first. Floats use the shortest
/// representation that round-trips.
pub fn outcomes_csv(pairs: &[TrialPair]) -> String {
    let mut out = OUTCOME_HEADER.join(",");
    out.push('\n');
    for p in pairs {
        for o in [&p.current, &p.hybrid] {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                p.trial, o.regime, o.peak_dev, o.off_peg_days, o.clamped_days
            ));
        }
    }
    out
}

pub fn parse_outcomes_csv(bytes: &[u8]) -> Result<Vec<TrialPair>> {
    let mut rdr = csv::Reader::from_reader(bytes);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != OUTCOME_HEADER {
        return Err(Error::Validation(format!(
            "unexpected outcome header {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let mut current: Option<(u64, TrialOutcome)> = None;
    let mut pairs = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i as u64 + 2;
        let field = |j: usize| rec.get(j).unwrap_or("");
        let bad = |j: usize| Error::Parse {
            line,
            column: OUTCOME_HEADER[j].to_string(),
            value: field(j).to_string(),
        };
        let trial: u64 = field(0).parse().map_err(|_| bad(0))?;
        let regime = match field(1) {
            "current" => Regime::Current,
            "hybrid" => Regime::Hybrid,
            _ => return Err(bad(1)),
        };
        let o = TrialOutcome {
            regime,
            peak_dev: field(2).parse().map_err(|_| bad(2))?,
            off_peg_days: field(3).parse().map_err(|_| bad(3))?,
            clamped_days: field(4).parse().map_err(|_| bad(4))?,
        };
        match (regime, current.take()) {
            (Regime::Current, None) => current = Some((trial, o)),
            (Regime::Hybrid, Some((t, c))) if t == trial => pairs.push(TrialPair {
                trial,
                current: c,
                hybrid: o,
            }),
            _ => {
                return Err(Error::Validation(format!(
                    "line {line}: outcome rows must alternate current/hybrid per trial"
                )))
            }
        }
    }
    if current.is_some() {
        return Err(Error::Validation("trailing current row without hybrid row".into()));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outcomes_round_trip() {
        let o = |regime, peak_dev: f64, off| TrialOutcome {
            regime,
            peak_dev,
            off_peg_days: off,
            clamped_days: 0,
        };
        let pairs = vec![
            TrialPair { trial: 0, current: o(Regime::Current, 0.1 + 0.2, 3), hybrid: o(Regime::Hybrid, 1e-17, 0) },
            TrialPair { trial: 1, current: o(Regime::Current, 0.13, 1), hybrid: o(Regime::Hybrid, 0.026, 0) },
        ];
        let text = outcomes_csv(&pairs);
        assert!(text.starts_with("trial,regime,peak_dev,off_peg_days,clamped_days\n0,current,"));
        assert_eq!(parse_outcomes_csv(text.as_bytes()).unwrap(), pairs);
        let broken = text.replace("1,hybrid", "2,hybrid");
        assert!(parse_outcomes_csv(broken.as_bytes()).is_err());
    }

    #[test]
    fn text_is_aligned() {
        let mut t = Table::new("T", &["a", "value"]);
        t.push(vec!["long-name".into(), "1".into()]);
        t.push(vec!["x".into(), "22.5".into()]);
        let text = t.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "T");
        assert_eq!(lines[1], "a          value");
        assert_eq!(lines[3], "long-name      1");
        assert_eq!(lines[4], "x           22.5");
    }

    #[test]
    fn csv_quotes_when_needed() {
        let mut t = Table::new("", &["a", "b"]);
        t.push(vec!["x,y".into(), "1".into()]);
        assert_eq!(t.to_csv().unwrap(), "a,b\n\"x,y\",1\n");
    }
}
