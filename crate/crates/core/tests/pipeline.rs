use std::path::PathBuf;

use chrono::NaiveDate;
use pegstress::analysis::summarize;
use pegstress::calibration::{calibrate_coin, CalibrationSettings};
use pegstress::econometrics::design::{add_peg_deviation, peg_model_terms};
use pegstress::econometrics::{adf_test, build_lagged_design, ols_fit, Deterministic, LagOrder};
use pegstress::ingest::{align_panel, load_coin_csv, load_failures};
use pegstress::metrics::{peg_stats, rolling_volatility};
use pegstress::simulator::{run_simulation, SimConfig};

fn sample(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/sample").join(name)
}

#[test]
fn sample_data_runs_end_to_end() {
    let failures = load_failures(sample("failed_banks.csv"), sample("total_banks.csv")).unwrap();
    assert!(failures.skipped >= 1);
    for coin in ["usdc", "dai", "usdt"] {
        let s = load_coin_csv(sample(&format!("{coin}.csv")), coin).unwrap();
        assert!(s.len() <= 200);

        let ps = peg_stats(&s, 0.001, 5e-5).unwrap();
        assert!(ps.max_abs_deviation > 0.0 && ps.max_abs_deviation < 0.2);
        assert!(rolling_volatility(&s, 7).unwrap().mean().unwrap() > 0.0);

        let adf = adf_test(&s.prices(), LagOrder::Fixed(1), Deterministic::Constant).unwrap();
        assert!(adf.statistic.is_finite());

        let mut panel = align_panel(
            std::slice::from_ref(&s),
            &[],
            s.first_date().unwrap(),
            s.last_date().unwrap(),
        )
        .unwrap();
        add_peg_deviation(&mut panel, coin).unwrap();
        let (resp, terms) = peg_model_terms(coin, &[]);
        let mut all = vec![resp.clone()];
        all.extend(terms);
        let design = build_lagged_design(&panel, &all).unwrap();
        let (y, x) = design.split_response(&resp.label()).unwrap();
        let ols = ols_fit(&y, &x, true).unwrap();
        assert_eq!(ols.coefficients.len(), 6);

        let settings = if coin == "usdc" {
            CalibrationSettings::reserve_event()
        } else {
            CalibrationSettings::assumed_fraction()
        };
        let cal = calibrate_coin(&s, Some(&ols), &failures.table, &settings).unwrap();
        cal.validate().unwrap();
        assert!(cal.missing_provenance().is_empty(), "{coin}: {:?}", cal.missing_provenance());
        assert!(cal.alpha > 0.0 && cal.alpha < 2.0);
        assert!(cal.gamma <= 0.0);

        let cfg = SimConfig {
            days: 365,
            trials: 200,
            ..SimConfig::default()
        };
        let pairs = run_simulation(&cal, &cfg).unwrap();
        let summary = summarize(coin, &pairs, 0.01).unwrap();
        assert_eq!(summary.trials, 200);
        assert!(summary.hybrid.mean_peak_dev <= summary.current.mean_peak_dev);
    }
}

#[test]
fn usdc_event_day_is_in_sample() {
    let s = load_coin_csv(sample("usdc.csv"), "usdc").unwrap();
    let row = s.get(NaiveDate::from_ymd_opt(2023, 3, 10).unwrap()).unwrap();
    assert!(row.price < 0.95);
}
