use std::collections::BTreeMap;

use pegstress::analysis::{self, summarize, sweep, SweepParameter};
use pegstress::calibration::{HybridFractions, ShockCalibration};
use pegstress::simulator::{
    outcome_metrics, run_simulation, run_simulation_with_workers, ChannelSwitches, Engine, SimConfig,
};

fn cal() -> ShockCalibration {
    ShockCalibration {
        coin_id: "usdc".into(),
        alpha: 0.291,
        beta_sim: -2.53e-4,
        gamma: -1.7094,
        delta: 1.0,
        mu_ln_v: 22.0,
        sigma_ln_v: 0.6,
        v_bar: 4.3e9,
        v95: 9.0e9,
        p_base: 8.23e-6,
        p_red: 0.001,
        sigma_eps: 0.002,
        mktcap_bar: 3.2e10,
        provenance: BTreeMap::new(),
    }
}

fn config(days: usize, trials: usize) -> SimConfig {
    SimConfig {
        days,
        trials,
        ..SimConfig::default()
    }
}

#[test]
fn identity_fractions_reproduce_current_regime() {
    let cfg = SimConfig {
        fractions: HybridFractions::IDENTITY,
        ..config(300, 200)
    };
    for p in run_simulation(&cal(), &cfg).unwrap() {
        assert_eq!(p.current.peak_dev, p.hybrid.peak_dev, "trial {}", p.trial);
        assert_eq!(p.current.off_peg_days, p.hybrid.off_peg_days);
        assert_eq!(p.current.clamped_days, p.hybrid.clamped_days);
    }
}

#[test]
fn reserve_only_noise_free_paths_scale_by_fraction() {
    let f = 0.3;
    let cfg = SimConfig {
        noise_enabled: false,
        channels: ChannelSwitches::reserve_only(),
        fractions: HybridFractions::new(1.0, f, 1.0).unwrap(),
        multiplier: 5000.0,
        ..config(400, 50)
    };
    let engine = Engine::new(&cal(), &cfg).unwrap();
    let mut shocked = 0;
    for t in 0..50 {
        let (c, h) = engine.run_paths(t).unwrap();
        assert_eq!(c.prices.len(), 401);
        if c.prices.iter().any(|p| *p != 1.0) {
            shocked += 1;
        }
        for (pc, ph) in c.prices.iter().zip(&h.prices) {
            assert!(((ph - 1.0) - f * (pc - 1.0)).abs() < 1e-12);
        }
    }
    assert!(shocked > 0, "no trial saw a reserve shock");
}

#[test]
fn paths_agree_with_streamed_outcomes() {
    let cfg = config(250, 20);
    let engine = Engine::new(&cal(), &cfg).unwrap();
    for t in 0..20 {
        let pair = engine.run_pair(t).unwrap();
        let (c, h) = engine.run_paths(t).unwrap();
        let oc = outcome_metrics(&c, cfg.off_peg_tolerance);
        let oh = outcome_metrics(&h, cfg.off_peg_tolerance);
        assert_eq!(pair.current.peak_dev, oc.peak_dev);
        assert_eq!(pair.current.off_peg_days, oc.off_peg_days);
        assert_eq!(pair.hybrid.peak_dev, oh.peak_dev);
        assert_eq!(pair.hybrid.off_peg_days, oh.off_peg_days);
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let cfg = config(200, 300);
    let one = run_simulation_with_workers(&cal(), &cfg, 1).unwrap();
    let four = run_simulation_with_workers(&cal(), &cfg, 4).unwrap();
    assert_eq!(one, four);
    assert!(one.iter().enumerate().all(|(i, p)| p.trial == i as u64));
}

#[test]
fn seed_changes_outcomes() {
    let a = run_simulation(&cal(), &config(200, 50)).unwrap();
    let b = run_simulation(&cal(), &SimConfig { seed: 7, ..config(200, 50) }).unwrap();
    assert_ne!(a, b);
}

#[test]
fn sweep_baseline_matches_standalone_run() {
    let cfg = config(200, 100);
    let grid = analysis::default_grid();
    let fixed = SweepParameter::FGamma.default_fixed();
    let res = sweep(&cal(), &cfg, SweepParameter::FGamma, &grid, fixed, &[cfg.multiplier], 0.01).unwrap();
    assert_eq!(res.len(), 1);
    let at = grid.iter().position(|g| *g == 0.1).unwrap();
    let standalone = run_simulation(
        &cal(),
        &SimConfig {
            fractions: SweepParameter::FGamma.apply(fixed, 0.1),
            ..cfg
        },
    )
    .unwrap();
    let expect = summarize("usdc", &standalone, 0.01).unwrap();
    assert_eq!(res[0].summaries[at], expect);
}

#[test]
fn noise_free_hybrid_peak_is_monotone_in_each_fraction() {
    let cfg = SimConfig {
        noise_enabled: false,
        multiplier: 2000.0,
        ..config(300, 150)
    };
    let grid = analysis::default_grid();
    for param in SweepParameter::ALL {
        let res = sweep(&cal(), &cfg, param, &grid, param.default_fixed(), &[cfg.multiplier], 0.01).unwrap();
        let means: Vec<f64> = res[0].summaries.iter().map(|s| s.hybrid.mean_peak_dev).collect();
        for w in means.windows(2) {
            assert!(w[1] >= w[0], "{param}: {means:?}");
        }
    }
}
