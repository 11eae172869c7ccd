//! Subcommand implementations.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use pegstress::analysis::{self, dybvig_equilibria, PairedSummary, SweepParameter, SweepResult};
use pegstress::calibration::{calibrate_coin, ShockCalibration};
use pegstress::econometrics::design::{add_peg_deviation, peg_model_terms};
use pegstress::econometrics::{adf_test, build_lagged_design, ols_fit, AdfResult, OlsResult, CONSTANT};
use pegstress::ingest::{self, BankFailureTable, CoinSeries, MacroSeries};
use pegstress::metrics::{descriptive_stats, peg_stats, rolling_volatility, DescriptiveStats, PegStats};
use pegstress::report::{self, Table};
use pegstress::simulator::{self, SimConfig};
use pegstress::svg;

use crate::config::LoadedConfig;
use crate::manifest::{sha256_hex, Outputs, RunManifest};
use crate::{Cli, CliError, CoinArgs, Command, SimArgs, SweepArgs};

type CliResult<T> = Result<T, CliError>;

pub const CALIBRATION_FILE: &str = "calibration.json";

/// Calibrated parameters plus the digest of the configuration that produced
/// them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationFile {
    pub config_digest: String,
    pub coins: Vec<ShockCalibration>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationSummaryFile {
    pub simulation: SimConfig,
    pub summaries: Vec<PairedSummary>,
}

#[derive(Debug, Clone, Serialize)]
struct SweepRecord<'a> {
    coin: &'a str,
    parameter: SweepParameter,
    results: &'a [SweepResult],
}

struct Ctx {
    cfg: LoadedConfig,
    out: Outputs,
    warnings: Vec<String>,
    seed_override: Option<u64>,
    calibration_digest: Option<String>,
    seed: Option<u64>,
    recursion: bool,
}

pub fn run(cli: &Cli) -> CliResult<Vec<String>> {
    let started = chrono::Utc::now();
    let cfg = LoadedConfig::load(&cli.config)?;
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::input("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::computation(format!("thread pool: {e}")))?;
    }
    let out_dir = cfg.output_dir(cli.out.as_deref());
    let mut ctx = Ctx {
        cfg,
        out: Outputs::new(out_dir),
        warnings: Vec::new(),
        seed_override: cli.seed,
        calibration_digest: None,
        seed: None,
        recursion: false,
    };
    let name = match &cli.command {
        Command::Stats(a) => ctx.stats(a).map(|_| "stats"),
        Command::Peg(a) => ctx.peg(a).map(|_| "peg"),
        Command::Adf(a) => ctx.adf(a).map(|_| "adf"),
        Command::Regress(a) => ctx.regress(a).map(|_| "regress"),
        Command::Calibrate(a) => ctx.calibrate(a).map(|_| "calibrate"),
        Command::Simulate(a) => ctx.simulate(a).map(|_| "simulate"),
        Command::Sweep(a) => ctx.sweep(a).map(|_| "sweep"),
        Command::Report(a) => ctx.report(a).map(|_| "report"),
    }?;
    ctx.write_manifest(name, started)?;
    Ok(ctx.warnings)
}

/// Display label for a peg-model term.
pub fn display_term(coin: &str, name: &str) -> String {
    let local = name.strip_prefix(&format!("{coin}.")).unwrap_or(name);
    match local {
        CONSTANT => "Constant".into(),
        "total_volume" => "Total Volume".into(),
        "market_cap" => "Market Cap".into(),
        "peg_dev_lag1" => "PegDev (lag 1)".into(),
        "total_volume_lag1" => "Volume (lag 1)".into(),
        "market_cap_lag1" => "M.Cap (lag 1)".into(),
        other => other.into(),
    }
}

impl Ctx {
    fn coins(&self, args: &CoinArgs) -> CliResult<Vec<String>> {
        self.cfg.select_coins(&args.coins)
    }

    fn series(&self, coin: &str) -> CliResult<CoinSeries> {
        let path = self.cfg.coin_path(coin)?;
        let s = ingest::load_coin_csv_with(&path, coin, &self.cfg.config.data.header_aliases)?;
        let s = match self.cfg.config.window {
            Some(w) => s.window(w.start, w.end),
            None => s,
        };
        if s.is_empty() {
            return Err(pegstress::Error::NoObservations(format!("{} within the configured window", path.display())).into());
        }
        Ok(s)
    }

    fn macros(&mut self, ids: &[String]) -> CliResult<Vec<MacroSeries>> {
        let mut out = Vec::new();
        for id in ids {
            let src = self
                .cfg
                .config
                .data
                .macro_series
                .iter()
                .find(|m| &m.series_id == id)
                .ok_or_else(|| CliError::input(format!("regressor {id:?} has no macro_series entry")))?;
            let (series, report) = ingest::load_macro_csv(self.cfg.resolve(&src.path), &src.series_id, src.frequency)?;
            self.warnings.extend(report.warnings);
            out.push(series);
        }
        Ok(out)
    }

    fn failures(&mut self) -> CliResult<BankFailureTable> {
        let d = &self.cfg.config.data;
        let load = ingest::load_failures(self.cfg.resolve(&d.failed_banks), self.cfg.resolve(&d.total_banks))?;
        Ok(load.table)
    }

    fn fit_peg_model(&mut self, series: &CoinSeries) -> CliResult<OlsResult> {
        let coin = series.coin_id.clone();
        let extra = self.cfg.config.regression.extra_regressors.clone();
        let macros = self.macros(&extra)?;
        let (start, end) = (series.first_date().unwrap(), series.last_date().unwrap());
        let mut panel = ingest::align_panel(std::slice::from_ref(series), &macros, start, end)?;
        add_peg_deviation(&mut panel, &coin)?;
        let (response, terms) = peg_model_terms(&coin, &extra);
        let mut all = vec![response.clone()];
        all.extend(terms);
        let design = build_lagged_design(&panel, &all)?;
        let (y, x) = design.split_response(&response.label())?;
        Ok(ols_fit(&y, &x, true)?)
    }

    fn write_table(&mut self, stem: &str, table: &Table) -> CliResult<()> {
        self.out.write(&format!("{stem}.txt"), table.to_text().as_bytes())?;
        self.out.write(&format!("{stem}.csv"), table.to_csv()?.as_bytes())?;
        Ok(())
    }

    fn descriptive_rows(&self, coins: &[String]) -> CliResult<Vec<(String, String, DescriptiveStats)>> {
        let divisor = self.cfg.config.metrics.std_divisor;
        let mut rows = Vec::new();
        for coin in coins {
            let s = self.series(coin)?;
            let r = s.rows();
            rows.push((coin.clone(), "price".into(), descriptive_stats(r.iter().map(|x| x.price), divisor)?));
            for (name, values) in [
                ("market_cap", r.iter().filter_map(|x| x.market_cap).collect::<Vec<_>>()),
                ("total_volume", r.iter().filter_map(|x| x.total_volume).collect()),
            ] {
                if !values.is_empty() {
                    rows.push((coin.clone(), name.into(), descriptive_stats(values, divisor)?));
                }
            }
        }
        Ok(rows)
    }

    fn stats(&mut self, args: &CoinArgs) -> CliResult<()> {
        let coins = self.coins(args)?;
        let rows = self.descriptive_rows(&coins)?;
        self.write_table("stats/descriptive", &report::descriptive_table(&rows))?;
        #[derive(Serialize)]
        struct Row<'a> {
            coin: &'a str,
            variable: &'a str,
            #[serde(flatten)]
            stats: &'a DescriptiveStats,
        }
        let json: Vec<Row> = rows
            .iter()
            .map(|(c, v, s)| Row { coin: c, variable: v, stats: s })
            .collect();
        self.out.write_json("stats/descriptive.json", &json)?;
        Ok(())
    }

    fn peg_rows(&self, coins: &[String]) -> CliResult<(Vec<(String, PegStats)>, Vec<(String, usize, Option<f64>)>)> {
        let m = &self.cfg.config.metrics;
        let (mut pegs, mut vols) = (Vec::new(), Vec::new());
        for coin in coins {
            let s = self.series(coin)?;
            pegs.push((coin.clone(), peg_stats(&s, m.off_peg_tolerance, m.exact_peg_tolerance)?));
            let v = rolling_volatility(&s, m.volatility_window)?;
            vols.push((coin.clone(), m.volatility_window, v.mean()));
        }
        Ok((pegs, vols))
    }

    fn peg(&mut self, args: &CoinArgs) -> CliResult<()> {
        let coins = self.coins(args)?;
        let (pegs, vols) = self.peg_rows(&coins)?;
        let tol = self.cfg.config.metrics.off_peg_tolerance;
        self.write_table("peg/peg_stats", &report::peg_table(&pegs, tol))?;
        self.write_table("peg/volatility", &report::volatility_table(&vols))?;
        self.out.write_json("peg/peg_stats.json", &pegs)?;
        let window = self.cfg.config.metrics.volatility_window;
        for coin in &coins {
            let v = rolling_volatility(&self.series(coin)?, window)?;
            let mut text = String::from("date,volatility\n");
            for (d, x) in &v.values {
                text.push_str(&format!("{d},{x}\n"));
            }
            self.out.write(&format!("peg/rolling_volatility_{coin}.csv"), text.as_bytes())?;
        }
        Ok(())
    }

    fn adf_rows(&self, coins: &[String]) -> CliResult<Vec<(String, AdfResult)>> {
        let r = &self.cfg.config.regression;
        let mut rows = Vec::new();
        for coin in coins {
            let s = self.series(coin)?;
            rows.push((ingest::price_column(coin), adf_test(&s.prices(), r.adf_lags, r.adf_deterministic)?));
        }
        Ok(rows)
    }

    fn adf(&mut self, args: &CoinArgs) -> CliResult<()> {
        let coins = self.coins(args)?;
        let rows = self.adf_rows(&coins)?;
        self.write_table("adf/adf", &report::adf_table(&rows))?;
        self.out.write_json("adf/adf.json", &rows)?;
        Ok(())
    }

    fn regression_table(coin: &str, fit: &OlsResult) -> Table {
        let mut labelled = fit.clone();
        for c in &mut labelled.coefficients {
            c.name = display_term(coin, &c.name);
        }
        report::regression_table(&format!("Peg deviation drivers: {coin}"), &labelled)
    }

    fn regress(&mut self, args: &CoinArgs) -> CliResult<()> {
        let coins = self.coins(args)?;
        for coin in &coins {
            let s = self.series(coin)?;
            let fit = self.fit_peg_model(&s)?;
            self.write_table(&format!("regress/ols_{coin}"), &Self::regression_table(coin, &fit))?;
            self.out.write_json(&format!("regress/ols_{coin}.json"), &fit)?;
        }
        Ok(())
    }

    fn calibrate(&mut self, args: &CoinArgs) -> CliResult<()> {
        let coins = self.coins(args)?;
        let failures = self.failures()?;
        let mut cals = Vec::new();
        for coin in &coins {
            let s = self.series(coin)?;
            let settings = self.cfg.config.calibration.settings_for(coin);
            let fit = match (settings.overrides.alpha, settings.overrides.beta_sim) {
                (Some(_), Some(_)) => None,
                _ => Some(self.fit_peg_model(&s)?),
            };
            cals.push(calibrate_coin(&s, fit.as_ref(), &failures, &settings)?);
        }
        let file = CalibrationFile {
            config_digest: self.cfg.digest.clone(),
            coins: cals,
        };
        let path = self.out.write_json(CALIBRATION_FILE, &file)?;
        let bytes = std::fs::read(&path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        self.calibration_digest = Some(sha256_hex(&bytes));

        let mut headers = vec!["parameter"];
        headers.extend(coins.iter().map(String::as_str));
        let mut t = Table::new("Calibrated shock parameters", &headers);
        let mut prov = String::new();
        for field in ShockCalibration::FIELDS {
            let mut row = vec![field.to_string()];
            for c in &file.coins {
                let v = serde_json::to_value(c).expect("calibration serializes");
                row.push(format!("{:.6e}", v[field].as_f64().unwrap_or(f64::NAN)));
            }
            t.push(row);
        }
        for c in &file.coins {
            prov.push_str(&format!("[{}]\n", c.coin_id));
            for (k, v) in &c.provenance {
                prov.push_str(&format!("{k}: {v}\n"));
            }
        }
        self.write_table("calibrate/calibration", &t)?;
        self.out.write("calibrate/provenance.txt", prov.as_bytes())?;
        Ok(())
    }

    fn load_calibration(&mut self, flag: Option<&Path>) -> CliResult<CalibrationFile> {
        let path: PathBuf = flag.map_or_else(|| self.out.root().join(CALIBRATION_FILE), Path::to_path_buf);
        let bytes = std::fs::read(&path).map_err(|e| {
            CliError::input(format!("cannot read calibration {}: {e} (run `calibrate` first)", path.display()))
        })?;
        let file: CalibrationFile = serde_json::from_slice(&bytes)
            .map_err(|e| CliError::input(format!("invalid calibration {}: {e}", path.display())))?;
        if file.config_digest != self.cfg.digest {
            self.warnings.push(format!(
                "{} was produced under a different configuration (digest {} vs current {})",
                path.display(),
                short(&file.config_digest),
                short(&self.cfg.digest)
            ));
        }
        self.calibration_digest = Some(sha256_hex(&bytes));
        Ok(file)
    }

    fn sim_config(&mut self, a: &SimArgs) -> CliResult<SimConfig> {
        let mut cfg = self.cfg.config.simulation.to_sim_config();
        if let Some(s) = self.seed_override {
            cfg.seed = s;
        }
        if let Some(n) = a.trials {
            cfg.trials = n;
        }
        if let Some(d) = a.days {
            cfg.days = d;
        }
        if let Some(m) = a.multiplier {
            cfg.multiplier = m;
        }
        if a.no_noise {
            cfg.noise_enabled = false;
        }
        cfg.validate()?;
        self.seed = Some(cfg.seed);
        self.recursion = true;
        Ok(cfg)
    }

    fn calibrations_for(&self, file: &CalibrationFile, coins: &[String]) -> CliResult<Vec<ShockCalibration>> {
        coins
            .iter()
            .map(|coin| {
                file.coins
                    .iter()
                    .find(|c| &c.coin_id == coin)
                    .cloned()
                    .ok_or_else(|| CliError::input(format!("calibration has no entry for {coin:?}")))
            })
            .collect()
    }

    fn simulate(&mut self, a: &SimArgs) -> CliResult<()> {
        let coins = self.coins(&a.coins)?;
        let file = self.load_calibration(a.calibration.as_deref())?;
        let cals = self.calibrations_for(&file, &coins)?;
        let cfg = self.sim_config(a)?;
        let eps = self.cfg.config.analysis.epsilon;
        let mut summaries = Vec::new();
        for cal in &cals {
            let pairs = simulator::run_simulation(cal, &cfg)?;
            self.out
                .write(&format!("simulate/outcomes_{}.csv", cal.coin_id), report::outcomes_csv(&pairs).as_bytes())?;
            let s = analysis::summarize(&cal.coin_id, &pairs, eps)?;
            self.warnings.extend(s.warnings.iter().map(|w| format!("{}: {w}", cal.coin_id)));
            summaries.push(s);
        }
        self.write_table("simulate/summary", &report::simulation_table(&summaries))?;
        self.out.write_json(
            "simulate/summary.json",
            &SimulationSummaryFile {
                simulation: cfg,
                summaries,
            },
        )?;
        Ok(())
    }

    fn sweep(&mut self, a: &SweepArgs) -> CliResult<()> {
        let coins = self.coins(&a.sim.coins)?;
        let file = self.load_calibration(a.sim.calibration.as_deref())?;
        let cals = self.calibrations_for(&file, &coins)?;
        let cfg = self.sim_config(&a.sim)?;
        let an = self.cfg.config.analysis.clone();
        let params: Vec<SweepParameter> = if a.params.is_empty() {
            SweepParameter::ALL.to_vec()
        } else {
            a.params.clone()
        };
        let m_values = if a.m_values.is_empty() { an.m_values.clone() } else { a.m_values.clone() };
        let mut all: Vec<(String, SweepParameter, Vec<SweepResult>)> = Vec::new();
        for &p in &params {
            let mut flat = Vec::new();
            for cal in &cals {
                let results = analysis::sweep(cal, &cfg, p, &an.grid, an.fixed_for(p), &m_values, an.epsilon)?;
                flat.extend(results.iter().cloned());
                all.push((cal.coin_id.clone(), p, results));
            }
            self.out
                .write(&format!("sweep/sweep_{p}.csv"), report::sweep_table(&flat).to_csv()?.as_bytes())?;
        }
        let records: Vec<SweepRecord> = all
            .iter()
            .map(|(coin, p, r)| SweepRecord {
                coin,
                parameter: *p,
                results: r,
            })
            .collect();
        self.out.write_json("sweep/sweep.json", &records)?;
        Ok(())
    }

    fn report(&mut self, args: &CoinArgs) -> CliResult<()> {
        let coins = self.coins(args)?;
        let mut text = String::new();
        let mut section = |t: &Table| {
            text.push_str(&t.to_text());
            text.push('\n');
        };
        section(&report::descriptive_table(&self.descriptive_rows(&coins)?));
        let (pegs, vols) = self.peg_rows(&coins)?;
        section(&report::peg_table(&pegs, self.cfg.config.metrics.off_peg_tolerance));
        section(&report::volatility_table(&vols));
        match self.adf_rows(&coins) {
            Ok(rows) => section(&report::adf_table(&rows)),
            Err(e) => self.warnings.push(format!("ADF skipped: {}", e.message)),
        }
        for coin in &coins {
            let fit = self.series(coin).and_then(|s| self.fit_peg_model(&s));
            match fit {
                Ok(fit) => section(&Self::regression_table(coin, &fit)),
                Err(e) => self.warnings.push(format!("regression for {coin} skipped: {}", e.message)),
            }
        }
        let summary_path = self.out.root().join("simulate/summary.json");
        match std::fs::read(&summary_path) {
            Ok(bytes) => {
                let file: SimulationSummaryFile = serde_json::from_slice(&bytes)
                    .map_err(|e| CliError::input(format!("invalid {}: {e}", summary_path.display())))?;
                section(&report::simulation_table(&file.summaries));
            }
            Err(_) => self
                .warnings
                .push(format!("no simulation summary at {}; run `simulate` first", summary_path.display())),
        }
        let eq = [(1.0, 0.7, false), (1.0, 0.7, true), (1.0, 1.0, false)]
            .iter()
            .map(|&(h, f, i)| dybvig_equilibria(h, f, i))
            .collect::<Result<Vec<_>, _>>()?;
        section(&report::equilibrium_table(&eq));
        self.out.write("report/tables.txt", text.as_bytes())?;

        if self.cfg.config.figures {
            self.figures(&coins)?;
        }
        Ok(())
    }

    fn figures(&mut self, coins: &[String]) -> CliResult<()> {
        let mut devs = Vec::new();
        for coin in coins {
            let s = self.series(coin)?;
            let pts: Vec<_> = s.rows().iter().map(|r| (r.date, r.price - 1.0)).collect();
            devs.push((coin.clone(), pts));
        }
        for (coin, pts) in &devs {
            let chart = svg::line_chart(
                &format!("{coin} peg deviation"),
                "price - 1 (USD)",
                &[svg::Series { label: coin, points: pts }],
                Some(0.0),
            );
            self.out.write(&format!("report/figures/deviation_{coin}.svg"), chart.as_bytes())?;
        }
        let series: Vec<svg::Series> = devs
            .iter()
            .map(|(c, p)| svg::Series { label: c, points: p })
            .collect();
        let all = svg::line_chart("Peg deviation", "price - 1 (USD)", &series, Some(0.0));
        self.out.write("report/figures/deviation_all.svg", all.as_bytes())?;

        let eps = self.cfg.config.analysis.epsilon;
        let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
        for coin in coins {
            let path = self.out.root().join(format!("simulate/outcomes_{coin}.csv"));
            match std::fs::read(&path) {
                Ok(bytes) => {
                    let pairs = report::parse_outcomes_csv(&bytes)?;
                    groups.push((coin.clone(), analysis::peak_improvements(&pairs, eps)));
                }
                Err(_) => self.warnings.push(format!("no outcomes at {}; boxplot omits {coin}", path.display())),
            }
        }
        if !groups.is_empty() {
            let refs: Vec<(&str, &[f64])> = groups.iter().map(|(c, v)| (c.as_str(), v.as_slice())).collect();
            let plot = svg::boxplot("Reduction in peak deviation (hybrid vs current)", "% reduction in PeakDev", &refs);
            self.out.write("report/figures/peak_improvement_boxplot.svg", plot.as_bytes())?;
        }
        Ok(())
    }

    fn write_manifest(&mut self, command: &str, started: chrono::DateTime<chrono::Utc>) -> CliResult<()> {
        let m = RunManifest {
            tool: "pegstress".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_digest: self.cfg.digest.clone(),
            calibration_digest: self.calibration_digest.clone(),
            seed: self.seed,
            recursion: self.recursion.then(|| simulator::RECURSION.to_string()),
            started_at: started.to_rfc3339(),
            finished_at: chrono::Utc::now().to_rfc3339(),
            outputs: self.out.records().to_vec(),
            warnings: self.warnings.clone(),
        };
        let text = serde_json::to_string_pretty(&m).map_err(|e| CliError::computation(e.to_string()))? + "\n";
        let path = self.out.root().join(RunManifest::path_for(command));
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))?;
        }
        std::fs::write(&path, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
    }
}

fn short(digest: &str) -> &str {
    &digest[..digest.len().min(12)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_four_labels() {
        assert_eq!(display_term("usdc", "const"), "Constant");
        assert_eq!(display_term("usdc", "usdc.peg_dev_lag1"), "PegDev (lag 1)");
        assert_eq!(display_term("usdc", "usdc.market_cap_lag1"), "M.Cap (lag 1)");
        assert_eq!(display_term("usdc", "DFF"), "DFF");
    }
}
