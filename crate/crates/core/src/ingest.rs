//! Loading and aligning raw market data.
//!
//! Three sources feed the toolkit: CoinGecko price exports
//! (`snapped_at,price,market_cap,total_volume`), FRED series (`DATE,<ID>`),
//! and the FDIC failed-bank list together with a yearly bank-count table.
//! Everything ends up on a single daily calendar in an [`AlignedPanel`].

use std::collections::{BTreeMap, HashMap};
use std::io::Read;
use std::path::Path;

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Years included in the bank-failure aggregation.
pub const FAILURE_YEARS: std::ops::RangeInclusive<i32> = 2019..=2025;

/// Sentinel FRED uses for missing observations.
pub const FRED_MISSING: &str = ".";

/// Parses the date forms found in real exports: ISO dates, CoinGecko
/// `snapped_at` timestamps (`2023-03-10 00:00:00 UTC`), RFC 3339 and the
/// FDIC list's `10-Mar-23`. Timestamps are truncated to their UTC date.
pub fn parse_date(raw: &str) -> Option<NaiveDate> {
    let s = raw.trim();
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some(d);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.naive_utc().date());
    }
    if let Some(stripped) = s.strip_suffix(" UTC") {
        if let Ok(dt) = NaiveDateTime::parse_from_str(stripped, "%Y-%m-%d %H:%M:%S") {
            return Some(dt.date());
        }
    }
    if let Ok(dt) = DateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S %z") {
        return Some(dt.naive_utc().date());
    }
    if let Ok(dt) = NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S") {
        return Some(dt.date());
    }
    for fmt in ["%d-%b-%y", "%d-%b-%Y", "%m/%d/%Y"] {
        if let Ok(d) = NaiveDate::parse_from_str(s, fmt) {
            return Some(d);
        }
    }
    None
}

/// Column-name aliases for coin exports. Matching is exact after trimming and
/// lower-casing; the first alias present in the header wins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeaderAliases {
    pub date: Vec<String>,
    pub price: Vec<String>,
    pub market_cap: Vec<String>,
    pub total_volume: Vec<String>,
}

impl Default for HeaderAliases {
    fn default() -> Self {
        let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        Self {
            date: v(&["snapped_at", "date", "timestamp"]),
            price: v(&["price"]),
            market_cap: v(&["market_cap"]),
            total_volume: v(&["total_volume", "volume"]),
        }
    }
}

fn header_index(headers: &csv::StringRecord) -> HashMap<String, usize> {
    headers
        .iter()
        .enumerate()
        .map(|(i, h)| (h.trim_start_matches('\u{feff}').trim().to_lowercase(), i))
        .collect()
}

fn find_column(
    index: &HashMap<String, usize>,
    aliases: &[String],
    canonical: &str,
) -> Result<usize> {
    aliases
        .iter()
        .find_map(|a| index.get(&a.trim().to_lowercase()).copied())
        .ok_or_else(|| Error::MissingColumn {
            column: canonical.to_string(),
        })
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut buf))
        .map_err(|e| Error::io(path, e))?;
    Ok(buf)
}

fn reader_for(bytes: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes)
}

fn parse_field(raw: &str, line: u64, column: &str) -> Result<Option<f64>> {
    let s = raw.trim();
    if s.is_empty() {
        return Ok(None);
    }
    let v: f64 = s.parse().map_err(|_| Error::Parse {
        line,
        column: column.to_string(),
        value: s.to_string(),
    })?;
    if !v.is_finite() || v < 0.0 {
        return Err(Error::Parse {
            line,
            column: column.to_string(),
            value: s.to_string(),
        });
    }
    Ok(Some(v))
}

/// One daily observation of a coin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub date: NaiveDate,
    pub price: f64,
    pub market_cap: Option<f64>,
    pub total_volume: Option<f64>,
}

/// A run of calendar days with no observation, strictly between `after` and
/// `before`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gap {
    pub after: NaiveDate,
    pub before: NaiveDate,
}

impl Gap {
    pub fn missing_days(&self) -> i64 {
        (self.before - self.after).num_days() - 1
    }
}

/// Date-ordered daily history of one coin. Missing days are recorded in
/// `gaps` and never filled.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinSeries {
    pub coin_id: String,
    rows: Vec<RawRow>,
    gaps: Vec<Gap>,
}

impl CoinSeries {
    /// Sorts `rows` by date and rejects duplicate dates.
    pub fn new(coin_id: impl Into<String>, mut rows: Vec<RawRow>) -> Result<Self> {
        rows.sort_by_key(|r| r.date);
        let mut gaps = Vec::new();
        for w in rows.windows(2) {
            let days = (w[1].date - w[0].date).num_days();
            if days == 0 {
                return Err(Error::DuplicateDate(w[0].date));
            }
            if days > 1 {
                gaps.push(Gap {
                    after: w[0].date,
                    before: w[1].date,
                });
            }
        }
        Ok(Self {
            coin_id: coin_id.into(),
            rows,
            gaps,
        })
    }

    /// Builds a gap-free series from consecutive daily prices starting at
    /// `start`. Market cap and volume are left empty.
    pub fn from_prices(coin_id: impl Into<String>, start: NaiveDate, prices: &[f64]) -> Self {
        let rows = prices
            .iter()
            .enumerate()
            .map(|(i, &p)| RawRow {
                date: start + chrono::Days::new(i as u64),
                price: p,
                market_cap: None,
                total_volume: None,
            })
            .collect();
        Self::new(coin_id, rows).expect("consecutive dates are unique")
    }

    pub fn rows(&self) -> &[RawRow] {
        &self.rows
    }

    pub fn gaps(&self) -> &[Gap] {
        &self.gaps
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn prices(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.price).collect()
    }

    pub fn get(&self, date: NaiveDate) -> Option<&RawRow> {
        self.rows
            .binary_search_by_key(&date, |r| r.date)
            .ok()
            .map(|i| &self.rows[i])
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.rows.first().map(|r| r.date)
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.rows.last().map(|r| r.date)
    }

    /// Restricts the series to `[start, end]`.
    pub fn window(&self, start: NaiveDate, end: NaiveDate) -> Self {
        let rows: Vec<RawRow> = self
            .rows
            .iter()
            .filter(|r| r.date >= start && r.date <= end)
            .copied()
            .collect();
        Self::new(self.coin_id.clone(), rows).expect("subset of a valid series")
    }
}

/// Loads a CoinGecko-style export with the default header aliases.
pub fn load_coin_csv(path: impl AsRef<Path>, coin_id: &str) -> Result<CoinSeries> {
    load_coin_csv_with(path, coin_id, &HeaderAliases::default())
}

pub fn load_coin_csv_with(
    path: impl AsRef<Path>,
    coin_id: &str,
    aliases: &HeaderAliases,
) -> Result<CoinSeries> {
    let bytes = read_file(path.as_ref())?;
    parse_coin_csv(&bytes, coin_id, aliases)
}

/// Parses coin CSV content already in memory.
pub fn parse_coin_csv(bytes: &[u8], coin_id: &str, aliases: &HeaderAliases) -> Result<CoinSeries> {
    let text = String::from_utf8_lossy(bytes);
    let mut rdr = reader_for(text.as_bytes());
    let index = header_index(rdr.headers()?);
    let date_col = find_column(&index, &aliases.date, "date")?;
    let price_col = find_column(&index, &aliases.price, "price")?;
    let mcap_col = find_column(&index, &aliases.market_cap, "market_cap")?;
    let vol_col = find_column(&index, &aliases.total_volume, "total_volume")?;

    let mut rows = Vec::new();
    let mut seen: BTreeMap<NaiveDate, u64> = BTreeMap::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let field = |i: usize| record.get(i).unwrap_or("");
        let date = parse_date(field(date_col)).ok_or_else(|| Error::Parse {
            line,
            column: "date".into(),
            value: field(date_col).to_string(),
        })?;
        if seen.insert(date, line).is_some() {
            return Err(Error::DuplicateDate(date));
        }
        let price = parse_field(field(price_col), line, "price")?.ok_or_else(|| Error::Parse {
            line,
            column: "price".into(),
            value: String::new(),
        })?;
        rows.push(RawRow {
            date,
            price,
            market_cap: parse_field(field(mcap_col), line, "market_cap")?,
            total_volume: parse_field(field(vol_col), line, "total_volume")?,
        });
    }
    CoinSeries::new(coin_id, rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Daily,
    Monthly,
}

/// A FRED series: strictly increasing dates with their values.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroSeries {
    pub series_id: String,
    pub frequency: Frequency,
    pub observations: Vec<(NaiveDate, f64)>,
}

impl MacroSeries {
    /// Most recent observation on or before `date`.
    pub fn last_on_or_before(&self, date: NaiveDate) -> Option<f64> {
        match self.observations.binary_search_by_key(&date, |o| o.0) {
            Ok(i) => Some(self.observations[i].1),
            Err(0) => None,
            Err(i) => Some(self.observations[i - 1].1),
        }
    }

    pub fn on(&self, date: NaiveDate) -> Option<f64> {
        self.observations
            .binary_search_by_key(&date, |o| o.0)
            .ok()
            .map(|i| self.observations[i].1)
    }
}

/// Side information from a load that did not prevent it from succeeding.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadReport {
    pub dropped: usize,
    pub warnings: Vec<String>,
}

pub fn load_macro_csv(
    path: impl AsRef<Path>,
    series_id: &str,
    frequency: Frequency,
) -> Result<(MacroSeries, LoadReport)> {
    let path = path.as_ref();
    let bytes = read_file(path)?;
    parse_macro_csv(&bytes, series_id, frequency)
        .map_err(|e| match e {
            Error::NoObservations(_) => Error::NoObservations(path.display().to_string()),
            other => other,
        })
}

/// Parses a two-column `(date, value)` FRED export.
pub fn parse_macro_csv(
    bytes: &[u8],
    series_id: &str,
    frequency: Frequency,
) -> Result<(MacroSeries, LoadReport)> {
    let text = String::from_utf8_lossy(bytes);
    let mut rdr = reader_for(text.as_bytes());
    let mut report = LoadReport::default();
    let mut observations: Vec<(NaiveDate, f64)> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let raw_date = record.get(0).unwrap_or("");
        let raw_value = record.get(1).unwrap_or("").trim();
        if raw_date.trim().is_empty() && raw_value.is_empty() {
            continue;
        }
        let date = parse_date(raw_date).ok_or_else(|| Error::Parse {
            line,
            column: "date".into(),
            value: raw_date.to_string(),
        })?;
        if raw_value == FRED_MISSING || raw_value.is_empty() {
            report.dropped += 1;
            continue;
        }
        let value: f64 = raw_value
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::Parse {
                line,
                column: series_id.to_string(),
                value: raw_value.to_string(),
            })?;
        if let Some(&(prev, _)) = observations.last() {
            if date <= prev {
                return Err(Error::Validation(format!(
                    "{series_id}: dates not increasing at line {line} ({date} after {prev})"
                )));
            }
        }
        observations.push((date, value));
    }
    if observations.is_empty() {
        return Err(Error::NoObservations(series_id.to_string()));
    }
    if let Some(w) = frequency_warning(&observations, frequency) {
        report.warnings.push(format!("{series_id}: {w}"));
    }
    Ok((
        MacroSeries {
            series_id: series_id.to_string(),
            frequency,
            observations,
        },
        report,
    ))
}

fn frequency_warning(obs: &[(NaiveDate, f64)], frequency: Frequency) -> Option<String> {
    if obs.len() < 2 {
        return None;
    }
    let mut spacing: Vec<i64> = obs.windows(2).map(|w| (w[1].0 - w[0].0).num_days()).collect();
    spacing.sort_unstable();
    let median = spacing[spacing.len() / 2];
    match frequency {
        Frequency::Monthly if median < 20 => Some(format!(
            "declared monthly but median spacing is {median} day(s)"
        )),
        Frequency::Daily if median > 5 => Some(format!(
            "declared daily but median spacing is {median} days"
        )),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillPolicy {
    /// Values appear only on days with an observation.
    None,
    /// Each day carries the most recent prior observation; never back-filled.
    ForwardFill,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelColumn {
    pub name: String,
    pub fill: FillPolicy,
    pub values: Vec<Option<f64>>,
}

/// Daily panel over a contiguous calendar window.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPanel {
    pub dates: Vec<NaiveDate>,
    pub columns: Vec<PanelColumn>,
}

pub fn price_column(coin: &str) -> String {
    format!("{coin}.price")
}

pub fn market_cap_column(coin: &str) -> String {
    format!("{coin}.market_cap")
}

pub fn volume_column(coin: &str) -> String {
    format!("{coin}.total_volume")
}

impl AlignedPanel {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<&PanelColumn> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn values(&self, name: &str) -> Result<&[Option<f64>]> {
        self.column(name)
            .map(|c| c.values.as_slice())
            .ok_or_else(|| Error::MissingColumn {
                column: name.to_string(),
            })
    }

    /// Adds (or replaces) a derived column aligned with `dates`.
    pub fn set_column(&mut self, name: &str, values: Vec<Option<f64>>) -> Result<()> {
        if values.len() != self.dates.len() {
            return Err(Error::Validation(format!(
                "column {name} has {} values for {} dates",
                values.len(),
                self.dates.len()
            )));
        }
        let col = PanelColumn {
            name: name.to_string(),
            fill: FillPolicy::None,
            values,
        };
        match self.columns.iter_mut().find(|c| c.name == name) {
            Some(existing) => *existing = col,
            None => self.columns.push(col),
        }
        Ok(())
    }

    /// Canonical CSV: ISO dates, empty cells for nulls, shortest round-trip
    /// decimal representation. Forward-filled columns carry a `:ffill` suffix
    /// so the fill policy survives a reload.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["date".to_string()];
        header.extend(self.columns.iter().map(|c| match c.fill {
            FillPolicy::None => c.name.clone(),
            FillPolicy::ForwardFill => format!("{}:ffill", c.name),
        }));
        w.write_record(&header)?;
        for (i, d) in self.dates.iter().enumerate() {
            let mut rec = vec![d.format("%Y-%m-%d").to_string()];
            rec.extend(
                self.columns
                    .iter()
                    .map(|c| c.values[i].map(|v| v.to_string()).unwrap_or_default()),
            );
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<panel csv>", e))?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut columns: Vec<PanelColumn> = rdr
            .headers()?
            .iter()
            .skip(1)
            .map(|h| {
                let (name, fill) = match h.strip_suffix(":ffill") {
                    Some(n) => (n.to_string(), FillPolicy::ForwardFill),
                    None => (h.to_string(), FillPolicy::None),
                };
                PanelColumn {
                    name,
                    fill,
                    values: Vec::new(),
                }
            })
            .collect();
        let mut dates = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let raw = record.get(0).unwrap_or("");
            dates.push(parse_date(raw).ok_or_else(|| Error::Parse {
                line,
                column: "date".into(),
                value: raw.to_string(),
            })?);
            for (j, col) in columns.iter_mut().enumerate() {
                let cell = record.get(j + 1).unwrap_or("");
                let v = if cell.is_empty() {
                    None
                } else {
                    Some(cell.parse::<f64>().map_err(|_| Error::Parse {
                        line,
                        column: col.name.clone(),
                        value: cell.to_string(),
                    })?)
                };
                col.values.push(v);
            }
        }
        Ok(Self { dates, columns })
    }
}

/// Aligns coin and macro series on the daily calendar `[start, end]`.
///
/// Coin columns are null on days without an observation. Monthly macro
/// columns are forward-filled from the latest observation on or before each
/// day; daily macro columns are taken as observed.
pub fn align_panel(
    coins: &[CoinSeries],
    macros: &[MacroSeries],
    start: NaiveDate,
    end: NaiveDate,
) -> Result<AlignedPanel> {
    if start > end {
        return Err(Error::Validation(format!("window start {start} is after end {end}")));
    }
    if coins.is_empty() {
        return Err(Error::Validation("at least one coin series is required".into()));
    }
    let dates: Vec<NaiveDate> = start.iter_days().take_while(|d| *d <= end).collect();

    let mut columns = Vec::new();
    let mut observed = 0usize;
    for coin in coins {
        let mut price = Vec::with_capacity(dates.len());
        let mut mcap = Vec::with_capacity(dates.len());
        let mut vol = Vec::with_capacity(dates.len());
        for d in &dates {
            let row = coin.get(*d);
            observed += row.is_some() as usize;
            price.push(row.map(|r| r.price));
            mcap.push(row.and_then(|r| r.market_cap));
            vol.push(row.and_then(|r| r.total_volume));
        }
        for (name, values) in [
            (price_column(&coin.coin_id), price),
            (market_cap_column(&coin.coin_id), mcap),
            (volume_column(&coin.coin_id), vol),
        ] {
            columns.push(PanelColumn {
                name,
                fill: FillPolicy::None,
                values,
            });
        }
    }
    if observed == 0 {
        return Err(Error::NoObservations(format!(
            "coin data within {start}..={end}"
        )));
    }

    for m in macros {
        let (fill, values) = match m.frequency {
            Frequency::Monthly => (
                FillPolicy::ForwardFill,
                dates.iter().map(|d| m.last_on_or_before(*d)).collect(),
            ),
            Frequency::Daily => (FillPolicy::None, dates.iter().map(|d| m.on(*d)).collect()),
        };
        columns.push(PanelColumn {
            name: m.series_id.clone(),
            fill,
            values,
        });
    }
    Ok(AlignedPanel { dates, columns })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearCounts {
    pub failures: u64,
    pub total_banks: u64,
}

/// Per-year failures and bank counts restricted to [`FAILURE_YEARS`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankFailureTable {
    years: BTreeMap<i32, YearCounts>,
}

impl BankFailureTable {
    pub fn new(years: BTreeMap<i32, YearCounts>) -> Result<Self> {
        for (year, c) in &years {
            if !FAILURE_YEARS.contains(year) {
                return Err(Error::Validation(format!("year {year} outside failure window")));
            }
            if c.total_banks == 0 {
                return Err(Error::Validation(format!("year {year}: total_banks must be > 0")));
            }
            if c.failures > c.total_banks {
                return Err(Error::Validation(format!(
                    "year {year}: {} failures exceed {} banks",
                    c.failures, c.total_banks
                )));
            }
        }
        Ok(Self { years })
    }

    pub fn years(&self) -> &BTreeMap<i32, YearCounts> {
        &self.years
    }

    pub fn total_failures(&self) -> u64 {
        self.years.values().map(|c| c.failures).sum()
    }

    pub fn total_banks(&self) -> u64 {
        self.years.values().map(|c| c.total_banks).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailureLoad {
    pub table: BankFailureTable,
    /// Failure records dated outside [`FAILURE_YEARS`].
    pub skipped: usize,
}

const CLOSING_DATE_ALIASES: [&str; 4] = ["closing date", "closing_date", "closingdate", "date"];

/// Loads the FDIC failed-bank list and a `year,total_banks` table.
pub fn load_failures(
    failed_list_path: impl AsRef<Path>,
    totals_path: impl AsRef<Path>,
) -> Result<FailureLoad> {
    let failed = read_file(failed_list_path.as_ref())?;
    let totals = read_file(totals_path.as_ref())?;
    parse_failures(&failed, &totals)
}

pub fn parse_failures(failed_list: &[u8], totals: &[u8]) -> Result<FailureLoad> {
    let aliases: Vec<String> = CLOSING_DATE_ALIASES.iter().map(|s| s.to_string()).collect();

    let text = String::from_utf8_lossy(failed_list);
    let mut rdr = reader_for(text.as_bytes());
    let date_col = find_column(&header_index(rdr.headers()?), &aliases, "Closing Date")?;
    let mut failures: BTreeMap<i32, u64> = BTreeMap::new();
    let mut skipped = 0;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let raw = record.get(date_col).unwrap_or("");
        if raw.trim().is_empty() && record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let year = parse_date(raw)
            .map(|d| d.year())
            .or_else(|| raw.trim().parse::<i32>().ok())
            .ok_or_else(|| Error::Parse {
                line,
                column: "Closing Date".into(),
                value: raw.to_string(),
            })?;
        if FAILURE_YEARS.contains(&year) {
            *failures.entry(year).or_default() += 1;
        } else {
            skipped += 1;
        }
    }

    let text = String::from_utf8_lossy(totals);
    let mut rdr = reader_for(text.as_bytes());
    let index = header_index(rdr.headers()?);
    let year_col = find_column(&index, &["year".to_string()], "year")?;
    let total_col = find_column(
        &index,
        &["total_banks".to_string(), "total".to_string(), "banks".to_string()],
        "total_banks",
    )?;
    let mut years: BTreeMap<i32, YearCounts> = BTreeMap::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let parse_int = |col: usize, name: &str| -> Result<i64> {
            let raw = record.get(col).unwrap_or("").trim().replace(',', "");
            raw.parse::<i64>().map_err(|_| Error::Parse {
                line,
                column: name.to_string(),
                value: raw.clone(),
            })
        };
        let year = parse_int(year_col, "year")? as i32;
        let total = parse_int(total_col, "total_banks")?;
        if total < 0 {
            return Err(Error::Validation(format!("line {line}: negative total_banks")));
        }
        if FAILURE_YEARS.contains(&year) {
            years.insert(
                year,
                YearCounts {
                    failures: 0,
                    total_banks: total as u64,
                },
            );
        }
    }
    for (year, n) in failures {
        match years.get_mut(&year) {
            Some(c) => c.failures = n,
            None => {
                return Err(Error::Validation(format!(
                    "{n} failure(s) in {year} but no total bank count for that year"
                )))
            }
        }
    }
    Ok(FailureLoad {
        table: BankFailureTable::new(years)?,
        skipped,
    })
}
