//! Price and sector-label ingestion.
//!
//! Loads long-format price CSV (`date,ticker,close`), aligns every ticker
//! onto the union of all observed trading dates, and imputes missing closes
//! with the most recent observed price of the same ticker. Sector metadata
//! comes from a second CSV (`ticker,business_sector,category`).
//!
//! Imputed cells are tracked in [`PriceTable::filled`] so downstream reports
//! can audit how much of the grid was observed versus carried forward.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;

use chrono::NaiveDate;
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fmt::sig17;

/// Errors produced while loading or aligning price and sector data.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("row {row}: {detail}")]
    MalformedRow { row: u64, detail: String },
    #[error("row {row}: non-positive price {value} for {ticker}")]
    NonPositivePrice { row: u64, ticker: String, value: f64 },
    #[error("duplicate cell: {ticker} already has a price on {date}")]
    DuplicateCell { ticker: String, date: NaiveDate },
    #[error("dataset too small: {n_tickers} tickers x {n_dates} dates (need at least 2 x 2)")]
    TooSmall { n_tickers: usize, n_dates: usize },
    #[error("{ticker} has no price on or before {date} and backfill is disabled")]
    LeadingGapUnfillable { ticker: String, date: NaiveDate },
    #[error("{ticker} has no observations")]
    EmptyTicker { ticker: String },
    #[error("row {row}: unknown category label {label:?}")]
    UnknownCategoryLabel { row: u64, label: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// One observed closing price.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceRecord {
    pub date: NaiveDate,
    pub ticker: String,
    pub close: f64,
}

/// Aligned (ticker x date) close-price grid.
///
/// `prices[[i, t]]` is the close of `tickers[i]` on `dates[t]`; `filled`
/// marks cells that were imputed rather than observed. Tickers are ordered
/// lexicographically, dates strictly ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceTable {
    pub tickers: Vec<String>,
    pub dates: Vec<NaiveDate>,
    pub prices: Array2<f64>,
    pub filled: Array2<bool>,
}

/// Profit category of a stock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Category {
    St,
    BlueChip,
    General,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::St, Category::BlueChip, Category::General];

    pub fn label(self) -> &'static str {
        match self {
            Category::St => "ST",
            Category::BlueChip => "BLUE_CHIP",
            Category::General => "GENERAL",
        }
    }

    /// Parse a category cell: case-insensitive, empty means GENERAL.
    pub fn parse(raw: &str) -> Option<Category> {
        let token = raw.trim();
        if token.is_empty() {
            return Some(Category::General);
        }
        match token.to_ascii_uppercase().as_str() {
            "ST" => Some(Category::St),
            "BLUE_CHIP" => Some(Category::BlueChip),
            "GENERAL" => Some(Category::General),
            _ => None,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Business sector and profit category of one ticker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorInfo {
    pub business_sector: String,
    pub category: Category,
}

impl SectorInfo {
    /// Fallback for tickers absent from the sector file.
    pub fn unknown() -> Self {
        SectorInfo {
            business_sector: "UNKNOWN".to_owned(),
            category: Category::General,
        }
    }
}

/// Ticker -> sector/category lookup.
///
/// Tickers without an entry resolve to sector `UNKNOWN`, category `GENERAL`,
/// so an analysis never fails just because labels are incomplete.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SectorMap {
    entries: BTreeMap<String, SectorInfo>,
}

impl SectorMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, ticker: impl Into<String>, info: SectorInfo) {
        self.entries.insert(ticker.into(), info);
    }

    pub fn get(&self, ticker: &str) -> SectorInfo {
        self.entries.get(ticker).cloned().unwrap_or_else(SectorInfo::unknown)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// What to do with cells before a ticker's first observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LeadingGapPolicy {
    /// Backfill from the first observed price and mark the cells filled.
    #[default]
    Backfill,
    /// Refuse the dataset, naming the offending ticker.
    Reject,
}

/// Parse long-format price CSV with header `date,ticker,close`.
pub fn parse_price_records<R: Read>(source: R) -> Result<Vec<PriceRecord>, IngestError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["date", "ticker", "close"] {
        return Err(IngestError::MalformedRow {
            row: 1,
            detail: format!("expected header date,ticker,close, got {:?}", headers),
        });
    }

    let mut records = Vec::new();
    for item in reader.records() {
        let record = item?;
        let row = record.position().map_or(0, |p| p.line());
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d").map_err(|e| {
            IngestError::MalformedRow {
                row,
                detail: format!("bad date {:?}: {e}", &record[0]),
            }
        })?;
        let ticker = record[1].trim().to_owned();
        if ticker.is_empty() {
            return Err(IngestError::MalformedRow {
                row,
                detail: "empty ticker".to_owned(),
            });
        }
        let close: f64 = record[2].trim().parse().map_err(|e| IngestError::MalformedRow {
            row,
            detail: format!("bad close {:?}: {e}", &record[2]),
        })?;
        if !close.is_finite() {
            return Err(IngestError::MalformedRow {
                row,
                detail: format!("non-finite close {:?}", &record[2]),
            });
        }
        if close <= 0.0 {
            return Err(IngestError::NonPositivePrice { row, ticker, value: close });
        }
        records.push(PriceRecord { date, ticker, close });
    }
    Ok(records)
}

/// Load prices and align them onto the union calendar.
///
/// The date axis is the sorted union of all dates observed for any ticker;
/// tickers are ordered lexicographically; gaps are imputed per `policy` and
/// the previous-day rule.
pub fn load_prices<R: Read>(source: R, policy: LeadingGapPolicy) -> Result<PriceTable, IngestError> {
    let records = parse_price_records(source)?;

    let mut by_ticker: BTreeMap<String, BTreeMap<NaiveDate, f64>> = BTreeMap::new();
    let mut date_set: BTreeSet<NaiveDate> = BTreeSet::new();
    for rec in records {
        date_set.insert(rec.date);
        let row = by_ticker.entry(rec.ticker.clone()).or_default();
        if row.insert(rec.date, rec.close).is_some() {
            return Err(IngestError::DuplicateCell { ticker: rec.ticker, date: rec.date });
        }
    }

    let dates: Vec<NaiveDate> = date_set.into_iter().collect();
    let tickers: Vec<String> = by_ticker.keys().cloned().collect();
    if tickers.len() < 2 || dates.len() < 2 {
        return Err(IngestError::TooSmall {
            n_tickers: tickers.len(),
            n_dates: dates.len(),
        });
    }

    let cells: Vec<Vec<Option<f64>>> = tickers
        .iter()
        .map(|tk| {
            let obs = &by_ticker[tk];
            dates.iter().map(|d| obs.get(d).copied()).collect()
        })
        .collect();

    forward_fill(tickers, dates, &cells, policy)
}

/// Impute the missing cells of a partial grid.
///
/// Every missing cell takes the most recent observed price of the same
/// ticker; cells before the first observation are backfilled from it (or
/// rejected, per `policy`). Fill flags are set exactly on imputed cells.
pub fn forward_fill(
    tickers: Vec<String>,
    dates: Vec<NaiveDate>,
    cells: &[Vec<Option<f64>>],
    policy: LeadingGapPolicy,
) -> Result<PriceTable, IngestError> {
    let n = tickers.len();
    let n_dates = dates.len();
    assert_eq!(cells.len(), n, "one cell row per ticker");
    assert!(dates.windows(2).all(|w| w[0] < w[1]), "dates must be strictly ascending");

    let mut prices = Array2::zeros((n, n_dates));
    let mut filled = Array2::from_elem((n, n_dates), false);

    for (i, row) in cells.iter().enumerate() {
        assert_eq!(row.len(), n_dates, "cell row length must match the date axis");
        let first_obs = row.iter().position(Option::is_some).ok_or_else(|| {
            IngestError::EmptyTicker { ticker: tickers[i].clone() }
        })?;
        if first_obs > 0 && policy == LeadingGapPolicy::Reject {
            return Err(IngestError::LeadingGapUnfillable {
                ticker: tickers[i].clone(),
                date: dates[0],
            });
        }

        let first_price = row[first_obs].expect("position() found an observation");
        for t in 0..first_obs {
            prices[[i, t]] = first_price;
            filled[[i, t]] = true;
        }
        let mut last = first_price;
        for t in first_obs..n_dates {
            match row[t] {
                Some(p) => {
                    prices[[i, t]] = p;
                    last = p;
                }
                None => {
                    prices[[i, t]] = last;
                    filled[[i, t]] = true;
                }
            }
        }
    }

    Ok(PriceTable { tickers, dates, prices, filled })
}

/// Load sector metadata CSV with header `ticker,business_sector,category`.
pub fn load_sectors<R: Read>(source: R) -> Result<SectorMap, IngestError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["ticker", "business_sector", "category"] {
        return Err(IngestError::MalformedRow {
            row: 1,
            detail: format!("expected header ticker,business_sector,category, got {:?}", headers),
        });
    }

    let mut map = SectorMap::new();
    for item in reader.records() {
        let record = item?;
        let row = record.position().map_or(0, |p| p.line());
        let ticker = record[0].trim().to_owned();
        if ticker.is_empty() {
            return Err(IngestError::MalformedRow {
                row,
                detail: "empty ticker".to_owned(),
            });
        }
        if map.entries.contains_key(&ticker) {
            return Err(IngestError::MalformedRow {
                row,
                detail: format!("duplicate ticker {ticker:?}"),
            });
        }
        let category = Category::parse(&record[2]).ok_or_else(|| IngestError::UnknownCategoryLabel {
            row,
            label: record[2].to_owned(),
        })?;
        map.insert(
            ticker,
            SectorInfo {
                business_sector: record[1].trim().to_owned(),
                category,
            },
        );
    }
    Ok(map)
}

impl PriceTable {
    pub fn n_stocks(&self) -> usize {
        self.tickers.len()
    }

    pub fn n_dates(&self) -> usize {
        self.dates.len()
    }

    /// Long CSV of the observed cells only (imputed cells are omitted, so a
    /// reload reproduces the table including fill flags).
    pub fn to_long_csv(&self) -> String {
        let mut out = String::from("date,ticker,close\n");
        for (i, ticker) in self.tickers.iter().enumerate() {
            for (t, date) in self.dates.iter().enumerate() {
                if !self.filled[[i, t]] {
                    out.push_str(&format!("{date},{ticker},{}\n", sig17(self.prices[[i, t]])));
                }
            }
        }
        out
    }

    /// Wide audit dump: `date` column, then one column per ticker.
    pub fn to_wide_csv(&self) -> String {
        let mut out = String::from("date");
        for ticker in &self.tickers {
            out.push(',');
            out.push_str(ticker);
        }
        out.push('\n');
        for (t, date) in self.dates.iter().enumerate() {
            out.push_str(&date.to_string());
            for i in 0..self.tickers.len() {
                out.push(',');
                out.push_str(&sig17(self.prices[[i, t]]));
            }
            out.push('\n');
        }
        out
    }
}
