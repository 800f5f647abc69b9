//! Daily price bars, intraday returns and date alignment.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use chrono::NaiveDate;
use thiserror::Error;

use crate::numfmt::fmt_f64;

const DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Error)]
pub enum MarketDataError {
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("missing required column `{0}` in header")]
    MissingColumn(&'static str),

    #[error("row {row}: malformed number `{value}` in column `{column}`")]
    MalformedNumber {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}: unparseable date `{value}` (expected YYYY-MM-DD)")]
    BadDate { row: usize, value: String },

    #[error("row {row}: duplicate date {date}")]
    DuplicateDate { row: usize, date: NaiveDate },

    #[error("row {row}: non-positive {column} price {value}")]
    NonPositivePrice {
        row: usize,
        column: &'static str,
        value: f64,
    },

    #[error("row {row}: non-finite return {value}")]
    NonFiniteReturn { row: usize, value: f64 },

    #[error("series `{0}` has no rows")]
    Empty(String),

    #[error("dates of series `{0}` are not strictly increasing")]
    Unordered(String),

    #[error("series `{a}` and `{b}` share no trading dates")]
    EmptyIntersection { a: String, b: String },
}

/// One trading day's opening and closing level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceBar {
    pub date: NaiveDate,
    pub open: f64,
    pub close: f64,
}

impl PriceBar {
    pub fn new(date: NaiveDate, open: f64, close: f64) -> Result<Self, MarketDataError> {
        check_price(0, "open", open)?;
        check_price(0, "close", close)?;
        Ok(Self { date, open, close })
    }

    /// Intraday return `(close - open) / open`.
    pub fn intraday_return(&self) -> f64 {
        (self.close - self.open) / self.open
    }
}

fn check_price(row: usize, column: &'static str, value: f64) -> Result<(), MarketDataError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(MarketDataError::NonPositivePrice { row, column, value })
    }
}

/// Date-ordered daily bars for a single instrument.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    instrument_id: String,
    bars: Vec<PriceBar>,
}

impl PriceSeries {
    /// Builds a series from bars that are already strictly increasing in date.
    pub fn new(
        instrument_id: impl Into<String>,
        bars: Vec<PriceBar>,
    ) -> Result<Self, MarketDataError> {
        let instrument_id = instrument_id.into();
        if bars.is_empty() {
            return Err(MarketDataError::Empty(instrument_id));
        }
        if bars.windows(2).any(|w| w[0].date >= w[1].date) {
            return Err(MarketDataError::Unordered(instrument_id));
        }
        for bar in &bars {
            check_price(0, "open", bar.open)?;
            check_price(0, "close", bar.close)?;
        }
        Ok(Self {
            instrument_id,
            bars,
        })
    }

    pub fn instrument_id(&self) -> &str {
        &self.instrument_id
    }

    pub fn bars(&self) -> &[PriceBar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    /// Writes the series back out in the `date,open,close` input schema.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), MarketDataError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["date", "open", "close"])?;
        for bar in &self.bars {
            w.write_record([
                bar.date.format(DATE_FORMAT).to_string(),
                fmt_f64(bar.open),
                fmt_f64(bar.close),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Result of reading a price file: the series plus any header columns that
/// were present but not used.
#[derive(Debug, Clone)]
pub struct PriceCsv {
    pub series: PriceSeries,
    pub ignored_columns: Vec<String>,
}

/// Parses `date,open,close` CSV (extra columns ignored) into a sorted series.
pub fn parse_price_csv<R: Read>(raw: R) -> Result<PriceSeries, MarketDataError> {
    read_price_csv("prices", raw).map(|p| p.series)
}

/// Like [`parse_price_csv`] but names the instrument and reports ignored columns.
///
/// Row numbers in errors count the header as row 1.
pub fn read_price_csv<R: Read>(instrument_id: &str, raw: R) -> Result<PriceCsv, MarketDataError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(raw);
    let headers = reader.headers()?.clone();
    let find = |name: &'static str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or(MarketDataError::MissingColumn(name))
    };
    let date_col = find("date")?;
    let open_col = find("open")?;
    let close_col = find("close")?;
    let ignored_columns = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| ![date_col, open_col, close_col].contains(i))
        .map(|(_, h)| h.to_string())
        .collect();

    let mut rows: Vec<(usize, PriceBar)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = record.position().map_or(i + 2, |p| p.line() as usize);
        let field = |col: usize| record.get(col).unwrap_or("");
        let date_raw = field(date_col);
        let date = NaiveDate::parse_from_str(date_raw, DATE_FORMAT).map_err(|_| {
            MarketDataError::BadDate {
                row,
                value: date_raw.to_string(),
            }
        })?;
        let number = |col: usize, name: &'static str| -> Result<f64, MarketDataError> {
            let raw = field(col);
            let value: f64 = raw.parse().map_err(|_| MarketDataError::MalformedNumber {
                row,
                column: name.to_string(),
                value: raw.to_string(),
            })?;
            check_price(row, name, value)?;
            Ok(value)
        };
        let open = number(open_col, "open")?;
        let close = number(close_col, "close")?;
        rows.push((row, PriceBar { date, open, close }));
    }

    // Stable sort keeps file order among equal dates, so the duplicate
    // reported is the later row.
    rows.sort_by_key(|(_, bar)| bar.date);
    for w in rows.windows(2) {
        if w[0].1.date == w[1].1.date {
            let row = w[0].0.max(w[1].0);
            return Err(MarketDataError::DuplicateDate {
                row,
                date: w[1].1.date,
            });
        }
    }
    let bars = rows.into_iter().map(|(_, bar)| bar).collect();
    Ok(PriceCsv {
        series: PriceSeries::new(instrument_id, bars)?,
        ignored_columns,
    })
}

/// Daily return entries for one instrument.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    instrument_id: String,
    entries: Vec<(NaiveDate, f64)>,
}

impl ReturnSeries {
    pub fn new(
        instrument_id: impl Into<String>,
        entries: Vec<(NaiveDate, f64)>,
    ) -> Result<Self, MarketDataError> {
        let instrument_id = instrument_id.into();
        if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(MarketDataError::Unordered(instrument_id));
        }
        if let Some((i, &(_, value))) = entries.iter().enumerate().find(|(_, e)| !e.1.is_finite()) {
            return Err(MarketDataError::NonFiniteReturn { row: i + 2, value });
        }
        Ok(Self {
            instrument_id,
            entries,
        })
    }

    pub fn instrument_id(&self) -> &str {
        &self.instrument_id
    }

    pub fn entries(&self) -> &[(NaiveDate, f64)] {
        &self.entries
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.1).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Position of the first entry dated on or after `date`.
    pub fn position_on_or_after(&self, date: NaiveDate) -> Option<usize> {
        let i = self.entries.partition_point(|e| e.0 < date);
        (i < self.entries.len()).then_some(i)
    }

    /// Writes `date,return`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), MarketDataError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["date", "return"])?;
        for (date, r) in &self.entries {
            w.write_record([date.format(DATE_FORMAT).to_string(), fmt_f64(*r)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the `date,return` schema written by [`ReturnSeries::write_csv`].
    pub fn read_csv<R: Read>(instrument_id: &str, raw: R) -> Result<Self, MarketDataError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(raw);
        let headers = reader.headers()?.clone();
        let find = |name: &'static str| {
            headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(name))
                .ok_or(MarketDataError::MissingColumn(name))
        };
        let date_col = find("date")?;
        let ret_col = find("return")?;
        let mut entries = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let row = i + 2;
            let date_raw = record.get(date_col).unwrap_or("");
            let date = NaiveDate::parse_from_str(date_raw, DATE_FORMAT).map_err(|_| {
                MarketDataError::BadDate {
                    row,
                    value: date_raw.to_string(),
                }
            })?;
            let raw = record.get(ret_col).unwrap_or("");
            let value: f64 = raw.parse().map_err(|_| MarketDataError::MalformedNumber {
                row,
                column: "return".into(),
                value: raw.to_string(),
            })?;
            entries.push((date, value));
        }
        if entries.is_empty() {
            return Err(MarketDataError::Empty(instrument_id.to_string()));
        }
        Self::new(instrument_id, entries)
    }
}

/// Intraday return `(close - open) / open` for every bar, dates preserved.
pub fn daily_returns(series: &PriceSeries) -> ReturnSeries {
    ReturnSeries {
        instrument_id: series.instrument_id.clone(),
        entries: series
            .bars
            .iter()
            .map(|bar| (bar.date, bar.intraday_return()))
            .collect(),
    }
}

/// Restricts both series to the dates they have in common.
pub fn align_on_common_dates(
    a: &ReturnSeries,
    b: &ReturnSeries,
) -> Result<(ReturnSeries, ReturnSeries), MarketDataError> {
    let common: BTreeSet<NaiveDate> = a
        .dates()
        .collect::<BTreeSet<_>>()
        .intersection(&b.dates().collect())
        .copied()
        .collect();
    if common.is_empty() {
        return Err(MarketDataError::EmptyIntersection {
            a: a.instrument_id.clone(),
            b: b.instrument_id.clone(),
        });
    }
    let restrict = |s: &ReturnSeries| ReturnSeries {
        instrument_id: s.instrument_id.clone(),
        entries: s
            .entries
            .iter()
            .filter(|e| common.contains(&e.0))
            .copied()
            .collect(),
    };
    Ok((restrict(a), restrict(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, DATE_FORMAT).unwrap()
    }

    fn returns(id: &str, dates: &[&str]) -> ReturnSeries {
        ReturnSeries::new(id, dates.iter().map(|s| (d(s), 0.01)).collect()).unwrap()
    }

    #[test]
    fn minimal_file() {
        let s = parse_price_csv("date,open,close\n2024-07-01,100.0,102.0".as_bytes()).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.bars()[0].open, 100.0);
        assert_eq!(s.bars()[0].close, 102.0);
    }

    #[test]
    fn duplicate_date_names_row_three() {
        let raw = "date,open,close\n2024-07-01,100,101\n2024-07-01,100,99\n";
        match parse_price_csv(raw.as_bytes()) {
            Err(MarketDataError::DuplicateDate { row, .. }) => assert_eq!(row, 3),
            other => panic!("expected duplicate error, got {other:?}"),
        }
    }

    #[test]
    fn out_of_order_rows_are_sorted() {
        let raw = "date,open,close\n2024-07-02,10,11\n2024-07-01,20,21\n";
        let s = parse_price_csv(raw.as_bytes()).unwrap();
        let expected = vec![
            PriceBar::new(d("2024-07-01"), 20.0, 21.0).unwrap(),
            PriceBar::new(d("2024-07-02"), 10.0, 11.0).unwrap(),
        ];
        assert_eq!(s.bars(), expected.as_slice());
    }

    #[test]
    fn row_errors_carry_row_numbers() {
        let bad_num = "date,open,close\n2024-07-01,100,101\n2024-07-02,abc,99\n";
        assert!(matches!(
            parse_price_csv(bad_num.as_bytes()),
            Err(MarketDataError::MalformedNumber { row: 3, .. })
        ));
        let bad_date = "date,open,close\n07/01/2024,100,101\n";
        assert!(matches!(
            parse_price_csv(bad_date.as_bytes()),
            Err(MarketDataError::BadDate { row: 2, .. })
        ));
        let neg = "date,open,close\n2024-07-01,100,101\n2024-07-02,100,0\n";
        assert!(matches!(
            parse_price_csv(neg.as_bytes()),
            Err(MarketDataError::NonPositivePrice {
                row: 3,
                column: "close",
                ..
            })
        ));
        assert!(matches!(
            parse_price_csv("date,close\n2024-07-01,1\n".as_bytes()),
            Err(MarketDataError::MissingColumn("open"))
        ));
        assert!(matches!(
            parse_price_csv("date,open,close\n".as_bytes()),
            Err(MarketDataError::Empty(_))
        ));
    }

    #[test]
    fn extra_columns_are_reported_and_ignored() {
        let raw = "Date,High,Open,Low,Close,Volume\n2024-07-01,105,100,99,102,1000\n";
        let parsed = read_price_csv("NIFTY", raw.as_bytes()).unwrap();
        assert_eq!(parsed.ignored_columns, vec!["High", "Low", "Volume"]);
        assert_eq!(parsed.series.bars()[0].close, 102.0);
    }

    #[test]
    fn return_examples() {
        let s = parse_price_csv(
            "date,open,close\n2024-07-01,100,102\n2024-07-02,50,50\n2024-07-03,80,76\n".as_bytes(),
        )
        .unwrap();
        let r = daily_returns(&s).values();
        assert_eq!(r[0], 0.02);
        assert_eq!(r[1], 0.0);
        assert_eq!(r[2], -0.05);
    }

    #[test]
    fn alignment() {
        let a = returns("a", &["2024-01-01", "2024-01-02", "2024-01-03"]);
        let b = returns("b", &["2024-01-02", "2024-01-03", "2024-01-04"]);
        let (x, y) = align_on_common_dates(&a, &b).unwrap();
        let want = vec![d("2024-01-02"), d("2024-01-03")];
        assert_eq!(x.dates().collect::<Vec<_>>(), want);
        assert_eq!(y.dates().collect::<Vec<_>>(), want);

        let (x, y) = align_on_common_dates(&a, &a).unwrap();
        assert_eq!(x, a);
        assert_eq!(y, a);

        let c = returns("c", &["2025-01-01"]);
        assert!(matches!(
            align_on_common_dates(&a, &c),
            Err(MarketDataError::EmptyIntersection { .. })
        ));
    }

    #[test]
    fn returns_csv_round_trip() {
        let a = ReturnSeries::new(
            "a",
            vec![(d("2024-01-01"), 0.1 / 3.0), (d("2024-01-02"), -0.02)],
        )
        .unwrap();
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        let back = ReturnSeries::read_csv("a", buf.as_slice()).unwrap();
        assert_eq!(back, a);
    }

    fn arb_series() -> impl Strategy<Value = PriceSeries> {
        prop::collection::vec((1u32..2000, 1.0f64..50_000.0, 1.0f64..50_000.0), 1..40).prop_map(
            |rows| {
                let mut date = d("2020-01-01");
                let bars = rows
                    .into_iter()
                    .map(|(gap, open, close)| {
                        date += chrono::Duration::days(gap as i64 % 5 + 1);
                        PriceBar { date, open, close }
                    })
                    .collect();
                PriceSeries::new("p", bars).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn returns_preserve_length_and_dates(s in arb_series()) {
            let r = daily_returns(&s);
            prop_assert_eq!(r.len(), s.len());
            for (bar, (date, _)) in s.bars().iter().zip(r.entries()) {
                prop_assert_eq!(bar.date, *date);
            }
        }

        #[test]
        fn returns_are_scale_invariant(s in arb_series(), c in 0.001f64..1000.0) {
            let scaled = PriceSeries::new(
                "p",
                s.bars().iter().map(|b| PriceBar { date: b.date, open: b.open * c, close: b.close * c }).collect(),
            ).unwrap();
            for (bar, (r1, r2)) in s.bars().iter().zip(daily_returns(&s).values().into_iter().zip(daily_returns(&scaled).values())) {
                // One rounding per scaled price feeds through the difference;
                // bound the discrepancy in ulps of the price-level arithmetic.
                let ulp_scale = f64::EPSILON * (bar.open.abs() + bar.close.abs()) / bar.open;
                prop_assert!((r1 - r2).abs() <= 2.0 * ulp_scale, "{} vs {}", r1, r2);
            }
        }

        #[test]
        fn price_csv_round_trips(s in arb_series()) {
            let mut buf = Vec::new();
            s.write_csv(&mut buf).unwrap();
            let back = parse_price_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back.bars(), s.bars());
        }
    }
}
