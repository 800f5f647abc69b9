//! CAPM event study: expected and abnormal returns, AAR/CAAR aggregation over
//! a window of trading days, and the 11-point interpolation grid.

use std::io::{Read, Write};

use chrono::NaiveDate;
use thiserror::Error;

use crate::market_data::{align_on_common_dates, MarketDataError, ReturnSeries};
use crate::numfmt::fmt_f64;
use crate::regression::{ols, RegressionError};

/// Trading days on each side of the event used throughout the case study.
pub const DEFAULT_WINDOW_DAYS: usize = 15;
/// Length of the pre-event beta estimation window.
pub const DEFAULT_ESTIMATION_DAYS: usize = 120;
/// Number of nodes on the interpolation grid.
pub const GRID_POINTS: usize = 11;
/// Window length the grid subsampler expects (−15..=+15).
pub const GRID_WINDOW_LEN: usize = 31;
/// Stride between consecutive grid days.
pub const GRID_STRIDE: usize = 3;

#[derive(Debug, Error)]
pub enum EventStudyError {
    #[error(transparent)]
    MarketData(#[from] MarketDataError),

    #[error("CAPM regression failed: {0}")]
    Regression(#[from] RegressionError),

    #[error("market excess returns have zero variance; beta is undefined")]
    DegenerateMarket,

    #[error("asset and market series are not aligned on identical dates")]
    NotAligned,

    #[error("non-finite CAPM parameter `{0}`")]
    NonFiniteParam(&'static str),

    #[error("insufficient history {side} the event: required {required} trading days, available {available}")]
    InsufficientHistory {
        side: &'static str,
        required: usize,
        available: usize,
    },

    #[error("ragged abnormal-return matrix: row {row} has {len} entries, expected {expected}")]
    Ragged {
        row: usize,
        len: usize,
        expected: usize,
    },

    #[error("abnormal-return matrix must have at least one security and one day")]
    EmptyPanel,

    #[error("non-finite abnormal return at security {security}, day index {day}")]
    NonFinite { security: usize, day: usize },

    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },

    #[error("invalid interpolation data: {0}")]
    InvalidData(String),

    #[error("relative days of securities disagree")]
    WindowMismatch,
}

/// CAPM coefficients for one asset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapmParams {
    pub beta: f64,
    pub intercept: f64,
    pub risk_free_daily: f64,
}

impl CapmParams {
    pub fn new(beta: f64, intercept: f64, risk_free_daily: f64) -> Result<Self, EventStudyError> {
        for (name, v) in [
            ("beta", beta),
            ("intercept", intercept),
            ("risk_free_daily", risk_free_daily),
        ] {
            if !v.is_finite() {
                return Err(EventStudyError::NonFiniteParam(name));
            }
        }
        Ok(Self {
            beta,
            intercept,
            risk_free_daily,
        })
    }
}

/// Regresses asset excess returns on market excess returns over matching dates.
pub fn estimate_capm(
    asset: &ReturnSeries,
    market: &ReturnSeries,
    risk_free_daily: f64,
) -> Result<CapmParams, EventStudyError> {
    if asset.len() != market.len() || asset.dates().ne(market.dates()) {
        return Err(EventStudyError::NotAligned);
    }
    let excess = |s: &ReturnSeries| -> Vec<f64> {
        s.entries().iter().map(|e| e.1 - risk_free_daily).collect()
    };
    let fit = ols(&excess(market), &excess(asset), 3).map_err(|e| match e {
        RegressionError::ZeroVariance => EventStudyError::DegenerateMarket,
        other => other.into(),
    })?;
    CapmParams::new(fit.slope, fit.intercept, risk_free_daily)
}

/// `R_f + β (R_m − R_f)`.
pub fn expected_return(params: &CapmParams, market_return: f64) -> f64 {
    params.risk_free_daily + params.beta * (market_return - params.risk_free_daily)
}

pub fn abnormal_return(actual: f64, expected: f64) -> f64 {
    actual - expected
}

/// Abnormal returns for N securities over T event days with their
/// cross-sectional average and running sum.
#[derive(Debug, Clone, PartialEq)]
pub struct AbnormalReturnPanel {
    securities: Vec<String>,
    ar: Vec<Vec<f64>>,
    aar: Vec<f64>,
    caar: Vec<f64>,
}

impl AbnormalReturnPanel {
    pub fn securities(&self) -> &[String] {
        &self.securities
    }

    pub fn ar(&self) -> &[Vec<f64>] {
        &self.ar
    }

    pub fn aar(&self) -> &[f64] {
        &self.aar
    }

    pub fn caar(&self) -> &[f64] {
        &self.caar
    }

    pub fn days(&self) -> usize {
        self.aar.len()
    }

    /// Replaces the default `s1..sN` labels.
    pub fn with_securities(mut self, labels: Vec<String>) -> Result<Self, EventStudyError> {
        if labels.len() != self.ar.len() {
            return Err(EventStudyError::WrongLength {
                expected: self.ar.len(),
                got: labels.len(),
            });
        }
        self.securities = labels;
        Ok(self)
    }

    /// Table rows keyed by relative day, with `x` spread evenly over [0, 1].
    pub fn rows(&self, relative_days: &[i64]) -> Result<Vec<PanelRow>, EventStudyError> {
        if relative_days.len() != self.days() {
            return Err(EventStudyError::WrongLength {
                expected: self.days(),
                got: relative_days.len(),
            });
        }
        let last = (self.days().max(2) - 1) as f64;
        Ok(relative_days
            .iter()
            .enumerate()
            .map(|(i, &day)| PanelRow {
                relative_day: day,
                x: i as f64 / last,
                aar: self.aar[i],
                caar: self.caar[i],
            })
            .collect())
    }
}

/// Averages abnormal returns across securities and accumulates left to right.
pub fn build_panel(ar: Vec<Vec<f64>>) -> Result<AbnormalReturnPanel, EventStudyError> {
    let n = ar.len();
    let t = ar.first().map_or(0, Vec::len);
    if n == 0 || t == 0 {
        return Err(EventStudyError::EmptyPanel);
    }
    for (i, row) in ar.iter().enumerate() {
        if row.len() != t {
            return Err(EventStudyError::Ragged {
                row: i,
                len: row.len(),
                expected: t,
            });
        }
        if let Some(day) = row.iter().position(|v| !v.is_finite()) {
            return Err(EventStudyError::NonFinite { security: i, day });
        }
    }
    let aar: Vec<f64> = (0..t)
        .map(|day| ar.iter().map(|row| row[day]).sum::<f64>() / n as f64)
        .collect();
    let caar = aar
        .iter()
        .scan(0.0, |acc, &v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    Ok(AbnormalReturnPanel {
        securities: (1..=n).map(|i| format!("s{i}")).collect(),
        ar,
        aar,
        caar,
    })
}

/// The trading days around an event, indexed by relative day.
#[derive(Debug, Clone, PartialEq)]
pub struct EventWindow {
    pub event_date: NaiveDate,
    pub pre_days: usize,
    pub post_days: usize,
    pub relative_days: Vec<i64>,
    pub dates: Vec<NaiveDate>,
    /// Index into the source series of the first window day.
    pub start: usize,
}

impl EventWindow {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    /// Date mapped to relative day 0.
    pub fn day_zero(&self) -> NaiveDate {
        self.dates[self.pre_days]
    }
}

/// Selects `pre` trading days before, the event day, and `post` after.
///
/// Day 0 is the first trading date on or after `event_date`.
pub fn extract_event_window(
    series: &ReturnSeries,
    event_date: NaiveDate,
    pre: usize,
    post: usize,
) -> Result<EventWindow, EventStudyError> {
    let zero =
        series
            .position_on_or_after(event_date)
            .ok_or(EventStudyError::InsufficientHistory {
                side: "after",
                required: post + 1,
                available: 0,
            })?;
    if zero < pre {
        return Err(EventStudyError::InsufficientHistory {
            side: "before",
            required: pre,
            available: zero,
        });
    }
    let after = series.len() - zero - 1;
    if after < post {
        return Err(EventStudyError::InsufficientHistory {
            side: "after",
            required: post,
            available: after,
        });
    }
    let start = zero - pre;
    let dates = series.entries()[start..=zero + post]
        .iter()
        .map(|e| e.0)
        .collect();
    Ok(EventWindow {
        event_date,
        pre_days: pre,
        post_days: post,
        relative_days: (-(pre as i64)..=post as i64).collect(),
        dates,
        start,
    })
}

/// Parameters of a full event-study run.
#[derive(Debug, Clone, PartialEq)]
pub struct EventStudyConfig {
    pub event_date: NaiveDate,
    pub pre_days: usize,
    pub post_days: usize,
    pub risk_free_daily: f64,
    /// Skips estimation and uses this beta (intercept 0) for every security.
    pub beta: Option<f64>,
    /// Trading days of the estimation window, ending the day before the event window opens.
    pub estimation_window_days: usize,
}

impl EventStudyConfig {
    pub fn new(event_date: NaiveDate) -> Self {
        Self {
            event_date,
            pre_days: DEFAULT_WINDOW_DAYS,
            post_days: DEFAULT_WINDOW_DAYS,
            risk_free_daily: 0.0,
            beta: None,
            estimation_window_days: DEFAULT_ESTIMATION_DAYS,
        }
    }
}

/// Per-security estimates and the aggregated panel.
#[derive(Debug, Clone)]
pub struct EventStudyOutcome {
    pub windows: Vec<EventWindow>,
    pub capm: Vec<CapmParams>,
    pub panel: AbnormalReturnPanel,
}

impl EventStudyOutcome {
    pub fn relative_days(&self) -> &[i64] {
        &self.windows[0].relative_days
    }
}

/// Runs returns → CAPM → AR → AAR/CAAR for each asset against one market series.
pub fn run_event_study(
    assets: &[ReturnSeries],
    market: &ReturnSeries,
    config: &EventStudyConfig,
) -> Result<EventStudyOutcome, EventStudyError> {
    if assets.is_empty() {
        return Err(EventStudyError::EmptyPanel);
    }
    let mut windows = Vec::with_capacity(assets.len());
    let mut capm = Vec::with_capacity(assets.len());
    let mut ar = Vec::with_capacity(assets.len());
    for asset in assets {
        let (a, m) = align_on_common_dates(asset, market)?;
        let window =
            extract_event_window(&a, config.event_date, config.pre_days, config.post_days)?;
        let params = match config.beta {
            Some(beta) => CapmParams::new(beta, 0.0, config.risk_free_daily)?,
            None => {
                let need = config.estimation_window_days;
                if window.start < need {
                    return Err(EventStudyError::InsufficientHistory {
                        side: "before (estimation window)",
                        required: need + config.pre_days,
                        available: window.start + config.pre_days,
                    });
                }
                let slice = |s: &ReturnSeries| {
                    ReturnSeries::new(
                        s.instrument_id(),
                        s.entries()[window.start - need..window.start].to_vec(),
                    )
                };
                estimate_capm(&slice(&a)?, &slice(&m)?, config.risk_free_daily)?
            }
        };
        let row = (window.start..window.start + window.len())
            .map(|i| {
                let expected = expected_return(&params, m.entries()[i].1);
                abnormal_return(a.entries()[i].1, expected)
            })
            .collect();
        ar.push(row);
        capm.push(params);
        windows.push(window);
    }
    let labels = assets
        .iter()
        .map(|a| a.instrument_id().to_string())
        .collect();
    let panel = build_panel(ar)?.with_securities(labels)?;
    Ok(EventStudyOutcome {
        windows,
        capm,
        panel,
    })
}

/// Strictly increasing abscissae on [0, 1] with ordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationData {
    points: Vec<(f64, f64)>,
}

impl InterpolationData {
    /// Validates nodes: at least 3, finite, x strictly increasing from 0 to 1.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, EventStudyError> {
        let invalid = |m: String| Err(EventStudyError::InvalidData(m));
        if points.len() < 3 {
            return invalid(format!("need at least 3 points, got {}", points.len()));
        }
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return invalid("non-finite coordinate".into());
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return invalid("x must be strictly increasing".into());
        }
        let (first, last) = (points[0].0, points[points.len() - 1].0);
        if first != 0.0 || last != 1.0 {
            return invalid(format!("x must span exactly [0, 1], got [{first}, {last}]"));
        }
        Ok(Self { points })
    }

    /// Rescales arbitrary strictly increasing abscissae onto [0, 1].
    pub fn normalized(points: Vec<(f64, f64)>) -> Result<Self, EventStudyError> {
        if points.len() < 3 {
            return Self::new(points);
        }
        let x0 = points[0].0;
        let span = points[points.len() - 1].0 - x0;
        if span.is_nan() || span <= 0.0 {
            return Err(EventStudyError::InvalidData(
                "x must be strictly increasing".into(),
            ));
        }
        let n = points.len();
        let scaled = points
            .into_iter()
            .enumerate()
            .map(|(i, (x, y))| {
                let u = if i == n - 1 { 1.0 } else { (x - x0) / span };
                (u, y)
            })
            .collect();
        Self::new(scaled)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Number of intervals P (one fewer than the node count).
    pub fn intervals(&self) -> usize {
        self.points.len() - 1
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    /// True when every node lies on the chord through the first and last nodes.
    pub fn is_collinear(&self) -> bool {
        let (x0, y0) = self.points[0];
        let (x1, y1) = self.points[self.points.len() - 1];
        let slope = (y1 - y0) / (x1 - x0);
        let scale = self
            .points
            .iter()
            .map(|p| p.1.abs())
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE);
        self.points
            .iter()
            .all(|&(x, y)| (y0 + slope * (x - x0) - y).abs() <= 1e-12 * scale)
    }

    /// Writes `x,y`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), MarketDataError> {
        write_xy_csv(&self.points, writer)
    }

    /// Reads `x,y` (rescaling x onto [0, 1] if needed).
    pub fn read_csv<R: Read>(raw: R) -> Result<Self, EventStudyError> {
        Self::normalized(read_xy_csv(raw)?)
    }
}

/// Writes a two-column `x,y` point file.
pub fn write_xy_csv<W: Write>(points: &[(f64, f64)], writer: W) -> Result<(), MarketDataError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x", "y"])?;
    for &(x, y) in points {
        w.write_record([fmt_f64(x), fmt_f64(y)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a two-column `x,y` point file; rows are returned in file order.
pub fn read_xy_csv<R: Read>(raw: R) -> Result<Vec<(f64, f64)>, MarketDataError> {
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
    let (xc, yc) = (find("x")?, find("y")?);
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 2;
        let num = |col: usize, name: &str| -> Result<f64, MarketDataError> {
            let raw = record.get(col).unwrap_or("");
            raw.parse().map_err(|_| MarketDataError::MalformedNumber {
                row,
                column: name.to_string(),
                value: raw.to_string(),
            })
        };
        out.push((num(xc, "x")?, num(yc, "y")?));
    }
    Ok(out)
}

/// Picks relative days −15, −12, …, +15 of a 31-day window and places them
/// at x = 0.0, 0.1, …, 1.0.
pub fn subsample_to_grid(window_values: &[f64]) -> Result<InterpolationData, EventStudyError> {
    if window_values.len() != GRID_WINDOW_LEN {
        return Err(EventStudyError::WrongLength {
            expected: GRID_WINDOW_LEN,
            got: window_values.len(),
        });
    }
    let last = (GRID_POINTS - 1) as f64;
    let points = (0..GRID_POINTS)
        .map(|i| (i as f64 / last, window_values[i * GRID_STRIDE]))
        .collect();
    InterpolationData::new(points)
}

/// One row of the event-window table (`relative_day,x,aar,caar`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelRow {
    pub relative_day: i64,
    pub x: f64,
    pub aar: f64,
    pub caar: f64,
}

pub fn write_panel_csv<W: Write>(rows: &[PanelRow], writer: W) -> Result<(), MarketDataError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["relative_day", "x", "aar", "caar"])?;
    for r in rows {
        w.write_record([
            r.relative_day.to_string(),
            fmt_f64(r.x),
            fmt_f64(r.aar),
            fmt_f64(r.caar),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_panel_csv<R: Read>(raw: R) -> Result<Vec<PanelRow>, MarketDataError> {
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
    let cols = [
        find("relative_day")?,
        find("x")?,
        find("aar")?,
        find("caar")?,
    ];
    let names = ["relative_day", "x", "aar", "caar"];
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 2;
        let mut vals = [0.0f64; 4];
        for (k, &c) in cols.iter().enumerate() {
            let raw = record.get(c).unwrap_or("");
            vals[k] = raw.parse().map_err(|_| MarketDataError::MalformedNumber {
                row,
                column: names[k].to_string(),
                value: raw.to_string(),
            })?;
        }
        let day = vals[0];
        if day.fract() != 0.0 {
            return Err(MarketDataError::MalformedNumber {
                row,
                column: "relative_day".into(),
                value: day.to_string(),
            });
        }
        rows.push(PanelRow {
            relative_day: day as i64,
            x: vals[1],
            aar: vals[2],
            caar: vals[3],
        });
    }
    Ok(rows)
}

/// One row of the 11-point grid table (`x,aar,caar`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub x: f64,
    pub aar: f64,
    pub caar: f64,
}

/// Subsamples both columns of a 31-row table onto the grid.
pub fn grid_rows(rows: &[PanelRow]) -> Result<Vec<GridRow>, EventStudyError> {
    let aar: Vec<f64> = rows.iter().map(|r| r.aar).collect();
    let caar: Vec<f64> = rows.iter().map(|r| r.caar).collect();
    let a = subsample_to_grid(&aar)?;
    let c = subsample_to_grid(&caar)?;
    Ok(a.points()
        .iter()
        .zip(c.points())
        .map(|(&(x, aar), &(_, caar))| GridRow { x, aar, caar })
        .collect())
}

pub fn write_grid_csv<W: Write>(rows: &[GridRow], writer: W) -> Result<(), MarketDataError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x", "aar", "caar"])?;
    for r in rows {
        w.write_record([fmt_f64(r.x), fmt_f64(r.aar), fmt_f64(r.caar)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_grid_csv<R: Read>(raw: R) -> Result<Vec<GridRow>, MarketDataError> {
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
    let cols = [find("x")?, find("aar")?, find("caar")?];
    let names = ["x", "aar", "caar"];
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let mut vals = [0.0f64; 3];
        for (k, &c) in cols.iter().enumerate() {
            let raw = record.get(c).unwrap_or("");
            vals[k] = raw.parse().map_err(|_| MarketDataError::MalformedNumber {
                row: i + 2,
                column: names[k].to_string(),
                value: raw.to_string(),
            })?;
        }
        rows.push(GridRow {
            x: vals[0],
            aar: vals[1],
            caar: vals[2],
        });
    }
    Ok(rows)
}
