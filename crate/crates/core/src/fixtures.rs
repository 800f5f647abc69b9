//! Published 2024 NIFTY50 reference tables, embedded so the case study runs
//! offline. The CSV sources live in `data/`.

use std::str::FromStr;

use crate::event_study::{read_grid_csv, read_panel_csv, GridRow, InterpolationData, PanelRow};

const TABLE1: &str = include_str!("../data/table1.csv");
const TABLE2: &str = include_str!("../data/table2.csv");
const GERM_COEFFICIENTS: &str = include_str!("../data/germ_coefficients.csv");
const TABLE3: &str = include_str!("../data/table3.csv");

/// Fixture data version; bump whenever a file under `data/` changes.
pub const FIXTURE_VERSION: &str = "2024.1";

/// The year the embedded tables describe.
pub const BASELINE_YEAR: u16 = 2024;

/// Mixed per-interval scaling vector used for the third panel of the AAR/CAAR plots.
pub const MIXED_ALPHA: [f64; 10] = [0.1, 0.4, 0.5, 0.6, 0.4, 0.3, 0.4, 0.5, 0.3, 0.1];

/// Which aggregate a series refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Series {
    Aar,
    Caar,
}

impl Series {
    pub fn name(self) -> &'static str {
        match self {
            Series::Aar => "aar",
            Series::Caar => "caar",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Series::Aar => "AAR",
            Series::Caar => "CAAR",
        }
    }

    pub const ALL: [Series; 2] = [Series::Aar, Series::Caar];

    fn parse(s: &str) -> Self {
        s.parse()
            .unwrap_or_else(|e| panic!("embedded fixture: {e}"))
    }
}

impl FromStr for Series {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "aar" => Ok(Series::Aar),
            "caar" => Ok(Series::Caar),
            _ => Err(format!("unknown series `{s}` (expected aar or caar)")),
        }
    }
}

/// Published rounded coefficients of one germ segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GermSegment {
    pub series: Series,
    /// 1-based, as published.
    pub segment: usize,
    pub x_lo: f64,
    pub x_hi: f64,
    pub slope: f64,
    pub intercept: f64,
}

/// One cell of the published dimension table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedDimension {
    pub year: u16,
    pub series: Series,
    pub alpha: f64,
    pub dimension: f64,
}

/// 31-day event-window table (relative day, x, AAR, CAAR) as published.
pub fn table1() -> Vec<PanelRow> {
    read_panel_csv(TABLE1.as_bytes()).expect("embedded table1.csv is valid")
}

/// 11-point grid (x, AAR, CAAR) as published.
pub fn table2() -> Vec<GridRow> {
    read_grid_csv(TABLE2.as_bytes()).expect("embedded table2.csv is valid")
}

/// The 11 grid nodes of one published series, ready for interpolation.
pub fn table2_data(series: Series) -> InterpolationData {
    let points = table2()
        .into_iter()
        .map(|r| match series {
            Series::Aar => (r.x, r.aar),
            Series::Caar => (r.x, r.caar),
        })
        .collect();
    InterpolationData::new(points).expect("embedded table2.csv forms a valid grid")
}

pub fn germ_coefficients() -> Vec<GermSegment> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(GERM_COEFFICIENTS.as_bytes());
    reader
        .records()
        .map(|r| {
            let r = r.expect("embedded germ_coefficients.csv is valid");
            let f = |i: usize| r[i].parse::<f64>().expect("numeric fixture field");
            GermSegment {
                series: Series::parse(&r[0]),
                segment: r[1].parse().expect("segment index"),
                x_lo: f(2),
                x_hi: f(3),
                slope: f(4),
                intercept: f(5),
            }
        })
        .collect()
}

pub fn table3() -> Vec<PublishedDimension> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(TABLE3.as_bytes());
    reader
        .records()
        .map(|r| {
            let r = r.expect("embedded table3.csv is valid");
            PublishedDimension {
                year: r[0].parse().expect("year"),
                series: Series::parse(&r[1]),
                alpha: r[2].parse().expect("alpha"),
                dimension: r[3].parse().expect("dimension"),
            }
        })
        .collect()
}

/// Looks up a published dimension.
pub fn published_dimension(year: u16, series: Series, alpha: f64) -> Option<f64> {
    table3()
        .into_iter()
        .find(|d| d.year == year && d.series == series && d.alpha == alpha)
        .map(|d| d.dimension)
}

/// Raw CSV text of each embedded file, for copying into report bundles.
pub fn raw_files() -> [(&'static str, &'static str); 4] {
    [
        ("table1.csv", TABLE1),
        ("table2.csv", TABLE2),
        ("germ_coefficients.csv", GERM_COEFFICIENTS),
        ("table3.csv", TABLE3),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(table1().len(), 31);
        assert_eq!(table2().len(), 11);
        assert_eq!(germ_coefficients().len(), 20);
        assert_eq!(table3().len(), 16);
        assert_eq!(published_dimension(2024, Series::Caar, 0.5), Some(1.498));
        assert_eq!(published_dimension(2021, Series::Caar, 0.5), None);
    }

    #[test]
    fn table1_days_are_contiguous() {
        let days: Vec<i64> = table1().iter().map(|r| r.relative_day).collect();
        assert_eq!(days, (-15..=15).collect::<Vec<_>>());
    }
}
