//! Box-counting dimension of planar point clouds.
//!
//! The cloud is rescaled to the unit square, covered by dyadic grids of side
//! `ε = 2⁻ᵏ`, and the dimension is the OLS slope of `log₂ N_ε` against `k`.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fractal_interp::ScalingVector;
use crate::numfmt::fmt_f64;
use crate::regression::{ols, RegressionError};

pub const DEFAULT_K_MIN: u32 = 2;
pub const DEFAULT_K_MAX: u32 = 8;
pub const DEFAULT_MIN_POINTS_PER_BOX: usize = 25;
pub const MAX_LEVEL: u32 = 30;

/// Levels up to this use a dense occupancy bitmap; finer levels sort cell keys.
const BITMAP_MAX_LEVEL: u32 = 12;

#[derive(Debug, Error, PartialEq)]
pub enum DimensionError {
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("non-finite coordinate at point {0}")]
    NonFinite(usize),

    #[error("all points are identical")]
    AllIdentical,

    #[error("x-range is degenerate (all x equal); the cloud is not a graph over an interval")]
    DegenerateX,

    #[error("point {index} lies outside the unit square: ({x}, {y})")]
    OutsideUnitSquare { index: usize, x: f64, y: f64 },

    #[error("invalid levels: need k_min < k_max <= {MAX_LEVEL}, got [{k_min}, {k_max}]")]
    InvalidLevels { k_min: u32, k_max: u32 },

    #[error("min_points_per_box must be at least 1")]
    InvalidMinPoints,

    #[error("only {usable} usable levels after excluding saturated levels {excluded:?}; need 3")]
    TooFewLevels { usable: usize, excluded: Vec<u32> },

    #[error("regression failed: {0}")]
    Regression(#[from] RegressionError),
}

/// Points in `[0, 1]²` with the bounds they were mapped from.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedCloud {
    points: Vec<(f64, f64)>,
    original_bounds: (f64, f64, f64, f64),
    degenerate_y: bool,
    normalized: bool,
    distinct: usize,
}

fn distinct_count(points: &[(f64, f64)]) -> usize {
    let mut keys: Vec<(u64, u64)> = points
        .iter()
        .map(|p| (p.0.to_bits(), p.1.to_bits()))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

fn bounds(points: &[(f64, f64)]) -> Result<(f64, f64, f64, f64), DimensionError> {
    if points.len() < 2 {
        return Err(DimensionError::TooFewPoints(points.len()));
    }
    let mut b = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for (i, &(x, y)) in points.iter().enumerate() {
        if !x.is_finite() || !y.is_finite() {
            return Err(DimensionError::NonFinite(i));
        }
        b.0 = b.0.min(x);
        b.1 = b.1.max(x);
        b.2 = b.2.min(y);
        b.3 = b.3.max(y);
    }
    Ok(b)
}

/// Rescales each axis independently onto `[0, 1]`. A constant-y cloud is
/// placed at `y = 0.5` and flagged.
pub fn normalize_to_unit_square(points: &[(f64, f64)]) -> Result<NormalizedCloud, DimensionError> {
    let b @ (x_min, x_max, y_min, y_max) = bounds(points)?;
    let x_span = x_max - x_min;
    let y_span = y_max - y_min;
    if x_span == 0.0 {
        return Err(if y_span == 0.0 {
            DimensionError::AllIdentical
        } else {
            DimensionError::DegenerateX
        });
    }
    let degenerate_y = y_span == 0.0;
    let scaled: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, y)| {
            let u = ((x - x_min) / x_span).clamp(0.0, 1.0);
            let v = if degenerate_y {
                0.5
            } else {
                ((y - y_min) / y_span).clamp(0.0, 1.0)
            };
            (u, v)
        })
        .collect();
    let distinct = distinct_count(&scaled);
    Ok(NormalizedCloud {
        points: scaled,
        original_bounds: b,
        degenerate_y,
        normalized: true,
        distinct,
    })
}

impl NormalizedCloud {
    /// Uses the points as given; they must already lie in the unit square.
    pub fn from_unit_square(points: &[(f64, f64)]) -> Result<Self, DimensionError> {
        let b = bounds(points)?;
        if let Some((index, &(x, y))) = points
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(&p.0) || !(0.0..=1.0).contains(&p.1))
        {
            return Err(DimensionError::OutsideUnitSquare { index, x, y });
        }
        let distinct = distinct_count(points);
        if distinct < 2 {
            return Err(DimensionError::AllIdentical);
        }
        Ok(Self {
            points: points.to_vec(),
            original_bounds: b,
            degenerate_y: b.2 == b.3,
            normalized: false,
            distinct,
        })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// `(x_min, x_max, y_min, y_max)` before rescaling.
    pub fn original_bounds(&self) -> (f64, f64, f64, f64) {
        self.original_bounds
    }

    pub fn degenerate_y(&self) -> bool {
        self.degenerate_y
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    /// Number of distinct points (duplicates do not count towards sampling density).
    pub fn distinct_points(&self) -> usize {
        self.distinct
    }
}

#[inline]
fn cell(v: f64, cells: u64) -> u64 {
    ((v * cells as f64) as u64).min(cells - 1)
}

/// Number of occupied cells of the `2ᵏ × 2ᵏ` half-open grid on the unit
/// square; coordinate 1.0 falls in the last cell.
///
/// # Panics
///
/// If `k > 30`.
pub fn count_boxes(cloud: &NormalizedCloud, k: u32) -> usize {
    assert!(k <= MAX_LEVEL, "box level {k} exceeds {MAX_LEVEL}");
    let cells = 1u64 << k;
    if k <= BITMAP_MAX_LEVEL {
        let mut bits = vec![0u64; ((cells * cells) as usize).div_ceil(64)];
        let mut count = 0usize;
        for &(x, y) in &cloud.points {
            let idx = (cell(x, cells) * cells + cell(y, cells)) as usize;
            let (word, bit) = (idx / 64, 1u64 << (idx % 64));
            if bits[word] & bit == 0 {
                bits[word] |= bit;
                count += 1;
            }
        }
        count
    } else {
        let mut keys: Vec<u64> = cloud
            .points
            .iter()
            .map(|&(x, y)| (cell(x, cells) << 32) | cell(y, cells))
            .collect();
        keys.sort_unstable();
        keys.dedup();
        keys.len()
    }
}

/// Occupied-cell count at one dyadic level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxCount {
    pub k: u32,
    pub epsilon: f64,
    pub count: usize,
}

/// Box counts across consecutive levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCountCurve {
    pub scales: Vec<BoxCount>,
}

impl BoxCountCurve {
    pub fn measure(cloud: &NormalizedCloud, k_min: u32, k_max: u32) -> Self {
        Self {
            scales: (k_min..=k_max)
                .map(|k| BoxCount {
                    k,
                    epsilon: (-(k as f64)).exp2(),
                    count: count_boxes(cloud, k),
                })
                .collect(),
        }
    }

    /// Counts never decrease and grow at most 4× per level.
    pub fn is_consistent(&self) -> bool {
        self.scales
            .windows(2)
            .all(|w| w[1].count >= w[0].count && w[1].count <= 4 * w[0].count)
    }

    /// Writes `k,epsilon,count,log2_inv_epsilon,log2_count`.
    pub fn write_csv<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let mut w = writer;
        writeln!(w, "k,epsilon,count,log2_inv_epsilon,log2_count")?;
        for s in &self.scales {
            writeln!(
                w,
                "{},{},{},{},{}",
                s.k,
                fmt_f64(s.epsilon),
                s.count,
                s.k,
                fmt_f64((s.count as f64).log2())
            )?;
        }
        Ok(())
    }
}

/// Regression slope of `log₂ N` on `k` with fit diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    pub dimension: f64,
    pub r_squared: f64,
    /// Inclusive range of levels entering the regression.
    pub levels_used: (u32, u32),
    /// Every requested level, including excluded ones.
    pub curve: BoxCountCurve,
    /// Levels dropped because the sample is too sparse to fill them.
    pub excluded_levels: Vec<u32>,
    pub normalized: bool,
    pub degenerate_y: bool,
    pub points: usize,
}

impl DimensionEstimate {
    /// True when the estimate falls outside `[1, 2]`, the range for the graph of
    /// a continuous function. Flagged, never clamped.
    pub fn outside_curve_range(&self) -> bool {
        !(1.0..=2.0).contains(&self.dimension)
    }

    pub fn report(&self) -> DimensionReport {
        DimensionReport {
            dimension: self.dimension,
            r_squared: self.r_squared,
            levels_used: [self.levels_used.0, self.levels_used.1],
            levels: self.curve.scales.clone(),
            excluded_levels: self.excluded_levels.clone(),
            normalized: self.normalized,
            degenerate_y: self.degenerate_y,
            outside_curve_range: self.outside_curve_range(),
            points: self.points,
        }
    }
}

/// Serializable form of a [`DimensionEstimate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub dimension: f64,
    pub r_squared: f64,
    pub levels_used: [u32; 2],
    pub levels: Vec<BoxCount>,
    pub excluded_levels: Vec<u32>,
    pub normalized: bool,
    pub degenerate_y: bool,
    pub outside_curve_range: bool,
    pub points: usize,
}

/// Estimates the box dimension from levels `k_min..=k_max`.
///
/// A level is excluded when its count exceeds `distinct points / min_points_per_box`:
/// past that scale a finite sample cannot cover the set. Exclusions only ever
/// trim the fine end, so this lowers the effective `k_max`.
pub fn estimate_dimension(
    cloud: &NormalizedCloud,
    k_min: u32,
    k_max: u32,
    min_points_per_box: usize,
) -> Result<DimensionEstimate, DimensionError> {
    if k_min >= k_max || k_max > MAX_LEVEL {
        return Err(DimensionError::InvalidLevels { k_min, k_max });
    }
    if min_points_per_box == 0 {
        return Err(DimensionError::InvalidMinPoints);
    }
    let curve = BoxCountCurve::measure(cloud, k_min, k_max);
    let limit = cloud.distinct as f64 / min_points_per_box as f64;
    let (used, excluded): (Vec<&BoxCount>, Vec<&BoxCount>) =
        curve.scales.iter().partition(|s| (s.count as f64) <= limit);
    let excluded_levels: Vec<u32> = excluded.iter().map(|s| s.k).collect();
    if used.len() < 3 {
        return Err(DimensionError::TooFewLevels {
            usable: used.len(),
            excluded: excluded_levels,
        });
    }
    let ks: Vec<f64> = used.iter().map(|s| s.k as f64).collect();
    let logs: Vec<f64> = used.iter().map(|s| (s.count as f64).log2()).collect();
    let fit = ols(&ks, &logs, 3)?;
    Ok(DimensionEstimate {
        dimension: fit.slope,
        r_squared: fit.r_squared,
        levels_used: (used[0].k, used[used.len() - 1].k),
        curve,
        excluded_levels,
        normalized: cloud.normalized,
        degenerate_y: cloud.degenerate_y,
        points: cloud.points.len(),
    })
}

/// Closed-form box dimension of an affine FIF on `intervals` equal intervals:
/// `1 + log(Σ|α_p|) / log P` when `Σ|α_p| > 1` and the data are not collinear,
/// otherwise 1.
pub fn affine_fif_dimension_oracle(
    alpha: &ScalingVector,
    intervals: usize,
    collinear: bool,
) -> f64 {
    let sum = alpha.sum_abs();
    if collinear || sum <= 1.0 || intervals < 2 {
        1.0
    } else {
        1.0 + sum.ln() / (intervals as f64).ln()
    }
}
