use super::FifError;
use crate::event_study::InterpolationData;

/// Contractive affine maps `l_p(x) = a_p·x + b_p` taking `[x_0, x_P]` onto
/// `[x_{p−1}, x_p]`. Interval indices are zero-based (`p = 0..P`).
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMaps {
    a: Vec<f64>,
    b: Vec<f64>,
    nodes: Vec<f64>,
}

pub fn build_affine_maps(data: &InterpolationData) -> Result<AffineMaps, FifError> {
    let nodes = data.xs();
    let intervals = nodes.len() - 1;
    if intervals < 2 {
        return Err(FifError::TooFewIntervals(intervals));
    }
    let (x0, xn) = (nodes[0], nodes[intervals]);
    let span = xn - x0;
    let (a, b) = nodes
        .windows(2)
        .map(|w| ((w[1] - w[0]) / span, (xn * w[0] - x0 * w[1]) / span))
        .unzip();
    Ok(AffineMaps { a, b, nodes })
}

impl AffineMaps {
    pub fn intervals(&self) -> usize {
        self.a.len()
    }

    pub fn slopes(&self) -> &[f64] {
        &self.a
    }

    pub fn offsets(&self) -> &[f64] {
        &self.b
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `l_p(x)`.
    #[inline]
    pub fn apply(&self, p: usize, x: f64) -> f64 {
        self.a[p] * x + self.b[p]
    }

    /// `l_p⁻¹(x)`.
    #[inline]
    pub fn inverse(&self, p: usize, x: f64) -> f64 {
        (x - self.b[p]) / self.a[p]
    }

    /// The `p` with `x ∈ [x_p, x_{p+1})`; the right endpoint belongs to the last
    /// interval and out-of-range values clamp to the nearest end interval.
    #[inline]
    pub fn interval_index(&self, x: f64) -> usize {
        interval_of(&self.nodes, x)
    }
}

pub(super) fn interval_of(nodes: &[f64], x: f64) -> usize {
    let last = nodes.len() - 2;
    nodes
        .partition_point(|&n| n <= x)
        .saturating_sub(1)
        .min(last)
}
