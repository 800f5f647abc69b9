//! Deterministic generation of attractor points of the FIF's IFS.

use std::io::Write;

use super::model::FifModel;
use super::FifError;
use crate::event_study::{write_xy_csv, InterpolationData};
use crate::market_data::MarketDataError;

/// Maximum number of points a single attractor may hold.
pub const DEFAULT_MAX_ATTRACTOR_POINTS: usize = 12_000_000;

/// Abscissae closer than this are treated as the same node.
pub const NODE_MATCH_TOLERANCE: f64 = 1e-12;

/// Points on the graph of `g^α`, sorted by x.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSample {
    pub points: Vec<(f64, f64)>,
    /// Refinement depth (attractor) or iteration count (fixed point).
    pub generation: usize,
    /// Sup-norm error bound of the sampled values (0 for exact graph points).
    pub max_error_bound: f64,
}

impl GraphSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Linear interpolation between the sample points that bracket `x`.
    pub fn eval_linear(&self, x: f64) -> f64 {
        let pts = &self.points;
        let i = pts.partition_point(|p| p.0 < x);
        if i == 0 {
            return pts[0].1;
        }
        if i == pts.len() {
            return pts[pts.len() - 1].1;
        }
        let (x0, y0) = pts[i - 1];
        let (x1, y1) = pts[i];
        if x1 == x {
            return y1;
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Writes `x,y` sorted by x.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), MarketDataError> {
        write_xy_csv(&self.points, writer)
    }
}

/// Number of points after `depth` rounds: `n_{d+1} = P·(n_d − 1) + 1`, `n_0 = P + 1`.
fn point_count(intervals: usize, depth: usize) -> u128 {
    let p = intervals as u128;
    let mut n = p + 1;
    for _ in 0..depth {
        n = p.saturating_mul(n - 1).saturating_add(1);
    }
    n
}

/// [`generate_attractor_points_with_budget`] with [`DEFAULT_MAX_ATTRACTOR_POINTS`].
pub fn generate_attractor_points(model: &FifModel, depth: usize) -> Result<GraphSample, FifError> {
    generate_attractor_points_with_budget(model, depth, DEFAULT_MAX_ATTRACTOR_POINTS)
}

/// Applies every map `Φ_p` to the interpolation nodes `depth` times.
///
/// Each round maps the sorted point set into every `A_p` in order; the image of
/// the right end under `Φ_p` coincides with the image of the left end under
/// `Φ_{p+1}`, so it is dropped and the output stays sorted without duplicates.
pub fn generate_attractor_points_with_budget(
    model: &FifModel,
    depth: usize,
    max_points: usize,
) -> Result<GraphSample, FifError> {
    let intervals = model.intervals();
    let requested = point_count(intervals, depth);
    if requested > max_points as u128 {
        return Err(FifError::TooManyPoints {
            depth,
            requested,
            budget: max_points,
        });
    }

    let mut points: Vec<(f64, f64)> = model.data().points().to_vec();
    for _ in 0..depth {
        let mut next = Vec::with_capacity(intervals * (points.len() - 1) + 1);
        for p in 0..intervals {
            let src = if p + 1 < intervals {
                &points[..points.len() - 1]
            } else {
                &points[..]
            };
            next.extend(src.iter().map(|&pt| model.phi(p, pt)));
        }
        points = next;
    }
    Ok(GraphSample {
        points,
        generation: depth,
        max_error_bound: 0.0,
    })
}

/// Largest `|g^α(x_i) − y_i|` over the interpolation nodes.
pub fn verify_interpolation(
    sample: &GraphSample,
    data: &InterpolationData,
) -> Result<f64, FifError> {
    let pts = &sample.points;
    let mut worst = 0.0f64;
    for &(x, y) in data.points() {
        let i = pts.partition_point(|p| p.0 < x - NODE_MATCH_TOLERANCE);
        let hit = pts[i.min(pts.len())..]
            .iter()
            .take_while(|p| p.0 <= x + NODE_MATCH_TOLERANCE)
            .next()
            .ok_or(FifError::NodeMissing(x))?;
        worst = worst.max((hit.1 - y).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractal_interp::BaseKind;

    fn model(alpha: &str) -> FifModel {
        let data = InterpolationData::new(vec![
            (0.0, 0.2),
            (0.25, -0.4),
            (0.5, 0.9),
            (0.75, 0.1),
            (1.0, 0.3),
        ])
        .unwrap();
        FifModel::new(data, alpha.parse().unwrap(), BaseKind::SquaredGerm).unwrap()
    }

    #[test]
    fn depth_zero_is_the_data() {
        let m = model("0.4");
        let s = generate_attractor_points(&m, 0).unwrap();
        assert_eq!(s.points, m.data().points());
    }

    #[test]
    fn counts_and_ordering() {
        let m = model("0.4");
        for depth in 0..5 {
            let s = generate_attractor_points(&m, depth).unwrap();
            assert_eq!(s.len() as u128, point_count(4, depth));
            assert_eq!(s.len(), 4usize.pow(depth as u32 + 1) + 1);
            assert!(s.points.windows(2).all(|w| w[0].0 < w[1].0));
            assert!(s.points.iter().all(|p| (0.0..=1.0).contains(&p.0)));
            assert!(verify_interpolation(&s, m.data()).unwrap() < 1e-10);
        }
    }

    #[test]
    fn zero_alpha_stays_on_germ() {
        let m = model("0");
        let s = generate_attractor_points(&m, 4).unwrap();
        for &(x, y) in &s.points {
            assert!((m.germ().eval(x) - y).abs() < 1e-12);
        }
    }

    #[test]
    fn budget_enforced() {
        let m = model("0.4");
        assert!(matches!(
            generate_attractor_points_with_budget(&m, 3, 100),
            Err(FifError::TooManyPoints { requested: 257, .. })
        ));
        assert!(matches!(
            generate_attractor_points(&m, 40),
            Err(FifError::TooManyPoints { .. })
        ));
    }

    #[test]
    fn corrupted_node_detected() {
        let m = model("0.3");
        let mut s = generate_attractor_points(&m, 2).unwrap();
        let i = s.points.iter().position(|p| p.0 == 0.5).unwrap();
        s.points[i].1 += 1e-3;
        assert!(verify_interpolation(&s, m.data()).unwrap() >= 1e-3 - 1e-15);
        s.points.remove(i);
        assert_eq!(
            verify_interpolation(&s, m.data()),
            Err(FifError::NodeMissing(0.5))
        );
    }

    #[test]
    fn eval_linear_brackets() {
        let s = GraphSample {
            points: vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)],
            generation: 0,
            max_error_bound: 0.0,
        };
        assert_eq!(s.eval_linear(0.25), 0.5);
        assert_eq!(s.eval_linear(0.5), 1.0);
        assert_eq!(s.eval_linear(1.0), 0.0);
    }
}
