use super::affine::interval_of;
use crate::event_study::InterpolationData;

/// Continuous piecewise-linear function through the interpolation nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    intercepts: Vec<f64>,
}

/// Segment `p` has slope `(y_p − y_{p−1}) / (x_p − x_{p−1})` and passes through both nodes.
pub fn germ_piecewise_linear(data: &InterpolationData) -> PiecewiseLinear {
    let breakpoints = data.xs();
    let values = data.ys();
    let (slopes, intercepts) = breakpoints
        .windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| {
            let slope = (y[1] - y[0]) / (x[1] - x[0]);
            (slope, y[0] - slope * x[0])
        })
        .unzip();
    PiecewiseLinear {
        breakpoints,
        values,
        slopes,
        intercepts,
    }
}

impl PiecewiseLinear {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn intercepts(&self) -> &[f64] {
        &self.intercepts
    }

    pub fn segments(&self) -> usize {
        self.slopes.len()
    }

    /// Evaluates on `[x_0, x_P]`; nodes are reproduced exactly. Outside the
    /// domain the end segments are extended linearly.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let last = self.breakpoints.len() - 1;
        if x == self.breakpoints[last] {
            return self.values[last];
        }
        let p = interval_of(&self.breakpoints, x);
        self.values[p] + self.slopes[p] * (x - self.breakpoints[p])
    }

    /// Largest disagreement between adjacent segments at interior breakpoints.
    pub fn continuity_defect(&self) -> f64 {
        (1..self.segments())
            .map(|p| {
                let x = self.breakpoints[p];
                let left = self.slopes[p - 1] * x + self.intercepts[p - 1];
                let right = self.slopes[p] * x + self.intercepts[p];
                (left - right).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Base function `b` entering `q_p(x) = g(l_p(x)) − α_p·b(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseFunction {
    /// `b(x) = g(x²)` for a germ `g` on `[0, 1]`.
    SquaredGerm(PiecewiseLinear),
    /// Straight line through the first and last nodes (classical affine FIF).
    Chord { x0: f64, y0: f64, x1: f64, y1: f64 },
}

/// `x ↦ germ(x²)`; agrees with the germ at 0 and 1.
pub fn base_from_germ(germ: &PiecewiseLinear) -> BaseFunction {
    BaseFunction::SquaredGerm(germ.clone())
}

impl BaseFunction {
    pub fn chord(data: &InterpolationData) -> Self {
        let pts = data.points();
        let (x0, y0) = pts[0];
        let (x1, y1) = pts[pts.len() - 1];
        BaseFunction::Chord { x0, y0, x1, y1 }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            BaseFunction::SquaredGerm(g) => g.eval(x * x),
            BaseFunction::Chord { x0, y0, x1, y1 } => {
                if x == *x1 {
                    *y1
                } else {
                    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BaseFunction::SquaredGerm(_) => "squared-germ",
            BaseFunction::Chord { .. } => "chord",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, Series};

    fn table2(series: Series) -> InterpolationData {
        InterpolationData::new(
            fixtures::table2()
                .iter()
                .map(|r| (r.x, if series == Series::Aar { r.aar } else { r.caar }))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn published_first_and_last_segments() {
        let f1 = germ_piecewise_linear(&table2(Series::Aar));
        assert!((f1.slopes()[0] + 0.0714).abs() < 1e-3);
        assert!((f1.intercepts()[0] - 0.00559).abs() < 1e-3);
        let f2 = germ_piecewise_linear(&table2(Series::Caar));
        assert!((f2.slopes()[9] - 0.0499).abs() < 1e-3);
        assert!((f2.intercepts()[9] + 0.0499).abs() < 1e-3);
    }

    #[test]
    fn interpolates_nodes_and_is_continuous() {
        for s in [Series::Aar, Series::Caar] {
            let d = table2(s);
            let g = germ_piecewise_linear(&d);
            for &(x, y) in d.points() {
                assert!((g.eval(x) - y).abs() < 1e-10);
            }
            assert!(g.continuity_defect() < 1e-10);
        }
    }

    #[test]
    fn collinear_data_gives_one_slope() {
        let d = InterpolationData::new(vec![(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)]).unwrap();
        let g = germ_piecewise_linear(&d);
        assert!(g.slopes().iter().all(|&s| s == 1.0));
        assert_eq!(g.eval(0.3), 0.3);
    }

    #[test]
    fn base_examples() {
        let id = germ_piecewise_linear(
            &InterpolationData::new(vec![(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)]).unwrap(),
        );
        let b = base_from_germ(&id);
        assert_eq!(b.eval(0.5), 0.25);

        let g = germ_piecewise_linear(&table2(Series::Aar));
        let b = base_from_germ(&g);
        assert_eq!(b.eval(1.0), 0.00172);
        assert_eq!(b.eval(0.0), g.eval(0.0));

        let chord = BaseFunction::chord(&table2(Series::Caar));
        assert_eq!(chord.eval(0.0), 0.00559);
        assert_eq!(chord.eval(1.0), 0.0);
    }
}
