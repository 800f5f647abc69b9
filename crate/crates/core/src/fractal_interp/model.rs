use std::fmt;
use std::str::FromStr;

use super::affine::{build_affine_maps, AffineMaps};
use super::germ::{base_from_germ, germ_piecewise_linear, BaseFunction, PiecewiseLinear};
use super::FifError;
use crate::event_study::InterpolationData;

/// Base function stays within this distance of the end nodes.
const BASE_ENDPOINT_TOLERANCE: f64 = 1e-10;

/// Vertical scaling factors, one per interval, each with `|α_p| < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingVector {
    alpha: Vec<f64>,
}

impl ScalingVector {
    pub fn new(alpha: Vec<f64>) -> Result<Self, FifError> {
        if alpha.is_empty() {
            return Err(FifError::AlphaLength {
                expected: 1,
                got: 0,
            });
        }
        if let Some((index, &value)) = alpha
            .iter()
            .enumerate()
            .find(|(_, a)| !a.is_finite() || a.abs() >= 1.0)
        {
            return Err(FifError::InvalidAlpha { index, value });
        }
        Ok(Self { alpha })
    }

    /// Same factor on every one of `intervals` intervals.
    pub fn uniform(value: f64, intervals: usize) -> Result<Self, FifError> {
        Self::new(vec![value; intervals])
    }

    /// Broadcasts a single-entry vector to `intervals` entries; longer vectors must match.
    pub fn broadcast(self, intervals: usize) -> Result<Self, FifError> {
        match self.alpha.len() {
            1 => Self::uniform(self.alpha[0], intervals),
            n if n == intervals => Ok(self),
            n => Err(FifError::AlphaLength {
                expected: intervals,
                got: n,
            }),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// Contraction constant of the RB operator.
    pub fn max_abs(&self) -> f64 {
        self.alpha.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn sum_abs(&self) -> f64 {
        self.alpha.iter().map(|a| a.abs()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.iter().all(|&a| a == 0.0)
    }

    /// `α` if uniform, otherwise `None`.
    pub fn as_scalar(&self) -> Option<f64> {
        let first = self.alpha[0];
        self.alpha.iter().all(|&a| a == first).then_some(first)
    }
}

/// Parses `"0.3"` or a comma list such as `"0.1,0.4,0.5"`.
impl FromStr for ScalingVector {
    type Err = FifError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let values = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| FifError::AlphaParse(s.to_string()))?;
        Self::new(values)
    }
}

impl fmt::Display for ScalingVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_scalar() {
            Some(a) => write!(f, "{a}"),
            None => {
                let parts: Vec<String> = self.alpha.iter().map(|a| a.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

/// Which base function a model is built with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseKind {
    /// `b = g(x²)`, as in the NIFTY50 case study.
    SquaredGerm,
    /// Chord through the end nodes; gives the classical affine FIF.
    Chord,
}

impl FromStr for BaseKind {
    type Err = FifError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "squared-germ" | "squared" => Ok(BaseKind::SquaredGerm),
            "chord" | "affine" => Ok(BaseKind::Chord),
            other => Err(FifError::InvalidArgument(format!(
                "unknown base `{other}` (expected squared-germ or chord)"
            ))),
        }
    }
}

/// Everything needed to evaluate `g^α`: data, domain maps, scaling vector,
/// piecewise-linear germ and base function.
#[derive(Debug, Clone)]
pub struct FifModel {
    data: InterpolationData,
    maps: AffineMaps,
    alpha: ScalingVector,
    germ: PiecewiseLinear,
    base: BaseFunction,
}

impl FifModel {
    /// Builds a model; a single-entry `alpha` is broadcast to every interval.
    pub fn new(
        data: InterpolationData,
        alpha: ScalingVector,
        base: BaseKind,
    ) -> Result<Self, FifError> {
        let germ = germ_piecewise_linear(&data);
        let base = match base {
            BaseKind::SquaredGerm => base_from_germ(&germ),
            BaseKind::Chord => BaseFunction::chord(&data),
        };
        Self::with_base(data, alpha, base)
    }

    pub fn with_base(
        data: InterpolationData,
        alpha: ScalingVector,
        base: BaseFunction,
    ) -> Result<Self, FifError> {
        let maps = build_affine_maps(&data)?;
        let alpha = alpha.broadcast(maps.intervals())?;
        let germ = germ_piecewise_linear(&data);
        let pts = data.points();
        for &(x, y) in [pts[0], pts[pts.len() - 1]].iter() {
            let got = base.eval(x);
            if (got - y).abs() > BASE_ENDPOINT_TOLERANCE {
                return Err(FifError::BaseEndpoint {
                    x,
                    got,
                    expected: y,
                });
            }
        }
        Ok(Self {
            data,
            maps,
            alpha,
            germ,
            base,
        })
    }

    pub fn data(&self) -> &InterpolationData {
        &self.data
    }

    pub fn maps(&self) -> &AffineMaps {
        &self.maps
    }

    pub fn alpha(&self) -> &ScalingVector {
        &self.alpha
    }

    pub fn germ(&self) -> &PiecewiseLinear {
        &self.germ
    }

    pub fn base(&self) -> &BaseFunction {
        &self.base
    }

    pub fn intervals(&self) -> usize {
        self.maps.intervals()
    }

    /// Fails when the data are collinear but a non-zero scaling is requested,
    /// since the graph is then a straight segment regardless of α.
    pub fn ensure_non_collinear(&self) -> Result<(), FifError> {
        if !self.alpha.is_zero() && self.data.is_collinear() {
            Err(FifError::CollinearData)
        } else {
            Ok(())
        }
    }

    /// `q_p(x) = g(l_p(x)) − α_p·b(x)`.
    #[inline]
    pub fn q(&self, p: usize, x: f64) -> f64 {
        self.germ.eval(self.maps.apply(p, x)) - self.alpha.values()[p] * self.base.eval(x)
    }

    /// `F_p(x, y) = α_p·y + q_p(x)`.
    #[inline]
    pub fn vertical(&self, p: usize, x: f64, y: f64) -> f64 {
        self.alpha.values()[p] * y + self.q(p, x)
    }

    /// `Φ_p(x, y) = (l_p(x), F_p(x, y))`.
    #[inline]
    pub fn phi(&self, p: usize, (x, y): (f64, f64)) -> (f64, f64) {
        (self.maps.apply(p, x), self.vertical(p, x, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> InterpolationData {
        InterpolationData::new(vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.25)]).unwrap()
    }

    #[test]
    fn scaling_vector_validation() {
        assert!(ScalingVector::new(vec![0.3, -0.99]).is_ok());
        assert_eq!(
            ScalingVector::new(vec![0.3, 1.0]),
            Err(FifError::InvalidAlpha {
                index: 1,
                value: 1.0
            })
        );
        assert!(ScalingVector::new(vec![f64::NAN]).is_err());
        assert!(ScalingVector::new(vec![]).is_err());
        let v: ScalingVector = "0.1, 0.4,0.5".parse().unwrap();
        assert_eq!(v.values(), &[0.1, 0.4, 0.5]);
        assert!((v.sum_abs() - 1.0).abs() < 1e-15);
        assert_eq!(v.max_abs(), 0.5);
        assert!("0.3,abc".parse::<ScalingVector>().is_err());
        assert!("-1.2".parse::<ScalingVector>().is_err());
    }

    #[test]
    fn broadcast_rules() {
        let v: ScalingVector = "0.3".parse().unwrap();
        assert_eq!(v.clone().broadcast(10).unwrap().values(), &[0.3; 10]);
        let w = ScalingVector::new(vec![0.1, 0.2]).unwrap();
        assert_eq!(
            w.broadcast(3),
            Err(FifError::AlphaLength {
                expected: 3,
                got: 2
            })
        );
        assert_eq!(v.to_string(), "0.3");
    }

    #[test]
    fn functional_equation_at_nodes() {
        // F_p(x_0, y_0) = y_{p−1} and F_p(x_P, y_P) = y_p.
        let m = FifModel::new(data(), "0.4".parse().unwrap(), BaseKind::SquaredGerm).unwrap();
        let pts = m.data().points().to_vec();
        for p in 0..m.intervals() {
            let start = m.phi(p, pts[0]);
            let end = m.phi(p, pts[2]);
            assert!((start.0 - pts[p].0).abs() < 1e-15 && (start.1 - pts[p].1).abs() < 1e-15);
            assert!((end.0 - pts[p + 1].0).abs() < 1e-15 && (end.1 - pts[p + 1].1).abs() < 1e-15);
        }
    }

    #[test]
    fn collinear_guard() {
        let line = InterpolationData::new(vec![(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)]).unwrap();
        let m = FifModel::new(line.clone(), "0.5".parse().unwrap(), BaseKind::Chord).unwrap();
        assert_eq!(m.ensure_non_collinear(), Err(FifError::CollinearData));
        let m = FifModel::new(line, "0".parse().unwrap(), BaseKind::Chord).unwrap();
        assert!(m.ensure_non_collinear().is_ok());
    }

    #[test]
    fn rejects_bad_base() {
        let bad = BaseFunction::Chord {
            x0: 0.0,
            y0: 1.0,
            x1: 1.0,
            y1: 0.25,
        };
        assert!(matches!(
            FifModel::with_base(data(), "0.2".parse().unwrap(), bad),
            Err(FifError::BaseEndpoint { .. })
        ));
    }
}
