//! Simple (one-regressor) ordinary least squares.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RegressionError {
    #[error("need at least {needed} paired observations, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("x and y lengths differ ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },

    #[error("regressor has zero variance")]
    ZeroVariance,

    #[error("non-finite observation at index {0}")]
    NonFinite(usize),
}

/// Fitted line `y ≈ intercept + slope · x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 1 when the response is constant and fitted exactly.
    pub r_squared: f64,
    pub n: usize,
}

/// Fits `y` on `x` using centred sums (two passes) for numerical stability.
pub fn ols(x: &[f64], y: &[f64], min_points: usize) -> Result<LinearFit, RegressionError> {
    if x.len() != y.len() {
        return Err(RegressionError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    let n = x.len();
    if n < min_points.max(2) {
        return Err(RegressionError::TooFewPoints {
            needed: min_points.max(2),
            got: n,
        });
    }
    if let Some(i) = x
        .iter()
        .zip(y)
        .position(|(a, b)| !a.is_finite() || !b.is_finite())
    {
        return Err(RegressionError::NonFinite(i));
    }

    let nf = n as f64;
    let mean_x = x.iter().sum::<f64>() / nf;
    let mean_y = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    // Constant regressors leave only rounding noise in the centred sum.
    let max_abs = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sxx <= nf * (4.0 * f64::EPSILON * max_abs).powi(2) {
        return Err(RegressionError::ZeroVariance);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        ((sxy * sxy) / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
        let fit = ols(&x, &y, 2).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-15);
        assert!((fit.intercept - 3.0).abs() < 1e-15);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn known_noisy_fit() {
        // Hand-computed: x̄ = 2, ȳ = 2.6, Sxx = 10, Sxy = 10, Syy = 11.2.
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y = [1.0, 1.0, 3.0, 3.0, 5.0];
        let fit = ols(&x, &y, 3).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-14);
        assert!((fit.intercept - 0.6).abs() < 1e-14);
        assert!((fit.r_squared - 100.0 / 112.0).abs() < 1e-14);
    }

    #[test]
    fn errors() {
        assert_eq!(
            ols(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0], 3),
            Err(RegressionError::ZeroVariance)
        );
        assert_eq!(
            ols(&[1.0, 2.0], &[1.0, 2.0], 3),
            Err(RegressionError::TooFewPoints { needed: 3, got: 2 })
        );
        assert_eq!(
            ols(&[1.0, 2.0], &[1.0], 1),
            Err(RegressionError::LengthMismatch { x: 2, y: 1 })
        );
        assert_eq!(
            ols(&[1.0, f64::NAN, 3.0], &[1.0, 2.0, 3.0], 2),
            Err(RegressionError::NonFinite(1))
        );
    }
}
