//! Read-Bajraktarevic operator on uniformly sampled functions.

use super::attractor::{GraphSample, NODE_MATCH_TOLERANCE};
use super::model::FifModel;
use super::FifError;

pub const DEFAULT_MAX_ITERATIONS: usize = 200;

/// Grid intervals per data interval used when no grid size is given.
const DEFAULT_GRID_PER_INTERVAL: usize = 1000;

/// Samples of a function on the uniform grid `x_j = j / n`, `j = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    /// Samples `f` on `grid_size` equal intervals.
    pub fn from_fn(grid_size: usize, f: impl Fn(f64) -> f64) -> Self {
        let n = grid_size.max(1);
        Self {
            values: (0..=n).map(|j| f(grid_x(j, n))).collect(),
        }
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self, FifError> {
        if values.len() < 2 {
            return Err(FifError::InvalidArgument(
                "grid function needs at least 2 samples".into(),
            ));
        }
        Ok(Self { values })
    }

    /// Number of grid intervals.
    pub fn grid_size(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn x(&self, j: usize) -> f64 {
        grid_x(j, self.grid_size())
    }

    /// Linear interpolation between neighbouring samples, clamped to [0, 1].
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.grid_size();
        let t = (x * n as f64).clamp(0.0, n as f64);
        let j = (t.floor() as usize).min(n - 1);
        let frac = t - j as f64;
        if frac == 0.0 {
            self.values[j]
        } else {
            self.values[j] + frac * (self.values[j + 1] - self.values[j])
        }
    }

    /// Sup-norm distance between two functions on the same grid.
    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.values
            .iter()
            .enumerate()
            .map(|(j, &y)| (self.x(j), y))
            .collect()
    }
}

#[inline]
fn grid_x(j: usize, n: usize) -> f64 {
    j as f64 / n as f64
}

/// Every data interval must contain a grid point strictly inside it.
fn check_grid(model: &FifModel, grid_size: usize) -> Result<(), FifError> {
    let n = grid_size as f64;
    for (p, w) in model.maps().nodes().windows(2).enumerate() {
        let first_inside = (w[0] * n).floor() + 1.0;
        if grid_size < 2 || first_inside >= w[1] * n {
            return Err(FifError::GridTooCoarse {
                grid_size,
                interval: p,
            });
        }
    }
    Ok(())
}

/// `(T h)(x) = α_p·h(l_p⁻¹(x)) + q_p(l_p⁻¹(x))` for `x ∈ A_p`, sampled on the
/// grid of `h`. Off-grid values of `h` are linearly interpolated.
pub fn rb_operator_apply(h: &GridFunction, model: &FifModel) -> Result<GridFunction, FifError> {
    check_grid(model, h.grid_size())?;
    Ok(apply_unchecked(h, model))
}

fn apply_unchecked(h: &GridFunction, model: &FifModel) -> GridFunction {
    let n = h.grid_size();
    let maps = model.maps();
    let alpha = model.alpha().values();
    let values = (0..=n)
        .map(|j| {
            let x = grid_x(j, n);
            let p = maps.interval_index(x);
            let u = maps.inverse(p, x).clamp(0.0, 1.0);
            alpha[p] * h.eval(u) + model.q(p, u)
        })
        .collect();
    GridFunction { values }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    /// Number of uniform grid intervals; `None` uses 1000 per data interval.
    pub grid_size: Option<usize>,
    /// Target sup-norm error bound.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            grid_size: None,
            tol: 1e-9,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

impl FixedPointOptions {
    pub fn resolved_grid_size(&self, model: &FifModel) -> usize {
        self.grid_size
            .unwrap_or(DEFAULT_GRID_PER_INTERVAL * model.intervals())
    }
}

/// Outcome of the fixed-point iteration, including the per-step sup-norm changes.
#[derive(Debug, Clone)]
pub struct FixedPointRun {
    pub grid: GridFunction,
    /// `‖T^{k+1} g − T^k g‖_∞` for each iteration `k`.
    pub changes: Vec<f64>,
    pub max_error_bound: f64,
    pub converged: bool,
}

impl FixedPointRun {
    pub fn iterations(&self) -> usize {
        self.changes.len()
    }
}

/// Iterates `T` from the germ until the a-posteriori bound
/// `change / (1 − max|α|)` drops below `tol` or the iteration cap is hit.
/// Never fails on non-convergence; see [`evaluate_fif_fixed_point`].
pub fn fixed_point_iteration(
    model: &FifModel,
    options: &FixedPointOptions,
) -> Result<FixedPointRun, FifError> {
    let grid_size = options.resolved_grid_size(model);
    let intervals = model.intervals();
    if grid_size < 10 * intervals {
        return Err(FifError::InvalidArgument(format!(
            "grid size {grid_size} must be at least 10 per data interval ({})",
            10 * intervals
        )));
    }
    if options.tol.is_nan() || options.tol <= 0.0 {
        return Err(FifError::InvalidArgument(format!(
            "tolerance must be positive, got {}",
            options.tol
        )));
    }
    if options.max_iterations == 0 {
        return Err(FifError::InvalidArgument(
            "iteration cap must be at least 1".into(),
        ));
    }
    check_grid(model, grid_size)?;

    let contraction = model.alpha().max_abs();
    let threshold = options.tol * (1.0 - contraction);
    let mut current = GridFunction::from_fn(grid_size, |x| model.germ().eval(x));
    let mut changes = Vec::new();
    let mut converged = false;
    for _ in 0..options.max_iterations {
        let next = apply_unchecked(&current, model);
        let change = next.sup_distance(&current);
        changes.push(change);
        current = next;
        if change < threshold {
            converged = true;
            break;
        }
    }
    let last = *changes.last().expect("at least one iteration");
    Ok(FixedPointRun {
        grid: current,
        max_error_bound: last / (1.0 - contraction),
        changes,
        converged,
    })
}

/// Fixed point of the RB operator sampled on a uniform grid.
///
/// The grid must contain every interpolation node; the returned sample holds
/// the nodes at their exact abscissae.
pub fn evaluate_fif_fixed_point(
    model: &FifModel,
    options: &FixedPointOptions,
) -> Result<GraphSample, FifError> {
    let grid_size = options.resolved_grid_size(model);
    let n = grid_size as f64;
    let mut node_slots = Vec::new();
    for &x in model.maps().nodes() {
        let j = (x * n).round();
        if (j / n - x).abs() > NODE_MATCH_TOLERANCE {
            return Err(FifError::NodeOffGrid { grid_size, x });
        }
        node_slots.push((j as usize, x));
    }

    let run = fixed_point_iteration(model, options)?;
    if !run.converged {
        return Err(FifError::NotConverged {
            iterations: run.iterations(),
            bound: run.max_error_bound,
        });
    }
    let mut points = run.grid.points();
    for (j, x) in node_slots {
        points[j].0 = x;
    }
    Ok(GraphSample {
        points,
        generation: run.iterations(),
        max_error_bound: run.max_error_bound,
    })
}
