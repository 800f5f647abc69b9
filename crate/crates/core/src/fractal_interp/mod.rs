//! α-fractal interpolation functions.
//!
//! Given nodes `(x_i, y_i)`, `i = 0..=P`, on `[0, 1]`, the iterated function
//! system
//!
//! ```text
//! Φ_p(x, y) = (l_p(x), α_p·y + q_p(x)),   q_p(x) = g(l_p(x)) − α_p·b(x)
//! ```
//!
//! with affine domain maps `l_p` onto `[x_{p−1}, x_p]`, germ `g` and base `b`
//! has as attractor the graph of the continuous interpolant `g^α`, which is
//! also the unique fixed point of the Read-Bajraktarevic operator
//! `(T h)(x) = α_p·h(l_p⁻¹(x)) + q_p(l_p⁻¹(x))` on `A_p`.
//!
//! Two independent evaluators are provided: exact graph points generated from
//! the IFS ([`generate_attractor_points`]) and fixed-point iteration of `T` on
//! a uniform grid ([`evaluate_fif_fixed_point`]).

mod affine;
mod attractor;
mod germ;
mod model;
mod rb;

use thiserror::Error;

pub use affine::{build_affine_maps, AffineMaps};
pub use attractor::{
    generate_attractor_points, generate_attractor_points_with_budget, verify_interpolation,
    GraphSample, DEFAULT_MAX_ATTRACTOR_POINTS, NODE_MATCH_TOLERANCE,
};
pub use germ::{base_from_germ, germ_piecewise_linear, BaseFunction, PiecewiseLinear};
pub use model::{BaseKind, FifModel, ScalingVector};
pub use rb::{
    evaluate_fif_fixed_point, fixed_point_iteration, rb_operator_apply, FixedPointOptions,
    FixedPointRun, GridFunction, DEFAULT_MAX_ITERATIONS,
};

#[derive(Debug, Error, PartialEq)]
pub enum FifError {
    #[error("need at least 2 intervals (3 nodes), got {0}")]
    TooFewIntervals(usize),

    #[error("scaling factor α_{index} = {value} must satisfy |α| < 1")]
    InvalidAlpha { index: usize, value: f64 },

    #[error("scaling vector has {got} entries, expected {expected} (one per interval)")]
    AlphaLength { expected: usize, got: usize },

    #[error("cannot parse scaling vector `{0}`")]
    AlphaParse(String),

    #[error("base function misses endpoint: b({x}) = {got}, expected {expected}")]
    BaseEndpoint { x: f64, got: f64, expected: f64 },

    #[error("grid of {grid_size} intervals is too coarse: interval {interval} contains no interior grid point")]
    GridTooCoarse { grid_size: usize, interval: usize },

    #[error("grid of {grid_size} intervals does not contain node x = {x}")]
    NodeOffGrid { grid_size: usize, x: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "fixed-point iteration stopped after {iterations} iterations with error bound {bound:e}"
    )]
    NotConverged { iterations: usize, bound: f64 },

    #[error("attractor depth {depth} needs {requested} points, over the budget of {budget}")]
    TooManyPoints {
        depth: usize,
        requested: u128,
        budget: usize,
    },

    #[error("sample has no point at node x = {0}")]
    NodeMissing(f64),

    #[error("data are collinear; the fractal interpolant degenerates to a line")]
    CollinearData,
}
