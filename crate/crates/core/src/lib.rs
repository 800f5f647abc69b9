//! Event-study returns, α-fractal interpolation and box-counting dimension
//! for daily market data.
//!
//! The pipeline runs in four stages, each in its own module:
//!
//! 1. [`market_data`]: parse daily open/close bars and turn them into
//!    intraday returns.
//! 2. [`event_study`]: CAPM expected returns, abnormal returns and their
//!    AAR/CAAR aggregates over a window of trading days around an event,
//!    then the 11-point interpolation grid.
//! 3. [`fractal_interp`]: α-fractal interpolation functions through the grid,
//!    evaluated either as the attractor of the iterated function system or
//!    as the fixed point of the Read-Bajraktarevic operator.
//! 4. [`box_dimension`]: multi-scale box counting with a log-log regression.
//!
//! [`fixtures`] carries the published 2024 NIFTY50 tables used as the
//! offline reference data set.

pub mod box_dimension;
pub mod event_study;
pub mod fixtures;
pub mod fractal_interp;
pub mod market_data;
pub mod regression;

mod numfmt;

pub use numfmt::fmt_f64;

pub use box_dimension::{
    affine_fif_dimension_oracle, count_boxes, estimate_dimension, normalize_to_unit_square,
    BoxCount, BoxCountCurve, DimensionError, DimensionEstimate, DimensionReport, NormalizedCloud,
};
pub use event_study::{
    abnormal_return, build_panel, estimate_capm, expected_return, extract_event_window,
    subsample_to_grid, AbnormalReturnPanel, CapmParams, EventStudyError, EventWindow,
    InterpolationData,
};
pub use fractal_interp::{
    base_from_germ, build_affine_maps, evaluate_fif_fixed_point, generate_attractor_points,
    germ_piecewise_linear, rb_operator_apply, verify_interpolation, AffineMaps, BaseFunction,
    FifError, FifModel, GraphSample, GridFunction, PiecewiseLinear, ScalingVector,
};
pub use market_data::{
    align_on_common_dates, daily_returns, parse_price_csv, MarketDataError, PriceBar, PriceSeries,
    ReturnSeries,
};
