use fractalmark_core::box_dimension::{
    DEFAULT_K_MAX, DEFAULT_K_MIN, DEFAULT_MIN_POINTS_PER_BOX, MAX_LEVEL,
};
use fractalmark_core::event_study::read_xy_csv;
use fractalmark_core::{
    estimate_dimension, normalize_to_unit_square, DimensionEstimate, NormalizedCloud,
};

use crate::config::{load_optional, Layered};
use crate::error::CliError;
use crate::output::{read_text, render, Outcome};
use crate::BoxdimArgs;

pub const KEYS: &[&str] = &[
    "input",
    "k-min",
    "k-max",
    "min-points-per-box",
    "no-normalize",
    "out",
    "curve-csv",
];

/// Counting protocol shared by `boxdim` and `report`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Protocol {
    pub k_min: u32,
    pub k_max: u32,
    pub min_points_per_box: usize,
    pub normalize: bool,
}

impl Protocol {
    pub fn validate(self) -> Result<Self, CliError> {
        if self.k_min >= self.k_max || self.k_max > MAX_LEVEL {
            return Err(CliError::Usage(format!(
                "levels must satisfy k-min < k-max <= {MAX_LEVEL}, got {}..{}",
                self.k_min, self.k_max
            )));
        }
        if self.min_points_per_box == 0 {
            return Err(CliError::Usage(
                "min-points-per-box must be at least 1".into(),
            ));
        }
        Ok(self)
    }

    pub fn estimate(&self, points: &[(f64, f64)]) -> Result<DimensionEstimate, CliError> {
        let cloud = if self.normalize {
            normalize_to_unit_square(points)
        } else {
            NormalizedCloud::from_unit_square(points)
        }
        .map_err(|e| CliError::computation("box counting", e))?;
        estimate_dimension(&cloud, self.k_min, self.k_max, self.min_points_per_box)
            .map_err(|e| CliError::computation("box counting", e))
    }
}

pub fn report_json(estimate: &DimensionEstimate) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(&estimate.report())
        .map_err(|e| CliError::computation("rendering dimension report", e))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn curve_csv(estimate: &DimensionEstimate) -> Result<Vec<u8>, CliError> {
    render("log-log curve", |w| estimate.curve.write_csv(w))
}

pub fn run(args: BoxdimArgs) -> Result<Outcome, CliError> {
    let file = load_optional(args.config.as_deref(), KEYS)?;
    let cfg = Layered::new(file.as_ref());
    let input: std::path::PathBuf = cfg
        .opt(args.input, "input")?
        .ok_or_else(|| CliError::Usage("boxdim needs --input".into()))?;
    let protocol = Protocol {
        k_min: cfg.or(args.k_min, "k-min", DEFAULT_K_MIN)?,
        k_max: cfg.or(args.k_max, "k-max", DEFAULT_K_MAX)?,
        min_points_per_box: cfg.or(
            args.min_points_per_box,
            "min-points-per-box",
            DEFAULT_MIN_POINTS_PER_BOX,
        )?,
        normalize: !cfg.switch(args.no_normalize, "no-normalize")?,
    }
    .validate()?;
    let out = cfg.opt(args.out, "out")?;
    let curve_path = cfg.opt(args.curve_csv, "curve-csv")?;

    let text = read_text(&input)?;
    let points = read_xy_csv(text.as_bytes()).map_err(|e| CliError::input(&input, e))?;
    let estimate = protocol.estimate(&points)?;

    let mut outcome = Outcome::default();
    if estimate.outside_curve_range() {
        outcome.warn(format!(
            "dimension {} lies outside [1, 2], the range for graphs of continuous functions",
            estimate.dimension
        ));
    }
    if !estimate.excluded_levels.is_empty() {
        outcome.warn(format!(
            "levels {:?} dropped: too few points to fill them",
            estimate.excluded_levels
        ));
    }
    let json = report_json(&estimate)?;
    match out {
        Some(path) => outcome.write(path, &json)?,
        None => outcome.stdout = String::from_utf8(json).expect("serde_json emits UTF-8"),
    }
    if let Some(path) = curve_path {
        outcome.write(path, &curve_csv(&estimate)?)?;
    }
    Ok(outcome)
}
