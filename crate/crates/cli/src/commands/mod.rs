pub mod boxdim;
pub mod event_study;
pub mod fif;
pub mod ingest;
pub mod report;

use fractalmark_core::fixtures::MIXED_ALPHA;
use fractalmark_core::fractal_interp::BaseKind;
use fractalmark_core::ScalingVector;

use crate::error::CliError;

/// Parses an α specification: a number, a comma list, or `mixed`.
pub fn parse_alpha(spec: &str, intervals: usize) -> Result<ScalingVector, CliError> {
    let alpha = if spec.trim().eq_ignore_ascii_case("mixed") {
        ScalingVector::new(MIXED_ALPHA.to_vec())
    } else {
        spec.parse::<ScalingVector>()
    }
    .and_then(|a| a.broadcast(intervals))
    .map_err(|e| CliError::Usage(format!("--alpha `{spec}`: {e}")))?;
    Ok(alpha)
}

/// File-name friendly label for an α specification.
pub fn alpha_label(spec: &str, alpha: &ScalingVector) -> String {
    if spec.trim().eq_ignore_ascii_case("mixed") {
        "mixed".to_string()
    } else if let Some(a) = alpha.as_scalar() {
        fractalmark_core::fmt_f64(a)
    } else {
        "vector".to_string()
    }
}

pub fn parse_base(spec: &str) -> Result<BaseKind, CliError> {
    spec.parse()
        .map_err(|e| CliError::Usage(format!("--base: {e}")))
}

pub fn base_name(base: BaseKind) -> &'static str {
    match base {
        BaseKind::SquaredGerm => "squared-germ",
        BaseKind::Chord => "chord",
    }
}
