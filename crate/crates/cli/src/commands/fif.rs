use std::path::{Path, PathBuf};

use fractalmark_core::event_study::{grid_rows, read_grid_csv, read_panel_csv, GridRow};
use fractalmark_core::fixtures::{self, Series};
use fractalmark_core::fractal_interp::{FixedPointOptions, DEFAULT_MAX_ITERATIONS};
use fractalmark_core::{
    evaluate_fif_fixed_point, generate_attractor_points, verify_interpolation, FifModel,
    GraphSample, InterpolationData,
};

use crate::commands::{alpha_label, parse_alpha, parse_base};
use crate::config::{load_optional, Layered};
use crate::error::CliError;
use crate::output::{file_stem, header_columns, read_text, render, Outcome};
use crate::svg::{line_plot, LinePlot};
use crate::FifArgs;

pub const KEYS: &[&str] = &[
    "data",
    "series",
    "alpha",
    "depth",
    "method",
    "grid-size",
    "tol",
    "base",
    "out-dir",
    "name",
];

/// Nodal residual above which a sample is reported as broken.
const NODE_RESIDUAL_LIMIT: f64 = 1e-7;

pub fn run(args: FifArgs) -> Result<Outcome, CliError> {
    let file = load_optional(args.config.as_deref(), KEYS)?;
    let cfg = Layered::new(file.as_ref());
    let series: Series = cfg
        .opt(args.series, "series")?
        .map(|s: String| s.parse().map_err(CliError::Usage))
        .transpose()?
        .unwrap_or(Series::Aar);
    let data_path: Option<PathBuf> = cfg.opt(args.data, "data")?;
    let alpha_spec: String = cfg
        .opt(args.alpha, "alpha")?
        .ok_or_else(|| CliError::Usage("fif needs --alpha".into()))?;
    let depth = cfg.or(args.depth, "depth", 3usize)?;
    let method = cfg.or(args.method, "method", "attractor".to_string())?;
    let base = parse_base(&cfg.or(args.base, "base", "squared-germ".to_string())?)?;
    let out_dir = cfg.or(args.out_dir, "out-dir", PathBuf::from("out"))?;

    let (data, source) = match &data_path {
        Some(p) => (load_interpolation_data(p, series)?, file_stem(p)),
        None => (fixtures::table2_data(series), series.name().to_string()),
    };
    let intervals = data.intervals();
    let alpha = parse_alpha(&alpha_spec, intervals)?;
    let label = alpha_label(&alpha_spec, &alpha);
    let model = FifModel::new(data.clone(), alpha, base)
        .map_err(|e| CliError::computation("building the FIF", e))?;

    let sample = match method.as_str() {
        "attractor" => generate_attractor_points(&model, depth)
            .map_err(|e| CliError::computation("attractor", e))?,
        "fixed-point" => {
            let options = FixedPointOptions {
                grid_size: cfg.opt(args.grid_size, "grid-size")?,
                tol: cfg.or(args.tol, "tol", 1e-9)?,
                max_iterations: DEFAULT_MAX_ITERATIONS,
            };
            evaluate_fif_fixed_point(&model, &options)
                .map_err(|e| CliError::computation("fixed-point iteration", e))?
        }
        other => {
            return Err(CliError::Usage(format!(
                "--method `{other}` (expected attractor or fixed-point)"
            )))
        }
    };
    let residual = verify_interpolation(&sample, &data)
        .map_err(|e| CliError::computation("interpolation check", e))?;
    if residual >= NODE_RESIDUAL_LIMIT {
        return Err(CliError::computation(
            "interpolation check",
            format!("sample misses a node by {residual}"),
        ));
    }

    let name = cfg
        .opt(args.name, "name")?
        .unwrap_or_else(|| format!("fif_{source}_alpha-{label}"));
    let title = format!("α-FIF of {source}, α = {label}");
    let mut outcome = Outcome::default();
    write_sample(&mut outcome, &out_dir, &name, &title, &sample, &data)?;
    Ok(outcome)
}

/// Writes `<name>.csv` and `<name>.svg` for one sample.
pub fn write_sample(
    outcome: &mut Outcome,
    dir: &Path,
    name: &str,
    title: &str,
    sample: &GraphSample,
    data: &InterpolationData,
) -> Result<(), CliError> {
    let bytes = render("FIF sample", |w| sample.write_csv(w))?;
    outcome.write(dir.join(format!("{name}.csv")), &bytes)?;
    let svg = line_plot(&LinePlot {
        title,
        x_label: "x",
        y_label: "g(x)",
        curve: &sample.points,
        markers: data.points(),
    });
    outcome.write(dir.join(format!("{name}.svg")), svg.as_bytes())
}

/// Loads `x,y`, an 11-row `x,aar,caar` grid, or a 31-row event-window table.
pub fn load_interpolation_data(path: &Path, series: Series) -> Result<InterpolationData, CliError> {
    let text = read_text(path)?;
    let columns = header_columns(&text);
    let has = |c: &str| columns.iter().any(|h| h == c);
    let pick = |rows: Vec<GridRow>| -> Vec<(f64, f64)> {
        rows.into_iter()
            .map(|r| match series {
                Series::Aar => (r.x, r.aar),
                Series::Caar => (r.x, r.caar),
            })
            .collect()
    };
    let points = if has("relative_day") {
        let rows = read_panel_csv(text.as_bytes()).map_err(|e| CliError::input(path, e))?;
        pick(grid_rows(&rows).map_err(|e| CliError::input(path, e))?)
    } else if has("aar") && has("caar") {
        pick(read_grid_csv(text.as_bytes()).map_err(|e| CliError::input(path, e))?)
    } else {
        return InterpolationData::read_csv(text.as_bytes()).map_err(|e| CliError::input(path, e));
    };
    InterpolationData::normalized(points).map_err(|e| CliError::input(path, e))
}
