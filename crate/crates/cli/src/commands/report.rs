//! The reproduction bundle: per-year tables, FIF samples and plots, dimension
//! estimates, the comparison against the published dimensions and a bar chart.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fractalmark_core::box_dimension::{DEFAULT_K_MAX, DEFAULT_K_MIN, DEFAULT_MIN_POINTS_PER_BOX};
use fractalmark_core::event_study::{
    grid_rows, read_panel_csv, write_grid_csv, write_panel_csv, PanelRow, GRID_WINDOW_LEN,
};
use fractalmark_core::fixtures::{self, Series, BASELINE_YEAR, FIXTURE_VERSION};
use fractalmark_core::fractal_interp::BaseKind;
use fractalmark_core::{
    fmt_f64, generate_attractor_points, verify_interpolation, DimensionEstimate, FifModel,
    InterpolationData, ScalingVector,
};

use crate::commands::boxdim::{curve_csv, report_json, Protocol};
use crate::commands::fif::write_sample;
use crate::commands::{alpha_label, base_name, parse_alpha, parse_base};
use crate::config::{load_optional, Layered};
use crate::error::CliError;
use crate::output::{read_text, Outcome};
use crate::svg::{bar_chart, BarChart, BarGroup};
use crate::ReportArgs;

pub const KEYS: &[&str] = &[
    "out-dir",
    "year",
    "sample-depth",
    "depth",
    "k-min",
    "k-max",
    "min-points-per-box",
    "base",
    "delta-warning",
];

/// α settings plotted for each series (the four panels per series).
pub const PLOT_ALPHAS: [&str; 4] = ["0.3", "0.5", "mixed", "0"];
/// Uniform α values whose dimensions are compared with the published table.
pub const DIMENSION_ALPHAS: [f64; 2] = [0.3, 0.5];

const NODE_RESIDUAL_LIMIT: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportConfig {
    pub out_dir: PathBuf,
    /// User-supplied event-window tables keyed by year.
    pub years: BTreeMap<u16, PathBuf>,
    pub sample_depth: usize,
    pub depth: usize,
    pub protocol: Protocol,
    pub base: BaseKind,
    pub delta_warning: f64,
}

impl ReportConfig {
    pub fn from_args(args: ReportArgs) -> Result<Self, CliError> {
        let file = load_optional(args.config.as_deref(), KEYS)?;
        let cfg = Layered::new(file.as_ref());
        let mut years = BTreeMap::new();
        for spec in cfg.list(args.year, "year") {
            let (year, path) = spec
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--year `{spec}`: expected YEAR=path")))?;
            let year: u16 = year
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("--year `{spec}`: bad year")))?;
            if years.insert(year, PathBuf::from(path.trim())).is_some() {
                return Err(CliError::Usage(format!("year {year} given twice")));
            }
        }
        let delta_warning = cfg.or(args.delta_warning, "delta-warning", 0.15)?;
        if delta_warning.is_nan() || delta_warning < 0.0 {
            return Err(CliError::Usage(
                "--delta-warning must be non-negative".into(),
            ));
        }
        Ok(Self {
            out_dir: cfg.or(args.out_dir, "out-dir", PathBuf::from("report"))?,
            years,
            sample_depth: cfg.or(args.sample_depth, "sample-depth", 3)?,
            depth: cfg.or(args.depth, "depth", 5)?,
            protocol: Protocol {
                k_min: cfg.or(args.k_min, "k-min", DEFAULT_K_MIN)?,
                k_max: cfg.or(args.k_max, "k-max", DEFAULT_K_MAX)?,
                min_points_per_box: cfg.or(
                    args.min_points_per_box,
                    "min-points-per-box",
                    DEFAULT_MIN_POINTS_PER_BOX,
                )?,
                normalize: true,
            }
            .validate()?,
            base: parse_base(&cfg.or(args.base, "base", "squared-germ".to_string())?)?,
            delta_warning,
        })
    }

    pub fn with_defaults(out_dir: PathBuf) -> Self {
        Self {
            out_dir,
            years: BTreeMap::new(),
            sample_depth: 3,
            depth: 5,
            protocol: Protocol {
                k_min: DEFAULT_K_MIN,
                k_max: DEFAULT_K_MAX,
                min_points_per_box: DEFAULT_MIN_POINTS_PER_BOX,
                normalize: true,
            },
            base: BaseKind::SquaredGerm,
            delta_warning: 0.15,
        }
    }
}

/// One dimension estimate of the report.
#[derive(Debug, Clone)]
pub struct DimensionEntry {
    pub series: Series,
    pub alpha: f64,
    pub estimate: DimensionEstimate,
}

#[derive(Debug, Clone)]
pub enum YearStatus {
    Computed(Vec<DimensionEntry>),
    NotSupplied,
    Skipped(String),
}

impl YearStatus {
    fn describe(&self) -> String {
        match self {
            YearStatus::Computed(_) => "computed".into(),
            YearStatus::NotSupplied => "data not supplied".into(),
            YearStatus::Skipped(reason) => format!("skipped: {reason}"),
        }
    }
}

/// Row of the delta table; values are absent when a side is unavailable.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaRow {
    pub year: u16,
    pub series: Series,
    pub alpha: f64,
    pub published_value: Option<f64>,
    pub computed_value: Option<f64>,
}

impl DeltaRow {
    pub fn delta(&self) -> Option<f64> {
        Some(self.computed_value? - self.published_value?)
    }
}

#[derive(Debug, Clone)]
pub struct ReproductionReport {
    pub years: BTreeMap<u16, YearStatus>,
    pub deltas: Vec<DeltaRow>,
    pub outcome: Outcome,
}

pub fn run(args: ReportArgs) -> Result<Outcome, CliError> {
    let config = ReportConfig::from_args(args)?;
    Ok(generate(&config)?.outcome)
}

pub fn generate(config: &ReportConfig) -> Result<ReproductionReport, CliError> {
    let published = fixtures::table3();
    let mut all_years: BTreeSet<u16> = published.iter().map(|d| d.year).collect();
    all_years.insert(BASELINE_YEAR);
    all_years.extend(config.years.keys());

    let mut outcome = Outcome::default();
    let mut years = BTreeMap::new();
    for &year in &all_years {
        let status = match config.years.get(&year) {
            Some(path) => match load_window(path) {
                Ok(rows) => match process_year(config, year, &rows, &mut outcome) {
                    Ok(dims) => YearStatus::Computed(dims),
                    Err(e) => YearStatus::Skipped(e.to_string()),
                },
                Err(e) => YearStatus::Skipped(e.to_string()),
            },
            None if year == BASELINE_YEAR => YearStatus::Computed(process_year(
                config,
                year,
                &fixtures::table1(),
                &mut outcome,
            )?),
            None => YearStatus::NotSupplied,
        };
        if let YearStatus::Skipped(reason) = &status {
            outcome.warn(format!("{year} skipped: {reason}"));
        }
        years.insert(year, status);
    }

    let mut deltas = Vec::new();
    for (&year, status) in &years {
        for series in Series::ALL {
            for alpha in DIMENSION_ALPHAS {
                let published_value = published
                    .iter()
                    .find(|d| d.year == year && d.series == series && d.alpha == alpha)
                    .map(|d| d.dimension);
                let entry = match status {
                    YearStatus::Computed(dims) => {
                        dims.iter().find(|d| d.series == series && d.alpha == alpha)
                    }
                    _ => None,
                };
                let row = DeltaRow {
                    year,
                    series,
                    alpha,
                    published_value,
                    computed_value: entry.map(|e| e.estimate.dimension),
                };
                if let (Some(delta), Some(entry)) = (row.delta(), entry) {
                    if delta.abs() > config.delta_warning {
                        outcome.warn(delta_warning(
                            &row,
                            delta,
                            config.delta_warning,
                            &entry.estimate,
                        ));
                    }
                }
                deltas.push(row);
            }
        }
    }

    let dir = &config.out_dir;
    outcome.write(dir.join("table3_delta.csv"), delta_csv(&deltas).as_bytes())?;
    outcome.write(
        dir.join("dimension_comparison.svg"),
        comparison_chart(&deltas).as_bytes(),
    )?;
    let summary = summary(config, &years, &deltas, &outcome);
    outcome.write(dir.join("summary.md"), summary.as_bytes())?;
    Ok(ReproductionReport {
        years,
        deltas,
        outcome,
    })
}

fn load_window(path: &Path) -> Result<Vec<PanelRow>, CliError> {
    let text = read_text(path)?;
    let rows = read_panel_csv(text.as_bytes()).map_err(|e| CliError::input(path, e))?;
    if rows.len() != GRID_WINDOW_LEN {
        return Err(CliError::input(
            path,
            format!(
                "partial data: {} of {GRID_WINDOW_LEN} event-window days",
                rows.len()
            ),
        ));
    }
    let half = (GRID_WINDOW_LEN / 2) as i64;
    for (i, r) in rows.iter().enumerate() {
        if r.relative_day != i as i64 - half {
            return Err(CliError::input(
                path,
                format!(
                    "row {} has relative day {}, expected {}",
                    i + 2,
                    r.relative_day,
                    i as i64 - half
                ),
            ));
        }
        if !r.aar.is_finite() || !r.caar.is_finite() {
            return Err(CliError::input(
                path,
                format!("row {} is not finite", i + 2),
            ));
        }
    }
    Ok(rows)
}

fn process_year(
    config: &ReportConfig,
    year: u16,
    rows: &[PanelRow],
    outcome: &mut Outcome,
) -> Result<Vec<DimensionEntry>, CliError> {
    let dir = config.out_dir.join(year.to_string());
    let ctx = |what: &str| format!("{year} {what}");
    let mut table1 = Vec::new();
    write_panel_csv(rows, &mut table1).map_err(|e| CliError::computation(ctx("table 1"), e))?;
    outcome.write(dir.join("table1.csv"), &table1)?;
    let grid = grid_rows(rows).map_err(|e| CliError::computation(ctx("grid"), e))?;
    let mut table2 = Vec::new();
    write_grid_csv(&grid, &mut table2).map_err(|e| CliError::computation(ctx("table 2"), e))?;
    outcome.write(dir.join("table2.csv"), &table2)?;

    let mut dims = Vec::new();
    for series in Series::ALL {
        let points = grid
            .iter()
            .map(|r| match series {
                Series::Aar => (r.x, r.aar),
                Series::Caar => (r.x, r.caar),
            })
            .collect();
        let data =
            InterpolationData::new(points).map_err(|e| CliError::computation(ctx("grid"), e))?;

        for spec in PLOT_ALPHAS {
            let alpha = parse_alpha(spec, data.intervals())?;
            let label = alpha_label(spec, &alpha);
            let model = build_model(config, &data, alpha, &ctx("model"))?;
            let sample = generate_attractor_points(&model, config.sample_depth)
                .map_err(|e| CliError::computation(ctx("attractor"), e))?;
            let residual = verify_interpolation(&sample, &data)
                .map_err(|e| CliError::computation(ctx("interpolation check"), e))?;
            if residual >= NODE_RESIDUAL_LIMIT {
                return Err(CliError::computation(
                    ctx("interpolation check"),
                    format!("{} α={label} misses a node by {residual}", series.label()),
                ));
            }
            let title = format!("{year} {} α-FIF, α = {label}", series.label());
            let name = format!("{}_alpha-{label}", series.name());
            write_sample(outcome, &dir.join("fif"), &name, &title, &sample, &data)?;
        }

        for alpha in DIMENSION_ALPHAS {
            let scaling = ScalingVector::uniform(alpha, data.intervals())
                .map_err(|e| CliError::computation(ctx("model"), e))?;
            let model = build_model(config, &data, scaling, &ctx("model"))?;
            let sample = generate_attractor_points(&model, config.depth)
                .map_err(|e| CliError::computation(ctx("attractor"), e))?;
            let estimate = config.protocol.estimate(&sample.points)?;
            let stem = format!("{}_alpha-{}", series.name(), fmt_f64(alpha));
            let ddir = dir.join("dimension");
            outcome.write(ddir.join(format!("{stem}.json")), &report_json(&estimate)?)?;
            outcome.write(
                ddir.join(format!("{stem}_loglog.csv")),
                &curve_csv(&estimate)?,
            )?;
            if estimate.outside_curve_range() {
                outcome.warn(format!(
                    "{year} {} α={alpha}: dimension {} outside [1, 2]",
                    series.label(),
                    estimate.dimension
                ));
            }
            dims.push(DimensionEntry {
                series,
                alpha,
                estimate,
            });
        }
    }
    Ok(dims)
}

fn build_model(
    config: &ReportConfig,
    data: &InterpolationData,
    alpha: ScalingVector,
    ctx: &str,
) -> Result<FifModel, CliError> {
    FifModel::new(data.clone(), alpha, config.base).map_err(|e| CliError::computation(ctx, e))
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn delta_csv(rows: &[DeltaRow]) -> String {
    let mut s = String::from("year,series,alpha,published_value,computed_value,delta\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.year,
            r.series.name(),
            fmt_f64(r.alpha),
            opt(r.published_value),
            opt(r.computed_value),
            opt(r.delta())
        );
    }
    s
}

fn delta_warning(row: &DeltaRow, delta: f64, limit: f64, est: &DimensionEstimate) -> String {
    let curve: Vec<String> = est
        .curve
        .scales
        .iter()
        .map(|c| format!("k={} N={}", c.k, c.count))
        .collect();
    format!(
        "{} {} α={}: computed {:.3} vs published {:.3} (delta {:+.3}, beyond ±{}); \
         fit over k={}..{}, r²={:.4}; box counts: {}",
        row.year,
        row.series.label(),
        fmt_f64(row.alpha),
        est.dimension,
        row.published_value.unwrap_or(f64::NAN),
        delta,
        fmt_f64(limit),
        est.levels_used.0,
        est.levels_used.1,
        est.r_squared,
        curve.join(", ")
    )
}

fn comparison_chart(rows: &[DeltaRow]) -> String {
    let series_order: Vec<(Series, f64)> = Series::ALL
        .iter()
        .flat_map(|&s| DIMENSION_ALPHAS.iter().map(move |&a| (s, a)))
        .collect();
    let names: Vec<String> = series_order
        .iter()
        .map(|(s, a)| format!("{} α={}", s.label(), fmt_f64(*a)))
        .collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let years: BTreeSet<u16> = rows.iter().map(|r| r.year).collect();
    let groups: Vec<BarGroup> = years
        .iter()
        .map(|&year| {
            let find = |s: Series, a: f64| {
                rows.iter()
                    .find(|r| r.year == year && r.series == s && r.alpha == a)
            };
            BarGroup {
                label: year.to_string(),
                values: series_order
                    .iter()
                    .map(|&(s, a)| find(s, a).and_then(|r| r.computed_value))
                    .collect(),
                references: series_order
                    .iter()
                    .map(|&(s, a)| find(s, a).and_then(|r| r.published_value))
                    .collect(),
            }
        })
        .collect();
    bar_chart(&BarChart {
        title: "Box-counting dimension of AAR and CAAR α-FIFs",
        y_label: "dimension",
        series: &name_refs,
        groups: &groups,
        y_range: (1.0, 2.0),
        reference_label: "published",
    })
}

fn summary(
    config: &ReportConfig,
    years: &BTreeMap<u16, YearStatus>,
    deltas: &[DeltaRow],
    outcome: &Outcome,
) -> String {
    let p = &config.protocol;
    let mut s = String::new();
    let _ = writeln!(s, "# fractalmark reproduction report\n");
    let _ = writeln!(s, "Embedded fixture version: {FIXTURE_VERSION}\n");
    let _ = writeln!(s, "## Settings\n");
    let _ = writeln!(s, "- base function: {}", base_name(config.base));
    let _ = writeln!(
        s,
        "- plotted samples: attractor depth {}",
        config.sample_depth
    );
    let _ = writeln!(
        s,
        "- dimension samples: attractor depth {} ({} points for 10 intervals)",
        config.depth,
        10u128.pow(config.depth as u32 + 1) + 1
    );
    let _ = writeln!(
        s,
        "- box counting: levels k = {}..{} (box side 2^-k), at least {} points per box, unit-square normalization",
        p.k_min, p.k_max, p.min_points_per_box
    );
    let _ = writeln!(
        s,
        "- delta warning threshold: {}\n",
        fmt_f64(config.delta_warning)
    );

    let _ = writeln!(s, "## Years\n");
    let _ = writeln!(s, "| year | status |\n|---|---|");
    for (year, status) in years {
        let _ = writeln!(s, "| {year} | {} |", status.describe());
    }

    let _ = writeln!(s, "\n## Box-counting dimensions\n");
    let _ = writeln!(
        s,
        "| year | series | α | computed | r² | levels used | excluded levels | published | delta |"
    );
    let _ = writeln!(s, "|---|---|---|---|---|---|---|---|---|");
    for row in deltas {
        let entry = match years.get(&row.year) {
            Some(YearStatus::Computed(dims)) => dims
                .iter()
                .find(|d| d.series == row.series && d.alpha == row.alpha),
            _ => None,
        };
        let (computed, r2, levels, excluded) = match entry {
            Some(e) => (
                format!("{:.3}", e.estimate.dimension),
                format!("{:.4}", e.estimate.r_squared),
                format!("{}..{}", e.estimate.levels_used.0, e.estimate.levels_used.1),
                format!("{:?}", e.estimate.excluded_levels),
            ),
            None => ("-".into(), "-".into(), "-".into(), "-".into()),
        };
        let _ = writeln!(
            s,
            "| {} | {} | {} | {computed} | {r2} | {levels} | {excluded} | {} | {} |",
            row.year,
            row.series.label(),
            fmt_f64(row.alpha),
            row.published_value
                .map_or("-".into(), |v| format!("{v:.3}")),
            row.delta().map_or("-".into(), |v| format!("{v:+.3}")),
        );
    }

    let _ = writeln!(s, "\n## Warnings\n");
    if outcome.warnings.is_empty() {
        let _ = writeln!(s, "None.");
    }
    for w in &outcome.warnings {
        let _ = writeln!(s, "- {w}");
    }

    let _ = writeln!(s, "\n## Files\n");
    let mut files: Vec<String> = outcome
        .written
        .iter()
        .filter_map(|p| p.strip_prefix(&config.out_dir).ok())
        .map(|p| p.to_string_lossy().replace('\\', "/"))
        .collect();
    files.extend(["summary.md".to_string()]);
    files.sort();
    for f in files {
        let _ = writeln!(s, "- {f}");
    }
    s
}
