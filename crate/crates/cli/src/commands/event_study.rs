use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use fractalmark_core::event_study::{
    grid_rows, run_event_study, write_grid_csv, write_panel_csv, EventStudyConfig,
    DEFAULT_ESTIMATION_DAYS, DEFAULT_WINDOW_DAYS, GRID_WINDOW_LEN,
};
use fractalmark_core::market_data::read_price_csv;
use fractalmark_core::{
    build_panel, daily_returns, fmt_f64, AbnormalReturnPanel, EventStudyError, ReturnSeries,
};

use crate::config::{load_optional, Layered};
use crate::error::CliError;
use crate::output::{file_stem, header_columns, read_text, render, Outcome};
use crate::EventStudyArgs;

pub const KEYS: &[&str] = &[
    "ar",
    "market",
    "asset",
    "event-date",
    "risk-free",
    "beta",
    "estimation-days",
    "window-days",
    "out-dir",
];

pub fn run(args: EventStudyArgs) -> Result<Outcome, CliError> {
    let file = load_optional(args.config.as_deref(), KEYS)?;
    let cfg = Layered::new(file.as_ref());
    let out_dir = cfg.or(args.out_dir, "out-dir", PathBuf::from("out"))?;
    let ar_path: Option<PathBuf> = cfg.opt(args.ar, "ar")?;

    let mut outcome = Outcome::default();
    let (panel, days) = match ar_path {
        Some(path) => {
            let (panel, days) = read_ar_table(&path)?;
            (panel, days)
        }
        None => {
            let market: PathBuf = cfg.opt(args.market, "market")?.ok_or_else(|| {
                CliError::Usage(
                    "event-study needs --market (or --ar with precomputed abnormal returns)".into(),
                )
            })?;
            let assets: Vec<PathBuf> = cfg
                .list(
                    args.asset
                        .iter()
                        .map(|p| p.to_string_lossy().into_owned())
                        .collect(),
                    "asset",
                )
                .into_iter()
                .map(PathBuf::from)
                .collect();
            if assets.is_empty() {
                return Err(CliError::Usage(
                    "event-study needs at least one --asset".into(),
                ));
            }
            let event_date: NaiveDate = cfg
                .opt(args.event_date, "event-date")?
                .ok_or_else(|| CliError::Usage("event-study needs --event-date".into()))?;
            let window = cfg.or(args.window_days, "window-days", DEFAULT_WINDOW_DAYS)?;
            let mut config = EventStudyConfig::new(event_date);
            config.pre_days = window;
            config.post_days = window;
            config.risk_free_daily = cfg.or(args.risk_free, "risk-free", 0.0)?;
            config.beta = cfg.opt(args.beta, "beta")?;
            config.estimation_window_days = cfg.or(
                args.estimation_days,
                "estimation-days",
                DEFAULT_ESTIMATION_DAYS,
            )?;
            if config.estimation_window_days < 3 {
                return Err(CliError::Usage(
                    "--estimation-days must be at least 3".into(),
                ));
            }

            let market_series = load_returns(&market, &mut outcome)?;
            let asset_series = assets
                .iter()
                .map(|p| load_returns(p, &mut outcome))
                .collect::<Result<Vec<_>, _>>()?;
            let result =
                run_event_study(&asset_series, &market_series, &config).map_err(event_error)?;

            let mut capm = String::from("security,beta,intercept,risk_free_daily\n");
            for (series, params) in asset_series.iter().zip(&result.capm) {
                capm.push_str(&format!(
                    "{},{},{},{}\n",
                    series.instrument_id(),
                    fmt_f64(params.beta),
                    fmt_f64(params.intercept),
                    fmt_f64(params.risk_free_daily)
                ));
            }
            outcome.write(out_dir.join("capm.csv"), capm.as_bytes())?;
            let days = result.relative_days().to_vec();
            (result.panel, days)
        }
    };

    outcome.write(out_dir.join("ar.csv"), &ar_table(&panel, &days))?;
    let rows = panel.rows(&days).map_err(event_error)?;
    let bytes = render("event-window table", |w| write_panel_csv(&rows, w))?;
    outcome.write(out_dir.join("table1.csv"), &bytes)?;
    if rows.len() == GRID_WINDOW_LEN {
        let grid = grid_rows(&rows).map_err(event_error)?;
        let bytes = render("grid table", |w| write_grid_csv(&grid, w))?;
        outcome.write(out_dir.join("table2.csv"), &bytes)?;
    } else {
        outcome.warn(format!(
            "the 11-point grid needs a {GRID_WINDOW_LEN}-day window, got {} days; table2.csv not written",
            rows.len()
        ));
    }
    Ok(outcome)
}

/// Maps event-study failures: data that cannot support the request is an
/// input problem, anything else a computation failure.
fn event_error(e: EventStudyError) -> CliError {
    match e {
        EventStudyError::InsufficientHistory { .. }
        | EventStudyError::MarketData(_)
        | EventStudyError::NotAligned
        | EventStudyError::WindowMismatch => CliError::Data(format!("event study: {e}")),
        other => CliError::computation("event study", other),
    }
}

/// Reads prices (`date,open,close`) or ready returns (`date,return`).
fn load_returns(path: &Path, outcome: &mut Outcome) -> Result<ReturnSeries, CliError> {
    let text = read_text(path)?;
    let id = file_stem(path);
    if header_columns(&text).iter().any(|c| c == "return") {
        return ReturnSeries::read_csv(&id, text.as_bytes()).map_err(|e| CliError::input(path, e));
    }
    let parsed = read_price_csv(&id, text.as_bytes()).map_err(|e| CliError::input(path, e))?;
    if !parsed.ignored_columns.is_empty() {
        outcome.warn(format!(
            "{}: ignored columns {}",
            path.display(),
            parsed.ignored_columns.join(", ")
        ));
    }
    Ok(daily_returns(&parsed.series))
}

/// Reads `relative_day,<security>,...` with contiguous, increasing days.
fn read_ar_table(path: &Path) -> Result<(AbnormalReturnPanel, Vec<i64>), CliError> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::input(path, e))?
        .clone();
    let day_col = headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case("relative_day"))
        .ok_or_else(|| CliError::input(path, "missing column `relative_day`"))?;
    let securities: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != day_col)
        .map(|(i, h)| (i, h.to_string()))
        .collect();
    if securities.is_empty() {
        return Err(CliError::input(
            path,
            "no security columns besides `relative_day`",
        ));
    }

    let mut days = Vec::new();
    let mut ar = vec![Vec::new(); securities.len()];
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| CliError::input(path, e))?;
        let day: i64 = record[day_col].parse().map_err(|_| {
            CliError::input(
                path,
                format!("row {row}: bad relative_day `{}`", &record[day_col]),
            )
        })?;
        if let Some(&prev) = days.last() {
            if day != prev + 1 {
                return Err(CliError::input(
                    path,
                    format!("row {row}: relative days must be consecutive ({prev} then {day})"),
                ));
            }
        }
        days.push(day);
        for (k, (col, name)) in securities.iter().enumerate() {
            let raw = record.get(*col).unwrap_or("");
            let v: f64 = raw.parse().map_err(|_| {
                CliError::input(
                    path,
                    format!("row {row}, column {name}: bad number `{raw}`"),
                )
            })?;
            ar[k].push(v);
        }
    }
    let labels = securities.into_iter().map(|(_, n)| n).collect();
    let panel = build_panel(ar)
        .and_then(|p| p.with_securities(labels))
        .map_err(|e| CliError::input(path, e))?;
    Ok((panel, days))
}

fn ar_table(panel: &AbnormalReturnPanel, days: &[i64]) -> Vec<u8> {
    let mut s = String::from("relative_day");
    for name in panel.securities() {
        s.push(',');
        s.push_str(name);
    }
    s.push('\n');
    for (t, day) in days.iter().enumerate() {
        s.push_str(&day.to_string());
        for row in panel.ar() {
            s.push(',');
            s.push_str(&fmt_f64(row[t]));
        }
        s.push('\n');
    }
    s.into_bytes()
}
