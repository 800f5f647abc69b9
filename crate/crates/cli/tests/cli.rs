use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fractalmark_core::event_study::{read_grid_csv, read_panel_csv, read_xy_csv};
use fractalmark_core::fixtures::{self, Series};
use fractalmark_core::{germ_piecewise_linear, DimensionReport, ReturnSeries};
use tempfile::TempDir;

fn fractalmark(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fractalmark"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Weekday dates from 2024-01-01 with a smooth synthetic price path.
fn write_prices(path: &Path, days: usize, scale: f64, extra: bool) {
    let mut s = String::from(if extra {
        "date,open,close,volume\n"
    } else {
        "date,open,close\n"
    });
    let mut date = chrono::NaiveDate::from_ymd_opt(2024, 1, 1).unwrap();
    let mut written = 0;
    while written < days {
        use chrono::Datelike;
        if date.weekday().number_from_monday() <= 5 {
            let t = written as f64;
            let open = scale * (100.0 + 5.0 * (t / 7.0).sin());
            let close = open * (1.0 + 0.01 * (t / 3.0).cos());
            s.push_str(&format!("{date},{open},{close}"));
            if extra {
                s.push_str(",1000");
            }
            s.push('\n');
            written += 1;
        }
        date = date.succ_opt().unwrap();
    }
    fs::write(path, s).unwrap();
}

fn data_lines(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

#[test]
fn ingest_writes_one_return_per_bar() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("nifty.csv");
    write_prices(&input, 31, 1.0, false);
    let out_dir = dir.path().join("out");
    let out = fractalmark(&[
        "ingest",
        "--input",
        path_arg(&input),
        "--out-dir",
        path_arg(&out_dir),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let returns = out_dir.join("nifty").join("returns.csv");
    assert_eq!(data_lines(&returns), 31);
    let parsed = ReturnSeries::read_csv("nifty", fs::read(&returns).unwrap().as_slice()).unwrap();
    assert_eq!(parsed.len(), 31);
}

#[test]
fn ingest_missing_file_exits_2_naming_the_path() {
    let out = fractalmark(&["ingest", "--input", "/no/such/prices.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/no/such/prices.csv"));
}

#[test]
fn ingest_warns_about_extra_columns() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("asset.csv");
    write_prices(&input, 5, 1.0, true);
    let out = fractalmark(&[
        "ingest",
        "--input",
        path_arg(&input),
        "--out-dir",
        path_arg(dir.path()),
    ]);
    assert!(out.status.success());
    let err = stderr(&out);
    assert!(err.contains("warning") && err.contains("volume"), "{err}");
}

#[test]
fn event_study_with_precomputed_ar_reproduces_table1() {
    let dir = TempDir::new().unwrap();
    let t1 = fixtures::table1();
    let mut s = String::from("relative_day,nifty50\n");
    for r in &t1 {
        s.push_str(&format!("{},{}\n", r.relative_day, r.aar));
    }
    let ar = dir.path().join("ar.csv");
    fs::write(&ar, s).unwrap();
    let out = fractalmark(&[
        "event-study",
        "--ar",
        path_arg(&ar),
        "--out-dir",
        path_arg(dir.path()),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let rows = read_panel_csv(fs::read(dir.path().join("table1.csv")).unwrap().as_slice()).unwrap();
    assert_eq!(rows.len(), 31);
    for (got, want) in rows.iter().zip(&t1) {
        assert_eq!(got.relative_day, want.relative_day);
        assert!((got.caar - want.caar).abs() <= 5e-5);
    }
    let grid = read_grid_csv(fs::read(dir.path().join("table2.csv")).unwrap().as_slice()).unwrap();
    let published = fixtures::table2();
    for (g, p) in grid.iter().zip(&published) {
        assert_eq!(g.x, p.x);
        assert_eq!(g.aar, p.aar);
        assert!((g.caar - p.caar).abs() <= 5e-5);
    }
}

#[test]
fn asset_identical_to_market_has_zero_abnormal_returns() {
    let dir = TempDir::new().unwrap();
    let market = dir.path().join("market.csv");
    let asset = dir.path().join("asset.csv");
    write_prices(&market, 200, 1.0, false);
    write_prices(&asset, 200, 1.0, false);
    let out = fractalmark(&[
        "event-study",
        "--market",
        path_arg(&market),
        "--asset",
        path_arg(&asset),
        "--event-date",
        "2024-08-01",
        "--out-dir",
        path_arg(dir.path()),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = read_panel_csv(fs::read(dir.path().join("table1.csv")).unwrap().as_slice()).unwrap();
    assert_eq!(rows.len(), 31);
    for r in rows {
        assert!(r.aar.abs() < 1e-12 && r.caar.abs() < 1e-12, "{r:?}");
    }
    let capm = fs::read_to_string(dir.path().join("capm.csv")).unwrap();
    let beta: f64 = capm
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((beta - 1.0).abs() < 1e-9);
}

#[test]
fn short_history_names_required_and_available_days() {
    let dir = TempDir::new().unwrap();
    let market = dir.path().join("market.csv");
    let asset = dir.path().join("asset.csv");
    write_prices(&market, 40, 1.0, false);
    write_prices(&asset, 40, 2.0, false);
    let out = fractalmark(&[
        "event-study",
        "--market",
        path_arg(&market),
        "--asset",
        path_arg(&asset),
        "--event-date",
        "2024-01-22",
        "--out-dir",
        path_arg(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("135") && err.contains("required"), "{err}");
}

#[test]
fn zero_alpha_sample_is_the_germ() {
    let dir = TempDir::new().unwrap();
    let out = fractalmark(&["fif", "--alpha", "0", "--out-dir", path_arg(dir.path())]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = dir.path().join("fif_aar_alpha-0.csv");
    assert!(dir.path().join("fif_aar_alpha-0.svg").exists());
    let germ = germ_piecewise_linear(&fixtures::table2_data(Series::Aar));
    let pts = read_xy_csv(fs::read(&csv).unwrap().as_slice()).unwrap();
    assert_eq!(pts.len(), 10_001);
    for (x, y) in pts {
        assert!((y - germ.eval(x)).abs() < 1e-12);
    }
}

#[test]
fn scalar_and_vector_alpha_interpolate_every_node() {
    let dir = TempDir::new().unwrap();
    let data = fixtures::table2_data(Series::Caar);
    for alpha in ["0.3", "0.1,0.4,0.5,0.6,0.4,0.3,0.4,0.5,0.3,0.1"] {
        let out = fractalmark(&[
            "fif",
            "--series",
            "caar",
            "--alpha",
            alpha,
            "--name",
            "sample",
            "--out-dir",
            path_arg(dir.path()),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        let pts = read_xy_csv(fs::read(dir.path().join("sample.csv")).unwrap().as_slice()).unwrap();
        for &(x, y) in data.points() {
            let hit = pts
                .iter()
                .find(|p| (p.0 - x).abs() < 1e-12)
                .expect("node sampled");
            assert!((hit.1 - y).abs() < 1e-7);
        }
    }
}

#[test]
fn alpha_of_one_or_more_is_rejected_at_parse() {
    for alpha in ["1", "-1.2", "0.3,0.3", "abc"] {
        let out = fractalmark(&["fif", "--alpha", alpha, "--out-dir", "/tmp/never-written"]);
        assert_eq!(out.status.code(), Some(2), "{alpha}: {}", stderr(&out));
    }
}

#[test]
fn fixed_point_method_writes_the_grid() {
    let dir = TempDir::new().unwrap();
    let out = fractalmark(&[
        "fif",
        "--alpha",
        "mixed",
        "--method",
        "fixed-point",
        "--grid-size",
        "1000",
        "--out-dir",
        path_arg(dir.path()),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        data_lines(&dir.path().join("fif_aar_alpha-mixed.csv")),
        1001
    );
}

#[test]
fn table_files_are_accepted_as_fif_data() {
    let dir = TempDir::new().unwrap();
    let (_, table1) = fixtures::raw_files()[0];
    let path = dir.path().join("window.csv");
    fs::write(&path, table1).unwrap();
    let out = fractalmark(&[
        "fif",
        "--data",
        path_arg(&path),
        "--series",
        "caar",
        "--alpha",
        "0.5",
        "--depth",
        "2",
        "--out-dir",
        path_arg(dir.path()),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        data_lines(&dir.path().join("fif_window_alpha-0.5.csv")),
        1001
    );
}

fn boxdim_json(input: &Path, extra: &[&str]) -> DimensionReport {
    let mut args = vec!["boxdim", "--input", path_arg(input)];
    args.extend_from_slice(extra);
    let out = fractalmark(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

#[test]
fn straight_line_has_dimension_one() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("line.csv");
    let mut s = String::from("x,y\n");
    for i in 0..200_000 {
        let x = i as f64 / 199_999.0;
        s.push_str(&format!("{x},{}\n", 3.0 - 2.0 * x));
    }
    fs::write(&path, s).unwrap();
    let report = boxdim_json(&path, &[]);
    assert!(
        (report.dimension - 1.0).abs() < 0.02,
        "{}",
        report.dimension
    );
    assert!(report.normalized);
}

#[test]
fn dimension_grows_with_alpha_through_the_cli() {
    let dir = TempDir::new().unwrap();
    let mut dims = Vec::new();
    for alpha in ["0.3", "0.5"] {
        let out = fractalmark(&[
            "fif",
            "--alpha",
            alpha,
            "--depth",
            "5",
            "--name",
            alpha,
            "--out-dir",
            path_arg(dir.path()),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        let json = dir.path().join(format!("{alpha}.json"));
        let curve = dir.path().join(format!("{alpha}_loglog.csv"));
        let out = fractalmark(&[
            "boxdim",
            "--input",
            path_arg(&dir.path().join(format!("{alpha}.csv"))),
            "--out",
            path_arg(&json),
            "--curve-csv",
            path_arg(&curve),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        let report: DimensionReport = serde_json::from_slice(&fs::read(&json).unwrap()).unwrap();
        assert!(report.r_squared >= 0.9);
        assert_eq!(data_lines(&curve), report.levels.len());
        dims.push(report.dimension);
    }
    assert!(dims[1] > dims[0], "{dims:?}");
}

#[test]
fn degenerate_cloud_is_a_computation_failure() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("point.csv");
    fs::write(&path, "x,y\n0.5,0.5\n0.5,0.5\n").unwrap();
    let out = fractalmark(&["boxdim", "--input", path_arg(&path)]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = TempDir::new().unwrap();
    let conf = dir.path().join("fif.conf");
    fs::write(
        &conf,
        format!(
            "# sample settings\nalpha = 0.5\ndepth = 1\nseries = caar\nout_dir = {}\n",
            dir.path().display()
        ),
    )
    .unwrap();
    let out = fractalmark(&["fif", "--config", path_arg(&conf), "--depth", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(data_lines(&dir.path().join("fif_caar_alpha-0.5.csv")), 1001);

    fs::write(&conf, "alpha = 0.5\ncolour = blue\n").unwrap();
    let out = fractalmark(&["fif", "--config", path_arg(&conf)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("colour"));
}

#[test]
fn unknown_flags_are_usage_errors() {
    let out = fractalmark(&["boxdim", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = fractalmark(&["boxdim"]);
    assert_eq!(out.status.code(), Some(2));
}

fn report_dir(extra: &[&str]) -> (TempDir, PathBuf) {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("report");
    let mut args = vec!["report", "--out-dir", path_arg(&out_dir)];
    args.extend_from_slice(extra);
    let out = fractalmark(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    (dir, out_dir)
}

#[test]
fn default_report_populates_2024_and_marks_other_years() {
    let (_tmp, dir) = report_dir(&[]);
    let summary = fs::read_to_string(dir.join("summary.md")).unwrap();
    for year in [2020, 2022, 2023] {
        assert!(
            summary.contains(&format!("| {year} | data not supplied |")),
            "{summary}"
        );
    }
    assert!(summary.contains("| 2024 | computed |"));

    let delta = fs::read_to_string(dir.join("table3_delta.csv")).unwrap();
    let mut lines = delta.lines();
    assert_eq!(
        lines.next(),
        Some("year,series,alpha,published_value,computed_value,delta")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 16);
    for row in &rows {
        let computed = !row[4].is_empty();
        assert_eq!(computed, row[0] == "2024", "{row:?}");
        if computed {
            let (published, value, delta): (f64, f64, f64) = (
                row[3].parse().unwrap(),
                row[4].parse().unwrap(),
                row[5].parse().unwrap(),
            );
            assert!((value - published - delta).abs() < 1e-12);
        }
    }

    let chart = fs::read_to_string(dir.join("dimension_comparison.svg")).unwrap();
    for year in ["2020", "2022", "2023", "2024"] {
        assert!(chart.contains(&format!(">{year}</text>")));
    }
}

#[test]
fn report_outputs_parse_back() {
    let (_tmp, dir) = report_dir(&["--depth", "4"]);
    let year = dir.join("2024");
    let t1 = read_panel_csv(fs::read(year.join("table1.csv")).unwrap().as_slice()).unwrap();
    assert_eq!(t1, fixtures::table1());
    let t2 = read_grid_csv(fs::read(year.join("table2.csv")).unwrap().as_slice()).unwrap();
    assert_eq!(t2, fixtures::table2());
    for series in ["aar", "caar"] {
        for label in ["0.3", "0.5", "mixed", "0"] {
            let pts = read_xy_csv(
                fs::read(year.join("fif").join(format!("{series}_alpha-{label}.csv")))
                    .unwrap()
                    .as_slice(),
            )
            .unwrap();
            assert_eq!(pts.len(), 10_001);
            assert!(year
                .join("fif")
                .join(format!("{series}_alpha-{label}.svg"))
                .exists());
        }
        for label in ["0.3", "0.5"] {
            let json = fs::read(
                year.join("dimension")
                    .join(format!("{series}_alpha-{label}.json")),
            )
            .unwrap();
            let report: DimensionReport = serde_json::from_slice(&json).unwrap();
            assert!(report.dimension > 1.0 && report.dimension < 2.0);
            assert_eq!(report.points, 100_001);
        }
    }
}

#[test]
fn partial_year_is_skipped_not_fatal() {
    let tmp = TempDir::new().unwrap();
    let partial = tmp.path().join("2023.csv");
    let (_, table1) = fixtures::raw_files()[0];
    let truncated: String = table1.lines().take(12).map(|l| format!("{l}\n")).collect();
    fs::write(&partial, truncated).unwrap();
    let full = tmp.path().join("2022.csv");
    fs::write(&full, table1).unwrap();
    let y2023 = format!("2023={}", partial.display());
    let y2022 = format!("2022={}", full.display());
    let (_keep, dir) = report_dir(&["--year", &y2023, "--year", &y2022, "--depth", "4"]);
    let summary = fs::read_to_string(dir.join("summary.md")).unwrap();
    assert!(summary.contains("| 2023 | skipped: "), "{summary}");
    assert!(summary.contains("| 2022 | computed |"));
    assert!(dir
        .join("2022")
        .join("dimension")
        .join("aar_alpha-0.5.json")
        .exists());
}
