use fractalmark_core::event_study::{grid_rows, GRID_POINTS};
use fractalmark_core::fixtures::{self, Series};
use fractalmark_core::{build_panel, germ_piecewise_linear, subsample_to_grid};

#[test]
fn table1_caar_is_the_running_sum_of_aar() {
    let rows = fixtures::table1();
    let mut sum = 0.0;
    for row in &rows {
        sum += row.aar;
        assert!(
            (sum - row.caar).abs() <= 5e-5,
            "day {}: {sum} vs {}",
            row.relative_day,
            row.caar
        );
    }
}

#[test]
fn panel_from_published_aar_reproduces_caar() {
    let rows = fixtures::table1();
    let panel = build_panel(vec![rows.iter().map(|r| r.aar).collect()]).unwrap();
    for (row, caar) in rows.iter().zip(panel.caar()) {
        assert!((caar - row.caar).abs() <= 5e-5);
    }
}

#[test]
fn every_third_day_gives_table2_exactly() {
    let t1 = fixtures::table1();
    let t2 = fixtures::table2();
    assert_eq!(grid_rows(&t1).unwrap(), t2);

    let aar: Vec<f64> = t1.iter().map(|r| r.aar).collect();
    let grid = subsample_to_grid(&aar).unwrap();
    assert_eq!(grid.points().len(), GRID_POINTS);
    for (p, row) in grid.points().iter().zip(&t2) {
        assert_eq!(*p, (row.x, row.aar));
    }
}

#[test]
fn germ_matches_published_segment_coefficients() {
    let published = fixtures::germ_coefficients();
    assert_eq!(published.len(), 20);
    for series in [Series::Aar, Series::Caar] {
        let germ = germ_piecewise_linear(&fixtures::table2_data(series));
        for seg in published.iter().filter(|s| s.series == series) {
            let i = seg.segment - 1;
            assert_eq!(germ.breakpoints()[i], seg.x_lo);
            assert_eq!(germ.breakpoints()[i + 1], seg.x_hi);
            assert!(
                (germ.slopes()[i] - seg.slope).abs() <= 1e-3,
                "{series:?} segment {i} slope {} vs {}",
                germ.slopes()[i],
                seg.slope
            );
            assert!(
                (germ.intercepts()[i] - seg.intercept).abs() <= 1e-3,
                "{series:?} segment {i} intercept {} vs {}",
                germ.intercepts()[i],
                seg.intercept
            );
        }
    }
}
