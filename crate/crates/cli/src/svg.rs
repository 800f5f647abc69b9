//! Minimal deterministic SVG rendering: line plots and grouped bar charts.
//!
//! Coordinates are printed with two decimals and nothing time-dependent is
//! embedded, so identical inputs give identical files.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 56.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Tick positions at a 1/2/5 × 10ⁿ step covering `[lo, hi]`, plus label decimals.
fn ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    let ticks = (first..=last).map(|i| i as f64 * step).collect();
    (ticks, decimals)
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        let pad = 0.5 * (1.0 + lo.abs()) * 1e-3;
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Keeps the lowest and highest point of every pixel column, so spikes
/// survive while the file stays small. Input must be sorted by x.
pub fn decimate(points: &[(f64, f64)], columns: usize, x_range: (f64, f64)) -> Vec<(f64, f64)> {
    if points.len() <= 2 * columns {
        return points.to_vec();
    }
    let (x0, x1) = x_range;
    let column = |x: f64| {
        (((x - x0) / (x1 - x0)) * columns as f64)
            .floor()
            .clamp(0.0, (columns - 1) as f64) as usize
    };
    let mut out = Vec::with_capacity(2 * columns + 2);
    let mut i = 0;
    while i < points.len() {
        let c = column(points[i].0);
        let mut j = i;
        let (mut lo, mut hi) = (i, i);
        while j < points.len() && column(points[j].0) == c {
            if points[j].1 < points[lo].1 {
                lo = j;
            }
            if points[j].1 > points[hi].1 {
                hi = j;
            }
            j += 1;
        }
        let (a, b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        out.push(points[a]);
        if b != a {
            out.push(points[b]);
        }
        i = j;
    }
    // Keep the exact end points of the curve.
    if out.last() != points.last() {
        out.push(points[points.len() - 1]);
    }
    if out.first() != points.first() {
        out.insert(0, points[0]);
    }
    out
}

pub struct LinePlot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    /// Curve samples sorted by x.
    pub curve: &'a [(f64, f64)],
    /// Points drawn as dots on top of the curve, e.g. interpolation nodes.
    pub markers: &'a [(f64, f64)],
}

pub fn line_plot(plot: &LinePlot) -> String {
    let all = || plot.curve.iter().chain(plot.markers);
    let (x0, x1) = padded_range(all().map(|p| p.0));
    let (y0, y1) = padded_range(all().map(|p| p.1));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = header(plot.title);
    axes(&mut s, (x0, x1), (y0, y1), &sx, &sy);
    axis_labels(&mut s, plot.x_label, plot.y_label);

    let curve = decimate(plot.curve, (pw as usize) * 2, (x0, x1));
    if !curve.is_empty() {
        let mut d = String::new();
        for (i, &(x, y)) in curve.iter().enumerate() {
            let _ = write!(
                d,
                "{}{:.2},{:.2}",
                if i == 0 { "M" } else { " L" },
                sx(x),
                sy(y)
            );
        }
        let _ = writeln!(
            s,
            r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.2"/>"#,
            PALETTE[0]
        );
    }
    for &(x, y) in plot.markers {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
            sx(x),
            sy(y),
            PALETTE[3]
        );
    }
    s.push_str("</svg>\n");
    s
}

pub struct BarGroup {
    pub label: String,
    /// One optional value per series; `None` draws an "n/a" placeholder.
    pub values: Vec<Option<f64>>,
    /// Optional reference value per series, drawn as a black tick.
    pub references: Vec<Option<f64>>,
}

pub struct BarChart<'a> {
    pub title: &'a str,
    pub y_label: &'a str,
    pub series: &'a [&'a str],
    pub groups: &'a [BarGroup],
    pub y_range: (f64, f64),
    pub reference_label: &'a str,
}

pub fn bar_chart(chart: &BarChart) -> String {
    let (y0, y1) = chart.y_range;
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sy = |y: f64| TOP + (y1 - y.clamp(y0, y1)) / (y1 - y0) * ph;
    let mut s = header(chart.title);

    let (yt, dec) = ticks(y0, y1);
    for t in yt {
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{t:.dec$}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            sy(t) + 4.0,
            y = sy(t),
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    );
    axis_labels(&mut s, "", chart.y_label);

    let groups = chart.groups.len().max(1) as f64;
    let slot = pw / groups;
    let bars = chart.series.len().max(1) as f64;
    let bar_w = slot * 0.8 / bars;
    for (g, group) in chart.groups.iter().enumerate() {
        let gx = LEFT + slot * g as f64 + slot * 0.1;
        for (b, value) in group.values.iter().enumerate() {
            let x = gx + bar_w * b as f64;
            match value {
                Some(v) => {
                    let _ = writeln!(
                        s,
                        r#"<rect x="{x:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                        sy(*v),
                        bar_w * 0.9,
                        sy(y0) - sy(*v),
                        PALETTE[b % PALETTE.len()]
                    );
                }
                None => {
                    let _ = writeln!(
                        s,
                        r##"<text x="{:.2}" y="{:.2}" font-size="9" text-anchor="middle" fill="#777777">n/a</text>"##,
                        x + bar_w * 0.45,
                        sy(y0) - 4.0
                    );
                }
            }
            if let Some(Some(r)) = group.references.get(b) {
                let _ = writeln!(
                    s,
                    r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black" stroke-width="2"/>"#,
                    x + bar_w * 0.9,
                    y = sy(*r)
                );
            }
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
            LEFT + slot * (g as f64 + 0.5),
            TOP + ph + 18.0,
            escape(&group.label)
        );
    }

    // Legend along the top edge.
    let mut lx = LEFT;
    for (b, name) in chart.series.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<rect x="{lx:.2}" y="{:.2}" width="10" height="10" fill="{}"/><text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
            TOP - 16.0,
            PALETTE[b % PALETTE.len()],
            lx + 14.0,
            TOP - 7.0,
            escape(name)
        );
        lx += 14.0 + 8.0 * name.len() as f64 + 16.0;
    }
    if !chart.reference_label.is_empty() {
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
            lx + 10.0,
            lx + 14.0,
            TOP - 7.0,
            escape(chart.reference_label),
            y = TOP - 11.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="20" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    s
}

fn axes(
    s: &mut String,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    sx: &dyn Fn(f64) -> f64,
    sy: &dyn Fn(f64) -> f64,
) {
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let (xt, xd) = ticks(x0, x1);
    for t in xt {
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{:.2}" stroke="#eeeeee"/><text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{t:.xd$}</text>"##,
            TOP + ph,
            TOP + ph + 16.0,
            x = sx(t),
        );
    }
    let (yt, yd) = ticks(y0, y1);
    for t in yt {
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#eeeeee"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{t:.yd$}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            sy(t) + 4.0,
            y = sy(t),
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    );
}

fn axis_labels(s: &mut String, x_label: &str, y_label: &str) {
    if !x_label.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
            LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
            HEIGHT - 14.0,
            escape(x_label)
        );
    }
    if !y_label.is_empty() {
        let cy = TOP + (HEIGHT - TOP - BOTTOM) / 2.0;
        let _ = writeln!(
            s,
            r#"<text x="18" y="{cy:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 18 {cy:.2})">{}</text>"#,
            escape(y_label)
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_use_round_steps() {
        let (t, d) = ticks(0.0, 1.0);
        assert_eq!(t, vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert_eq!(d, 1);
        let (t, d) = ticks(-0.013, 0.021);
        assert_eq!(t, vec![-0.01, 0.0, 0.01, 0.02]);
        assert_eq!(d, 2);
    }

    #[test]
    fn decimation_keeps_extremes_and_ends() {
        let pts: Vec<(f64, f64)> = (0..10_001)
            .map(|i| {
                let x = i as f64 / 10_000.0;
                (x, if i == 5_003 { 9.0 } else { (x * 40.0).sin() })
            })
            .collect();
        let d = decimate(&pts, 100, (0.0, 1.0));
        assert!(d.len() <= 202);
        assert!(d.contains(&pts[5_003]));
        assert_eq!(d.first(), pts.first());
        assert_eq!(d.last(), pts.last());
        assert!(d.windows(2).all(|w| w[0].0 <= w[1].0));
    }

    #[test]
    fn plots_are_well_formed_and_deterministic() {
        let curve: Vec<(f64, f64)> = (0..50).map(|i| (i as f64 / 49.0, (i % 7) as f64)).collect();
        let plot = LinePlot {
            title: "a < b & c",
            x_label: "x",
            y_label: "y",
            curve: &curve,
            markers: &curve[..3],
        };
        let a = line_plot(&plot);
        assert_eq!(a, line_plot(&plot));
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        assert!(a.contains("a &lt; b &amp; c"));
        assert_eq!(a.matches("<circle").count(), 3);

        let groups = [BarGroup {
            label: "2024".into(),
            values: vec![Some(1.5), None],
            references: vec![Some(1.4), None],
        }];
        let b = bar_chart(&BarChart {
            title: "dims",
            y_label: "dimension",
            series: &["AAR", "CAAR"],
            groups: &groups,
            y_range: (1.0, 2.0),
            reference_label: "published",
        });
        assert!(b.contains("n/a"));
        assert_eq!(b.matches("stroke-width=\"2\"").count(), 2);
    }
}
