//! Median-versus-n plot with quartile error bars, as a standalone SVG.
//!
//! Both axes are logarithmic. Output depends only on the rows, so identical
//! summaries produce identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::algorithms::AlgorithmId;
use crate::error::Error;

use super::summary::SummaryRow;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 60.0;

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
const MARKERS: [Marker; 4] = [
    Marker::Circle,
    Marker::Square,
    Marker::Triangle,
    Marker::Diamond,
];

#[derive(Clone, Copy)]
enum Marker {
    Circle,
    Square,
    Triangle,
    Diamond,
}

struct Point {
    n: f64,
    median: f64,
    q1: f64,
    q3: f64,
}

/// Log-scale axis covering whole decades around the data.
struct LogAxis {
    lo: f64,
    hi: f64,
    pixel_lo: f64,
    pixel_hi: f64,
}

impl LogAxis {
    fn new(min: f64, max: f64, pixel_lo: f64, pixel_hi: f64) -> Self {
        let mut lo = min.log10().floor();
        let mut hi = max.log10().ceil();
        if hi <= lo {
            lo -= 0.5;
            hi += 0.5;
        }
        Self {
            lo,
            hi,
            pixel_lo,
            pixel_hi,
        }
    }

    fn map(&self, value: f64) -> f64 {
        let t = (value.log10() - self.lo) / (self.hi - self.lo);
        self.pixel_lo + t * (self.pixel_hi - self.pixel_lo)
    }

    fn decades(&self) -> impl Iterator<Item = i32> {
        (self.lo.ceil() as i32)..=(self.hi.floor() as i32)
    }
}

fn label_for(id: AlgorithmId) -> &'static str {
    match id {
        AlgorithmId::Opl => "(1+λ) EA",
        AlgorithmId::Ocl => "(1,λ) EA",
        AlgorithmId::Cga => "cGA",
        AlgorithmId::Metropolis => "Metropolis",
    }
}

fn marker(svg: &mut String, kind: Marker, x: f64, y: f64, color: &str) {
    let r = 4.0;
    let _ = match kind {
        Marker::Circle => writeln!(
            svg,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{color}"/>"#
        ),
        Marker::Square => writeln!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="{}" height="{}" fill="{color}"/>"#,
            x - r,
            y - r,
            2.0 * r,
            2.0 * r
        ),
        Marker::Triangle => writeln!(
            svg,
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{color}"/>"#,
            x,
            y - r - 1.0,
            x - r - 1.0,
            y + r,
            x + r + 1.0,
            y + r
        ),
        Marker::Diamond => writeln!(
            svg,
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{color}"/>"#,
            x,
            y - r - 1.0,
            x + r + 1.0,
            y,
            x,
            y + r + 1.0,
            x - r - 1.0,
            y
        ),
    };
}

/// Renders rows that have quantiles. Rows of one algorithm with several
/// parameter values at the same `n` are drawn as separate points.
pub fn render_svg(rows: &[SummaryRow]) -> Result<String, Error> {
    let mut series: BTreeMap<AlgorithmId, Vec<Point>> = BTreeMap::new();
    for row in rows {
        if let (Some(median), Some(q1), Some(q3)) = (row.median_evals, row.q1_evals, row.q3_evals) {
            if median > 0.0 && q1 > 0.0 && q3 > 0.0 {
                series.entry(row.algo).or_default().push(Point {
                    n: row.n as f64,
                    median,
                    q1,
                    q3,
                });
            }
        }
    }
    if series.is_empty() {
        return Err(Error::NothingToPlot);
    }
    for points in series.values_mut() {
        points.sort_by(|a, b| a.n.total_cmp(&b.n).then(a.median.total_cmp(&b.median)));
    }

    let all = series.values().flatten();
    let (n_min, n_max) = all.clone().fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
        (lo.min(p.n), hi.max(p.n))
    });
    let (y_min, y_max) = all.fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
        (lo.min(p.q1), hi.max(p.q3))
    });
    let x_axis = LogAxis::new(n_min, n_max, MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let y_axis = LogAxis::new(y_min, y_max, HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let (x0, x1) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let (y0, y1) = (HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);
    let _ = writeln!(
        svg,
        r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for d in x_axis.decades() {
        let x = x_axis.map(10f64.powi(d));
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{y1}" stroke="#dddddd"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{d}</text>"#,
            y0 + 18.0
        );
    }
    for d in y_axis.decades() {
        let y = y_axis.map(10f64.powi(d));
        let _ = writeln!(
            svg,
            r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#dddddd"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#,
            x0 - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">problem size n</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">fitness evaluations (median, quartiles)</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    for (k, (algo, points)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let kind = MARKERS[k % MARKERS.len()];
        let _ = writeln!(svg, r#"<g id="series-{algo}">"#);
        if points.len() > 1 {
            let path: Vec<String> = points
                .iter()
                .map(|p| format!("{:.2},{:.2}", x_axis.map(p.n), y_axis.map(p.median)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                path.join(" ")
            );
        }
        for p in points {
            let x = x_axis.map(p.n);
            let (ylo, yhi) = (y_axis.map(p.q1), y_axis.map(p.q3));
            let _ = writeln!(
                svg,
                r#"<line x1="{x:.2}" y1="{ylo:.2}" x2="{x:.2}" y2="{yhi:.2}" stroke="{color}"/>"#
            );
            for y in [ylo, yhi] {
                let _ = writeln!(
                    svg,
                    r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}"/>"#,
                    x - 4.0,
                    x + 4.0
                );
            }
            marker(&mut svg, kind, x, y_axis.map(p.median), color);
        }
        let ly = MARGIN_TOP + 10.0 + 20.0 * k as f64;
        let lx = WIDTH - MARGIN_RIGHT + 15.0;
        marker(&mut svg, kind, lx, ly, color);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 10.0,
            ly + 4.0,
            label_for(*algo)
        );
        let _ = writeln!(svg, "</g>");
    }
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

pub fn emit_plot(rows: &[SummaryRow], path: &Path) -> Result<(), Error> {
    let svg = render_svg(rows)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(algo: AlgorithmId, n: usize, median: Option<f64>) -> SummaryRow {
        SummaryRow {
            algo,
            n,
            param: 2.0,
            runs: 3,
            successes: if median.is_some() { 3 } else { 0 },
            event1: 0,
            event2: if median.is_some() { 0 } else { 3 },
            censored: 0,
            median_evals: median,
            q1_evals: median.map(|m| m * 0.8),
            q3_evals: median.map(|m| m * 1.3),
        }
    }

    #[test]
    fn single_point_with_error_bar() {
        let svg = render_svg(&[row(AlgorithmId::Ocl, 100, Some(5000.0))]).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 2); // point + legend
        assert!(!svg.contains("<polyline"));
    }

    #[test]
    fn two_series_are_distinguishable() {
        let rows = [
            row(AlgorithmId::Ocl, 100, Some(5e4)),
            row(AlgorithmId::Ocl, 200, Some(3e5)),
            row(AlgorithmId::Cga, 100, Some(2e3)),
            row(AlgorithmId::Cga, 200, Some(4e3)),
        ];
        let svg = render_svg(&rows).unwrap();
        assert!(svg.contains(r#"id="series-ocl""#));
        assert!(svg.contains(r#"id="series-cga""#));
        assert!(svg.contains(COLORS[0]) && svg.contains(COLORS[1]));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn deterministic_bytes() {
        let rows = [
            row(AlgorithmId::Cga, 100, Some(2e3)),
            row(AlgorithmId::Cga, 400, Some(9e3)),
        ];
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
        emit_plot(&rows, &a).unwrap();
        emit_plot(&rows, &b).unwrap();
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    }

    #[test]
    fn nothing_to_plot() {
        assert!(matches!(render_svg(&[]), Err(Error::NothingToPlot)));
        assert!(matches!(
            render_svg(&[row(AlgorithmId::Opl, 500, None)]),
            Err(Error::NothingToPlot)
        ));
    }
}
