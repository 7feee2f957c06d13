//! Self-contained SVG charts of sweep results.

use std::fmt::Write;

use crate::harness::SweepRow;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN: f64 = 50.0;

/// Which sweep parameter goes on the x axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    P,
    Epsilon,
    K,
}

impl Axis {
    fn label(self) -> &'static str {
        match self {
            Axis::P => "p",
            Axis::Epsilon => "epsilon",
            Axis::K => "k",
        }
    }

    fn value(self, r: &SweepRow) -> f64 {
        match self {
            Axis::P => r.p,
            Axis::Epsilon => r.epsilon,
            Axis::K => r.k as f64,
        }
    }

    /// The first parameter that takes more than one value, `p` by default.
    pub fn varying(rows: &[SweepRow]) -> Axis {
        let varies = |a: Axis| rows.iter().any(|r| a.value(r) != a.value(&rows[0]));
        [Axis::P, Axis::Epsilon, Axis::K]
            .into_iter()
            .find(|&a| !rows.is_empty() && varies(a))
            .unwrap_or(Axis::P)
    }
}

struct Panel<'a> {
    title: &'a str,
    x0: f64,
    points: Vec<(f64, f64, f64, f64)>,
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn draw(svg: &mut String, panel: &Panel<'_>, xlabel: &str, (xlo, xhi): (f64, f64), (ylo, yhi): (f64, f64)) {
    let left = panel.x0 + MARGIN;
    let right = panel.x0 + PANEL_W - 10.0;
    let top = 30.0;
    let bottom = PANEL_H - MARGIN;
    let sx = |x: f64| left + (x - xlo) / (xhi - xlo) * (right - left);
    let sy = |y: f64| bottom - (y - ylo) / (yhi - ylo) * (bottom - top);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        (left + right) / 2.0,
        panel.title
    );
    let _ = writeln!(
        svg,
        r#"<path d="M{left:.1},{top:.1} V{bottom:.1} H{right:.1}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let fx = f64::from(i) / 4.0;
        let (xv, yv) = (xlo + fx * (xhi - xlo), ylo + fx * (yhi - ylo));
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="10">{}</text>"#,
            sx(xv),
            bottom + 14.0,
            tick(xv)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="10">{}</text>"#,
            left - 4.0,
            sy(yv) + 3.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{}</text>"#,
        (left + right) / 2.0,
        bottom + 32.0,
        xlabel
    );
    let line: Vec<String> = panel
        .points
        .iter()
        .map(|&(x, y, _, _)| format!("{:.1},{:.1}", sx(x), sy(y)))
        .collect();
    let _ = writeln!(
        svg,
        r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"##,
        line.join(" ")
    );
    for &(x, y, lo, hi) in &panel.points {
        let _ = writeln!(
            svg,
            r##"<line x1="{0:.1}" y1="{1:.1}" x2="{0:.1}" y2="{2:.1}" stroke="#1f77b4"/>"##,
            sx(x),
            sy(lo),
            sy(hi)
        );
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.1}" cy="{:.1}" r="3" fill="#1f77b4"/>"##,
            sx(x),
            sy(y)
        );
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 0.01 || v.abs() >= 1e4) {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}").trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Two panels: empirical probability of a long cycle (with its Wilson
/// interval) and mean cycle length (with one standard error), against the
/// chosen axis.
pub fn sweep_svg(rows: &[SweepRow], axis: Axis) -> String {
    let mut rows: Vec<&SweepRow> = rows.iter().collect();
    rows.sort_by(|a, b| axis.value(a).total_cmp(&axis.value(b)));
    let xr = extent(rows.iter().map(|r| axis.value(r)));
    let prob = Panel {
        title: "P(long cycle)",
        x0: 0.0,
        points: rows
            .iter()
            .map(|r| (axis.value(r), r.cycle_probability, r.ci_low, r.ci_high))
            .collect(),
    };
    let len = Panel {
        title: "mean cycle length",
        x0: PANEL_W,
        points: rows
            .iter()
            .map(|r| {
                let e = r.cycle_len_std_error;
                (axis.value(r), r.mean_cycle_len, r.mean_cycle_len - e, r.mean_cycle_len + e)
            })
            .collect(),
    };
    let (_, len_hi) = extent(len.points.iter().map(|p| p.3));
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#,
        w = 2.0 * PANEL_W,
        h = PANEL_H
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    draw(&mut svg, &prob, axis.label(), xr, (0.0, 1.0));
    draw(&mut svg, &len, axis.label(), xr, (0.0, len_hi.max(1.0)));
    svg.push_str("</svg>\n");
    svg
}
