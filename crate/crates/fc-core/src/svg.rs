//! Native SVG line charts for trajectory and sweep figures.
//!
//! Deliberately small: polyline series on a linear or log10 y axis, one
//! panel per signal, stacked vertically into a single document. No external
//! plotting runtime; the output is plain hand-assembled SVG markup.

use std::fmt::Write as _;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

const PANEL_W: f64 = 640.0;
const PANEL_H: f64 = 220.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 34.0;
const MARGIN_B: f64 = 40.0;

/// One named polyline.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            points,
        }
    }

    pub fn rename(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// One chart panel: title, axis labels, series, and y-axis scale.
#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub log_y: bool,
}

fn nice_ticks(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    let raw = (hi - lo) / n as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm < 1.5 {
        mag
    } else if norm < 3.5 {
        2.0 * mag
    } else if norm < 7.5 {
        5.0 * mag
    } else {
        10.0 * mag
    };
    let first = (lo / step).ceil() * step;
    let mut ticks = Vec::new();
    let mut t = first;
    while t <= hi + step * 1e-9 {
        ticks.push(t);
        t += step;
    }
    ticks
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e5).contains(&a) {
        format!("{v:.0e}")
    } else if a >= 10.0 {
        format!("{v:.0}")
    } else if a >= 1.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

fn render_panel(out: &mut String, panel: &Panel, y_off: f64) {
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;

    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in &panel.series {
        for &(x, y) in &s.points {
            if panel.log_y && y <= 0.0 {
                continue;
            }
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            let yv = if panel.log_y { y.log10() } else { y };
            y_min = y_min.min(yv);
            y_max = y_max.max(yv);
        }
    }
    if !x_min.is_finite() {
        x_min = 0.0;
        x_max = 1.0;
        y_min = 0.0;
        y_max = 1.0;
    }
    if x_max == x_min {
        x_max = x_min + 1.0;
    }
    if y_max == y_min {
        y_max = y_min + 1.0;
        y_min -= 1.0;
    }
    let pad = 0.05 * (y_max - y_min);
    let (y_lo, y_hi) = (y_min - pad, y_max + pad);

    let sx = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| {
        let yv = if panel.log_y { y.log10() } else { y };
        y_off + MARGIN_T + plot_h - (yv - y_lo) / (y_hi - y_lo) * plot_h
    };

    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\" font-weight=\"bold\">{}</text>",
        MARGIN_L,
        y_off + 18.0,
        panel.title
    );
    // Frame.
    let _ = writeln!(
        out,
        "<rect x=\"{MARGIN_L}\" y=\"{:.1}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"#999\"/>",
        y_off + MARGIN_T
    );

    // Y ticks (decades when log).
    let y_ticks: Vec<f64> = if panel.log_y {
        let lo = y_lo.floor() as i64;
        let hi = y_hi.ceil() as i64;
        (lo..=hi).map(|d| 10f64.powi(d as i32)).collect()
    } else {
        nice_ticks(y_lo, y_hi, 5)
    };
    for &ty in &y_ticks {
        let yv = if panel.log_y { ty.log10() } else { ty };
        if yv < y_lo || yv > y_hi {
            continue;
        }
        let ypix = y_off + MARGIN_T + plot_h - (yv - y_lo) / (y_hi - y_lo) * plot_h;
        let _ = writeln!(
            out,
            "<line x1=\"{MARGIN_L}\" y1=\"{ypix:.1}\" x2=\"{:.1}\" y2=\"{ypix:.1}\" stroke=\"#ddd\"/>",
            MARGIN_L + plot_w
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"end\">{}</text>",
            MARGIN_L - 6.0,
            ypix + 3.0,
            fmt_tick(ty)
        );
    }
    // X ticks.
    for tx in nice_ticks(x_min, x_max, 6) {
        let xpix = sx(tx);
        let _ = writeln!(
            out,
            "<line x1=\"{xpix:.1}\" y1=\"{:.1}\" x2=\"{xpix:.1}\" y2=\"{:.1}\" stroke=\"#ddd\"/>",
            y_off + MARGIN_T,
            y_off + MARGIN_T + plot_h
        );
        let _ = writeln!(
            out,
            "<text x=\"{xpix:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"middle\">{}</text>",
            y_off + MARGIN_T + plot_h + 14.0,
            fmt_tick(tx)
        );
    }
    // Axis labels.
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
        MARGIN_L + plot_w / 2.0,
        y_off + PANEL_H - 8.0,
        panel.x_label
    );
    let _ = writeln!(
        out,
        "<text x=\"14\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.1})\">{}</text>",
        y_off + MARGIN_T + plot_h / 2.0,
        y_off + MARGIN_T + plot_h / 2.0,
        panel.y_label
    );

    // Series polylines and legend.
    for (i, s) in panel.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut coords = String::new();
        for &(x, y) in &s.points {
            if panel.log_y && y <= 0.0 {
                continue;
            }
            let _ = write!(coords, "{:.2},{:.2} ", sx(x), sy(y));
        }
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            coords.trim_end()
        );
        let ly = y_off + MARGIN_T + 14.0 * (i as f64 + 1.0);
        let lx = MARGIN_L + plot_w + 10.0;
        let _ = writeln!(
            out,
            "<line x1=\"{lx:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            ly - 4.0,
            lx + 16.0,
            ly - 4.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{ly:.1}\" font-size=\"10\">{}</text>",
            lx + 20.0,
            s.name
        );
    }
}

/// Render stacked panels into one SVG document.
pub fn render(panels: &[Panel]) -> String {
    let height = PANEL_H * panels.len() as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PANEL_W}\" height=\"{height}\" viewBox=\"0 0 {PANEL_W} {height}\" font-family=\"sans-serif\">"
    );
    let _ = writeln!(
        out,
        "<rect width=\"{PANEL_W}\" height=\"{height}\" fill=\"white\"/>"
    );
    for (i, p) in panels.iter().enumerate() {
        render_panel(&mut out, p, i as f64 * PANEL_H);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_panels_and_series() {
        let panel = Panel {
            title: "level".into(),
            x_label: "t [s]".into(),
            y_label: "h [m]".into(),
            series: vec![
                Series::new("a", vec![(0.0, 0.0), (1.0, 5.0), (2.0, 10.0)]),
                Series::new("b", vec![(0.0, 1.0), (2.0, 9.0)]),
            ],
            log_y: false,
        };
        let svg = render(&[panel.clone(), panel]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 4);
    }

    #[test]
    fn log_scale_skips_nonpositive_points() {
        let panel = Panel {
            title: "times".into(),
            x_label: "bits".into(),
            y_label: "ms".into(),
            series: vec![Series::new("t", vec![(4.0, 0.0), (5.0, 1.0), (6.0, 100.0)])],
            log_y: true,
        };
        let svg = render(&[panel]);
        assert!(svg.contains("<polyline"));
    }

    #[test]
    fn deterministic_output() {
        let panel = Panel {
            title: "x".into(),
            x_label: "".into(),
            y_label: "".into(),
            series: vec![Series::new("s", vec![(0.0, 1.0), (1.0, 2.0)])],
            log_y: false,
        };
        assert_eq!(render(std::slice::from_ref(&panel)), render(&[panel]));
    }
}
