//! Minimal SVG plots with an explicit viewBox.

use std::fmt::Write as _;

pub const WIDTH: f64 = 800.0;
const MARGIN: f64 = 60.0;

pub struct Plot {
    x_range: (f64, f64),
    y_range: (f64, f64),
    height: f64,
    body: String,
}

fn pad(lo: f64, hi: f64) -> (f64, f64) {
    let span = (hi - lo).abs().max(1e-12);
    (lo - 0.05 * span, hi + 0.05 * span)
}

impl Plot {
    pub fn new(x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        Self {
            x_range: pad(x_range.0, x_range.1),
            y_range: pad(y_range.0, y_range.1),
            height: 600.0,
            body: String::new(),
        }
    }

    /// Plot whose height follows the data aspect ratio.
    pub fn equal_aspect(x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        let mut plot = Self::new(x_range, y_range);
        let (xs, ys) = (
            plot.x_range.1 - plot.x_range.0,
            plot.y_range.1 - plot.y_range.0,
        );
        plot.height = ((WIDTH - 2.0 * MARGIN) * ys / xs + 2.0 * MARGIN).clamp(200.0, 2400.0);
        plot
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_range.0) / (self.x_range.1 - self.x_range.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        self.height
            - MARGIN
            - (y - self.y_range.0) / (self.y_range.1 - self.y_range.0)
                * (self.height - 2.0 * MARGIN)
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64, dash: Option<&str>) {
        if pts.len() < 2 {
            return;
        }
        let mut coords = String::new();
        for &(x, y) in pts {
            let _ = write!(coords, "{:.2},{:.2} ", self.px(x), self.py(y));
        }
        let dash = dash
            .map(|d| format!(" stroke-dasharray=\"{d}\""))
            .unwrap_or_default();
        let _ = writeln!(
            self.body,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width}\"{dash}/>",
            coords.trim_end()
        );
    }

    pub fn line(&mut self, a: (f64, f64), b: (f64, f64), stroke: &str, width: f64) {
        self.polyline(&[a, b], stroke, width, None);
    }

    pub fn dot(&mut self, x: f64, y: f64, radius: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{radius}\" fill=\"{fill}\"/>",
            self.px(x),
            self.py(y)
        );
    }

    pub fn scatter(&mut self, pts: &[(f64, f64)], radius: f64, fill: &str) {
        for &(x, y) in pts {
            self.dot(x, y, radius, fill);
        }
    }

    pub fn label(&mut self, x: f64, y: f64, text: &str) {
        let _ = writeln!(
            self.body,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" font-family=\"sans-serif\">{}</text>",
            self.px(x),
            self.py(y),
            escape(text)
        );
    }

    /// Frame, axis names and the range at each end of both axes.
    pub fn finish(self, title: &str, x_name: &str, y_name: &str) -> String {
        let h = self.height;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {h:.0}\" width=\"{WIDTH}\" height=\"{h:.0}\">"
        );
        let _ = writeln!(
            out,
            "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{h:.0}\" fill=\"white\"/>"
        );
        let _ = writeln!(
            out,
            "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{:.0}\" fill=\"none\" stroke=\"#888\"/>",
            WIDTH - 2.0 * MARGIN,
            h - 2.0 * MARGIN
        );
        let text = |out: &mut String, x: f64, y: f64, anchor: &str, s: &str| {
            let _ = writeln!(
                out,
                "<text x=\"{x:.1}\" y=\"{y:.1}\" text-anchor=\"{anchor}\" font-size=\"13\" font-family=\"sans-serif\">{}</text>",
                escape(s)
            );
        };
        text(&mut out, WIDTH / 2.0, 30.0, "middle", title);
        text(&mut out, WIDTH / 2.0, h - 15.0, "middle", x_name);
        text(&mut out, 15.0, h / 2.0, "start", y_name);
        text(
            &mut out,
            MARGIN,
            h - MARGIN + 18.0,
            "start",
            &format!("{:.3}", self.x_range.0),
        );
        text(
            &mut out,
            WIDTH - MARGIN,
            h - MARGIN + 18.0,
            "end",
            &format!("{:.3}", self.x_range.1),
        );
        text(
            &mut out,
            MARGIN - 5.0,
            h - MARGIN,
            "end",
            &format!("{:.3}", self.y_range.0),
        );
        text(
            &mut out,
            MARGIN - 5.0,
            MARGIN + 10.0,
            "end",
            &format!("{:.3}", self.y_range.1),
        );
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Smallest box containing all points.
pub fn bounds<'a>(pts: impl IntoIterator<Item = &'a (f64, f64)>) -> ((f64, f64), (f64, f64)) {
    let mut b = (
        (f64::INFINITY, f64::NEG_INFINITY),
        (f64::INFINITY, f64::NEG_INFINITY),
    );
    for &(x, y) in pts {
        if x.is_finite() && y.is_finite() {
            b.0 = (b.0 .0.min(x), b.0 .1.max(x));
            b.1 = (b.1 .0.min(y), b.1 .1.max(y));
        }
    }
    if !b.0 .0.is_finite() {
        return ((-1.0, 1.0), (-1.0, 1.0));
    }
    b
}
