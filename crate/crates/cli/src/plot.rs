//! Minimal SVG line plots with linear or logarithmic axes and a legend.

use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Draw markers at the data points.
    pub markers: bool,
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub series: Vec<Series>,
    /// Dashed horizontal reference lines.
    pub hlines: Vec<f64>,
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

struct Axis {
    scale: Scale,
    lo: f64,
    hi: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, scale: Scale) -> Axis {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| usable(*v, scale)) {
            let v = transform(v, scale);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo <= 1e-12 * lo.abs().max(1.0) {
            let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
            (lo, hi) = (lo - pad, hi + pad);
        }
        let (lo, hi) = match scale {
            // whole decades
            Scale::Log => (lo.floor(), hi.ceil().max(lo.floor() + 1.0)),
            Scale::Linear => {
                let step = nice_step((hi - lo) / 5.0);
                ((lo / step).floor() * step, (hi / step).ceil() * step)
            }
        };
        Axis { scale, lo, hi }
    }

    /// Fraction along the axis of a data value.
    fn frac(&self, v: f64) -> f64 {
        (transform(v, self.scale) - self.lo) / (self.hi - self.lo)
    }

    /// Tick positions in data units.
    fn ticks(&self) -> Vec<f64> {
        match self.scale {
            Scale::Log => {
                let decades = (self.hi - self.lo).round() as i32;
                let every = (decades + 7) / 8;
                (0..=decades).step_by(every.max(1) as usize).map(|i| 10f64.powi(self.lo as i32 + i)).collect()
            }
            Scale::Linear => {
                let step = nice_step((self.hi - self.lo) / 5.0);
                let first = (self.lo / step).ceil() as i64;
                let last = (self.hi / step + 1e-9).floor() as i64;
                (first..=last).map(|i| i as f64 * step).collect()
            }
        }
    }
}

fn usable(v: f64, scale: Scale) -> bool {
    v.is_finite() && (scale == Scale::Linear || v > 0.0)
}

fn transform(v: f64, scale: Scale) -> f64 {
    match scale {
        Scale::Linear => v,
        Scale::Log => v.log10(),
    }
}

/// Smallest step of the form {1, 2, 5} x 10^e not below `raw`.
fn nice_step(raw: f64) -> f64 {
    if !(raw > 0.0) {
        return 1.0;
    }
    let e = raw.log10().floor();
    let base = 10f64.powf(e);
    [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * base).find(|s| *s >= raw * (1.0 - 1e-12)).unwrap_or(10.0 * base)
}

/// Compact tick label.
fn label(v: f64, scale: Scale) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if scale == Scale::Log || !(1e-3..1e5).contains(&a) {
        let e = a.log10().floor() as i32;
        let m = v / 10f64.powi(e);
        if (m.abs() - 1.0).abs() < 1e-9 {
            return format!("{}1e{e}", if v < 0.0 { "-" } else { "" });
        }
        return format!("{}e{e}", trim_number(m, 2));
    }
    trim_number(v, 4)
}

fn trim_number(v: f64, digits: usize) -> String {
    let s = format!("{v:.digits$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str, x_scale: Scale, y_scale: Scale) -> Self {
        Plot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_scale,
            y_scale,
            series: Vec::new(),
            hlines: Vec::new(),
        }
    }

    pub fn series(mut self, label: &str, points: Vec<(f64, f64)>, markers: bool) -> Self {
        self.series.push(Series { label: label.into(), points, markers });
        self
    }

    pub fn hline(mut self, y: f64) -> Self {
        self.hlines.push(y);
        self
    }

    pub fn to_svg(&self) -> String {
        let xs = self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
        let x = Axis::fit(xs, self.x_scale);
        let ys = self.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)).chain(self.hlines.iter().copied());
        let y = Axis::fit(ys, self.y_scale);
        let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
        let px = |v: f64| LEFT + x.frac(v) * pw;
        let py = |v: f64| TOP + (1.0 - y.frac(v)) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
        );
        let _ = writeln!(s, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
        let _ = writeln!(s, "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>", LEFT + pw / 2.0, escape(&self.title));
        for t in x.ticks() {
            let p = px(t);
            let _ = writeln!(s, "<line x1=\"{p:.2}\" y1=\"{TOP}\" x2=\"{p:.2}\" y2=\"{:.2}\" stroke=\"#e0e0e0\"/>", TOP + ph);
            let _ = writeln!(s, "<text x=\"{p:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>", TOP + ph + 16.0, label(t, x.scale));
        }
        for t in y.ticks() {
            let p = py(t);
            let _ = writeln!(s, "<line x1=\"{LEFT}\" y1=\"{p:.2}\" x2=\"{:.2}\" y2=\"{p:.2}\" stroke=\"#e0e0e0\"/>", LEFT + pw);
            let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>", LEFT - 6.0, p + 4.0, label(t, y.scale));
        }
        let _ = writeln!(s, "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\"/>");
        let _ = writeln!(s, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>", LEFT + pw / 2.0, HEIGHT - 18.0, escape(&self.x_label));
        let _ = writeln!(
            s,
            "<text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">{}</text>",
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );
        for &h in self.hlines.iter().filter(|h| usable(**h, self.y_scale)) {
            let p = py(h);
            let _ = writeln!(s, "<line x1=\"{LEFT}\" y1=\"{p:.2}\" x2=\"{:.2}\" y2=\"{p:.2}\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>", LEFT + pw);
        }
        for (i, series) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let pts: Vec<(f64, f64)> = series
                .points
                .iter()
                .filter(|(a, b)| usable(*a, self.x_scale) && usable(*b, self.y_scale))
                .map(|&(a, b)| (px(a), py(b)))
                .collect();
            if !pts.is_empty() {
                let path: Vec<String> = pts.iter().map(|(a, b)| format!("{a:.2},{b:.2}")).collect();
                let _ = writeln!(s, "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>", path.join(" "));
                if series.markers {
                    for (a, b) in &pts {
                        let _ = writeln!(s, "<circle cx=\"{a:.2}\" cy=\"{b:.2}\" r=\"3\" fill=\"{color}\"/>");
                    }
                }
            }
            let ly = TOP + 14.0 + 20.0 * i as f64;
            let lx = LEFT + pw + 12.0;
            let _ = writeln!(s, "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{:.1}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>", lx + 24.0);
            let _ = writeln!(s, "<text x=\"{:.1}\" y=\"{:.1}\">{}</text>", lx + 30.0, ly + 4.0, escape(&series.label));
        }
        s.push_str("</svg>\n");
        s
    }
}
