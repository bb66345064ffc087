//! Static SVG rendering: line charts of series and world snapshots.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::MetricsError;
use crate::world::World;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];
const MAX_POINTS: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSeries {
    pub label: String,
    pub values: Vec<f64>,
    pub dashed: bool,
    /// Index into the palette; series sharing a colour read as one colony.
    pub color: Option<usize>,
}

impl ChartSeries {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            values,
            dashed: false,
            color: None,
        }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }

    pub fn color(mut self, index: usize) -> Self {
        self.color = Some(index);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: u32,
    pub height: u32,
    /// Round number of the first value.
    pub first_round: u64,
    /// Dotted vertical marker every this many rounds.
    pub season_length: Option<u64>,
    /// Free text stored in the SVG `<desc>` element (config hash, seeds).
    pub description: Option<String>,
}

impl Default for ChartStyle {
    fn default() -> Self {
        Self {
            title: String::new(),
            x_label: "round".into(),
            y_label: "workers".into(),
            width: 900,
            height: 420,
            first_round: 1,
            season_length: None,
            description: None,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// A 1-2-5 step giving at most `max_ticks` intervals up to `max`.
fn tick_step(max: f64, max_ticks: usize) -> f64 {
    let raw = max / max_ticks as f64;
    let pow = 10f64.powf(raw.log10().floor());
    for m in [1.0, 2.0, 5.0, 10.0] {
        if m * pow >= raw {
            return m * pow;
        }
    }
    10.0 * pow
}

pub fn render_chart(series: &[ChartSeries], style: &ChartStyle) -> Result<String, MetricsError> {
    let first = series.first().ok_or(MetricsError::NoSeries)?;
    let n = first.values.len();
    for s in series {
        if s.values.len() != n {
            return Err(MetricsError::LengthMismatch {
                first: first.label.clone(),
                first_len: n,
                other: s.label.clone(),
                other_len: s.values.len(),
            });
        }
    }

    let (w, h) = (style.width as f64, style.height as f64);
    let (left, right, top, bottom) = (60.0, 150.0, 36.0, 48.0);
    let plot_w = w - left - right;
    let plot_h = h - top - bottom;
    let x0 = style.first_round as f64;
    let x1 = (style.first_round + n.saturating_sub(1) as u64) as f64;
    let x_span = (x1 - x0).max(1.0);
    let y_data_max = series
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let y_step = tick_step(y_data_max, 8);
    let y_max = (y_data_max / y_step).ceil() * y_step;
    let px = |round: f64| left + (round - x0) / x_span * plot_w;
    let py = |v: f64| top + plot_h - v / y_max * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        style.width, style.height, style.width, style.height
    );
    if let Some(desc) = &style.description {
        let _ = writeln!(svg, "<desc>{}</desc>", escape(desc));
    }
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="22" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        left + plot_w / 2.0,
        escape(&style.title)
    );

    // y grid and ticks
    let mut v = 0.0;
    while v <= y_max + y_step * 1e-9 {
        let y = py(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{left:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd" stroke-width="1"/>"##,
            left + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            left - 6.0,
            y + 4.0,
            fmt_tick(v)
        );
        v += y_step;
    }
    // x ticks
    let x_step = tick_step(x_span, 10);
    let mut t = (x0 / x_step).ceil() * x_step;
    while t <= x1 + 1e-9 {
        let x = px(t);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            top + plot_h + 16.0,
            fmt_tick(t)
        );
        t += x_step;
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{left:.2}" y="{top:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        left + plot_w / 2.0,
        h - 10.0,
        escape(&style.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0,
        escape(&style.y_label)
    );

    if let Some(season) = style.season_length.filter(|&s| s > 0) {
        let last = style.first_round + n.saturating_sub(1) as u64;
        let mut m = season;
        while m < last {
            if m >= style.first_round {
                let x = px(m as f64);
                let _ = writeln!(
                    svg,
                    r##"<line class="season" x1="{x:.2}" y1="{top:.2}" x2="{x:.2}" y2="{:.2}" stroke="#555555" stroke-width="1" stroke-dasharray="2,4"/>"##,
                    top + plot_h
                );
            }
            m += season;
        }
    }

    let stride = n.div_ceil(MAX_POINTS).max(1);
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[s.color.unwrap_or(k) % PALETTE.len()];
        let mut points = String::new();
        let mut push = |i: usize| {
            let v = s.values[i];
            let v = if v.is_finite() { v } else { 0.0 };
            let _ = write!(points, "{:.2},{:.2} ", px(x0 + i as f64), py(v));
        };
        let mut i = 0;
        while i < n {
            push(i);
            i += stride;
        }
        if n > 0 && (n - 1) % stride != 0 {
            push(n - 1);
        }
        let dash = if s.dashed { r#" stroke-dasharray="6,3""# } else { "" };
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
            points.trim_end()
        );
        let ly = top + 12.0 + 18.0 * k as f64;
        let lx = left + plot_w + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"{dash}/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn fmt_tick(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v:.2}")
    }
}

pub fn write_chart(series: &[ChartSeries], style: &ChartStyle, path: &Path) -> Result<(), MetricsError> {
    let svg = render_chart(series, style)?;
    fs::write(path, svg).map_err(|source| MetricsError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Top-down picture of the world: food green, seeker marks red, carrier
/// trail blue (shaded by intensity), nest black.
pub fn render_world(world: &World, cell_px: u32) -> String {
    let t = &world.torus;
    let c = cell_px.max(1);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}">"#,
        t.width * c,
        t.height * c
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#,
        t.width * c,
        t.height * c
    );
    for idx in 0..t.cells() {
        let p = t.coord(idx);
        let (x, y) = (p.x * c, p.y * c);
        let carrier = world.carrier.at(t, p);
        if carrier > 0.0 {
            let _ = writeln!(
                svg,
                r#"<rect x="{x}" y="{y}" width="{c}" height="{c}" fill="blue" fill-opacity="{:.2}"/>"#,
                (carrier / 3.0).clamp(0.15, 1.0)
            );
        }
        if world.seeker.is_marked(t, p) {
            let _ = writeln!(
                svg,
                r#"<rect x="{x}" y="{y}" width="{c}" height="{c}" fill="red" fill-opacity="0.6"/>"#
            );
        }
        if world.food.count_at(t, p) > 0 {
            let _ = writeln!(svg, r#"<rect x="{x}" y="{y}" width="{c}" height="{c}" fill="green"/>"#);
        }
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{}" y="{}" width="{c}" height="{c}" fill="black"/>"#,
        world.nest.x * c,
        world.nest.y * c
    );
    svg.push_str("</svg>\n");
    svg
}
