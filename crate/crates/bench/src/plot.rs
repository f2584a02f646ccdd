//! Fidelity-vs-β figures as standalone SVG.

use std::fmt::Write as _;
use std::path::Path;

use vqnhite_core::Method;

use crate::error::{io_err, BenchError, Result};
use crate::runner::{load, summarize, SummaryRow};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;

fn color(method: Method) -> &'static str {
    match method {
        Method::Vite => "#e07b00",
        Method::Vqnhite => "#1f5fbf",
    }
}

/// Axis ranges: β over the recorded grid, fidelity from the lowest
/// error-bar end up to 1.
pub fn axis_ranges(rows: &[SummaryRow]) -> ((f64, f64), (f64, f64)) {
    let bmin = rows.iter().map(|r| r.beta).fold(f64::INFINITY, f64::min);
    let bmax = rows.iter().map(|r| r.beta).fold(f64::NEG_INFINITY, f64::max);
    let fmin = rows
        .iter()
        .map(|r| r.mean - r.std_error)
        .fold(f64::INFINITY, f64::min)
        .min(1.0);
    let fmin = if fmin >= 1.0 { 0.99 } else { fmin };
    let bmax = if bmax > bmin { bmax } else { bmin + 1.0 };
    ((bmin, bmax), (fmin, 1.0))
}

fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let raw = (hi - lo) / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(t);
        t += step;
    }
    out
}

/// Renders summary rows as an SVG document.
pub fn render_svg(rows: &[SummaryRow], title: &str) -> Result<String> {
    if rows.is_empty() {
        return Err(BenchError::EmptyTrace(title.to_string()));
    }
    let ((b0, b1), (f0, f1)) = axis_ranges(rows);
    let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x = |b: f64| MARGIN_LEFT + (b - b0) / (b1 - b0) * pw;
    let y = |f: f64| MARGIN_TOP + (f1 - f) / (f1 - f0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for t in nice_ticks(b0, b1, 6) {
        let _ = writeln!(
            s,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="black"/><text x="{0:.2}" y="{3:.2}" text-anchor="middle">{4}</text>"#,
            x(t),
            MARGIN_TOP + ph,
            MARGIN_TOP + ph + 5.0,
            MARGIN_TOP + ph + 19.0,
            trim(t)
        );
    }
    for t in nice_ticks(f0, f1, 5) {
        let _ = writeln!(
            s,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{2:.2}" y2="{1:.2}" stroke="black"/><text x="{3:.2}" y="{4:.2}" text-anchor="end">{5}</text>"#,
            MARGIN_LEFT - 5.0,
            y(t),
            MARGIN_LEFT,
            MARGIN_LEFT - 8.0,
            y(t) + 4.0,
            trim(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">β</text>"#,
        MARGIN_LEFT + pw / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18 {}) rotate(-90)" text-anchor="middle">fidelity</text>"#,
        MARGIN_TOP + ph / 2.0
    );

    let mut methods: Vec<Method> = rows.iter().map(|r| r.method).collect();
    methods.dedup();
    for (k, &m) in methods.iter().enumerate() {
        let c = color(m);
        let series: Vec<&SummaryRow> = rows.iter().filter(|r| r.method == m).collect();
        let path: Vec<String> = series
            .iter()
            .map(|r| format!("{:.2},{:.2}", x(r.beta), y(r.mean)))
            .collect();
        let _ = writeln!(s, r#"<g class="series" data-method="{}">"#, m.label());
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        for r in &series {
            let (px, lo, hi) = (
                x(r.beta),
                y((r.mean - r.std_error).max(f0)),
                y((r.mean + r.std_error).min(f1)),
            );
            let _ = writeln!(
                s,
                r#"<line x1="{px:.2}" y1="{lo:.2}" x2="{px:.2}" y2="{hi:.2}" stroke="{c}"/>"#
            );
            match m {
                Method::Vite => {
                    let _ = writeln!(
                        s,
                        r#"<rect x="{:.2}" y="{:.2}" width="5" height="5" fill="{c}"/>"#,
                        px - 2.5,
                        y(r.mean) - 2.5
                    );
                }
                Method::Vqnhite => {
                    let _ = writeln!(s, r#"<circle cx="{px:.2}" cy="{:.2}" r="2.8" fill="{c}"/>"#, y(r.mean));
                }
            }
        }
        let _ = writeln!(s, "</g>");
        let ly = MARGIN_TOP + ph - 40.0 + 18.0 * k as f64;
        let lx = MARGIN_LEFT + pw - 110.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{c}" stroke-width="2"/><text x="{}" y="{}" class="legend">{}</text>"#,
            lx + 22.0,
            lx + 28.0,
            ly + 4.0,
            m.label()
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn trim(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Reads a persisted trace and writes its figure.
pub fn emit_plot(trace_path: &Path, out: &Path) -> Result<()> {
    let trace = load(trace_path)?;
    if trace.records.is_empty() {
        return Err(BenchError::EmptyTrace(trace_path.display().to_string()));
    }
    let c = &trace.metadata.config;
    let title = format!("N = {}, {} ansatz, {} samples", c.n_qubits, c.layout, c.samples);
    let svg = render_svg(&summarize(&trace.records), &title)?;
    std::fs::write(out, svg).map_err(io_err(out))
}
