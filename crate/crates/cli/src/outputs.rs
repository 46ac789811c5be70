//! Artifact writers: versioned CSV and JSON, plus minimal SVG charts.
//!
//! CSV files open with `#` comment lines carrying the schema version, the
//! seed and the column list; the column order is part of the schema.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::Context;
use blowup_core::bounds::ScanTable;
use blowup_core::Trajectory;
use serde::Serialize;

pub const TRAJECTORY_SCHEMA: u32 = 1;
pub const SCAN_SCHEMA: u32 = 1;
pub const REPORT_SCHEMA: u32 = 1;

pub const TRAJECTORY_COLUMNS: [&str; 8] = ["t", "J", "I", "L", "grad_sq", "sup_norm", "dt", "in_V"];
pub const SCAN_COLUMNS: [&str; 8] =
    ["lambda", "J0", "I0", "L0", "negative_energy", "potential_well", "hardy_window", "lower_bound_eligible"];

fn header(kind: &str, schema: u32, seed: u64, columns: &[&str]) -> String {
    format!(
        "# blowup {kind}\n# schema_version = {schema}\n# seed = {seed}\n# columns = {}\n",
        columns.join(",")
    )
}

fn csv_body(columns: &[&str], rows: impl Iterator<Item = Vec<String>>) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Shortest representation that parses back to the same `f64`.
fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn trajectory_csv(traj: &Trajectory, seed: u64) -> anyhow::Result<String> {
    let rows = traj.frames.iter().map(|f| {
        let s = &f.snapshot;
        vec![
            num(s.t),
            num(s.energy),
            num(s.nehari),
            num(s.weighted_mass),
            num(s.grad_sq),
            num(s.sup_norm),
            num(f.dt),
            f.in_v.map_or(String::new(), |b| b.to_string()),
        ]
    });
    Ok(header("trajectory", TRAJECTORY_SCHEMA, seed, &TRAJECTORY_COLUMNS) + &csv_body(&TRAJECTORY_COLUMNS, rows)?)
}

pub fn scan_csv(table: &ScanTable, seed: u64) -> anyhow::Result<String> {
    let rows = table.rows.iter().map(|r| {
        vec![
            num(r.lambda),
            num(r.j0),
            num(r.i0),
            num(r.l0),
            r.flags.negative_energy.to_string(),
            r.flags.potential_well.to_string(),
            r.flags.hardy_window.to_string(),
            r.flags.lower_bound_eligible.to_string(),
        ]
    });
    Ok(header("scan", SCAN_SCHEMA, seed, &SCAN_COLUMNS) + &csv_body(&SCAN_COLUMNS, rows)?)
}

/// Wraps `body` as `{"schema_version", "seed", ...body}`.
pub fn versioned_json<T: Serialize>(kind: &str, seed: u64, body: &T) -> anyhow::Result<String> {
    #[derive(Serialize)]
    struct Envelope<'a, T> {
        kind: &'a str,
        schema_version: u32,
        seed: u64,
        #[serde(flatten)]
        body: &'a T,
    }
    let mut text = serde_json::to_string_pretty(&Envelope { kind, schema_version: REPORT_SCHEMA, seed, body })?;
    text.push('\n');
    Ok(text)
}

pub fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: Vec<(f64, f64)>,
}

pub struct Marker<'a> {
    pub label: &'a str,
    pub x: f64,
}

/// Line chart with optional vertical markers. Non-finite points are dropped.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series], markers: &[Marker]) -> String {
    const W: f64 = 720.0;
    const H: f64 = 440.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 50.0;

    let finite = |p: &&(f64, f64)| p.0.is_finite() && p.1.is_finite();
    let pts: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().filter(finite).copied()).collect();
    let span = |v: Vec<f64>| -> (f64, f64) {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        match (lo.is_finite(), hi > lo) {
            (true, true) => (lo, hi),
            (true, false) => (lo - 0.5, lo + 0.5),
            _ => (0.0, 1.0),
        }
    };
    let (x0, x1) = span(pts.iter().map(|p| p.0).collect());
    let (y0, y1) = span(pts.iter().map(|p| p.1).collect());
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let sy = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - LEFT - RIGHT,
        H - TOP - BOTTOM
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#, sx(xv), H - BOTTOM + 16.0, tick(xv));
        let _ = writeln!(svg, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, LEFT - 6.0, sy(yv) + 4.0, tick(yv));
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 10.0, escape(x_label));
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    for m in markers.iter().filter(|m| m.x.is_finite() && m.x >= x0 && m.x <= x1) {
        let x = sx(m.x);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.1}" y1="{TOP}" x2="{x:.1}" y2="{}" stroke="#888" stroke-dasharray="4 3"/>"##,
            H - BOTTOM
        );
        let _ = writeln!(svg, r##"<text x="{:.1}" y="{}" fill="#555">{}</text>"##, x + 3.0, TOP + 14.0, escape(m.label));
    }
    for (k, s) in series.iter().enumerate() {
        let path: Vec<String> =
            s.points.iter().filter(finite).map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            s.color,
            path.join(" ")
        );
        let ly = TOP + 16.0 + 16.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{ly}" fill="{}" text-anchor="end">{}</text>"#,
            W - RIGHT - 8.0,
            s.color,
            escape(s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// `ln L(t)` and `asinh J(t)` against `t`, with the bounds as markers.
pub fn trajectory_svg(traj: &Trajectory, lower: Option<f64>, upper: Option<f64>) -> String {
    let ln_l = traj.frames.iter().map(|f| (f.t(), f.snapshot.weighted_mass.ln())).collect();
    let j = traj.frames.iter().map(|f| (f.t(), f.snapshot.energy.asinh())).collect();
    let mut markers = Vec::new();
    if let Some(t) = traj.status.t_num() {
        markers.push(Marker { label: "T_num", x: t });
    }
    if let Some(x) = lower {
        markers.push(Marker { label: "lower", x });
    }
    if let Some(x) = upper {
        markers.push(Marker { label: "upper", x });
    }
    line_chart(
        "weighted mass and energy",
        "t",
        "ln L  /  asinh J",
        &[
            Series { label: "ln L(t)", color: "#1f77b4", points: ln_l },
            Series { label: "asinh J(t)", color: "#d62728", points: j },
        ],
        &markers,
    )
}

/// `asinh J0` and `asinh I0` against `ln λ`.
pub fn scan_svg(table: &ScanTable, lambda_j: Option<f64>) -> String {
    let j = table.rows.iter().map(|r| (r.lambda.ln(), r.j0.asinh())).collect();
    let i = table.rows.iter().map(|r| (r.lambda.ln(), r.i0.asinh())).collect();
    let markers: Vec<Marker> = lambda_j.map(|l| Marker { label: "J0 = 0", x: l.ln() }).into_iter().collect();
    line_chart(
        "initial functionals along the amplitude scan",
        "ln lambda",
        "asinh",
        &[
            Series { label: "asinh J0", color: "#d62728", points: j },
            Series { label: "asinh I0", color: "#2ca02c", points: i },
        ],
        &markers,
    )
}
