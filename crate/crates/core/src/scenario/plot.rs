use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::runner::RunSummary;
use super::telemetry::TelemetryRecord;
use crate::mission::Mission;
use crate::position::SegmentKind;
use crate::{Error, Result};

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 240.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Axis-aligned data window mapped onto a pixel rectangle.
struct Panel {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Panel {
    fn new(top: f64, height: f64, xr: (f64, f64), yr: (f64, f64)) -> Self {
        let (xmin, xmax) = widen(xr);
        let (ymin, ymax) = widen(yr);
        Self { x0: MARGIN, y0: top + 20.0, w: WIDTH - 2.0 * MARGIN, h: height - 50.0, xmin, xmax, ymin, ymax }
    }

    fn px(&self, x: f64) -> f64 {
        self.x0 + (x - self.xmin) / (self.xmax - self.xmin) * self.w
    }

    fn py(&self, y: f64) -> f64 {
        self.y0 + self.h - (y - self.ymin) / (self.ymax - self.ymin) * self.h
    }

    fn frame(&self, svg: &mut String, title: &str, xlabel: &str) {
        let _ = writeln!(
            svg,
            r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#444"/>"##,
            self.x0, self.y0, self.w, self.h
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{}</text>"#,
            self.x0 + self.w / 2.0,
            self.y0 - 6.0,
            escape(title)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
            self.x0 + self.w / 2.0,
            self.y0 + self.h + 28.0,
            escape(xlabel)
        );
        for (v, anchor, x, y) in [
            (self.xmin, "start", self.x0, self.y0 + self.h + 14.0),
            (self.xmax, "end", self.x0 + self.w, self.y0 + self.h + 14.0),
        ] {
            let _ = writeln!(svg, r#"<text x="{x:.1}" y="{y:.1}" font-size="10" text-anchor="{anchor}">{v:.3}</text>"#);
        }
        for (v, y) in [(self.ymin, self.y0 + self.h), (self.ymax, self.y0 + 8.0)] {
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{y:.1}" font-size="10" text-anchor="end">{v:.3}</text>"#,
                self.x0 - 4.0
            );
        }
    }

    fn polyline(&self, svg: &mut String, pts: impl Iterator<Item = (f64, f64)>, color: &str, dashed: bool) {
        let mut coords = String::new();
        for (x, y) in pts {
            let _ = write!(coords, "{:.2},{:.2} ", self.px(x), self.py(y));
        }
        let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.4"{dash}/>"#,
            coords.trim_end()
        );
    }
}

fn widen((lo, hi): (f64, f64)) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (-1.0, 1.0);
    }
    if hi - lo < 1e-9 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Decimation step keeping at most about 2000 points per trace.
fn stride(len: usize) -> usize {
    len.div_ceil(2000).max(1)
}

type Pair = fn(&TelemetryRecord) -> (f64, f64);
type Single = fn(&TelemetryRecord) -> f64;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn document(height: f64, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" viewBox=\"0 0 {WIDTH} {height}\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

fn legend(svg: &mut String, x: f64, y: f64, entries: &[(&str, &str, bool)]) {
    for (i, (label, color, dashed)) in entries.iter().enumerate() {
        let yy = y + 14.0 * i as f64;
        let dash = if *dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.1}" y1="{yy:.1}" x2="{:.1}" y2="{yy:.1}" stroke="{color}" stroke-width="1.4"{dash}/><text x="{:.1}" y="{:.1}" font-size="10">{}</text>"#,
            x + 22.0,
            x + 26.0,
            yy + 3.0,
            escape(label)
        );
    }
}

/// Ground trace (east right, north up). Each run is exactly one `<polyline>`;
/// the mission reference is drawn dashed with `<line>` and `<circle>`.
pub fn ground_trace_svg(runs: &[(&str, &[TelemetryRecord])], mission: Option<&Mission>) -> Result<String> {
    if runs.iter().all(|(_, t)| t.is_empty()) {
        return Err(Error::EmptyTelemetry);
    }
    let mut east: Vec<f64> = runs.iter().flat_map(|(_, t)| t.iter().map(|r| r.east)).collect();
    let mut north: Vec<f64> = runs.iter().flat_map(|(_, t)| t.iter().map(|r| r.north)).collect();
    if let Some(m) = mission {
        let c = m.loiter_center;
        east.extend([c[1] - m.loiter_radius, c[1] + m.loiter_radius]);
        north.extend([c[0] - m.loiter_radius, c[0] + m.loiter_radius]);
    }
    let (emin, emax) = range(east.into_iter());
    let (nmin, nmax) = range(north.into_iter());
    // equal scale on both axes
    let span = (emax - emin).max(nmax - nmin).max(1.0);
    let (ec, nc) = ((emin + emax) / 2.0, (nmin + nmax) / 2.0);
    // square plotting area
    let height = WIDTH - 2.0 * MARGIN + 50.0;
    let panel = Panel::new(0.0, height, (ec - span / 2.0, ec + span / 2.0), (nc - span / 2.0, nc + span / 2.0));
    let mut svg = String::new();
    panel.frame(&mut svg, "Ground trace", "east [m] (north up)");
    if let Some(m) = mission {
        for seg in [m.climb_segment()?, m.loiter_segment()?, m.landing_segment()?] {
            match seg.kind {
                SegmentKind::Line { start, end } => {
                    let _ = writeln!(
                        svg,
                        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="6 4"/>"##,
                        panel.px(start[1]),
                        panel.py(start[0]),
                        panel.px(end[1]),
                        panel.py(end[0])
                    );
                }
                SegmentKind::Arc { center, radius, .. } => {
                    let _ = writeln!(
                        svg,
                        r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="#888" stroke-dasharray="6 4"/>"##,
                        panel.px(center[1]),
                        panel.py(center[0]),
                        radius * panel.w / (panel.xmax - panel.xmin)
                    );
                }
            }
        }
    }
    let mut entries = Vec::new();
    for (i, (name, t)) in runs.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        panel.polyline(&mut svg, t.iter().step_by(stride(t.len())).map(|r| (r.east, r.north)), color, false);
        entries.push((*name, color, false));
    }
    legend(&mut svg, panel.x0 + 8.0, panel.y0 + 14.0, &entries);
    Ok(document(height, &svg))
}

/// Bank and elevation responses with the setpoints dashed.
pub fn response_svg(telemetry: &[TelemetryRecord]) -> Result<String> {
    if telemetry.is_empty() {
        return Err(Error::EmptyTelemetry);
    }
    let tr = range(telemetry.iter().map(|r| r.t));
    let mut svg = String::new();
    let panels: [(&str, Pair); 2] =
        [("Bank angle [rad]", |r| (r.phi, r.phi_s)), ("Elevation angle [rad]", |r| (r.theta, r.theta_s))];
    for (k, (title, get)) in panels.iter().enumerate() {
        let yr = range(telemetry.iter().flat_map(|r| {
            let (a, b) = get(r);
            [a, b]
        }));
        let panel = Panel::new(k as f64 * PANEL_HEIGHT, PANEL_HEIGHT, tr, yr);
        panel.frame(&mut svg, title, "time [s]");
        panel.polyline(
            &mut svg,
            telemetry.iter().step_by(stride(telemetry.len())).map(|r| (r.t, get(r).0)),
            PALETTE[0],
            false,
        );
        panel.polyline(
            &mut svg,
            telemetry.iter().step_by(stride(telemetry.len())).map(|r| (r.t, get(r).1)),
            PALETTE[1],
            true,
        );
        legend(
            &mut svg,
            panel.x0 + 8.0,
            panel.y0 + 14.0,
            &[("measured", PALETTE[0], false), ("setpoint", PALETTE[1], true)],
        );
    }
    Ok(document(2.0 * PANEL_HEIGHT, &svg))
}

/// Adaptive attitude gains (solid) against the fixed gains scaled by the
/// degradation factor (dashed).
pub fn gains_svg(telemetry: &[TelemetryRecord], fixed: (f64, f64)) -> Result<String> {
    if telemetry.is_empty() {
        return Err(Error::EmptyTelemetry);
    }
    let tr = range(telemetry.iter().map(|r| r.t));
    let mut svg = String::new();
    let panels: [(&str, Single, f64); 2] =
        [("Elevation gain", |r| r.gain_theta, fixed.0), ("Bank gain", |r| r.gain_phi, fixed.1)];
    for (k, (title, get, fixed_gain)) in panels.iter().enumerate() {
        let yr = range(telemetry.iter().map(get).chain([*fixed_gain, 0.0]));
        let panel = Panel::new(k as f64 * PANEL_HEIGHT, PANEL_HEIGHT, tr, yr);
        panel.frame(&mut svg, title, "time [s]");
        panel.polyline(
            &mut svg,
            telemetry.iter().step_by(stride(telemetry.len())).map(|r| (r.t, get(r))),
            PALETTE[0],
            false,
        );
        panel.polyline(&mut svg, [(tr.0, *fixed_gain), (tr.1, *fixed_gain)].into_iter(), PALETTE[1], true);
        legend(
            &mut svg,
            panel.x0 + 8.0,
            panel.y0 + 14.0,
            &[("adaptive", PALETTE[0], false), ("fixed", PALETTE[1], true)],
        );
    }
    Ok(document(2.0 * PANEL_HEIGHT, &svg))
}

/// Normalised metrics per run as grouped bars, with the baseline level
/// dashed.
pub fn summary_bars_svg(rows: &[RunSummary]) -> Result<String> {
    let bars: Vec<(&str, [f64; 3])> = rows
        .iter()
        .map(|s| {
            let n = s.normalized.map_or([f64::NAN; 3], |m| [m.j_traj, m.j_phi, m.j_theta]);
            (s.name.as_str(), n)
        })
        .collect();
    if bars.is_empty() {
        return Err(Error::EmptyTelemetry);
    }
    let ymax = bars.iter().flat_map(|(_, v)| v.iter().copied()).filter(|v| v.is_finite()).fold(1.0, f64::max);
    let height = PANEL_HEIGHT * 1.6;
    let panel = Panel::new(0.0, height - 60.0, (0.0, bars.len() as f64), (0.0, ymax));
    let mut svg = String::new();
    panel.frame(&mut svg, "Normalised error metrics", "");
    let slot = panel.w / bars.len() as f64;
    for (i, (name, values)) in bars.iter().enumerate() {
        for (j, v) in values.iter().enumerate() {
            let v = if v.is_finite() { *v } else { 0.0 };
            let x = panel.x0 + slot * i as f64 + slot * (0.15 + 0.25 * j as f64);
            let y = panel.py(v);
            let _ = writeln!(
                svg,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                slot * 0.22,
                (panel.py(panel.ymin.max(0.0)) - y).max(0.0),
                PALETTE[j]
            );
        }
        let cx = panel.x0 + slot * (i as f64 + 0.5);
        let cy = panel.y0 + panel.h + 14.0;
        let _ = writeln!(
            svg,
            r#"<text x="{cx:.1}" y="{cy:.1}" font-size="9" text-anchor="end" transform="rotate(-35 {cx:.1} {cy:.1})">{}</text>"#,
            escape(name)
        );
    }
    panel.polyline(&mut svg, [(0.0, 1.0), (bars.len() as f64, 1.0)].into_iter(), "#444", true);
    legend(
        &mut svg,
        panel.x0 + panel.w - 90.0,
        panel.y0 + 14.0,
        &[("trajectory", PALETTE[0], false), ("bank", PALETTE[1], false), ("elevation", PALETTE[2], false)],
    );
    Ok(document(height, &svg))
}

/// Writes `<stem>_ground.svg`, `<stem>_response.svg` and `<stem>_gains.svg`.
pub fn emit_plots(
    telemetry: &[TelemetryRecord],
    summary: &RunSummary,
    mission: Option<&Mission>,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    if telemetry.is_empty() {
        return Err(Error::EmptyTelemetry);
    }
    std::fs::create_dir_all(out_dir)?;
    let stem = &summary.name;
    let files = [
        (format!("{stem}_ground.svg"), ground_trace_svg(&[(stem.as_str(), telemetry)], mission)?),
        (format!("{stem}_response.svg"), response_svg(telemetry)?),
        (format!("{stem}_gains.svg"), gains_svg(telemetry, (summary.fixed_gains.theta, summary.fixed_gains.phi))?),
    ];
    let mut paths = Vec::new();
    for (name, body) in files {
        let path = out_dir.join(name);
        std::fs::write(&path, body)?;
        paths.push(path);
    }
    Ok(paths)
}
