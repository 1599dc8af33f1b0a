//! Standalone SVG plots on a fixed 900×900 canvas.
//!
//! Color ramps:
//! * heatmaps use a diverging ramp, blue `#3b4cc0` (most negative) through
//!   white (zero) to red `#b40426` (most positive), symmetric about zero;
//! * magnitudes and sample order use a sequential ramp
//!   `#440154 → #21918c → #fde725` (low to high).
//!
//! Zero contours of `J_x` are drawn in blue `#1f77b4` and of `J_k` in orange
//! `#ff7f0e`. Bifurcation scatters plot `x` in red `#d62728` and `k` in blue
//! `#1f77b4`. Every coordinate is printed with fixed precision, so identical
//! input gives identical bytes.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use wigner_lv::{BifurcationParam, BifurcationRecord, FlowSample, PoincareSection};

pub const CANVAS: f64 = 900.0;
const MARGIN_LEFT: f64 = 90.0;
const MARGIN_RIGHT: f64 = 40.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 80.0;
const MAX_HEAT_CELLS: usize = 150;
const MAX_ARROWS: usize = 25;

/// Plot input.
pub enum SvgData<'a> {
    /// Heatmap of `∇·J` with the `J_x = 0` and `J_k = 0` contours; samples in
    /// row-major order (`k` rows, `x` columns).
    FieldHeatmap {
        samples: &'a [FlowSample],
        nx: usize,
        nk: usize,
    },
    /// Unit arrows along `w`, colored by `|w|`.
    VectorQuiver {
        samples: &'a [FlowSample],
        nx: usize,
        nk: usize,
    },
    PoincareScatter(&'a PoincareSection),
    BifurcationScatter {
        records: &'a [BifurcationRecord],
        param: BifurcationParam,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvgStatus {
    Written,
    /// Nothing to draw; no file was written.
    EmptyWarning,
}

/// Renders the plot, or `None` when there is nothing to draw.
pub fn render(data: &SvgData) -> Option<String> {
    match data {
        SvgData::FieldHeatmap { samples, nx, nk } => {
            grid_ok(samples, *nx, *nk).then(|| heatmap(samples, *nx, *nk))
        }
        SvgData::VectorQuiver { samples, nx, nk } => {
            grid_ok(samples, *nx, *nk).then(|| quiver(samples, *nx, *nk))
        }
        SvgData::PoincareScatter(section) => {
            (!section.points.is_empty()).then(|| poincare(section))
        }
        SvgData::BifurcationScatter { records, param } => records
            .iter()
            .any(|r| !r.attractor_x.is_empty())
            .then(|| bifurcation(records, *param)),
    }
}

/// Writes the plot to `path`, or warns on stderr and writes nothing for empty input.
pub fn emit_svg(data: &SvgData, path: &Path) -> io::Result<SvgStatus> {
    match render(data) {
        Some(svg) => {
            std::fs::write(path, svg)?;
            Ok(SvgStatus::Written)
        }
        None => {
            eprintln!("warning: nothing to plot, {} not written", path.display());
            Ok(SvgStatus::EmptyWarning)
        }
    }
}

fn grid_ok(samples: &[FlowSample], nx: usize, nk: usize) -> bool {
    !samples.is_empty() && nx >= 2 && nk >= 2 && samples.len() == nx * nk
}

/// Data-to-canvas mapping of the plot box.
struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let widen = |(lo, hi): (f64, f64)| {
            if hi > lo {
                (lo, hi)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        Self {
            x: widen(x),
            y: widen(y),
        }
    }

    /// Bounds of the data padded by 5 %.
    fn padded(
        xs: impl Iterator<Item = f64> + Clone,
        ys: impl Iterator<Item = f64> + Clone,
    ) -> Self {
        let bounds = |it: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = it
                .filter(|v| v.is_finite())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
                    (l.min(v), h.max(v))
                });
            let pad = 0.05 * (hi - lo);
            (lo - pad, hi + pad)
        };
        Self::new(bounds(&mut xs.clone()), bounds(&mut ys.clone()))
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (CANVAS - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        CANVAS
            - MARGIN_BOTTOM
            - (y - self.y.0) / (self.y.1 - self.y.0) * (CANVAS - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{c}" height="{c}" viewBox="0 0 {c} {c}" font-family="sans-serif">"#,
        c = CANVAS
    );
    let _ = writeln!(
        s,
        r#"<rect width="{c}" height="{c}" fill="white"/>"#,
        c = CANVAS
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="30" font-size="18" text-anchor="middle">{}</text>"#,
        CANVAS / 2.0,
        escape(title)
    );
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn axes(s: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (left, right) = (MARGIN_LEFT, CANVAS - MARGIN_RIGHT);
    let (top, bottom) = (MARGIN_TOP, CANVAS - MARGIN_BOTTOM);
    let _ = writeln!(
        s,
        r#"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = f.x.0 + t * (f.x.1 - f.x.0);
        let px = f.px(xv);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{bottom:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            bottom + 6.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{px:.2}" y="{:.2}" font-size="14" text-anchor="middle">{}</text>"#,
            bottom + 24.0,
            tick_label(xv)
        );
        let yv = f.y.0 + t * (f.y.1 - f.y.0);
        let py = f.py(yv);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{left:.2}" y2="{py:.2}" stroke="black"/>"#,
            left - 6.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="end">{}</text>"#,
            left - 10.0,
            py + 5.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="16" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        CANVAS - 25.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="25" y="{y:.2}" font-size="16" text-anchor="middle" transform="rotate(-90 25 {y:.2})">{}</text>"#,
        escape(y_label),
        y = (top + bottom) / 2.0
    );
}

fn hex(rgb: [f64; 3]) -> String {
    let c = |v: f64| (v.clamp(0.0, 1.0) * 255.0).round() as u8;
    format!("#{:02x}{:02x}{:02x}", c(rgb[0]), c(rgb[1]), c(rgb[2]))
}

fn lerp(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    [
        a[0] + t * (b[0] - a[0]),
        a[1] + t * (b[1] - a[1]),
        a[2] + t * (b[2] - a[2]),
    ]
}

const BLUE: [f64; 3] = [
    0x3b as f64 / 255.0,
    0x4c as f64 / 255.0,
    0xc0 as f64 / 255.0,
];
const RED: [f64; 3] = [
    0xb4 as f64 / 255.0,
    0x04 as f64 / 255.0,
    0x26 as f64 / 255.0,
];
const WHITE: [f64; 3] = [1.0, 1.0, 1.0];
const SEQ: [[f64; 3]; 3] = [
    [
        0x44 as f64 / 255.0,
        0x01 as f64 / 255.0,
        0x54 as f64 / 255.0,
    ],
    [
        0x21 as f64 / 255.0,
        0x91 as f64 / 255.0,
        0x8c as f64 / 255.0,
    ],
    [
        0xfd as f64 / 255.0,
        0xe7 as f64 / 255.0,
        0x25 as f64 / 255.0,
    ],
];

/// Diverging ramp for `t ∈ [-1, 1]`.
pub fn diverging(t: f64) -> String {
    let t = if t.is_finite() {
        t.clamp(-1.0, 1.0)
    } else {
        0.0
    };
    if t < 0.0 {
        hex(lerp(WHITE, BLUE, -t))
    } else {
        hex(lerp(WHITE, RED, t))
    }
}

/// Sequential ramp for `t ∈ [0, 1]`.
pub fn sequential(t: f64) -> String {
    let t = if t.is_finite() {
        t.clamp(0.0, 1.0)
    } else {
        0.0
    };
    if t < 0.5 {
        hex(lerp(SEQ[0], SEQ[1], 2.0 * t))
    } else {
        hex(lerp(SEQ[1], SEQ[2], 2.0 * t - 1.0))
    }
}

fn grid_frame(samples: &[FlowSample]) -> Frame {
    let first = samples[0].point;
    let last = samples[samples.len() - 1].point;
    Frame::new((first.x, last.x), (first.k, last.k))
}

fn heatmap(samples: &[FlowSample], nx: usize, nk: usize) -> String {
    let f = grid_frame(samples);
    let mut s = open("stationarity quantifier div J with J_x = 0 (blue) and J_k = 0 (orange)");
    let scale = samples
        .iter()
        .map(|q| q.div_j.abs())
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let stride_x = nx.div_ceil(MAX_HEAT_CELLS);
    let stride_k = nk.div_ceil(MAX_HEAT_CELLS);
    let dx = (f.x.1 - f.x.0) / (nx - 1) as f64;
    let dk = (f.y.1 - f.y.0) / (nk - 1) as f64;
    for j in (0..nk).step_by(stride_k) {
        for i in (0..nx).step_by(stride_x) {
            let q = &samples[j * nx + i];
            let x0 = (q.point.x - 0.5 * dx).max(f.x.0);
            let x1 = (q.point.x + (stride_x as f64 - 0.5) * dx).min(f.x.1);
            let k0 = (q.point.k - 0.5 * dk).max(f.y.0);
            let k1 = (q.point.k + (stride_k as f64 - 0.5) * dk).min(f.y.1);
            let t = if scale > 0.0 { q.div_j / scale } else { 0.0 };
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                f.px(x0),
                f.py(k1),
                f.px(x1) - f.px(x0),
                f.py(k0) - f.py(k1),
                diverging(t)
            );
        }
    }
    let jx: Vec<f64> = samples.iter().map(|q| q.current[0]).collect();
    let jk: Vec<f64> = samples.iter().map(|q| q.current[1]).collect();
    for (values, color) in [(&jx, "#1f77b4"), (&jk, "#ff7f0e")] {
        let path = zero_contour(samples, values, nx, nk, &f);
        if !path.is_empty() {
            let _ = writeln!(
                s,
                r#"<path d="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>"#
            );
        }
    }
    axes(&mut s, &f, "x", "k");
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="end">|div J| max {:.3e}</text>"#,
        CANVAS - MARGIN_RIGHT,
        MARGIN_TOP - 8.0,
        scale
    );
    s.push_str("</svg>\n");
    s
}

/// Marching-squares segments of the zero level set, as SVG path data.
fn zero_contour(samples: &[FlowSample], v: &[f64], nx: usize, nk: usize, f: &Frame) -> String {
    let mut path = String::new();
    let at = |i: usize, j: usize| (samples[j * nx + i].point, v[j * nx + i]);
    let cross = |(p, a): (wigner_lv::PhasePoint, f64), (q, b): (wigner_lv::PhasePoint, f64)| {
        let t = a / (a - b);
        (p.x + t * (q.x - p.x), p.k + t * (q.k - p.k))
    };
    for j in 0..nk - 1 {
        for i in 0..nx - 1 {
            // corners counterclockwise from the lower left
            let c = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            if c.iter().any(|(_, val)| !val.is_finite()) {
                continue;
            }
            let mut hits = vec![];
            for e in 0..4 {
                let (a, b) = (c[e], c[(e + 1) % 4]);
                if (a.1 >= 0.0) != (b.1 >= 0.0) {
                    hits.push(cross(a, b));
                }
            }
            let pairs: Vec<((f64, f64), (f64, f64))> = match hits.len() {
                2 => vec![(hits[0], hits[1])],
                4 => {
                    // ambiguous cell: resolve with the centre value
                    let centre = c.iter().map(|q| q.1).sum::<f64>() / 4.0;
                    if (centre >= 0.0) == (c[0].1 >= 0.0) {
                        vec![(hits[0], hits[3]), (hits[1], hits[2])]
                    } else {
                        vec![(hits[0], hits[1]), (hits[2], hits[3])]
                    }
                }
                _ => vec![],
            };
            for (a, b) in pairs {
                let _ = write!(
                    path,
                    "M{:.2} {:.2}L{:.2} {:.2}",
                    f.px(a.0),
                    f.py(a.1),
                    f.px(b.0),
                    f.py(b.1)
                );
            }
        }
    }
    path
}

fn quiver(samples: &[FlowSample], nx: usize, nk: usize) -> String {
    let f = grid_frame(samples);
    let mut s = open("quantum velocity field w (arrow color: |w|)");
    let stride_x = nx.div_ceil(MAX_ARROWS);
    let stride_k = nk.div_ceil(MAX_ARROWS);
    let cell = ((CANVAS - MARGIN_LEFT - MARGIN_RIGHT) / nx.div_ceil(stride_x) as f64)
        .min((CANVAS - MARGIN_TOP - MARGIN_BOTTOM) / nk.div_ceil(stride_k) as f64);
    let chosen: Vec<&FlowSample> = (0..nk)
        .step_by(stride_k)
        .flat_map(|j| (0..nx).step_by(stride_x).map(move |i| &samples[j * nx + i]))
        .collect();
    let max = chosen
        .iter()
        .map(|q| q.velocity[0].hypot(q.velocity[1]))
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    for q in chosen {
        let (wx, wk) = (q.velocity[0], q.velocity[1]);
        let mag = wx.hypot(wk);
        if !(mag > 0.0 && mag.is_finite()) {
            continue;
        }
        let len = 0.8 * cell;
        // canvas y grows downward
        let (ux, uy) = (wx / mag, -wk / mag);
        let (x0, y0) = (
            f.px(q.point.x) - 0.5 * len * ux,
            f.py(q.point.k) - 0.5 * len * uy,
        );
        let (x1, y1) = (x0 + len * ux, y0 + len * uy);
        let head = 0.3 * len;
        let (hx1, hy1) = (x1 - head * (ux - 0.5 * uy), y1 - head * (uy + 0.5 * ux));
        let (hx2, hy2) = (x1 - head * (ux + 0.5 * uy), y1 - head * (uy - 0.5 * ux));
        let color = sequential(if max > 0.0 { mag / max } else { 0.0 });
        let _ = writeln!(
            s,
            r#"<path d="M{x0:.2} {y0:.2}L{x1:.2} {y1:.2}M{hx1:.2} {hy1:.2}L{x1:.2} {y1:.2}L{hx2:.2} {hy2:.2}" fill="none" stroke="{color}" stroke-width="1.5"/>"#
        );
    }
    axes(&mut s, &f, "x", "k");
    s.push_str("</svg>\n");
    s
}

fn poincare(section: &PoincareSection) -> String {
    let pts = &section.points;
    let xs = pts
        .iter()
        .map(|p| p.x)
        .chain(std::iter::once(section.center.x));
    let ks = pts
        .iter()
        .map(|p| p.k)
        .chain(std::iter::once(section.center.k));
    let f = Frame::padded(xs, ks);
    let mut s = open(&format!(
        "Poincare section, stride {:.6} (color: sample order)",
        section.stride_time
    ));
    let n = pts.len().max(2) - 1;
    for (i, p) in pts.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
            f.px(p.x),
            f.py(p.k),
            sequential(i as f64 / n as f64)
        );
    }
    let (cx, cy) = (f.px(section.center.x), f.py(section.center.k));
    let _ = writeln!(
        s,
        r#"<path d="M{:.2} {cy:.2}L{:.2} {cy:.2}M{cx:.2} {:.2}L{cx:.2} {:.2}" stroke="black" stroke-width="1.5"/>"#,
        cx - 6.0,
        cx + 6.0,
        cy - 6.0,
        cy + 6.0
    );
    axes(&mut s, &f, "x", "k");
    s.push_str("</svg>\n");
    s
}

fn bifurcation(records: &[BifurcationRecord], param: BifurcationParam) -> String {
    let live: Vec<&BifurcationRecord> = records.iter().filter(|r| !r.diverged).collect();
    let params = live.iter().map(|r| r.param_value);
    let values = live
        .iter()
        .flat_map(|r| r.attractor_x.iter().chain(&r.attractor_k).copied());
    let f = Frame::padded(params, values);
    let name = match param {
        BifurcationParam::A => "a",
        BifurcationParam::Alpha => "alpha",
    };
    let mut s = open(&format!("discrete-map attractor samples versus {name}"));
    for (color, pick) in [("#d62728", 0usize), ("#1f77b4", 1)] {
        let mut path = String::new();
        for r in &live {
            let values = if pick == 0 {
                &r.attractor_x
            } else {
                &r.attractor_k
            };
            let px = f.px(r.param_value);
            for v in values {
                let _ = write!(path, "M{:.2} {:.2}h0.01", px, f.py(*v));
            }
        }
        let _ = writeln!(
            s,
            r#"<path d="{path}" stroke="{color}" stroke-width="3" stroke-linecap="round" fill="none"/>"#
        );
    }
    axes(&mut s, &f, name, "x (red), k (blue)");
    s.push_str("</svg>\n");
    s
}
