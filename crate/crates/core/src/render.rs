//! Deterministic SVG plots.
//!
//! Values map linearly to pixels. The value range of each panel is the data
//! range padded by 5% on both sides, so every plotted point falls strictly
//! inside the panel. Coordinates are printed with at most two decimals, and
//! nothing environment dependent enters the document, so equal inputs give
//! byte-identical output.
//!
//! Line styles carry the meaning: the F0 trace and min/max lines are solid,
//! the mean is dashed, the median dotted, the global model thick dashed, local
//! models thin dotted and the residual thin dashed around a zero line.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::annotation::{Tier, TierKind};
use crate::fmt::trim_decimal;
use crate::metrics::{BoxStats, WindowSeries};
use crate::signal::{track_stats, F0Track, SampledSignal};
use crate::stylization::PolyModel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenderError {
    #[error("track has no voiced frames")]
    NoVoicedFrames,
    #[error("no categories to plot")]
    EmptyStats,
    #[error("window series is empty")]
    EmptySeries,
}

pub const DEFAULT_WIDTH: u32 = 1000;
pub const DEFAULT_HEIGHT: u32 = 400;
/// Upper bound on drawn waveform segments.
pub const MAX_WAVEFORM_SEGMENTS: usize = 2000;

const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 40.0;
const PANEL_GAP: f64 = 12.0;
const LABEL_BAND: f64 = 40.0;
const PADDING: f64 = 0.05;

const Y_MAPPING_DESC: &str =
    "y: linear value-to-pixel mapping over the data range padded by 5% on each side";

fn n(x: f64) -> String {
    trim_decimal(x, 2)
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && c != '\t' && c != '\n' => {}
            c => out.push(c),
        }
    }
    out
}

/// Linear map from `[d0, d1]` to `[r0, r1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearScale {
    pub d0: f64,
    pub d1: f64,
    pub r0: f64,
    pub r1: f64,
}

impl LinearScale {
    pub fn map(&self, v: f64) -> f64 {
        if self.d1 == self.d0 {
            return (self.r0 + self.r1) / 2.0;
        }
        self.r0 + (v - self.d0) / (self.d1 - self.d0) * (self.r1 - self.r0)
    }

    /// Data range `[lo, hi]` padded by 5% each side (at least 1 unit total
    /// when the range is degenerate), mapped onto `[bottom, top]` pixels.
    pub fn padded(lo: f64, hi: f64, bottom: f64, top: f64) -> Self {
        let (d0, d1) = padded_range(lo, hi);
        LinearScale {
            d0,
            d1,
            r0: bottom,
            r1: top,
        }
    }
}

pub fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    let span = hi - lo;
    let pad = if span > 0.0 {
        PADDING * span
    } else {
        (PADDING * hi.abs()).max(0.5)
    };
    (lo - pad, hi + pad)
}

/// Tick values at a 1/2/5 step, at most about `max_ticks` of them.
fn nice_ticks(lo: f64, hi: f64, max_ticks: usize) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) {
        return vec![lo];
    }
    let raw = span / max_ticks as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

impl Rect {
    fn bottom(&self) -> f64 {
        self.y + self.h
    }
    fn right(&self) -> f64 {
        self.x + self.w
    }
}

struct Svg {
    out: String,
}

impl Svg {
    fn new(width: u32, height: u32, title: &str) -> Self {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"11\">"
        );
        let _ = writeln!(out, "<title>{}</title>", escape(title));
        let _ = writeln!(out, "<desc>{Y_MAPPING_DESC}</desc>");
        let _ = writeln!(
            out,
            "<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>"
        );
        Svg { out }
    }

    fn raw(&mut self, s: &str) {
        self.out.push_str(s);
        self.out.push('\n');
    }

    fn panel(&mut self, class: &str, r: Rect) {
        let _ = writeln!(
            self.out,
            "<rect class=\"{class}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#bbbbbb\"/>",
            n(r.x),
            n(r.y),
            n(r.w),
            n(r.h)
        );
    }

    fn hline(&mut self, class: &str, y: f64, x0: f64, x1: f64, style: &str) {
        let _ = writeln!(
            self.out,
            "<line class=\"{class}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {style}/>",
            n(x0),
            n(y),
            n(x1),
            n(y)
        );
    }

    fn line(&mut self, class: &str, (x0, y0): (f64, f64), (x1, y1): (f64, f64), style: &str) {
        let _ = writeln!(
            self.out,
            "<line class=\"{class}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {style}/>",
            n(x0),
            n(y0),
            n(x1),
            n(y1)
        );
    }

    fn polyline(&mut self, class: &str, pts: &[(f64, f64)], style: &str) {
        if pts.is_empty() {
            return;
        }
        if pts.len() == 1 {
            let _ = writeln!(
                self.out,
                "<circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"1.5\" {style}/>",
                n(pts[0].0),
                n(pts[0].1)
            );
            return;
        }
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{},{}", n(*x), n(*y))).collect();
        let _ = writeln!(
            self.out,
            "<polyline class=\"{class}\" points=\"{}\" fill=\"none\" {style}/>",
            coords.join(" ")
        );
    }

    fn circle(&mut self, class: &str, (x, y): (f64, f64), r: f64, fill: &str) {
        let _ = writeln!(
            self.out,
            "<circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\"/>",
            n(x),
            n(y),
            n(r)
        );
    }

    fn text(&mut self, class: &str, (x, y): (f64, f64), anchor: &str, s: &str) {
        let _ = writeln!(
            self.out,
            "<text class=\"{class}\" x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\">{}</text>",
            n(x),
            n(y),
            escape(s)
        );
    }

    fn y_ticks(&mut self, r: Rect, scale: &LinearScale) {
        for v in nice_ticks(scale.d0, scale.d1, 6) {
            let y = scale.map(v);
            self.line("tick", (r.x - 4.0, y), (r.x, y), "stroke=\"#555555\"");
            self.text("tick-label", (r.x - 6.0, y + 4.0), "end", &trim_decimal(v, 3));
        }
    }

    fn y_axis(&mut self, r: Rect, scale: &LinearScale, unit: &str) {
        self.y_ticks(r, scale);
        self.text("axis-label", (r.x - 6.0, r.y - 8.0), "end", unit);
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

const STYLE_TRACE: &str = "stroke=\"black\" stroke-width=\"1.5\"";
const STYLE_SOLID: &str = "stroke=\"#333333\" stroke-width=\"1\"";
const STYLE_DASHED: &str = "stroke=\"#333333\" stroke-width=\"1\" stroke-dasharray=\"8 4\"";
const STYLE_DOTTED: &str = "stroke=\"#333333\" stroke-width=\"1\" stroke-dasharray=\"2 3\"";
const STYLE_GLOBAL: &str = "stroke=\"#444444\" stroke-width=\"3\" stroke-dasharray=\"10 6\"";
const STYLE_LOCAL: &str = "stroke=\"#444444\" stroke-width=\"1\" stroke-dasharray=\"2 2\"";
const STYLE_RESIDUAL: &str = "stroke=\"#999999\" stroke-width=\"1\" stroke-dasharray=\"4 3\"";
const STYLE_ZERO: &str = "stroke=\"#777777\" stroke-width=\"0.5\"";

/// Everything drawn by [`plot_track`].
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub width: u32,
    pub height: u32,
    pub title: String,
    pub track: F0Track,
    pub global: Option<PolyModel>,
    pub locals: Vec<PolyModel>,
    pub residual: Option<F0Track>,
    pub annotation: Option<Tier>,
    pub waveform: Option<SampledSignal>,
    pub stat_lines: bool,
}

impl PlotSpec {
    pub fn new(track: F0Track) -> Self {
        PlotSpec {
            width: DEFAULT_WIDTH,
            height: DEFAULT_HEIGHT,
            title: "F0".into(),
            track,
            global: None,
            locals: Vec::new(),
            residual: None,
            annotation: None,
            waveform: None,
            stat_lines: true,
        }
    }
}

/// Polyline segments of a track, broken at unvoiced frames.
fn voiced_runs(track: &F0Track) -> Vec<Vec<(f64, f64)>> {
    let mut runs = Vec::new();
    let mut cur = Vec::new();
    for (i, f) in track.frames.iter().enumerate() {
        match f {
            Some(hz) => cur.push((track.time(i), *hz)),
            None if !cur.is_empty() => runs.push(std::mem::take(&mut cur)),
            None => {}
        }
    }
    if !cur.is_empty() {
        runs.push(cur);
    }
    runs
}

/// Times at which a model is drawn: every frame inside its domain.
fn model_samples(track: &F0Track, m: &PolyModel) -> Vec<(f64, f64)> {
    (0..track.len())
        .filter_map(|i| {
            let t = track.time(i);
            m.eval(t).map(|v| (t, v))
        })
        .collect()
}

pub fn plot_track(spec: &PlotSpec) -> Result<String, RenderError> {
    let track = &spec.track;
    let stats = track_stats(track).map_err(|_| RenderError::NoVoicedFrames)?;
    let (w, h) = (spec.width as f64, spec.height as f64);

    // Panel layout, top to bottom: F0, residual, labels, waveform.
    let plot_w = (w - MARGIN_LEFT - MARGIN_RIGHT).max(10.0);
    let mut avail = h - MARGIN_TOP - MARGIN_BOTTOM;
    let label_tier = spec
        .annotation
        .as_ref()
        .filter(|t| t.kind == TierKind::Interval);
    if label_tier.is_some() {
        avail -= LABEL_BAND + PANEL_GAP;
    }
    let weights = [
        3.0,
        if spec.residual.is_some() { 1.0 } else { 0.0 },
        if spec.waveform.is_some() { 1.0 } else { 0.0 },
    ];
    let gaps = weights[1..].iter().filter(|&&x| x > 0.0).count() as f64 * PANEL_GAP;
    let unit = ((avail - gaps) / weights.iter().sum::<f64>()).max(10.0);
    let mut y = MARGIN_TOP;
    let mut next_panel = |height: f64| {
        let r = Rect {
            x: MARGIN_LEFT,
            y,
            w: plot_w,
            h: height,
        };
        y += height + PANEL_GAP;
        r
    };
    let main = next_panel(3.0 * unit);
    let resid_rect = spec.residual.as_ref().map(|_| next_panel(unit));
    let label_rect = label_tier.map(|_| next_panel(LABEL_BAND));
    let wave_rect = spec.waveform.as_ref().map(|_| next_panel(unit));

    // Time axis covers the track and, if present, the waveform.
    let mut t_lo = track.start;
    let mut t_hi = track.end();
    if let Some(sig) = &spec.waveform {
        t_lo = t_lo.min(0.0);
        t_hi = t_hi.max(sig.duration());
    }
    let xs = LinearScale {
        d0: t_lo,
        d1: t_hi,
        r0: main.x,
        r1: main.right(),
    };

    let global_pts = spec
        .global
        .as_ref()
        .map(|m| model_samples(track, m))
        .unwrap_or_default();
    let local_pts: Vec<Vec<(f64, f64)>> =
        spec.locals.iter().map(|m| model_samples(track, m)).collect();
    let mut lo = stats.min;
    let mut hi = stats.max;
    for &(_, v) in global_pts.iter().chain(local_pts.iter().flatten()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let ys = LinearScale::padded(lo, hi, main.bottom(), main.y);

    let mut svg = Svg::new(spec.width, spec.height, &spec.title);
    svg.text("title", (main.x, MARGIN_TOP - 12.0), "start", &spec.title);
    svg.panel("plot-area", main);
    svg.y_axis(main, &ys, "Hz");

    // Frame-number ticks along the bottom of the lowest panel.
    let lowest = [Some(main), resid_rect, label_rect, wave_rect]
        .into_iter()
        .flatten()
        .last()
        .unwrap_or(main);
    if track.frame_step > 0.0 && !track.is_empty() {
        let to_frame = |t: f64| (t - track.start) / track.frame_step;
        for f in nice_ticks(to_frame(t_lo).max(0.0), to_frame(t_hi), 10) {
            let x = xs.map(track.start + f * track.frame_step);
            svg.line(
                "tick",
                (x, lowest.bottom()),
                (x, lowest.bottom() + 4.0),
                "stroke=\"#555555\"",
            );
            svg.text(
                "tick-label",
                (x, lowest.bottom() + 16.0),
                "middle",
                &trim_decimal(f, 0),
            );
        }
        svg.text(
            "axis-label",
            (lowest.right(), lowest.bottom() + 32.0),
            "end",
            &format!("frame ({} ms)", trim_decimal(track.frame_step * 1000.0, 3)),
        );
    }

    if spec.stat_lines {
        let (x0, x1) = (main.x, main.right());
        svg.hline("stat-max", ys.map(stats.max), x0, x1, STYLE_SOLID);
        svg.hline("stat-min", ys.map(stats.min), x0, x1, STYLE_SOLID);
        svg.hline("stat-mean", ys.map(stats.mean), x0, x1, STYLE_DASHED);
        svg.hline("stat-median", ys.map(stats.median), x0, x1, STYLE_DOTTED);
        // Labels sit above their lines: max at the right, min at the left.
        // Mean and median go at the right, the lower of the two below its
        // line.
        let (left, right) = (main.x + 4.0, main.right() - 4.0);
        let (above, below) = (-3.0, 12.0);
        let (mean_dy, median_dy) = if stats.mean >= stats.median {
            (above, below)
        } else {
            (below, above)
        };
        svg.text("stat-label", (right, ys.map(stats.max) + above), "end", &format!("max {} Hz", trim_decimal(stats.max, 0)));
        svg.text("stat-label", (left, ys.map(stats.min) + above), "start", &format!("min {} Hz", trim_decimal(stats.min, 0)));
        svg.text("stat-label", (right, ys.map(stats.mean) + mean_dy), "end", &format!("mean {} Hz", trim_decimal(stats.mean, 0)));
        svg.text("stat-label", (right, ys.map(stats.median) + median_dy), "end", &format!("median {} Hz", trim_decimal(stats.median, 0)));
    }

    let map = |pts: &[(f64, f64)], ys: &LinearScale| -> Vec<(f64, f64)> {
        pts.iter().map(|&(t, v)| (xs.map(t), ys.map(v))).collect()
    };
    for run in voiced_runs(track) {
        svg.polyline("f0", &map(&run, &ys), STYLE_TRACE);
    }
    for pts in &local_pts {
        svg.polyline("model-local", &map(pts, &ys), STYLE_LOCAL);
    }
    svg.polyline("model-global", &map(&global_pts, &ys), STYLE_GLOBAL);

    if let (Some(res), Some(r)) = (&spec.residual, resid_rect) {
        let amp = res
            .voiced()
            .map(|(_, _, v)| v.abs())
            .fold(0.0, f64::max)
            .max(1e-9);
        let rs = LinearScale::padded(-amp, amp, r.bottom(), r.y);
        svg.panel("residual-area", r);
        svg.y_ticks(r, &rs);
        svg.text("panel-label", (r.x + 4.0, r.y + 12.0), "start", "residual (Hz)");
        svg.hline("zero-line", rs.map(0.0), r.x, r.right(), STYLE_ZERO);
        for run in voiced_runs(res) {
            svg.polyline("residual", &map(&run, &rs), STYLE_RESIDUAL);
        }
    }

    if let (Some(tier), Some(r)) = (label_tier, label_rect) {
        svg.panel("label-area", r);
        for it in &tier.items {
            let (xa, xb) = (xs.map(it.tmin), xs.map(it.tmax));
            if xb < r.x || xa > r.right() {
                continue;
            }
            let (xa, xb) = (xa.max(r.x), xb.min(r.right()));
            svg.line("boundary", (xa, r.y), (xa, r.bottom()), STYLE_SOLID);
            svg.line("boundary", (xb, r.y), (xb, r.bottom()), STYLE_SOLID);
            let cx = (xa + xb) / 2.0;
            svg.text("label", (cx, r.y + 16.0), "middle", &it.label);
            svg.text(
                "duration",
                (cx, r.y + 32.0),
                "middle",
                &format!("{} ms", trim_decimal(it.duration() * 1000.0, 0)),
            );
        }
    }

    if let (Some(sig), Some(r)) = (&spec.waveform, wave_rect) {
        svg.panel("waveform-area", r);
        let ws = LinearScale {
            d0: -1.0,
            d1: 1.0,
            r0: r.bottom(),
            r1: r.y,
        };
        svg.raw(&waveform_path(sig, &xs, &ws));
    }

    Ok(svg.finish())
}

/// Min/max envelope of the signal, one vertical segment per bucket.
fn waveform_path(sig: &SampledSignal, xs: &LinearScale, ys: &LinearScale) -> String {
    let len = sig.samples.len();
    let buckets = len.min(MAX_WAVEFORM_SEGMENTS);
    let mut d = String::new();
    for b in 0..buckets {
        let s0 = b * len / buckets;
        let s1 = ((b + 1) * len / buckets).max(s0 + 1);
        let chunk = &sig.samples[s0..s1];
        let lo = chunk.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = chunk.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let t = (s0 + s1) as f64 / 2.0 / sig.sample_rate as f64;
        let x = n(xs.map(t));
        let _ = write!(d, "M{x} {}V{}", n(ys.map(lo)), n(ys.map(hi)));
    }
    format!(
        "<path class=\"waveform\" d=\"{d}\" fill=\"none\" stroke=\"#555555\" stroke-width=\"0.5\"/>"
    )
}

/// Box-and-whisker plot with a shared value axis. When `raw` is given, the
/// individual values of each category are drawn as a dot column beside the
/// box.
pub fn plot_boxes(
    stats: &BoxStats,
    raw: Option<&BTreeMap<String, Vec<f64>>>,
    width: u32,
    height: u32,
    title: &str,
) -> Result<String, RenderError> {
    if stats.categories.is_empty() {
        return Err(RenderError::EmptyStats);
    }
    let area = Rect {
        x: MARGIN_LEFT,
        y: MARGIN_TOP,
        w: (width as f64 - MARGIN_LEFT - MARGIN_RIGHT).max(10.0),
        h: (height as f64 - MARGIN_TOP - MARGIN_BOTTOM).max(10.0),
    };
    let lo = stats.categories.values().map(|b| b.min).fold(f64::INFINITY, f64::min);
    let hi = stats
        .categories
        .values()
        .map(|b| b.max)
        .fold(f64::NEG_INFINITY, f64::max);
    let ys = LinearScale::padded(lo, hi, area.bottom(), area.y);

    let mut svg = Svg::new(width, height, title);
    svg.text("title", (area.x, MARGIN_TOP - 12.0), "start", title);
    svg.panel("plot-area", area);
    svg.y_axis(area, &ys, "ms");

    let k = stats.categories.len() as f64;
    let slot = area.w / k;
    let box_w = (slot * 0.4).min(80.0);
    for (i, (name, b)) in stats.categories.iter().enumerate() {
        let cx = area.x + slot * (i as f64 + 0.5);
        let (xl, xr) = (cx - box_w / 2.0, cx + box_w / 2.0);
        let (y_q1, y_q3) = (ys.map(b.q1), ys.map(b.q3));
        let _ = writeln!(
            svg.out,
            "<rect class=\"box\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#eeeeee\" stroke=\"black\"/>",
            n(xl),
            n(y_q3),
            n(box_w),
            n(y_q1 - y_q3)
        );
        svg.line("whisker", (cx, y_q3), (cx, ys.map(b.max)), STYLE_SOLID);
        svg.line("whisker", (cx, y_q1), (cx, ys.map(b.min)), STYLE_SOLID);
        let cap = box_w / 4.0;
        svg.hline("whisker-cap", ys.map(b.max), cx - cap, cx + cap, STYLE_SOLID);
        svg.hline("whisker-cap", ys.map(b.min), cx - cap, cx + cap, STYLE_SOLID);
        svg.hline("median", ys.map(b.median), xl, xr, "stroke=\"black\" stroke-width=\"2\"");
        svg.circle("mean", (cx, ys.map(b.mean)), 3.5, "black");
        if let Some(values) = raw.and_then(|r| r.get(name)) {
            let px = xr + 8.0;
            for &v in values {
                svg.circle("point", (px, ys.map(v)), 1.5, "#555555");
            }
        }
        svg.text(
            "category",
            (cx, area.bottom() + 16.0),
            "middle",
            &format!("{name} (n={})", b.n),
        );
    }
    Ok(svg.finish())
}

/// Per-window nPVI with its sorted copy (grey) and lines at the mean and the
/// mean plus and minus one standard deviation.
pub fn plot_window_series(
    ws: &WindowSeries,
    width: u32,
    height: u32,
    title: &str,
) -> Result<String, RenderError> {
    if ws.values.is_empty() {
        return Err(RenderError::EmptySeries);
    }
    let area = Rect {
        x: MARGIN_LEFT,
        y: MARGIN_TOP,
        w: (width as f64 - MARGIN_LEFT - MARGIN_RIGHT).max(10.0),
        h: (height as f64 - MARGIN_TOP - MARGIN_BOTTOM).max(10.0),
    };
    let mean = ws.summary.mean;
    let sd = ws.summary.sd.unwrap_or(0.0);
    let lo = ws.sorted_values[0].min(mean - sd);
    let hi = ws.sorted_values[ws.sorted_values.len() - 1].max(mean + sd);
    let ys = LinearScale::padded(lo, hi, area.bottom(), area.y);
    let last = (ws.values.len() - 1) as f64;
    let xs = LinearScale {
        d0: 0.0,
        d1: last,
        r0: area.x,
        r1: area.right(),
    };

    let mut svg = Svg::new(width, height, title);
    svg.text("title", (area.x, MARGIN_TOP - 12.0), "start", title);
    svg.panel("plot-area", area);
    svg.y_axis(area, &ys, "nPVI");
    for i in nice_ticks(0.0, last, 10) {
        let x = xs.map(i);
        svg.line("tick", (x, area.bottom()), (x, area.bottom() + 4.0), "stroke=\"#555555\"");
        svg.text("tick-label", (x, area.bottom() + 16.0), "middle", &trim_decimal(i, 0));
    }
    svg.text(
        "axis-label",
        (area.right(), area.bottom() + 32.0),
        "end",
        &format!("window position (W={}, step {})", ws.window, ws.step),
    );

    svg.hline("mean", ys.map(mean), area.x, area.right(), STYLE_SOLID);
    svg.hline("sd-upper", ys.map(mean + sd), area.x, area.right(), STYLE_DASHED);
    svg.hline("sd-lower", ys.map(mean - sd), area.x, area.right(), STYLE_DASHED);

    let pts = |v: &[f64]| -> Vec<(f64, f64)> {
        v.iter()
            .enumerate()
            .map(|(i, &y)| (xs.map(i as f64), ys.map(y)))
            .collect()
    };
    svg.polyline(
        "sorted",
        &pts(&ws.sorted_values),
        "stroke=\"#aaaaaa\" stroke-width=\"2\"",
    );
    svg.polyline("npvi", &pts(&ws.values), STYLE_TRACE);
    Ok(svg.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks() {
        assert_eq!(nice_ticks(0.0, 10.0, 5), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        assert_eq!(nice_ticks(95.0, 305.0, 6), vec![100.0, 150.0, 200.0, 250.0, 300.0]);
        assert_eq!(nice_ticks(3.0, 3.0, 5), vec![3.0]);
    }

    #[test]
    fn padding() {
        assert_eq!(padded_range(100.0, 300.0), (90.0, 310.0));
        assert_eq!(padded_range(20.0, 20.0), (19.0, 21.0));
        let s = LinearScale::padded(100.0, 300.0, 330.0, 30.0);
        assert_eq!(s.map(90.0), 330.0);
        assert_eq!(s.map(310.0), 30.0);
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }

    #[test]
    fn unvoiced_track_rejected() {
        let spec = PlotSpec::new(F0Track::new(0.0, 0.01, vec![None; 3]));
        assert_eq!(plot_track(&spec), Err(RenderError::NoVoicedFrames));
    }

    #[test]
    fn empty_inputs_rejected() {
        let stats = BoxStats {
            categories: BTreeMap::new(),
        };
        assert_eq!(
            plot_boxes(&stats, None, 400, 300, "x"),
            Err(RenderError::EmptyStats)
        );
    }

    #[test]
    fn waveform_is_decimated() {
        let sig = SampledSignal {
            sample_rate: 16000,
            samples: (0..48000).map(|i| ((i % 50) as f64 / 50.0) - 0.5).collect(),
        };
        let xs = LinearScale {
            d0: 0.0,
            d1: 3.0,
            r0: 0.0,
            r1: 900.0,
        };
        let ys = LinearScale {
            d0: -1.0,
            d1: 1.0,
            r0: 100.0,
            r1: 0.0,
        };
        let path = waveform_path(&sig, &xs, &ys);
        assert_eq!(path.matches('M').count(), MAX_WAVEFORM_SEGMENTS);
    }
}
