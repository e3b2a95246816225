use std::fmt::Write;

use crate::its::{GlsFit, SegmentedDesign};
use crate::store::{bin_midpoint, SummaryStats};

pub const FIT_SEGMENT_CLASS: &str = "fit-segment";

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 450.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let (x1, y1) = (
            if x1 > x0 { x1 } else { x0 + 1.0 },
            if y1 > y0 { y1 } else { y0 + 1.0 },
        );
        Self { x0, x1, y0, y1 }
    }

    fn x(&self, v: f64) -> f64 {
        LEFT + (v - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - BOTTOM - (v - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn open_svg(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let (bx, by) = (frame.x(frame.x0), frame.y(frame.y0));
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{bx:.2}" y1="{by:.2}" x2="{:.2}" y2="{by:.2}" stroke="black"/>"#,
        frame.x(frame.x1)
    );
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{bx:.2}" y1="{by:.2}" x2="{bx:.2}" y2="{:.2}" stroke="black"/>"#,
        frame.y(frame.y1)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {:.2})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
}

fn tick_label(out: &mut String, x: f64, y: f64, anchor: &str, text: &str) {
    let _ = writeln!(
        out,
        r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}" font-family="sans-serif" font-size="10">{}</text>"#,
        escape(text)
    );
}

/// Bar chart of the score histogram, one bar per bin.
pub fn histogram_svg(stats: &SummaryStats) -> String {
    let bins = stats.histogram.len().max(1);
    let peak = stats.histogram.iter().copied().max().unwrap_or(0).max(1) as f64;
    let frame = Frame::new(0.0, 1.0, 0.0, peak);
    let mut out = String::new();
    open_svg(&mut out, "Histogram of clickbait scores");
    let width = 1.0 / bins as f64;
    for (bin, &count) in stats.histogram.iter().enumerate() {
        let lo = bin_midpoint(bin) - width / 2.0;
        let (x0, x1) = (frame.x(lo), frame.x(lo + width));
        let (ytop, ybase) = (frame.y(count as f64), frame.y(0.0));
        let _ = writeln!(
            out,
            r#"<rect class="bar" x="{x0:.2}" y="{ytop:.2}" width="{:.2}" height="{:.2}" fill="steelblue"/>"#,
            x1 - x0,
            ybase - ytop
        );
    }
    axes(&mut out, &frame, "score_1", "count");
    for v in [0.0, 0.5, 1.0] {
        tick_label(&mut out, frame.x(v), frame.y(0.0) + 14.0, "middle", &format!("{v:.1}"));
    }
    tick_label(&mut out, LEFT - 6.0, frame.y(peak) + 4.0, "end", &peak.to_string());
    tick_label(&mut out, LEFT - 6.0, frame.y(0.0) + 4.0, "end", "0");
    out.push_str("</svg>\n");
    out
}

/// Daily means as points with the fitted pre- and post-event segments.
pub fn fit_plot_svg(fit: &GlsFit, design: &SegmentedDesign) -> String {
    let n = design.len();
    let fitted = fit.fitted(design);
    let k = design.event_index.min(n);
    let (lo, hi) = design
        .response
        .iter()
        .chain(&fitted)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    let pad = ((hi - lo) * 0.05).max(1e-9);
    let frame = Frame::new(0.0, n.saturating_sub(1) as f64, lo - pad, hi + pad);

    let title = format!("{} ({})", fit.event.name, fit.event.date);
    let mut out = String::new();
    open_svg(&mut out, &title);
    for (i, v) in design.response.iter().enumerate() {
        let _ = writeln!(
            out,
            r##"<circle class="observation" cx="{:.2}" cy="{:.2}" r="1.5" fill="#555"/>"##,
            frame.x(i as f64),
            frame.y(*v)
        );
    }
    let mark = frame.x(k as f64);
    let _ = writeln!(
        out,
        r#"<line class="event-marker" x1="{mark:.2}" y1="{:.2}" x2="{mark:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
        frame.y(frame.y0),
        frame.y(frame.y1)
    );
    for (a, b) in [(0, k.saturating_sub(1)), (k, n.saturating_sub(1))] {
        let _ = writeln!(
            out,
            r#"<line class="{FIT_SEGMENT_CLASS}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="crimson" stroke-width="2"/>"#,
            frame.x(a as f64),
            frame.y(fitted[a]),
            frame.x(b as f64),
            frame.y(fitted[b])
        );
    }
    axes(&mut out, &frame, "observation", "mean score_1");
    if let (Some(first), Some(last)) = (design.dates.first(), design.dates.last()) {
        let base = frame.y(frame.y0) + 14.0;
        tick_label(&mut out, frame.x(0.0), base, "start", &first.to_string());
        tick_label(&mut out, mark, base, "middle", &design.dates[k].to_string());
        tick_label(&mut out, frame.x(frame.x1), base, "end", &last.to_string());
    }
    tick_label(&mut out, LEFT - 6.0, frame.y(hi) + 4.0, "end", &format!("{hi:.3}"));
    tick_label(&mut out, LEFT - 6.0, frame.y(lo) + 4.0, "end", &format!("{lo:.3}"));
    out.push_str("</svg>\n");
    out
}
