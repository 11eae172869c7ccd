//! Minimal SVG figures: dated line charts and boxplots.
//!
//! Output is deterministic text so it can be diffed and inspected in tests.
//! Each boxplot group carries its quartiles as `data-*` attributes.

use chrono::NaiveDate;
use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    );
}

/// Linear map from `[lo, hi]` to `[a, b]`; a flat domain maps to the midpoint.
fn scale(v: f64, lo: f64, hi: f64, a: f64, b: f64) -> f64 {
    if hi > lo {
        a + (v - lo) / (hi - lo) * (b - a)
    } else {
        0.5 * (a + b)
    }
}

fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    if !(hi > lo) {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.05 };
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn y_axis(out: &mut String, lo: f64, hi: f64) {
    let (top, bottom) = (MARGIN_T, HEIGHT - MARGIN_B);
    let _ = writeln!(
        out,
        "<line x1=\"{MARGIN_L}\" y1=\"{top}\" x2=\"{MARGIN_L}\" y2=\"{bottom}\" stroke=\"black\"/>"
    );
    for i in 0..=4 {
        let v = lo + (hi - lo) * i as f64 / 4.0;
        let y = scale(v, lo, hi, bottom, top);
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{y:.2}\" x2=\"{MARGIN_L}\" y2=\"{y:.2}\" stroke=\"black\"/>\
             <text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            MARGIN_L - 4.0,
            MARGIN_L - 6.0,
            y + 4.0,
            tick_label(v)
        );
    }
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && (a < 1e-3 || a >= 1e5) {
        format!("{v:.2e}")
    } else {
        format!("{v:.4}")
    }
}

/// A named dated series.
pub struct Series<'a> {
    pub label: &'a str,
    pub points: &'a [(NaiveDate, f64)],
}

/// Line chart of dated series, with an optional dashed reference line.
pub fn line_chart(title: &str, y_label: &str, series: &[Series<'_>], reference: Option<f64>) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut d0, mut d1) = (None::<NaiveDate>, None::<NaiveDate>);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (d, v) in all {
        d0 = Some(d0.map_or(*d, |x| x.min(*d)));
        d1 = Some(d1.map_or(*d, |x| x.max(*d)));
        if v.is_finite() {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
    }
    if let Some(r) = reference {
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let (Some(d0), Some(d1)) = (d0, d1) else {
        out.push_str("<text x=\"400\" y=\"210\" text-anchor=\"middle\">no data</text>\n</svg>\n");
        return out;
    };
    let (lo, hi) = padded_range(lo, hi);
    let (left, right, top, bottom) = (MARGIN_L, WIDTH - MARGIN_R, MARGIN_T, HEIGHT - MARGIN_B);
    let span = (d1 - d0).num_days() as f64;
    let x_of = |d: NaiveDate| scale((d - d0).num_days() as f64, 0.0, span, left, right);
    y_axis(&mut out, lo, hi);
    let _ = writeln!(
        out,
        "<line x1=\"{left}\" y1=\"{bottom}\" x2=\"{right}\" y2=\"{bottom}\" stroke=\"black\"/>\n\
         <text x=\"{left}\" y=\"{}\" text-anchor=\"start\">{d0}</text>\n\
         <text x=\"{right}\" y=\"{}\" text-anchor=\"end\">{d1}</text>\n\
         <text x=\"16\" y=\"{}\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">{}</text>",
        bottom + 18.0,
        bottom + 18.0,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0,
        escape(y_label)
    );
    if let Some(r) = reference {
        let y = scale(r, lo, hi, bottom, top);
        let _ = writeln!(
            out,
            "<line class=\"reference\" x1=\"{left}\" y1=\"{y:.2}\" x2=\"{right}\" y2=\"{y:.2}\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>"
        );
    }
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut path = String::new();
        let mut pen_down = false;
        let mut prev: Option<NaiveDate> = None;
        for (d, v) in s.points {
            // Lift the pen over calendar gaps and missing values.
            let gap = prev.is_some_and(|p| (*d - p).num_days() > 1);
            prev = Some(*d);
            if !v.is_finite() {
                pen_down = false;
                continue;
            }
            let cmd = if pen_down && !gap { 'L' } else { 'M' };
            let _ = write!(path, "{cmd}{:.2},{:.2} ", x_of(*d), scale(*v, lo, hi, bottom, top));
            pen_down = true;
        }
        let _ = writeln!(
            out,
            "<path class=\"series\" data-label=\"{}\" d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\"/>",
            escape(s.label),
            path.trim_end()
        );
        let ly = top + 14.0 * i as f64 + 6.0;
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{color}\"/><text x=\"{}\" y=\"{}\">{}</text>",
            right - 110.0,
            ly - 9.0,
            right - 96.0,
            ly,
            escape(s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Five-number box summary with Tukey whiskers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxStats {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub n: usize,
}

/// Linear-interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let (i, frac) = (h.floor() as usize, h - h.floor());
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

pub fn box_stats(values: &[f64]) -> Option<BoxStats> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let (q1, median, q3) = (quantile(&v, 0.25), quantile(&v, 0.5), quantile(&v, 0.75));
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let whisker_low = *v.iter().find(|x| **x >= lo_fence).unwrap_or(&v[0]);
    let whisker_high = *v.iter().rev().find(|x| **x <= hi_fence).unwrap_or(&v[v.len() - 1]);
    Some(BoxStats {
        q1,
        median,
        q3,
        whisker_low,
        whisker_high,
        n: v.len(),
    })
}

/// Vertical boxplots, one per group, with a dashed line at zero when zero
/// falls inside the plotted range.
pub fn boxplot(title: &str, y_label: &str, groups: &[(&str, &[f64])]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let stats: Vec<(&str, Option<BoxStats>)> = groups.iter().map(|(l, v)| (*l, box_stats(v))).collect();
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for (_, s) in &stats {
        if let Some(s) = s {
            lo = lo.min(s.whisker_low);
            hi = hi.max(s.whisker_high);
        }
    }
    let (lo, hi) = padded_range(lo, hi);
    let (left, right, top, bottom) = (MARGIN_L, WIDTH - MARGIN_R, MARGIN_T, HEIGHT - MARGIN_B);
    let y = |v: f64| scale(v, lo, hi, bottom, top);
    y_axis(&mut out, lo, hi);
    let _ = writeln!(
        out,
        "<line x1=\"{left}\" y1=\"{bottom}\" x2=\"{right}\" y2=\"{bottom}\" stroke=\"black\"/>\n\
         <text x=\"16\" y=\"{}\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">{}</text>",
        (top + bottom) / 2.0,
        (top + bottom) / 2.0,
        escape(y_label)
    );
    let zero = y(0.0);
    let _ = writeln!(
        out,
        "<line class=\"zero\" x1=\"{left}\" y1=\"{zero:.2}\" x2=\"{right}\" y2=\"{zero:.2}\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>"
    );
    let slot = (right - left) / stats.len().max(1) as f64;
    let bw = (slot * 0.4).min(80.0);
    for (i, (label, s)) in stats.iter().enumerate() {
        let cx = left + slot * (i as f64 + 0.5);
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            out,
            "<text x=\"{cx:.2}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            bottom + 18.0,
            escape(label)
        );
        let Some(s) = s else { continue };
        let _ = writeln!(
            out,
            "<g class=\"box\" data-label=\"{}\" data-n=\"{}\" data-q1=\"{}\" data-median=\"{}\" data-q3=\"{}\" data-whisker-low=\"{}\" data-whisker-high=\"{}\">\n\
             <line x1=\"{cx:.2}\" y1=\"{:.2}\" x2=\"{cx:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n\
             <line x1=\"{cx:.2}\" y1=\"{:.2}\" x2=\"{cx:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n\
             <rect x=\"{:.2}\" y=\"{:.2}\" width=\"{bw:.2}\" height=\"{:.2}\" fill=\"{color}\" fill-opacity=\"0.4\" stroke=\"black\"/>\n\
             <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"2\"/>\n\
             </g>",
            escape(label),
            s.n,
            s.q1,
            s.median,
            s.q3,
            s.whisker_low,
            s.whisker_high,
            y(s.whisker_high),
            y(s.q3),
            y(s.q1),
            y(s.whisker_low),
            cx - bw / 2.0,
            y(s.q3),
            (y(s.q1) - y(s.q3)).max(0.5),
            cx - bw / 2.0,
            y(s.median),
            cx + bw / 2.0,
            y(s.median),
        );
    }
    out.push_str("</svg>\n");
    out
}
