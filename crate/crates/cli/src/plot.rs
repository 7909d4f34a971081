//! SVG scatter plots of trajectories.
//!
//! One panel for `Z` and, when the trajectory has any `Y`, one for `Y`.
//! Filled circles mark parity `+1`, hollow ones `-1`; the `Z` panel carries
//! the line `Z = mQ` and, below it, one bracket per segment. Amplitudes with
//! an ε part are drawn at their rational part, nudged by a few pixels in the
//! direction of the ε coefficient, and carry the full value in a `<title>`.

use std::fmt::Write;

use pud::classify::Segmentation;
use pud::{ParityValue, Sign, Trajectory};

const WIDTH: f64 = 720.0;
const PANEL: f64 = 260.0;
const MARGIN: f64 = 48.0;
const BRACKETS: f64 = 44.0;
const RADIUS: f64 = 3.5;
const NUDGE: f64 = 3.0;

fn to_f64(r: pud::Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

struct Frame {
    m_lo: i64,
    m_hi: i64,
    v_lo: f64,
    v_hi: f64,
    top: f64,
}

impl Frame {
    fn x(&self, m: f64) -> f64 {
        let span = (self.m_hi - self.m_lo).max(1) as f64;
        MARGIN + (m - self.m_lo as f64) / span * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.v_hi - self.v_lo).max(1.0);
        self.top + PANEL - (v - self.v_lo) / span * PANEL
    }

    fn step(&self) -> f64 {
        (WIDTH - 2.0 * MARGIN) / (self.m_hi - self.m_lo).max(1) as f64
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if lo.is_finite() {
        let pad = ((hi - lo) * 0.05).max(1.0);
        (lo - pad, hi + pad)
    } else {
        (-1.0, 1.0)
    }
}

fn axes(out: &mut String, f: &Frame, name: &str) {
    let zero = f.y(0.0).clamp(f.top, f.top + PANEL);
    let _ = writeln!(
        out,
        r#"<g class="axes"><line x1="{:.2}" y1="{zero:.2}" x2="{:.2}" y2="{zero:.2}" stroke="black"/><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="12">{name}</text><text x="{:.2}" y="{:.2}" font-size="12">m</text></g>"#,
        MARGIN,
        WIDTH - MARGIN,
        MARGIN,
        f.top,
        MARGIN,
        f.top + PANEL,
        MARGIN + 4.0,
        f.top + 12.0,
        WIDTH - MARGIN + 4.0,
        zero + 4.0,
    );
    for m in ticks(f.m_lo, f.m_hi) {
        let x = f.x(m as f64);
        let _ = writeln!(
            out,
            r#"<g class="tick"><line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" font-size="10" text-anchor="middle">{m}</text></g>"#,
            zero - 2.0,
            zero + 2.0,
            zero + 14.0,
        );
    }
}

fn ticks(lo: i64, hi: i64) -> Vec<i64> {
    let step = match hi - lo {
        0..=20 => 5,
        21..=60 => 10,
        _ => 20,
    };
    (lo..=hi).filter(|m| m % step == 0).collect()
}

fn marker(out: &mut String, f: &Frame, class: &str, m: i64, v: ParityValue) {
    let nudge = match v.amp.eps().cmp(&pud::Rational::from_integer(0)) {
        std::cmp::Ordering::Greater => -NUDGE,
        std::cmp::Ordering::Less => NUDGE,
        std::cmp::Ordering::Equal => 0.0,
    };
    let (cx, cy) = (f.x(m as f64), f.y(to_f64(v.amp.re())) + nudge);
    let fill = match v.sign {
        Sign::Plus => "black",
        Sign::Minus => "none",
    };
    let _ = writeln!(
        out,
        r#"<circle class="{class}" data-m="{m}" data-parity="{}" cx="{cx:.2}" cy="{cy:.2}" r="{RADIUS}" fill="{fill}" stroke="black"><title>{m}: {v}</title></circle>"#,
        v.sign,
    );
}

/// The document as a string. `seg` adds segment brackets under the `Z` panel.
pub fn emit_plot(t: &Trajectory, seg: Option<&Segmentation>) -> String {
    let (m_lo, m_hi) = t.range().unwrap_or((0, 1));
    let zs: Vec<(i64, ParityValue)> = t.rows.values().filter_map(|r| Some((r.m, r.z?))).collect();
    let ys: Vec<(i64, ParityValue)> = t.rows.values().filter_map(|r| Some((r.m, r.y?))).collect();
    let (z_lo, z_hi) = range(zs.iter().map(|(_, v)| to_f64(v.amp.re())));
    let zf = Frame { m_lo, m_hi, v_lo: z_lo, v_hi: z_hi, top: MARGIN };
    let y_top = MARGIN + PANEL + BRACKETS + MARGIN;
    let height = if ys.is_empty() { y_top } else { y_top + PANEL + MARGIN };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(
        out,
        r#"<defs><clipPath id="zpanel"><rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{PANEL}"/></clipPath></defs>"#,
        WIDTH - 2.0 * MARGIN
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<g class="panel" id="Z">"#);
    axes(&mut out, &zf, "Z");
    let q = to_f64(t.params.q.re());
    let (g0, g1) = (m_lo as f64, m_hi as f64);
    let _ = writeln!(
        out,
        r#"<line class="guide" clip-path="url(#zpanel)" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4 3"><title>Z = mQ</title></line>"#,
        zf.x(g0),
        zf.y(g0 * q),
        zf.x(g1),
        zf.y(g1 * q),
    );
    for &(m, v) in &zs {
        marker(&mut out, &zf, "z", m, v);
    }
    let _ = writeln!(out, "</g>");

    if let Some(seg) = seg {
        let base = MARGIN + PANEL + BRACKETS - 14.0;
        let half = zf.step() / 2.0;
        let _ = writeln!(out, r#"<g class="segments">"#);
        for s in &seg.segments {
            let (x0, x1) = (zf.x(s.start as f64) - half + 1.0, zf.x(s.end as f64) + half - 1.0);
            let class = if s.joined { "segment joined" } else { "segment" };
            let _ = writeln!(
                out,
                r#"<g class="{class}" data-start="{}" data-end="{}" data-label="{}"><path d="M{x0:.2},{:.2} V{base:.2} H{x1:.2} V{:.2}" fill="none" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">{}</text></g>"#,
                s.start,
                s.end,
                s.label,
                base - 5.0,
                base - 5.0,
                (x0 + x1) / 2.0,
                base + 12.0,
                s.label,
            );
        }
        let _ = writeln!(out, "</g>");
    }

    if !ys.is_empty() {
        let (y_lo, y_hi) = range(ys.iter().map(|(_, v)| to_f64(v.amp.re())));
        let yf = Frame { m_lo, m_hi, v_lo: y_lo, v_hi: y_hi, top: y_top };
        let _ = writeln!(out, r#"<g class="panel" id="Y">"#);
        axes(&mut out, &yf, "Y");
        for &(m, v) in &ys {
            marker(&mut out, &yf, "y", m, v);
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}
