//! SVG rendering of the P-D plane: digit regions, the selection-constant
//! staircase of a table, and highlighted violation rectangles.
//!
//! Coordinates are converted to `f64` here and only here; nothing drawn is
//! fed back into a decision.

use std::fmt::Write;

use crate::tables::SelectionTable;
use crate::verify::{Rectangle, Violation};

#[derive(Clone, Debug, PartialEq)]
pub struct PlotOptions {
    pub width: u32,
    pub height: u32,
    /// Divisor window; defaults to `[1/2, 1]`.
    pub y_range: Option<(f64, f64)>,
    /// Shifted-remainder window; defaults to `[0, βρ]`.
    pub p_range: Option<(f64, f64)>,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions { width: 900, height: 640, y_range: None, p_range: None }
    }
}

const MARGIN: f64 = 48.0;
const REGION_FILLS: [&str; 2] = ["#4e79a7", "#f28e2b"];

struct Frame {
    y0: f64,
    y1: f64,
    p0: f64,
    p1: f64,
    w: f64,
    h: f64,
}

impl Frame {
    fn x(&self, y: f64) -> f64 {
        MARGIN + (y - self.y0) / (self.y1 - self.y0) * self.w
    }

    fn py(&self, p: f64) -> f64 {
        MARGIN + self.h - (p - self.p0) / (self.p1 - self.p0) * self.h
    }
}

fn tick_step(span: f64) -> f64 {
    let raw = span / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag)
}

pub fn render_pd_svg(table: &SelectionTable, violations: &[Violation], opts: &PlotOptions) -> String {
    let cfg = table.cfg();
    let rho = cfg.rho().to_f64();
    let a = cfg.a() as f64;
    let (y0, y1) = opts.y_range.unwrap_or((0.5, 1.0));
    let (p0, p1) = opts.p_range.unwrap_or((0.0, a + rho));
    let f = Frame { y0, y1, p0, p1, w: opts.width as f64 - 2.0 * MARGIN, h: opts.height as f64 - 2.0 * MARGIN };
    let ulp_t = 2f64.powi(-(table.t() as i32));
    let ulp_u = 2f64.powi(-(table.u() as i32));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="11">"#,
        opts.width, opts.height, opts.width, opts.height
    );
    let _ =
        writeln!(s, r#"<title>P-D diagram, beta={} a={} u={} t={}</title>"#, cfg.beta(), cfg.a(), table.u(), table.t());
    let _ = writeln!(
        s,
        r#"<defs><clipPath id="plot"><rect x="{MARGIN}" y="{MARGIN}" width="{:.2}" height="{:.2}"/></clipPath></defs>"#,
        f.w, f.h
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<g clip-path="url(#plot)">"#);

    // Digit regions (d - ρ)y <= P <= (d + ρ)y.
    for d in 0..=cfg.a() {
        let (lo, hi) = (d as f64 - rho, d as f64 + rho);
        let _ = writeln!(
            s,
            r#"<polygon class="region" data-digit="{d}" points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{}" fill-opacity="0.12" stroke="{}" stroke-opacity="0.5" stroke-width="0.6"/>"#,
            f.x(y0),
            f.py(lo * y0),
            f.x(y1),
            f.py(lo * y1),
            f.x(y1),
            f.py(hi * y1),
            f.x(y0),
            f.py(hi * y0),
            REGION_FILLS[d as usize % 2],
            REGION_FILLS[d as usize % 2]
        );
    }

    // Staircase of selection constants, restricted to the visible divisor window.
    let k_lo = ((y0 / ulp_u).floor() as u64).max(table.k_range().start);
    let k_hi = ((y1 / ulp_u).ceil() as u64).min(table.k_range().end);
    if k_lo < k_hi {
        for d in 1..=cfg.a() {
            let mut path = String::new();
            for k in k_lo..k_hi {
                let level = table.threshold(d, k) as f64 * ulp_t;
                let (xa, xb) = (f.x(k as f64 * ulp_u), f.x((k + 1) as f64 * ulp_u));
                let cmd = if k == k_lo { 'M' } else { 'L' };
                let _ = write!(path, "{cmd}{xa:.2},{:.2}L{xb:.2},{:.2}", f.py(level), f.py(level));
            }
            let _ = writeln!(
                s,
                r##"<path class="staircase" data-digit="{d}" d="{path}" fill="none" stroke="#222" stroke-width="1"/>"##
            );
        }
    }

    for v in violations {
        let r = Rectangle::cell(v.k, table.u(), v.s, table.t());
        let (xa, xb) = (f.x(r.y_lo.to_f64()), f.x(r.y_hi.to_f64()));
        let (ya, yb) = (f.py(r.p_hi.to_f64()), f.py(r.p_lo.to_f64()));
        let _ = writeln!(
            s,
            r##"<rect class="violation" data-k="{}" data-s="{}" data-d="{}" x="{xa:.2}" y="{ya:.2}" width="{:.2}" height="{:.2}" fill="#e15759" fill-opacity="0.7" stroke="#b00" stroke-width="1.5"/>"##,
            v.k,
            v.s,
            v.d,
            (xb - xa).max(2.0),
            (yb - ya).max(2.0)
        );
    }
    s.push_str("</g>\n");

    // Axes.
    let _ = writeln!(
        s,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{:.2}" height="{:.2}" fill="none" stroke="#444"/>"##,
        f.w, f.h
    );
    let step = tick_step(y1 - y0);
    let mut tick = (y0 / step).ceil() * step;
    while tick <= y1 + 1e-12 {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            f.x(tick),
            MARGIN + f.h + 16.0,
            trim(tick)
        );
        tick += step;
    }
    let step = tick_step(p1 - p0);
    let mut tick = (p0 / step).ceil() * step;
    while tick <= p1 + 1e-12 {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN - 6.0,
            f.py(tick) + 4.0,
            trim(tick)
        );
        tick += step;
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">divisor y</text>"#,
        MARGIN + f.w / 2.0,
        opts.height as f64 - 8.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">shifted remainder &#946;r</text>"#,
        MARGIN + f.h / 2.0,
        MARGIN + f.h / 2.0
    );
    s.push_str("</svg>\n");
    s
}

fn trim(v: f64) -> String {
    let s = format!("{v:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::RadixConfig;
    use crate::tables::{build_table, build_table_unvalidated};
    use crate::verify::verify_table_geometric;

    #[test]
    fn clean_table_has_no_highlight() {
        let t = build_table(&RadixConfig::new(4, 2).unwrap(), 4, 4).unwrap();
        let svg = render_pd_svg(&t, &[], &PlotOptions::default());
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("class=\"region\"").count(), 3);
        assert_eq!(svg.matches("class=\"staircase\"").count(), 2);
        assert!(!svg.contains("class=\"violation\""));
    }

    #[test]
    fn violations_are_highlighted() {
        let t = build_table_unvalidated(&RadixConfig::new(16, 15).unwrap(), 9, 2).unwrap();
        let report = verify_table_geometric(&t);
        let svg = render_pd_svg(&t, &report.violations, &PlotOptions::default());
        assert_eq!(svg.matches("class=\"violation\"").count(), report.violations.len());
        assert!(!report.violations.is_empty());
    }

    #[test]
    fn zoomed_window() {
        let t = build_table(&RadixConfig::new(16, 8).unwrap(), 9, 7).unwrap();
        let opts = PlotOptions { y_range: Some((0.5, 0.52)), p_range: Some((6.0, 8.0)), ..Default::default() };
        let svg = render_pd_svg(&t, &[], &opts);
        assert!(svg.contains(">0.51<") || svg.contains(">0.505<"));
    }
}
