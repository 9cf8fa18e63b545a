//! Minimal SVG plots built only from CSV rows.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write;

use crate::output::{PatternRow, StateRow};
use crate::scattering::SwitchState;

const W: f64 = 720.0;
const H: f64 = 440.0;
const MARGIN: f64 = 60.0;

/// Dynamic range shown below the co-polar maximum.
pub const CUT_RANGE_DB: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Rectangular dB-vs-θ_z plot of co (solid) and cross (dashed) directivity.
pub fn cut_plot(rows: &[PatternRow], title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    if rows.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let x0 = rows.iter().map(|r| r.theta_z_deg).fold(f64::INFINITY, f64::min);
    let x1 = rows.iter().map(|r| r.theta_z_deg).fold(f64::NEG_INFINITY, f64::max);
    let x1 = if x1 > x0 { x1 } else { x0 + 1.0 };
    let top = rows
        .iter()
        .map(|r| r.d_co_db.max(r.d_cr_db))
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let top = if top.is_finite() {
        (top / 10.0).ceil() * 10.0
    } else {
        0.0
    };
    let bottom = top - CUT_RANGE_DB;
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let py = |y: f64| {
        let y = if y.is_finite() { y.clamp(bottom, top) } else { bottom };
        H - MARGIN - (y - bottom) / (top - bottom) * (H - 2.0 * MARGIN)
    };

    for k in 0..=6 {
        let v = bottom + k as f64 * CUT_RANGE_DB / 6.0;
        let y = py(v);
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.0}</text>"##,
            W - MARGIN,
            MARGIN - 6.0,
            y + 4.0
        );
    }
    for k in 0..=8 {
        let v = x0 + k as f64 * (x1 - x0) / 8.0;
        let x = px(v);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{MARGIN}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{v:.2}</text>"##,
            H - MARGIN,
            H - MARGIN + 16.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">θz (deg)</text><text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle">directivity (dBi)</text>"#,
        W / 2.0,
        H - 16.0,
        H / 2.0,
        H / 2.0
    );
    for (values, style) in [
        (
            rows.iter().map(|r| (r.theta_z_deg, r.d_co_db)).collect::<Vec<_>>(),
            r##"stroke="#1f4e9c""##,
        ),
        (
            rows.iter().map(|r| (r.theta_z_deg, r.d_cr_db)).collect::<Vec<_>>(),
            r##"stroke="#c0392b" stroke-dasharray="5 3""##,
        ),
    ] {
        let pts: Vec<String> = values
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke-width="1.2" {style} points="{}"/>"#,
            pts.join(" ")
        );
    }
    let _ = writeln!(
        s,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{:.2}" height="{:.2}" fill="none" stroke="#333"/>"##,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    s.push_str("</svg>\n");
    s
}

/// Polar map of the switch states, innermost ring nearest the centre.
/// On cells are filled dark, off cells light.
pub fn state_map(rows: &[StateRow], title: &str) -> String {
    let size = 640.0;
    let c = size / 2.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{}" viewBox="0 0 {size} {}" font-family="sans-serif" font-size="12">"#,
        size + 30.0,
        size + 30.0
    );
    let _ = writeln!(s, r#"<rect width="{size}" height="{}" fill="white"/>"#, size + 30.0);
    let _ = writeln!(
        s,
        r#"<text x="{c}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        escape(title)
    );
    let mut rings: BTreeMap<usize, usize> = BTreeMap::new();
    for r in rows {
        *rings.entry(r.ring).or_default() += 1;
    }
    let n_rings = rings.len().max(1) as f64;
    let outer = c - 20.0;
    let inner = 0.55 * outer;
    let band = (outer - inner) / n_rings;
    let ring_pos: BTreeMap<usize, usize> = rings.keys().enumerate().map(|(i, &k)| (k, i)).collect();
    let cy = c + 30.0;
    for r in rows {
        let n = rings[&r.ring] as f64;
        let k = ring_pos[&r.ring] as f64;
        let (ri, ro) = (inner + k * band, inner + (k + 1.0) * band);
        let a0 = 2.0 * PI * r.index_in_ring as f64 / n;
        let a1 = 2.0 * PI * (r.index_in_ring as f64 + 1.0) / n;
        let p = |rad: f64, a: f64| (c + rad * a.cos(), cy - rad * a.sin());
        let (p0, p1, p2, p3) = (p(ri, a0), p(ro, a0), p(ro, a1), p(ri, a1));
        let fill = match r.state {
            SwitchState::On => "#222",
            SwitchState::Off => "#eee",
        };
        let _ = writeln!(
            s,
            r##"<path d="M{:.2},{:.2} L{:.2},{:.2} A{ro:.2},{ro:.2} 0 0 0 {:.2},{:.2} L{:.2},{:.2} A{ri:.2},{ri:.2} 0 0 1 {:.2},{:.2} Z" fill="{fill}" stroke="#999" stroke-width="0.3"/>"##,
            p0.0, p0.1, p1.0, p1.1, p2.0, p2.1, p3.0, p3.1, p0.0, p0.1
        );
    }
    let _ = writeln!(
        s,
        r##"<circle cx="{c}" cy="{cy}" r="{:.2}" fill="#f7f7f7" stroke="#999"/><text x="{c}" y="{cy}" text-anchor="middle">solid reflector</text>"##,
        inner
    );
    s.push_str("</svg>\n");
    s
}
