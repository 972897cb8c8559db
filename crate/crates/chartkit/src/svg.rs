//! Static scatter plots.

use std::fmt::Write;
use std::path::Path;

use crate::error::Result;
use crate::formats::write_atomic;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;

/// Scatter plot with the `vip` subset drawn as larger red marks on top.
pub fn chart_svg(points: &[[f64; 2]], vip: &[bool], title: &str) -> Result<String> {
    if points.is_empty() {
        return Err(chartcore::Error::EmptyInput.into());
    }
    let finite: Vec<&[f64; 2]> = points.iter().filter(|p| p[0].is_finite() && p[1].is_finite()).collect();
    if finite.is_empty() {
        return Err(chartcore::Error::EmptyInput.into());
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &finite {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let pad = |lo: f64, hi: f64| if hi > lo { (lo, hi) } else { (lo - 1.0, hi + 1.0) };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    let span = SIZE - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * span;
    let sy = |y: f64| SIZE - MARGIN - (y - y0) / (y1 - y0) * span;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{span}" height="{span}" fill="none" stroke="black" stroke-width="0.5"/>"#
    );
    let label = |s: &mut String, x: f64, y: f64, anchor: &str, v: f64| {
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{y:.1}" font-family="sans-serif" font-size="10" text-anchor="{anchor}">{v:.3}</text>"#
        );
    };
    label(&mut s, MARGIN, SIZE - MARGIN + 14.0, "start", x0);
    label(&mut s, SIZE - MARGIN, SIZE - MARGIN + 14.0, "end", x1);
    label(&mut s, MARGIN - 4.0, SIZE - MARGIN, "end", y0);
    label(&mut s, MARGIN - 4.0, MARGIN + 8.0, "end", y1);
    let is_vip = |i: usize| vip.get(i).copied().unwrap_or(false);
    for pass in [false, true] {
        for (i, p) in points.iter().enumerate() {
            if is_vip(i) != pass || !(p[0].is_finite() && p[1].is_finite()) {
                continue;
            }
            let (r, fill) = if pass { (2.5, "#d62728") } else { (1.5, "#7f7f7f") };
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{fill}"/>"#, sx(p[0]), sy(p[1]));
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn render_chart_svg(points: &[[f64; 2]], vip: &[bool], title: &str, path: &Path) -> Result<()> {
    write_atomic(path, chart_svg(points, vip, title)?.as_bytes())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_and_empty() {
        let s = chart_svg(&[[1.0, 2.0]], &[true], "one").unwrap();
        assert_eq!(s.matches("<circle").count(), 1);
        assert!(s.contains("#d62728"));
        assert!(chart_svg(&[], &[], "none").is_err());
    }
}
