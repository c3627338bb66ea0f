use std::fmt::Write;

use crate::interval::IntervalVector;
use crate::projection::{project_region, CrossingReport, ProjectionMap};
use crate::tracker::TubularNeighborhood;

const SIZE: f64 = 800.0;

/// SVG figure of the projected tube boxes, with crossing rectangles and
/// enclosures when `crossings` is given. The view is fitted to `frame`.
pub fn render(nbhd: &TubularNeighborhood, m: &ProjectionMap, frame: &IntervalVector, crossings: Option<&CrossingReport>) -> String {
    let [x0, x1, y0, y1] = corners(frame);
    let scale = SIZE / (x1 - x0).max(y1 - y0);
    let px = |x: f64| (x - x0) * scale;
    let py = |y: f64| (y1 - y) * scale;
    let (w, h) = ((x1 - x0) * scale, (y1 - y0) * scale);
    let stroke = 1.0;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="0 0 {w:.3} {h:.3}" width="{w:.0}" height="{h:.0}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w:.3}" height="{h:.3}" fill="white"/>"#);
    let _ = writeln!(out, r#"<g fill="none" stroke="steelblue" stroke-width="{stroke}">"#);
    for t in nbhd.tubes() {
        let b = corners(&project_region(m, &t.region));
        let _ = writeln!(
            out,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}"/>"#,
            px(b[0]),
            py(b[3]),
            (b[1] - b[0]) * scale,
            (b[3] - b[2]) * scale
        );
    }
    let _ = writeln!(out, "</g>");
    if let Some(report) = crossings {
        let _ = writeln!(out, r#"<g fill="none" stroke="darkorange" stroke-width="{stroke}">"#);
        for c in &report.crossings {
            for r in &c.rectangles.rectangles {
                let pts: Vec<String> = r
                    .corners()
                    .iter()
                    .map(|p| format!("{:.3},{:.3}", px(p[0].mid().to_f64()), py(p[1].mid().to_f64())))
                    .collect();
                let _ = writeln!(out, r#"<polygon points="{}"/>"#, pts.join(" "));
            }
        }
        let _ = writeln!(out, "</g>");
        let _ = writeln!(out, r#"<g fill="crimson">"#);
        for c in &report.crossings {
            let e = c.enclosure.to_f64();
            let _ = writeln!(out, r#"<circle cx="{:.3}" cy="{:.3}" r="4"/>"#, px(e[0]), py(e[1]));
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}

fn corners(b: &IntervalVector) -> [f64; 4] {
    [b[0].lo().to_f64(), b[0].hi().to_f64(), b[1].lo().to_f64(), b[1].hi().to_f64()]
}
