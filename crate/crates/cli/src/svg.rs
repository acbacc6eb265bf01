//! SVG picture of a planar solution: one circle per ball, one line per
//! cover edge.

use std::fmt::Write;

use radsum::cover::CycleCover;

const INK: &str = "#1f4e79";
const EDGE: &str = "#b03a2e";

fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" || s.is_empty() {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Renders 2D points with their radii and cover. The y axis points up.
/// Zero radii are drawn as small filled dots; 2-cycles as two parallel
/// lines.
pub fn render_svg(
    points: &[Vec<f64>],
    radii: &[f64],
    cover: &CycleCover,
) -> Result<String, String> {
    if points.iter().any(|p| p.len() != 2) {
        return Err("svg output needs two-dimensional points".into());
    }
    if radii.len() != points.len() {
        return Err("one radius per point is required".into());
    }
    let (mut x0, mut y0) = (f64::INFINITY, f64::INFINITY);
    let (mut x1, mut y1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (p, &r) in points.iter().zip(radii) {
        let r = r.max(0.0);
        x0 = x0.min(p[0] - r);
        x1 = x1.max(p[0] + r);
        y0 = y0.min(p[1] - r);
        y1 = y1.max(p[1] + r);
    }
    if points.is_empty() {
        (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
    }
    let mut extent = (x1 - x0).max(y1 - y0);
    if !(extent > 0.0) {
        extent = 1.0;
    }
    let margin = 0.05 * extent;
    let (vx, vy) = (x0 - margin, -y1 - margin);
    let (vw, vh) = (x1 - x0 + 2.0 * margin, y1 - y0 + 2.0 * margin);
    let stroke = extent / 500.0;
    let dot = extent / 200.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}">"#,
        num(vx),
        num(vy),
        num(vw.max(extent * 0.1)),
        num(vh.max(extent * 0.1))
    );
    let _ = writeln!(
        s,
        r#"<g fill="none" stroke="{INK}" stroke-width="{}">"#,
        num(stroke)
    );
    for (i, (p, &r)) in points.iter().zip(radii).enumerate() {
        if r > 0.0 {
            let _ = writeln!(
                s,
                r#"<circle id="b{i}" cx="{}" cy="{}" r="{}"/>"#,
                num(p[0]),
                num(-p[1]),
                num(r)
            );
        } else {
            let _ = writeln!(
                s,
                r#"<circle id="b{i}" class="dot" cx="{}" cy="{}" r="{}" fill="{INK}"/>"#,
                num(p[0]),
                num(-p[1]),
                num(dot)
            );
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g stroke="{EDGE}" stroke-width="{}">"#, num(stroke));
    for e in &cover.edges {
        let (a, b) = (&points[e.i], &points[e.j]);
        let (ax, ay, bx, by) = (a[0], -a[1], b[0], -b[1]);
        if e.multiplicity >= 2 {
            let (dx, dy) = (bx - ax, by - ay);
            let len = (dx * dx + dy * dy).sqrt();
            let (ox, oy) = if len > 0.0 {
                (-dy / len * 1.5 * stroke, dx / len * 1.5 * stroke)
            } else {
                (0.0, 0.0)
            };
            for side in [1.0, -1.0] {
                let _ = writeln!(
                    s,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                    num(ax + side * ox),
                    num(ay + side * oy),
                    num(bx + side * ox),
                    num(by + side * oy)
                );
            }
        } else {
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                num(ax),
                num(ay),
                num(bx),
                num(by)
            );
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    Ok(s)
}
