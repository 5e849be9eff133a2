use std::fmt::Write;

use crate::tracker::{Frame, Grid3};
use crate::Vec3;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 24.0;

/// Fixed oblique view: azimuth 30°, elevation 20°.
fn project(p: &Vec3) -> (f64, f64) {
    let (sa, ca) = 30f64.to_radians().sin_cos();
    let (se, ce) = 20f64.to_radians().sin_cos();
    let u = ca * p.x - sa * p.y;
    let v = ce * p.z - se * (sa * p.x + ca * p.y);
    (u, v)
}

/// Orthographic snapshot of one frame with the grid box outline. Lines
/// with positive winding are drawn in blue, negative in red.
pub fn render_frame_svg(grid: &Grid3, frame: &Frame) -> String {
    let (lo, hi) = (grid.lower(), grid.upper());
    let corners: Vec<Vec3> = (0..8)
        .map(|i| Vec3::new(if i & 1 == 0 { lo.x } else { hi.x }, if i & 2 == 0 { lo.y } else { hi.y }, if i & 4 == 0 { lo.z } else { hi.z }))
        .collect();
    let proj: Vec<(f64, f64)> = corners.iter().map(project).collect();
    let (mut umin, mut umax, mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(u, v) in &proj {
        umin = umin.min(u);
        umax = umax.max(u);
        vmin = vmin.min(v);
        vmax = vmax.max(v);
    }
    let scale = (SIZE - 2.0 * MARGIN) / (umax - umin).max(vmax - vmin);
    let screen = |p: &Vec3| {
        let (u, v) = project(p);
        (MARGIN + (u - umin) * scale, SIZE - MARGIN - (v - vmin) * scale)
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    for i in 0..8usize {
        for bit in [1usize, 2, 4] {
            let j = i | bit;
            if j != i {
                let (a, b) = (screen(&corners[i]), screen(&corners[j]));
                let _ = writeln!(
                    s,
                    r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999999" stroke-width="0.8"/>"##,
                    a.0, a.1, b.0, b.1
                );
            }
        }
    }
    for line in &frame.lines {
        let colour = if line.winding >= 0 { "#1f4fd1" } else { "#c8283c" };
        let mut d = String::new();
        for (k, p) in line.points.iter().enumerate() {
            let (x, y) = screen(p);
            let _ = write!(d, "{}{:.2} {:.2} ", if k == 0 { "M" } else { "L" }, x, y);
        }
        if line.closed {
            d.push('Z');
        }
        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="1.6"/>"#, d.trim_end());
    }
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{:.0}" font-family="monospace" font-size="12">frame {} t = {:.6}</text>"#,
        MARGIN - 8.0,
        frame.index,
        frame.time
    );
    s.push_str("</svg>\n");
    s
}
