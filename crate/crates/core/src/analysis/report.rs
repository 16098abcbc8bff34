use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Summary of the benchmarks of one shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumetricCell {
    pub width: usize,
    pub depth: usize,
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

const CELL_W: usize = 64;
const CELL_H: usize = 40;
const LEFT: usize = 70;
const TOP: usize = 40;
const BOTTOM: usize = 50;

/// Piecewise-linear ramp from dark purple (0) through teal to yellow (1).
fn color(f: f64) -> String {
    if !f.is_finite() {
        return "#cccccc".into();
    }
    const STOPS: [(f64, [f64; 3]); 5] = [
        (0.0, [68.0, 1.0, 84.0]),
        (0.25, [59.0, 82.0, 139.0]),
        (0.5, [33.0, 145.0, 140.0]),
        (0.75, [94.0, 201.0, 98.0]),
        (1.0, [253.0, 231.0, 37.0]),
    ];
    let f = f.clamp(0.0, 1.0);
    let i = STOPS.iter().rposition(|(x, _)| *x <= f).unwrap_or(0).min(STOPS.len() - 2);
    let (x0, a) = STOPS[i];
    let (x1, b) = STOPS[i + 1];
    let t = (f - x0) / (x1 - x0);
    let c: Vec<u8> = (0..3).map(|k| (a[k] + t * (b[k] - a[k])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Width × depth grid; cell color is the mean fidelity.
pub fn volumetric_svg(cells: &[VolumetricCell], title: &str) -> String {
    let mut depths: Vec<usize> = cells.iter().map(|c| c.depth).collect();
    let mut widths: Vec<usize> = cells.iter().map(|c| c.width).collect();
    depths.sort_unstable();
    depths.dedup();
    widths.sort_unstable();
    widths.dedup();
    let w = LEFT + CELL_W * depths.len().max(1) + 20;
    let h = TOP + CELL_H * widths.len().max(1) + BOTTOM;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<text x="{}" y="20" font-size="14">{}</text>"#, LEFT, escape(title));
    for c in cells {
        let col = depths.binary_search(&c.depth).expect("collected");
        let row = widths.len() - 1 - widths.binary_search(&c.width).expect("collected");
        let x = LEFT + col * CELL_W;
        let y = TOP + row * CELL_H;
        let fill = color(c.mean);
        let text_fill = if c.mean.is_finite() && c.mean > 0.6 { "#000000" } else { "#ffffff" };
        let _ = writeln!(
            s,
            r##"<rect class="cell" x="{x}" y="{y}" width="{CELL_W}" height="{CELL_H}" fill="{fill}" stroke="#ffffff"><title>w={} d={} n={} mean={:.4} min={:.4} max={:.4}</title></rect>"##,
            c.width, c.depth, c.count, c.mean, c.min, c.max
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" fill="{text_fill}">{:.3}</text>"#,
            x + CELL_W / 2,
            y + CELL_H / 2 + 4,
            c.mean
        );
    }
    for (i, d) in depths.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{d}</text>"#,
            LEFT + i * CELL_W + CELL_W / 2,
            TOP + widths.len() * CELL_H + 16
        );
    }
    for (i, wd) in widths.iter().rev().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{wd}</text>"#,
            LEFT - 8,
            TOP + i * CELL_H + CELL_H / 2 + 4
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">depth</text>"#,
        LEFT + depths.len() * CELL_W / 2,
        TOP + widths.len() * CELL_H + 36
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle">width</text>"#,
        TOP + widths.len() * CELL_H / 2,
        TOP + widths.len() * CELL_H / 2
    );
    s.push_str("</svg>\n");
    s
}
