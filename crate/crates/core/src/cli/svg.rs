use std::fmt::Write;

use crate::analysis::UNDERFLOW_FLOOR;
use crate::dynamics::Trajectory;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;

/// Log-log plot of `E(t)` with reference slopes `−1` and `−(1+ᾱ)` through the
/// first plotted sample at `t ≥ 1`.
pub fn decay_plot(traj: &Trajectory, alpha_bar: &[f64]) -> String {
    let pts: Vec<(f64, f64)> = traj
        .samples
        .iter()
        .filter(|s| s.record.t >= 1.0 && s.record.energy > UNDERFLOW_FLOOR)
        .map(|s| (s.record.t.log10(), s.record.energy.log10()))
        .collect();
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="13" text-anchor="middle">{}: log10 E vs log10 t</text>"#,
        WIDTH / 2.0,
        traj.meta.problem_id
    );
    if pts.len() < 2 {
        let _ = writeln!(out, r#"<text x="{MARGIN}" y="60" font-family="sans-serif" font-size="12">no positive energies to plot</text>"#);
        out.push_str("</svg>\n");
        return out;
    }

    let (x0, x1) = (pts[0].0, pts[pts.len() - 1].0.max(pts[0].0 + 1e-9));
    let ymax = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let ymin = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min).min(ymax - 1e-9);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - ymin) / (ymax - ymin) * (HEIGHT - 2.0 * MARGIN);

    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="#888"/>"##,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    for (x, anchor, y, label) in [
        (MARGIN, "start", HEIGHT - MARGIN + 18.0, format!("t=1e{x0:.1}")),
        (WIDTH - MARGIN, "end", HEIGHT - MARGIN + 18.0, format!("t=1e{x1:.1}")),
    ] {
        let _ = writeln!(out, r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{label}</text>"#);
    }
    let _ = writeln!(out, r#"<text x="4" y="{}" font-family="sans-serif" font-size="11">E=1e{ymax:.1}</text>"#, MARGIN - 4.0);
    let _ = writeln!(out, r#"<text x="4" y="{}" font-family="sans-serif" font-size="11">E=1e{ymin:.1}</text>"#, HEIGHT - MARGIN + 32.0);

    let clip = format!(r#"<clipPath id="plot"><rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}"/></clipPath>"#, WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let _ = writeln!(out, "{clip}");

    let mut slopes = vec![(1.0, "#d62728".to_string(), "slope -1".to_string())];
    for (i, b) in alpha_bar.iter().enumerate() {
        let colors = ["#2ca02c", "#9467bd", "#8c564b"];
        slopes.push((1.0 + b, colors[i % colors.len()].into(), format!("slope -(1+{b})")));
    }
    let (ax, ay) = pts[0];
    for (k, (s, color, label)) in slopes.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-dasharray="6 4" clip-path="url(#plot)"/>"#,
            sx(ax),
            sy(ay),
            sx(x1),
            sy(ay - s * (x1 - ax))
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{label}</text>"#,
            WIDTH - MARGIN - 110.0,
            MARGIN + 16.0 + 14.0 * (k as f64 + 1.0)
        );
    }

    let mut path = String::new();
    for (i, &(x, y)) in pts.iter().enumerate() {
        let _ = write!(path, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, sx(x), sy(y));
    }
    let _ = writeln!(out, r##"<path d="{path}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"##);
    let _ = writeln!(
        out,
        r##"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="#1f77b4">E(t)</text>"##,
        WIDTH - MARGIN - 110.0,
        MARGIN + 16.0
    );
    out.push_str("</svg>\n");
    out
}
