use std::fmt::Write;

use num_complex::Complex64;
use pencil_core::monodromy::{MonodromyRep, Target};

const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;

/// The value plane with the critical and exceptional values, the base and
/// the distinguished paths. Infinity, when exceptional, is drawn at the left
/// edge and reached by the ray its loop starts along.
pub fn render(rep: &MonodromyRep, infinity_exceptional: bool) -> String {
    let base = rep.base();
    let mut paths: Vec<(String, Vec<Complex64>)> = rep
        .system
        .paths
        .iter()
        .map(|p| {
            let label = match p.target {
                Target::Critical(i) => format!("c{i}"),
                Target::Zero => "zero".to_string(),
            };
            (label, p.as_loop())
        })
        .collect();
    let mut points: Vec<(String, Complex64)> = rep.system.paths.iter().zip(&paths).map(|(p, (l, _))| (l.clone(), p.value)).collect();

    let all: Vec<Complex64> = paths.iter().flat_map(|(_, v)| v.iter().copied()).chain([base]).collect();
    let (mut lo, mut hi) = (all[0], all[0]);
    for z in &all {
        lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    let span = (hi.re - lo.re).max(hi.im - lo.im).max(1e-9);
    if infinity_exceptional {
        let far = Complex64::new(lo.re - 0.1 * span, base.im);
        paths.push(("infinity".to_string(), vec![base, far]));
        points.push(("infinity".to_string(), far));
        lo.re = far.re;
    }
    let span = (hi.re - lo.re).max(hi.im - lo.im).max(1e-9);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let map = |z: Complex64| (MARGIN + (z.re - lo.re) * scale, SIZE - MARGIN - (z.im - lo.im) * scale);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (label, poly) in &paths {
        let pts: Vec<String> = poly.iter().map(|z| map(*z)).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="path" data-target="{label}" fill="none" stroke="steelblue" stroke-width="1" points="{}"/>"#,
            pts.join(" ")
        );
    }
    for (label, z) in &points {
        let (x, y) = map(*z);
        let _ = writeln!(s, r#"<circle class="value" data-target="{label}" cx="{x:.2}" cy="{y:.2}" r="4" fill="crimson"/>"#);
    }
    let (x, y) = map(base);
    let _ = writeln!(s, r#"<rect class="base" x="{:.2}" y="{:.2}" width="8" height="8" fill="black"/>"#, x - 4.0, y - 4.0);
    s.push_str("</svg>\n");
    s
}
