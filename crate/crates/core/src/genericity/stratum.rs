use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::poly::MultiPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stratum {
    Radial,
    Center,
    Both,
    None,
}

/// Classify an affine point `(x, y)` (chart `z = 1`) by the radial equations
/// `F = G = 0` and the center equations
/// `pG F_x - qF G_x = pG F_y - qF G_y = F_x G_y - F_y G_x = 0`.
pub fn singularity_stratum(f: &MultiPoly, g: &MultiPoly, p: u32, q: u32, point: (Complex64, Complex64)) -> Stratum {
    let pt = [point.0, point.1, Complex64::new(1.0, 0.0)];
    let eval = |m: &MultiPoly| m.evaluate(pt);
    let (fv, fx, fy) = (eval(f), eval(&f.partial(0)), eval(&f.partial(1)));
    let (gv, gx, gy) = (eval(g), eval(&g.partial(0)), eval(&g.partial(1)));
    let scale = [fv, fx, fy, gv, gx, gy].iter().map(|c| c.norm()).fold(1.0, f64::max);
    let tol = 1e-8 * scale;
    let (p, q) = (p as f64, q as f64);
    let radial = fv.norm() <= tol && gv.norm() <= tol;
    let center = (gv * fx * p - fv * gx * q).norm() <= tol * scale
        && (gv * fy * p - fv * gy * q).norm() <= tol * scale
        && (fx * gy - fy * gx).norm() <= tol * scale;
    match (radial, center) {
        (true, true) => Stratum::Both,
        (true, false) => Stratum::Radial,
        (false, true) => Stratum::Center,
        (false, false) => Stratum::None,
    }
}
