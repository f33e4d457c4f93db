use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::CheckResult;
use crate::error::{Error, Result};
use crate::linalg;
use crate::numsolve::{bi_relative_residual, newton2, solve2};
use crate::poly::MultiPoly;
use crate::rng;

/// Projective point from affine coordinates in standard chart `k`.
pub(crate) fn lift_chart(k: usize, u: Complex64, v: Complex64) -> [Complex64; 3] {
    let one = Complex64::new(1.0, 0.0);
    match k {
        0 => [one, u, v],
        1 => [u, one, v],
        _ => [u, v, one],
    }
}

/// Affine coordinates of a projective point in its largest-coordinate chart.
pub(crate) fn best_chart(p: [Complex64; 3]) -> (usize, Complex64, Complex64) {
    let k = (0..3).max_by(|&a, &b| p[a].norm().total_cmp(&p[b].norm())).unwrap();
    let free: Vec<usize> = (0..3).filter(|&i| i != k).collect();
    (k, p[free[0]] / p[k], p[free[1]] / p[k])
}

/// Sum of term moduli of `P` at `pt` (coordinates below 1 counted as 1), the
/// scale for relative vanishing tests.
pub(crate) fn term_scale(p: &MultiPoly, pt: [Complex64; 3]) -> f64 {
    let a = pt.map(|c| c.norm().max(1.0));
    p.terms()
        .map(|(e, c)| c.norm() * a[0].powi(e[0] as i32) * a[1].powi(e[1] as i32) * a[2].powi(e[2] as i32))
        .sum::<f64>()
        .max(f64::MIN_POSITIVE)
}

pub(crate) fn relative_value(p: &MultiPoly, pt: [Complex64; 3]) -> f64 {
    p.evaluate(pt).norm() / term_scale(p, pt)
}

/// Insert a projective point unless it is already present.
pub(crate) fn push_unique(points: &mut Vec<[Complex64; 3]>, p: [Complex64; 3]) {
    let p = linalg::projective_normalize(p);
    if !points.iter().any(|q| linalg::projective_distance(*q, p) < 1e-7) {
        points.push(p);
    }
}

/// Solve a square system of two homogeneous forms in the three standard charts,
/// polishing each solution in its best chart.
pub(crate) fn solve_projective(a: &MultiPoly, b: &MultiPoly) -> Result<Vec<[Complex64; 3]>> {
    let per_chart: Vec<Result<Vec<[Complex64; 3]>>> = (0..3)
        .into_par_iter()
        .map(|k| {
            let sols = solve2(&a.dehomogenize(k), &b.dehomogenize(k))?;
            Ok(sols.into_iter().map(|(u, v)| lift_chart(k, u, v)).collect())
        })
        .collect();
    let mut points = Vec::new();
    for chart in per_chart {
        for p in chart? {
            let (k, u, v) = best_chart(p);
            let (ak, bk) = (a.dehomogenize(k), b.dehomogenize(k));
            let (u, v) = newton2(&ak, &bk, u, v, 20);
            if bi_relative_residual(&ak, u, v).max(bi_relative_residual(&bk, u, v)) < 1e-9 {
                push_unique(&mut points, lift_chart(k, u, v));
            }
        }
    }
    Ok(points)
}

/// Singular points of `{P = 0}`: common zeros of two random combinations of
/// the partials, filtered by the third condition.
pub fn check_smooth(p: &MultiPoly) -> CheckResult {
    if p.degree() == 0 {
        return CheckResult::fail(Vec::new(), "constant polynomial");
    }
    let grad = p.gradient();
    let mut rng = rng::stream(0x5eed, "check_smooth");
    for _attempt in 0..3 {
        let mut combo = || {
            let (s, t): (f64, f64) = (rng.gen_range(0.5..1.5), rng.gen_range(0.5..1.5));
            let (s2, t2): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            grad[0]
                .add(&grad[1].scale(Complex64::new(s, s2)))
                .and_then(|g| g.add(&grad[2].scale(Complex64::new(t, t2))))
        };
        let (Ok(g1), Ok(g2)) = (combo(), combo()) else {
            return CheckResult::inconclusive("gradient combination failed");
        };
        let candidates = match solve_projective_raw(&g1, &g2) {
            Ok(c) => c,
            Err(Error::PositiveDimensional) => continue,
            Err(e) => return CheckResult::inconclusive(e.to_string()),
        };
        let singular: Vec<[Complex64; 3]> = candidates
            .into_iter()
            .filter(|pt| grad.iter().all(|g| relative_value(g, *pt) < 1e-8))
            .collect();
        return if singular.is_empty() {
            CheckResult::pass("gradient system has no projective solution")
        } else {
            CheckResult::fail(singular, "singular point")
        };
    }
    CheckResult::fail(Vec::new(), "singular locus is positive-dimensional")
}

/// Chart solutions in discovery order (charts x, y, z), without polishing.
fn solve_projective_raw(a: &MultiPoly, b: &MultiPoly) -> Result<Vec<[Complex64; 3]>> {
    let mut points = Vec::new();
    for k in 0..3 {
        for (u, v) in solve2(&a.dehomogenize(k), &b.dehomogenize(k))? {
            push_unique(&mut points, lift_chart(k, u, v));
        }
    }
    Ok(points)
}

/// Base points of the pencil, and whether `F` and `G` meet transversally
/// there. Returns `CountMismatch` when fewer than `deg F deg G` transversal
/// points are found.
pub fn check_transversal(f: &MultiPoly, g: &MultiPoly) -> Result<(CheckResult, Vec<[Complex64; 3]>)> {
    let points = match solve_projective(f, g) {
        Ok(p) => p,
        Err(Error::PositiveDimensional) => {
            return Ok((CheckResult::fail(Vec::new(), "F and G share a component"), Vec::new()));
        }
        Err(e @ Error::NoConvergence { .. }) => return Ok((CheckResult::inconclusive(e.to_string()), Vec::new())),
        Err(e) => return Err(e),
    };
    let (gf, gg) = (f.gradient(), g.gradient());
    let mut tangential = Vec::new();
    for pt in &points {
        let row = |grad: &[MultiPoly; 3]| {
            let r: [Complex64; 3] = std::array::from_fn(|i| grad[i].evaluate(*pt));
            let n = r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            r.map(|c| c / n)
        };
        if linalg::smallest_singular_2x3(row(&gf), row(&gg)) <= 1e-8 {
            tangential.push(*pt);
        }
    }
    if !tangential.is_empty() {
        return Ok((CheckResult::fail(tangential, "non-transversal intersection"), points));
    }
    let expected = (f.degree() * g.degree()) as usize;
    if points.len() != expected {
        return Err(Error::CountMismatch { expected, found: points.len() });
    }
    Ok((CheckResult::pass(format!("{expected} transversal base points")), points))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn poly(degree: u32, terms: &[([u32; 3], f64)]) -> MultiPoly {
        MultiPoly::new(degree, terms.iter().map(|(e, v)| (*e, c(*v)))).unwrap()
    }

    #[test]
    fn conic_is_smooth() {
        let p = poly(2, &[([2, 0, 0], 1.0), ([0, 2, 0], 1.0), ([0, 0, 2], 1.0)]);
        assert!(check_smooth(&p).passed());
    }

    #[test]
    fn coordinate_triangle_is_singular() {
        let p = poly(3, &[([1, 1, 1], 1.0)]);
        let r = check_smooth(&p);
        assert!(!r.passed());
        let w = r.witnesses[0];
        assert!((w[0] - c(1.0)).norm() < 1e-12 && w[1].norm() < 1e-12 && w[2].norm() < 1e-12);
    }

    #[test]
    fn coordinate_lines_meet_once() {
        let (r, pts) = check_transversal(&poly(1, &[([1, 0, 0], 1.0)]), &poly(1, &[([0, 1, 0], 1.0)])).unwrap();
        assert!(r.passed());
        assert_eq!(pts.len(), 1);
        assert!((pts[0][2] - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn tangency_fails() {
        let f = poly(1, &[([1, 0, 0], 1.0)]);
        let g = poly(2, &[([1, 0, 1], 1.0), ([0, 2, 0], 1.0)]);
        let (r, _) = check_transversal(&f, &g).unwrap();
        assert!(!r.passed());
    }
}
