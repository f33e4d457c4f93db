use num_complex::Complex64;

use super::roots::uni_roots;
use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{resultant_y, sylvester_det, BiPoly};

/// `|P(x, y)|` divided by the sum of the moduli of its terms, with
/// coordinates below 1 in modulus counted as 1.
pub fn bi_relative_residual(p: &BiPoly, x: Complex64, y: Complex64) -> f64 {
    let (ax, ay) = (x.norm().max(1.0), y.norm().max(1.0));
    let mut scale = 0.0;
    for (j, cj) in p.y_coeffs().iter().enumerate() {
        for (i, c) in cj.coeffs().iter().enumerate() {
            scale += c.norm() * ax.powi(i as i32) * ay.powi(j as i32);
        }
    }
    p.eval(x, y).norm() / scale.max(f64::MIN_POSITIVE)
}

/// Newton's method for the square system `a = b = 0` from `(x, y)`.
pub fn newton2(a: &BiPoly, b: &BiPoly, x: Complex64, y: Complex64, iters: usize) -> (Complex64, Complex64) {
    let (ax, ay, bx, by) = (a.deriv_x(), a.deriv_y(), b.deriv_x(), b.deriv_y());
    let (mut x, mut y) = (x, y);
    let mut best = (x, y, residual(a, b, x, y));
    for _ in 0..iters {
        let r = [a.eval(x, y), b.eval(x, y)];
        let Some([dx, dy]) = linalg::solve2x2(ax.eval(x, y), ay.eval(x, y), bx.eval(x, y), by.eval(x, y), r)
        else {
            break;
        };
        x -= dx;
        y -= dy;
        let res = residual(a, b, x, y);
        if res < best.2 {
            best = (x, y, res);
        }
        if (dx.norm() + dy.norm()) <= 1e-15 * (1.0 + x.norm() + y.norm()) {
            break;
        }
    }
    (best.0, best.1)
}

fn residual(a: &BiPoly, b: &BiPoly, x: Complex64, y: Complex64) -> f64 {
    bi_relative_residual(a, x, y).max(bi_relative_residual(b, x, y))
}

/// Isolated common zeros of two bivariate polynomials.
///
/// The `x`-coordinates come from the resultant in `y`; each is lifted to the
/// matching `y`-roots and the pair is polished by Newton's method.
pub fn solve2(a: &BiPoly, b: &BiPoly) -> Result<Vec<(Complex64, Complex64)>> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::PositiveDimensional);
    }
    if a.y_degree() == 0 && b.y_degree() == 0 {
        let (pa, pb) = (a.y_coeff(0), b.y_coeff(0));
        if pa.degree() == 0 || pb.degree() == 0 {
            return Ok(Vec::new());
        }
        let ra = uni_roots(&pa)?;
        let shared = ra
            .roots
            .iter()
            .any(|x| super::relative_residual(&pb, *x) < 1e-9);
        return if shared { Err(Error::PositiveDimensional) } else { Ok(Vec::new()) };
    }
    if resultant_vanishes(a, b) {
        return Err(Error::PositiveDimensional);
    }
    let res = resultant_y(a, b);
    if res.degree() == 0 {
        return Ok(Vec::new());
    }
    let xs = uni_roots(&res)?;
    let mut out: Vec<(Complex64, Complex64)> = Vec::new();
    for (x, mult) in xs.roots.iter().zip(&xs.multiplicities) {
        for (x, y) in lift(a, b, *x, *mult)? {
            let (x, y) = newton2(a, b, x, y, 30);
            if residual(a, b, x, y) > 1e-10 {
                continue;
            }
            let dup = out
                .iter()
                .any(|(u, v)| (u - x).norm() + (v - y).norm() <= 1e-8 * (1.0 + x.norm() + y.norm()));
            if !dup {
                out.push((x, y));
            }
        }
    }
    Ok(out)
}

/// The resultant is identically zero iff the Sylvester determinant is
/// negligible against its Hadamard bound at several generic sample points.
fn resultant_vanishes(a: &BiPoly, b: &BiPoly) -> bool {
    let (la, lb) = (a.y_degree() + 1, b.y_degree() + 1);
    (0..5).all(|k| {
        let x = Complex64::from_polar(0.9 + 0.07 * k as f64, 0.7 + 1.3 * k as f64);
        let (ca, cb) = (a.at_x_formal(x, la), b.at_x_formal(x, lb));
        let na = ca.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let nb = cb.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let bound = na.powi(lb as i32 - 1) * nb.powi(la as i32 - 1);
        sylvester_det(&ca, &cb).norm() <= 1e-11 * bound
    })
}

/// Candidate `y`-values over one resultant root, best matches first.
fn lift(a: &BiPoly, b: &BiPoly, x: Complex64, mult: usize) -> Result<Vec<(Complex64, Complex64)>> {
    let (pa, pb) = (a.at_x(x), b.at_x(x));
    let (src, other) = if pa.degree() >= 1 && (pa.degree() <= pb.degree() || pb.degree() == 0) {
        (pa, b)
    } else if pb.degree() >= 1 {
        (pb, a)
    } else {
        return Ok(Vec::new());
    };
    let ys = uni_roots(&src)?;
    let mut scored: Vec<(f64, Complex64)> = ys
        .roots
        .iter()
        .map(|y| (bi_relative_residual(other, x, *y), *y))
        .collect();
    scored.sort_by(|l, r| l.0.total_cmp(&r.0));
    scored.truncate(mult.max(1));
    Ok(scored.into_iter().map(|(_, y)| (x, y)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn circle_meets_diagonal() {
        let a = BiPoly::from_terms([(2, 0, c(1.0)), (0, 2, c(1.0)), (0, 0, c(-1.0))]);
        let b = BiPoly::from_terms([(1, 0, c(1.0)), (0, 1, c(-1.0))]);
        let sols = solve2(&a, &b).unwrap();
        assert_eq!(sols.len(), 2);
        let t = std::f64::consts::FRAC_1_SQRT_2;
        for s in [t, -t] {
            assert!(sols.iter().any(|(x, y)| (x - c(s)).norm() < 1e-12 && (y - c(s)).norm() < 1e-12));
        }
    }

    #[test]
    fn shared_component_is_positive_dimensional() {
        let a = BiPoly::from_terms([(1, 0, c(1.0))]);
        assert_eq!(solve2(&a, &a), Err(Error::PositiveDimensional));
        let l = BiPoly::from_terms([(1, 0, c(1.0)), (0, 1, c(-1.0))]);
        let q = l.mul(&BiPoly::from_terms([(0, 1, c(1.0)), (0, 0, c(2.0))]));
        let r = l.mul(&BiPoly::from_terms([(1, 0, c(1.0)), (0, 0, c(3.0))]));
        assert_eq!(solve2(&q, &r), Err(Error::PositiveDimensional));
    }
}
