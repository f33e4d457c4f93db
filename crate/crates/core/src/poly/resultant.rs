use std::f64::consts::PI;

use num_complex::Complex64;

use super::{BiPoly, UniPoly};
use crate::linalg;

/// Determinant of the Sylvester matrix of two coefficient vectors (lowest
/// degree first, formal degrees `a.len() - 1` and `b.len() - 1`).
pub fn sylvester_det(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let m = a.len().saturating_sub(1);
    let n = b.len().saturating_sub(1);
    let size = m + n;
    if size == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut mat = vec![Complex64::new(0.0, 0.0); size * size];
    for r in 0..n {
        for (k, &c) in a.iter().rev().enumerate() {
            mat[r * size + r + k] = c;
        }
    }
    for r in 0..m {
        for (k, &c) in b.iter().rev().enumerate() {
            mat[(n + r) * size + r + k] = c;
        }
    }
    linalg::det(mat, size)
}

/// Interpolate a polynomial of degree `< n` from its values at `radius * w^k`.
fn interpolate_circle(values: &[Complex64], radius: f64) -> UniPoly {
    let n = values.len();
    let coeffs = (0..n)
        .map(|j| {
            let s: Complex64 = values
                .iter()
                .enumerate()
                .map(|(k, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (j * k % n) as f64 / n as f64))
                .sum();
            s / (n as f64 * radius.powi(j as i32))
        })
        .collect();
    UniPoly::new(coeffs)
}

/// Resultant with respect to `y`, as a polynomial in `x`.
///
/// The Sylvester determinant is evaluated at roots of unity and interpolated;
/// the degree bound is the product of total degrees.
pub fn resultant_y(a: &BiPoly, b: &BiPoly) -> UniPoly {
    let la = a.y_degree() + 1;
    let lb = b.y_degree() + 1;
    let bound = a.total_degree() * b.total_degree();
    let n = bound + 1;
    let radius = 1.0;
    let values: Vec<Complex64> = (0..n)
        .map(|k| {
            let x = Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64);
            sylvester_det(&a.at_x_formal(x, la), &b.at_x_formal(x, lb))
        })
        .collect();
    interpolate_circle(&values, radius).trimmed(1e-12)
}

/// Discriminant in `y` with the sign convention
/// `(-1)^{m(m-1)/2} res_y(P, P_y) / lc_y(P)`, so that `disc(y^2 - x) = 4x`.
///
/// The `y`-leading coefficient must be a constant.
pub fn discriminant_y(p: &BiPoly) -> UniPoly {
    let m = p.y_degree();
    let lc = p.y_coeff(m);
    debug_assert!(lc.degree() == 0, "leading y coefficient must be constant");
    let res = resultant_y(p, &p.deriv_y());
    let sign = if (m * (m.saturating_sub(1)) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    res.scale(Complex64::new(sign, 0.0) / lc.coeff(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn close(p: &UniPoly, expected: &[f64]) -> bool {
        p.degree() + 1 == expected.len()
            && expected.iter().enumerate().all(|(i, e)| (p.coeff(i) - c(*e)).norm() < 1e-10)
    }

    #[test]
    fn resultant_substitution() {
        // res_y(y^2 - x, y - 1) = 1 - x
        let a = BiPoly::from_terms([(0, 2, c(1.0)), (1, 0, c(-1.0))]);
        let b = BiPoly::from_terms([(0, 1, c(1.0)), (0, 0, c(-1.0))]);
        assert!(close(&resultant_y(&a, &b), &[1.0, -1.0]));
    }

    #[test]
    fn resultant_of_linear_constants() {
        // res_y(y - 3, y - 5) = 3 - 5
        let a = BiPoly::from_terms([(0, 1, c(1.0)), (0, 0, c(-3.0))]);
        let b = BiPoly::from_terms([(0, 1, c(1.0)), (0, 0, c(-5.0))]);
        assert!(close(&resultant_y(&a, &b), &[-2.0]));
    }

    #[test]
    fn discriminant_conventions() {
        let p = BiPoly::from_terms([(0, 2, c(1.0)), (1, 0, c(-1.0))]);
        assert!(close(&discriminant_y(&p), &[0.0, 4.0]));
        // y^2 + 3x y + 2: disc = 9 x^2 - 8
        let q = BiPoly::from_terms([(0, 2, c(1.0)), (1, 1, c(3.0)), (0, 0, c(2.0))]);
        assert!(close(&discriminant_y(&q), &[-8.0, 0.0, 9.0]));
    }
}
