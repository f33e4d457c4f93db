//! Small dense complex linear algebra used by the eliminants and Newton steps.

use num_complex::Complex64;

pub type Mat3 = [[Complex64; 3]; 3];

/// Determinant by Gaussian elimination with partial pivoting. `a` is row-major `n x n`.
pub fn det(mut a: Vec<Complex64>, n: usize) -> Complex64 {
    let mut d = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
            .unwrap();
        if a[piv * n + col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            d = -d;
        }
        let p = a[col * n + col];
        d *= p;
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = a[col * n + k];
                a[r * n + k] -= f * v;
            }
        }
    }
    d
}

/// Solve `a x = b` with partial pivoting; `None` if singular.
pub fn solve(mut a: Vec<Complex64>, mut b: Vec<Complex64>, n: usize) -> Option<Vec<Complex64>> {
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
            .unwrap();
        if a[piv * n + col].norm() == 0.0 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        let p = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            for k in col..n {
                let v = a[col * n + k];
                a[r * n + k] -= f * v;
            }
            let v = b[col];
            b[r] -= f * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for k in r + 1..n {
            s -= a[r * n + k] * x[k];
        }
        x[r] = s / a[r * n + r];
    }
    Some(x)
}

/// Solve the 2x2 system `[[a, b], [c, d]] x = r`.
pub fn solve2x2(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
    r: [Complex64; 2],
) -> Option<[Complex64; 2]> {
    let det = a * d - b * c;
    if det.norm() == 0.0 || !det.is_finite() {
        return None;
    }
    Some([(d * r[0] - b * r[1]) / det, (a * r[1] - c * r[0]) / det])
}

pub fn mat3_mul_vec(m: &Mat3, v: [Complex64; 3]) -> [Complex64; 3] {
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for (i, row) in m.iter().enumerate() {
        out[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    }
    out
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn mat3_det(m: &Mat3) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn mat3_inverse(m: &Mat3) -> Option<Mat3> {
    let d = mat3_det(m);
    if d.norm() == 0.0 {
        return None;
    }
    let mut inv = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / d;
        }
    }
    Some(inv)
}

/// Smallest singular value of a 2x3 matrix given by its two rows.
pub fn smallest_singular_2x3(r0: [Complex64; 3], r1: [Complex64; 3]) -> f64 {
    let dot = |u: &[Complex64; 3], v: &[Complex64; 3]| -> Complex64 {
        u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
    };
    let a = dot(&r0, &r0).re;
    let d = dot(&r1, &r1).re;
    let b = dot(&r0, &r1);
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b.norm_sqr()).sqrt();
    ((tr - disc) / 2.0).max(0.0).sqrt()
}

/// Normalize a projective point so its largest-modulus coordinate equals 1.
pub fn projective_normalize(p: [Complex64; 3]) -> [Complex64; 3] {
    let k = (0..3)
        .max_by(|&i, &j| p[i].norm().total_cmp(&p[j].norm()))
        .unwrap();
    let s = p[k];
    [p[0] / s, p[1] / s, p[2] / s]
}

pub fn projective_distance(a: [Complex64; 3], b: [Complex64; 3]) -> f64 {
    let a = projective_normalize(a);
    let b = projective_normalize(b);
    // both normalized on the same chart only if the same index is the max;
    // compare through the cross product norm relative to the vector norms
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let n = |v: &[Complex64; 3]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    n(&cross) / (n(&a) * n(&b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn det_and_solve() {
        let a = vec![c(2.0), c(1.0), c(0.0), c(1.0), c(3.0), c(1.0), c(0.0), c(1.0), c(4.0)];
        assert!((det(a.clone(), 3) - c(18.0)).norm() < 1e-12);
        let x = solve(a, vec![c(3.0), c(5.0), c(5.0)], 3).unwrap();
        for v in x {
            assert!((v - c(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_3x3() {
        let m = [
            [c(1.0), c(2.0), c(0.0)],
            [c(0.0), c(1.0), c(3.0)],
            [c(1.0), c(0.0), c(1.0)],
        ];
        let inv = mat3_inverse(&m).unwrap();
        let id = mat3_mul(&m, &inv);
        for (i, row) in id.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((v - c(e)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_value_rank_one() {
        let r = [c(1.0), c(2.0), c(3.0)];
        assert!(smallest_singular_2x3(r, r) < 1e-7);
        assert!(smallest_singular_2x3([c(1.0), c(0.0), c(0.0)], [c(0.0), c(1.0), c(0.0)]) > 0.99);
    }
}
