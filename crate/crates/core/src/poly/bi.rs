use num_complex::Complex64;

use super::UniPoly;

/// Polynomial in two affine variables `(x, y)`, stored as a polynomial in `y`
/// whose coefficients are polynomials in `x`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BiPoly {
    coeffs: Vec<UniPoly>,
}

impl BiPoly {
    pub fn new(mut coeffs: Vec<UniPoly>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Build from `(i, j, c)` triples meaning `c x^i y^j`.
    pub fn from_terms(terms: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut rows: Vec<Vec<Complex64>> = Vec::new();
        for (i, j, c) in terms {
            if rows.len() <= j {
                rows.resize(j + 1, Vec::new());
            }
            if rows[j].len() <= i {
                rows[j].resize(i + 1, Complex64::new(0.0, 0.0));
            }
            rows[j][i] += c;
        }
        Self::new(rows.into_iter().map(UniPoly::new).collect())
    }

    pub fn y_coeffs(&self) -> &[UniPoly] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn y_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn total_degree(&self) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| j + c.degree())
            .max()
            .unwrap_or(0)
    }

    /// Coefficient of `y^j` as a polynomial in `x`.
    pub fn y_coeff(&self, j: usize) -> UniPoly {
        self.coeffs.get(j).cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * y + c.eval(x))
    }

    /// Specialize `x` and return the polynomial in `y`.
    pub fn at_x(&self, x: Complex64) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| c.eval(x)).collect())
    }

    /// Specialize `x`, keeping exactly `len` coefficients (formal degree `len - 1`).
    pub fn at_x_formal(&self, x: Complex64, len: usize) -> Vec<Complex64> {
        (0..len)
            .map(|j| self.coeffs.get(j).map_or(Complex64::new(0.0, 0.0), |c| c.eval(x)))
            .collect()
    }

    pub fn deriv_y(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c.scale(Complex64::new(j as f64, 0.0)))
                .collect(),
        )
    }

    pub fn deriv_x(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.derivative()).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|j| self.y_coeff(j).add(&other.y_coeff(j))).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|j| self.y_coeff(j).sub(&other.y_coeff(j))).collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.scale(s)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::default();
        }
        let mut out = vec![UniPoly::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(UniPoly::norm_inf).fold(0.0, f64::max)
    }
}
