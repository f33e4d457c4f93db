//! Polynomial arithmetic: trivariate homogeneous forms, univariate and
//! bivariate affine polynomials, resultants and discriminants.

mod bi;
mod chart;
mod exact;
mod resultant;
mod uni;

use std::collections::BTreeMap;

use num_complex::Complex64;

pub use bi::BiPoly;
pub use chart::{fiber_polynomial, ChartMap, FiberFamily};
pub use exact::{ExactPoly, Rational, TermRecord};
pub use resultant::{discriminant_y, resultant_y, sylvester_det};
pub use uni::UniPoly;

use crate::error::{Error, Result};

/// Homogeneous polynomial in `(x, y, z)` with complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    degree: u32,
    terms: BTreeMap<[u32; 3], Complex64>,
}

impl MultiPoly {
    pub fn new(degree: u32, terms: impl IntoIterator<Item = ([u32; 3], Complex64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            if e.iter().sum::<u32>() != degree {
                return Err(Error::InvalidSpec(format!(
                    "exponent {e:?} does not sum to degree {degree}"
                )));
            }
            *map.entry(e).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(Self { degree, terms: map })
    }

    pub fn zero(degree: u32) -> Self {
        Self { degree, terms: BTreeMap::new() }
    }

    /// The linear form `a x + b y + c z`.
    pub fn linear(a: Complex64, b: Complex64, c: Complex64) -> Self {
        Self::new(1, [([1, 0, 0], a), ([0, 1, 0], b), ([0, 0, 1], c)]).unwrap()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 3], &Complex64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: [u32; 3]) -> Complex64 {
        self.terms.get(&e).copied().unwrap_or_default()
    }

    pub fn norm_inf(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn evaluate(&self, p: [Complex64; 3]) -> Complex64 {
        let d = self.degree as usize;
        let powers: Vec<Vec<Complex64>> = p
            .iter()
            .map(|&v| {
                let mut pw = Vec::with_capacity(d + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..=d {
                    pw.push(acc);
                    acc *= v;
                }
                pw
            })
            .collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                c * powers[0][e[0] as usize] * powers[1][e[1] as usize] * powers[2][e[2] as usize]
            })
            .sum()
    }

    /// Formal partial derivative in variable `var` (0 = x, 1 = y, 2 = z).
    pub fn partial(&self, var: usize) -> Self {
        assert!(var < 3);
        let degree = self.degree.saturating_sub(1);
        let terms = self.terms.iter().filter(|(e, _)| e[var] > 0).map(|(e, c)| {
            let mut f = *e;
            f[var] -= 1;
            (f, c * e[var] as f64)
        });
        Self::new(degree, terms).expect("derivative preserves homogeneity")
    }

    pub fn gradient(&self) -> [Self; 3] {
        [self.partial(0), self.partial(1), self.partial(2)]
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::InvalidSpec("adding forms of different degree".into()));
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        Self::new(
            degree,
            self.terms.iter().chain(other.terms.iter()).map(|(e, c)| (*e, *c)),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.degree, self.terms.iter().map(|(e, c)| (*e, c * s))).unwrap()
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut map: BTreeMap<[u32; 3], Complex64> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let e = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                *map.entry(e).or_default() += ca * cb;
            }
        }
        Self::new(self.degree + other.degree, map).unwrap()
    }

    /// Drop terms below `rel` times the largest coefficient modulus.
    pub fn trimmed(&self, rel: f64) -> Self {
        let cut = rel * self.norm_inf();
        let mut out = self.clone();
        out.terms.retain(|_, c| c.norm() > cut);
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::new(0, [([0, 0, 0], Complex64::new(1.0, 0.0))]).unwrap();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Substitute a linear change of coordinates: returns `w -> P(M w)`.
    pub fn substitute_linear(&self, m: &crate::linalg::Mat3) -> Self {
        let forms: Vec<Self> = (0..3)
            .map(|i| Self::linear(m[i][0], m[i][1], m[i][2]))
            .collect();
        let d = self.degree as usize;
        let powers: Vec<Vec<Self>> = forms
            .iter()
            .map(|f| {
                let mut v = vec![Self::new(0, [([0, 0, 0], Complex64::new(1.0, 0.0))]).unwrap()];
                for k in 1..=d {
                    let next = v[k - 1].mul(f);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Self::zero(self.degree);
        for (e, c) in &self.terms {
            let t = powers[0][e[0] as usize]
                .mul(&powers[1][e[1] as usize])
                .mul(&powers[2][e[2] as usize])
                .scale(*c);
            out = out.add(&t).unwrap();
        }
        out
    }

    /// Dehomogenize by setting variable `chart` to 1. The two remaining
    /// variables, in increasing index order, become the affine `(x, y)`.
    pub fn dehomogenize(&self, chart: usize) -> BiPoly {
        let free: Vec<usize> = (0..3).filter(|&i| i != chart).collect();
        BiPoly::from_terms(
            self.terms
                .iter()
                .map(|(e, c)| (e[free[0]] as usize, e[free[1]] as usize, *c)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn evaluate_sum_of_squares() {
        let p = MultiPoly::new(2, [([2, 0, 0], c(1.0)), ([0, 2, 0], c(1.0)), ([0, 0, 2], c(1.0))]).unwrap();
        assert_eq!(p.evaluate([c(1.0), c(2.0), c(3.0)]), c(14.0));
        assert_eq!(p.evaluate([c(0.0); 3]), c(0.0));
    }

    #[test]
    fn appendix_example_value() {
        // x y^2 + y^3 at (0, 1, 1)
        let f = MultiPoly::new(3, [([1, 2, 0], c(1.0)), ([0, 3, 0], c(1.0))]).unwrap();
        assert_eq!(f.evaluate([c(0.0), c(1.0), c(1.0)]), c(1.0));
    }

    #[test]
    fn partials() {
        // d/dx (x^2 y z^0) with degree 3
        let p = MultiPoly::new(3, [([2, 1, 0], c(1.0))]).unwrap();
        let px = p.partial(0);
        assert_eq!(px.coefficient([1, 1, 0]), c(2.0));
        let q = MultiPoly::new(2, [([2, 0, 0], c(1.0)), ([0, 2, 0], c(1.0))]).unwrap();
        assert!(q.partial(2).is_zero());
    }

    #[test]
    fn rejects_inhomogeneous() {
        assert!(MultiPoly::new(2, [([1, 0, 0], c(1.0))]).is_err());
    }

    #[test]
    fn substitution_matches_evaluation() {
        let p = MultiPoly::new(2, [([1, 1, 0], c(1.0)), ([0, 0, 2], Complex64::new(0.0, 2.0))]).unwrap();
        let m = [
            [c(1.0), c(2.0), c(0.0)],
            [c(0.0), c(1.0), c(1.0)],
            [c(1.0), c(0.0), c(1.0)],
        ];
        let q = p.substitute_linear(&m);
        let w = [c(0.3), Complex64::new(-0.2, 0.4), c(1.1)];
        let mw = crate::linalg::mat3_mul_vec(&m, w);
        assert!((q.evaluate(w) - p.evaluate(mw)).norm() < 1e-13);
    }
}
