use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BiPoly, MultiPoly};
use crate::error::{Error, Result};
use crate::genericity::PencilSpec;
use crate::linalg::{self, Mat3};

/// Projective linear change of coordinates followed by the affine chart `z = 1`.
///
/// A chart point `(x, y)` corresponds to the projective point `T (x, y, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartMap {
    pub matrix: Mat3,
    pub inverse: Mat3,
}

impl ChartMap {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let m = [[one, zero, zero], [zero, one, zero], [zero, zero, one]];
        Self { matrix: m, inverse: m }
    }

    pub fn from_matrix(matrix: Mat3) -> Result<Self> {
        let inverse = linalg::mat3_inverse(&matrix)
            .ok_or_else(|| Error::InadmissibleChart("singular chart matrix".into()))?;
        Ok(Self { matrix, inverse })
    }

    /// Random integer unimodular matrix: a product of elementary shears with
    /// small multipliers and a coordinate permutation.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let mut m = [[0i64; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        for _ in 0..8 {
            let i = rng.gen_range(0..3);
            let mut j = rng.gen_range(0..2);
            if j >= i {
                j += 1;
            }
            let k = [-2i64, -1, 1, 2][rng.gen_range(0..4)];
            for col in 0..3 {
                m[i][col] += k * m[j][col];
            }
        }
        let perm = match rng.gen_range(0..6) {
            0 => [0, 1, 2],
            1 => [0, 2, 1],
            2 => [1, 0, 2],
            3 => [1, 2, 0],
            4 => [2, 0, 1],
            _ => [2, 1, 0],
        };
        let matrix: Mat3 = std::array::from_fn(|i| {
            std::array::from_fn(|j| Complex64::new(m[perm[i]][j] as f64, 0.0))
        });
        Self::from_matrix(matrix).expect("unimodular matrices are invertible")
    }

    /// Random unitary matrix (Gram–Schmidt on Gaussian columns); keeps
    /// coefficient scales unchanged under pull-back.
    pub fn random_unitary<R: Rng>(rng: &mut R) -> Self {
        let mut gauss = || {
            let (u1, u2): (f64, f64) = (rng.gen_range(f64::EPSILON..1.0), rng.gen_range(0.0..1.0));
            Complex64::from_polar((-2.0 * u1.ln()).sqrt(), 2.0 * std::f64::consts::PI * u2)
        };
        let mut cols: Vec<[Complex64; 3]> = Vec::new();
        while cols.len() < 3 {
            let mut v: [Complex64; 3] = std::array::from_fn(|_| gauss());
            for c in &cols {
                let dot: Complex64 = (0..3).map(|i| c[i].conj() * v[i]).sum();
                for i in 0..3 {
                    v[i] -= dot * c[i];
                }
            }
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if n > 1e-3 {
                cols.push(v.map(|z| z / n));
            }
        }
        let matrix: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i]));
        let inverse: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| matrix[j][i].conj()));
        Self { matrix, inverse }
    }

    pub fn to_projective(&self, x: Complex64, y: Complex64) -> [Complex64; 3] {
        linalg::mat3_mul_vec(&self.matrix, [x, y, Complex64::new(1.0, 0.0)])
    }

    /// Homogeneous chart coordinates `T^{-1} p` (not normalized).
    pub fn chart_homogeneous(&self, p: [Complex64; 3]) -> [Complex64; 3] {
        linalg::mat3_mul_vec(&self.inverse, p)
    }

    /// Affine chart coordinates, `None` if the point lies on the chart's line at infinity.
    pub fn to_affine(&self, p: [Complex64; 3], rel_tol: f64) -> Option<(Complex64, Complex64)> {
        let w = self.chart_homogeneous(p);
        let n = w.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if w[2].norm() <= rel_tol * n {
            return None;
        }
        Some((w[0] / w[2], w[1] / w[2]))
    }

    pub fn pull_back(&self, p: &MultiPoly) -> MultiPoly {
        p.substitute_linear(&self.matrix)
    }
}

/// The pencil of fiber polynomials `F^p - b G^q` dehomogenized in one chart,
/// with both halves precomputed so each `b` costs one linear combination.
#[derive(Clone, Debug)]
pub struct FiberFamily {
    pub chart: ChartMap,
    fp: BiPoly,
    gq: BiPoly,
    degree: usize,
}

impl FiberFamily {
    pub fn new(spec: &PencilSpec, chart: &ChartMap) -> Self {
        let f = chart.pull_back(spec.f()).pow(spec.p());
        let g = chart.pull_back(spec.g()).pow(spec.q());
        Self {
            chart: chart.clone(),
            fp: f.dehomogenize(2),
            gq: g.dehomogenize(2),
            degree: (spec.p() * spec.f().degree()) as usize,
        }
    }

    /// Total degree `pqd` of every fiber.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn at(&self, b: Complex64) -> BiPoly {
        self.fp.sub(&self.gq.scale(b))
    }

    /// `y`-leading coefficient of the fiber over `b` (a constant).
    pub fn leading(&self, b: Complex64) -> Complex64 {
        self.fp.y_coeff(self.degree).coeff(0) - b * self.gq.y_coeff(self.degree).coeff(0)
    }

    /// The value of `b` at which the fiber passes through the chart's vertical
    /// point at infinity, if any.
    pub fn degenerate_value(&self) -> Option<Complex64> {
        let g = self.gq.y_coeff(self.degree).coeff(0);
        if g.norm() == 0.0 {
            None
        } else {
            Some(self.fp.y_coeff(self.degree).coeff(0) / g)
        }
    }

    /// `F^p` and `G^q` in the chart, for evaluating `f`.
    pub fn halves(&self) -> (&BiPoly, &BiPoly) {
        (&self.fp, &self.gq)
    }
}

/// Dehomogenize `F^p - b G^q` in the chart; fails when the fiber loses its full
/// `y`-degree there.
pub fn fiber_polynomial(spec: &PencilSpec, b: Complex64, chart: &ChartMap) -> Result<BiPoly> {
    let fam = FiberFamily::new(spec, chart);
    let lc = fam.leading(b);
    let scale = fam.fp.norm_inf().max(b.norm() * fam.gq.norm_inf()).max(1e-300);
    if lc.norm() <= 1e-10 * scale {
        return Err(Error::InadmissibleChart(format!(
            "y-leading coefficient vanishes at b = {b}"
        )));
    }
    Ok(fam.at(b))
}
