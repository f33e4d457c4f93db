use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::UniPoly;

const MAX_ITER: usize = 2000;

/// Roots of a univariate polynomial, clustered by multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub multiplicities: Vec<usize>,
    pub residuals: Vec<f64>,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn is_simple(&self) -> bool {
        self.multiplicities.iter().all(|&m| m == 1)
    }

    /// Roots repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(r, &m)| std::iter::repeat_n(*r, m))
            .collect()
    }
}

/// `|P(z)|` relative to the size of the terms summed to produce it.
pub fn relative_residual(p: &UniPoly, z: Complex64) -> f64 {
    let scale: f64 = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm() * z.norm().powi(k as i32))
        .sum();
    p.eval(z).norm() / scale.max(f64::MIN_POSITIVE)
}

/// Cluster threshold for multiplicity detection.
fn same_cluster(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-7 * a.norm().max(b.norm()).max(1.0)
}

/// All roots with multiplicity, by Aberth–Ehrlich simultaneous iteration from
/// a perturbed circle followed by a Newton polish.
pub fn uni_roots(p: &UniPoly) -> Result<RootSet> {
    if p.is_zero() {
        return Err(Error::Consistency("root finding on the zero polynomial".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    let lead_zeros = p.coeffs().iter().take_while(|c| **c == zero).count();
    let q = UniPoly::new(p.coeffs()[lead_zeros..].to_vec());
    let n = q.degree();
    let mut found: Vec<Complex64> = vec![zero; lead_zeros];
    if n > 0 {
        found.extend(aberth(&q)?);
    }

    // cluster
    let mut used = vec![false; found.len()];
    let mut roots = Vec::new();
    let mut mults = Vec::new();
    for i in 0..found.len() {
        if used[i] {
            continue;
        }
        let mut members = vec![found[i]];
        used[i] = true;
        for j in i + 1..found.len() {
            if !used[j] && members.iter().any(|m| same_cluster(*m, found[j])) {
                members.push(found[j]);
                used[j] = true;
            }
        }
        let mean = members.iter().sum::<Complex64>() / members.len() as f64;
        roots.push(mean);
        mults.push(members.len());
    }
    let residuals = roots.iter().map(|r| p.eval(*r).norm()).collect();
    Ok(RootSet { roots, multiplicities: mults, residuals })
}

fn aberth(q: &UniPoly) -> Result<Vec<Complex64>> {
    let n = q.degree();
    let lead = q.leading();
    let monic = q.scale(Complex64::new(1.0, 0.0) / lead);
    if n == 1 {
        return Ok(vec![-monic.coeff(0)]);
    }
    let dp = monic.derivative();

    // radius from the Newton polygon upper envelope
    let upper = (1..=n)
        .map(|k| monic.coeff(n - k).norm().powf(1.0 / k as f64))
        .fold(0.0, f64::max);
    let lower = {
        let a0 = monic.coeff(0).norm();
        if a0 > 0.0 {
            a0.powf(1.0 / n as f64)
        } else {
            upper * 0.5
        }
    };
    let radius = (0.5 * (upper + lower)).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius * (1.0 + 0.01 * (k % 3) as f64), theta)
        })
        .collect();
    let mut done = vec![false; n];
    let mut iterations = 0;
    while iterations < MAX_ITER && done.iter().any(|d| !d) {
        iterations += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (pv, _) = monic.eval_with_derivative(z[i]);
            let dv = dp.eval(z[i]);
            if pv.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = pv / dv;
            let sum: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(1e300, 0.0)
                    } else {
                        Complex64::new(1.0, 0.0) / d
                    }
                })
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if !w.is_finite() {
                continue;
            }
            z[i] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            }
        }
    }
    // polish: Newton steps accepted only when they reduce the residual
    for zi in z.iter_mut() {
        for _ in 0..4 {
            let (pv, dv) = monic.eval_with_derivative(*zi);
            if dv.norm() == 0.0 {
                break;
            }
            let cand = *zi - pv / dv;
            if cand.is_finite() && monic.eval(cand).norm() < pv.norm() {
                *zi = cand;
            } else {
                break;
            }
        }
    }
    if done.iter().any(|d| !d) {
        let worst = z.iter().map(|r| relative_residual(&monic, *r)).fold(0.0, f64::max);
        if worst > 1e-6 {
            return Err(Error::NoConvergence { degree: n, iterations });
        }
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn contains(rs: &RootSet, z: Complex64, mult: usize) -> bool {
        rs.roots
            .iter()
            .zip(&rs.multiplicities)
            .any(|(r, m)| (r - z).norm() < 1e-6 && *m == mult)
    }

    #[test]
    fn imaginary_pair() {
        let rs = uni_roots(&UniPoly::from_real(&[1.0, 0.0, 1.0])).unwrap();
        assert_eq!(rs.roots.len(), 2);
        assert!(contains(&rs, c(0.0, 1.0), 1));
        assert!(contains(&rs, c(0.0, -1.0), 1));
    }

    #[test]
    fn double_root_is_clustered() {
        // (z-1)^2 (z+2) = z^3 - 3z + 2
        let rs = uni_roots(&UniPoly::from_real(&[2.0, -3.0, 0.0, 1.0])).unwrap();
        assert_eq!(rs.total_multiplicity(), 3);
        assert!(contains(&rs, c(1.0, 0.0), 2));
        assert!(contains(&rs, c(-2.0, 0.0), 1));
    }

    #[test]
    fn zero_roots_are_exact() {
        let rs = uni_roots(&UniPoly::from_real(&[0.0, 0.0, -1.0, 1.0])).unwrap();
        assert!(contains(&rs, c(0.0, 0.0), 2));
        assert!(contains(&rs, c(1.0, 0.0), 1));
    }
}
