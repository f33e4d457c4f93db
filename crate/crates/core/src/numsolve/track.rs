use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::UniPoly;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackerConfig {
    /// Initial step as a fraction of the path length.
    pub initial_step: f64,
    /// Smallest admissible step, same units.
    pub min_step: f64,
    pub newton_tol: f64,
    pub safety: f64,
    pub max_iterations: usize,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            initial_step: 1e-2,
            min_step: 1e-9,
            newton_tol: 1e-12,
            safety: 0.5,
            max_iterations: 64,
        }
    }
}

impl TrackerConfig {
    /// Same configuration with the initial step and Newton tolerance halved.
    pub fn halved(&self) -> Self {
        Self { initial_step: self.initial_step / 2.0, newton_tol: self.newton_tol / 2.0, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = 0.0 < self.min_step
            && self.min_step < self.initial_step
            && 0.0 < self.safety
            && self.safety < 1.0
            && self.newton_tol > 0.0
            && self.max_iterations > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("invalid tracker configuration {self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub accepted: usize,
    pub rejected: usize,
    pub smallest_step: f64,
}

/// Result of transporting a root set along a polyline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathTrace {
    pub path: Vec<Complex64>,
    pub start: Vec<Complex64>,
    /// `end[i]` is where `start[i]` arrives.
    pub end: Vec<Complex64>,
    /// For closed paths, `permutation[i]` is the index of the start root that
    /// `start[i]` is carried to.
    pub permutation: Option<Vec<usize>>,
    pub log: StepLog,
}

/// Smallest pairwise distance.
pub fn min_separation(z: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            best = best.min((z[i] - z[j]).norm());
        }
    }
    best
}

fn point_at(path: &[Complex64], cumulative: &[f64], s: f64) -> Complex64 {
    let k = cumulative.partition_point(|&c| c <= s).clamp(1, path.len() - 1);
    let (s0, s1) = (cumulative[k - 1], cumulative[k]);
    if s1 <= s0 {
        return path[k];
    }
    path[k - 1] + (path[k] - path[k - 1]) * ((s - s0) / (s1 - s0))
}

fn newton(p: &UniPoly, z0: Complex64, cfg: &TrackerConfig) -> Option<Complex64> {
    let mut z = z0;
    for _ in 0..cfg.max_iterations {
        let (v, d) = p.eval_with_derivative(z);
        if d.norm() == 0.0 {
            return None;
        }
        let dz = v / d;
        z -= dz;
        if !z.is_finite() {
            return None;
        }
        if dz.norm() <= cfg.newton_tol * z.norm().max(1.0) {
            return Some(z);
        }
    }
    None
}

/// Transport simple roots along the polyline, returning every accepted
/// configuration together with the parameter value where it was reached.
pub fn track_samples<F>(
    family: F,
    path: &[Complex64],
    start: &[Complex64],
    cfg: &TrackerConfig,
) -> Result<(Vec<(Complex64, Vec<Complex64>)>, StepLog)>
where
    F: Fn(Complex64) -> UniPoly,
{
    cfg.validate()?;
    let mut cumulative = vec![0.0];
    for w in path.windows(2) {
        cumulative.push(cumulative.last().unwrap() + (w[1] - w[0]).norm());
    }
    let total = *cumulative.last().unwrap();
    let mut samples = vec![(path[0], start.to_vec())];
    let mut log = StepLog { smallest_step: cfg.initial_step, ..Default::default() };
    if total == 0.0 || start.is_empty() {
        return Ok((samples, log));
    }
    let mut s = 0.0;
    let mut h = cfg.initial_step;
    let mut roots = start.to_vec();
    let mut prev: Option<(f64, Vec<Complex64>)> = None;
    while s < total {
        let hs = (h * total).min(total - s);
        let s_new = s + hs;
        // snap to polyline vertices so corners are visited exactly
        let s_new = match cumulative.iter().find(|&&c| c > s + 1e-15 * total && c < s_new) {
            Some(&c) => c,
            None => s_new,
        };
        let t = point_at(path, &cumulative, s_new);
        let p = family(t);
        let predicted: Vec<Complex64> = match &prev {
            Some((sp, rp)) if s - sp > 0.0 => {
                let ratio = (s_new - s) / (s - sp);
                roots.iter().zip(rp).map(|(r, q)| r + (r - q) * ratio).collect()
            }
            _ => roots.clone(),
        };
        let corrected: Option<Vec<Complex64>> = predicted.iter().map(|z| newton(&p, *z, cfg)).collect();
        let accept = corrected.as_ref().is_some_and(|c| {
            let sep = min_separation(c);
            let radius = cfg.safety * 0.5 * sep;
            sep > 0.0
                && c.iter().zip(&predicted).all(|(a, b)| (a - b).norm() < radius)
                && c.iter().zip(&roots).all(|(a, b)| (a - b).norm() < sep)
        });
        if accept {
            prev = Some((s, roots));
            roots = corrected.unwrap();
            s = s_new;
            log.accepted += 1;
            samples.push((t, roots.clone()));
            h = (h * 1.5).min(cfg.initial_step);
        } else {
            log.rejected += 1;
            h /= 2.0;
            log.smallest_step = log.smallest_step.min(h);
            if h < cfg.min_step {
                return Err(Error::StepUnderflow { at: s / total, step: h });
            }
        }
    }
    Ok((samples, log))
}

/// Transport simple roots along the polyline.
pub fn track<F>(family: F, path: &[Complex64], start: &[Complex64], cfg: &TrackerConfig) -> Result<PathTrace>
where
    F: Fn(Complex64) -> UniPoly,
{
    let (samples, log) = track_samples(family, path, start, cfg)?;
    let end = samples.last().unwrap().1.clone();
    let closed = path.len() > 1 && (path[0] - path[path.len() - 1]).norm() <= 1e-12 * path[0].norm().max(1.0);
    let permutation = if closed { Some(match_roots(start, &end)?) } else { None };
    Ok(PathTrace { path: path.to_vec(), start: start.to_vec(), end, permutation, log })
}

/// Nearest-neighbor matching of `end` onto `start`, required to be a
/// bijection with every match within a third of the start separation.
pub fn match_roots(start: &[Complex64], end: &[Complex64]) -> Result<Vec<usize>> {
    let sep = min_separation(start);
    let mut perm = Vec::with_capacity(end.len());
    let mut used = vec![false; start.len()];
    for e in end {
        let (j, d) = start
            .iter()
            .enumerate()
            .map(|(j, s)| (j, (s - e).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| Error::Consistency("empty root set".into()))?;
        if used[j] || d > sep / 3.0 {
            return Err(Error::Consistency("tracked roots do not close up".into()));
        }
        used[j] = true;
        perm.push(j);
    }
    Ok(perm)
}

/// Polyline approximating a circle, at most 15 degrees per segment.
pub fn circle(center: Complex64, radius: f64, start_angle: f64, ccw: bool) -> Vec<Complex64> {
    let n = 24;
    let dir = if ccw { 1.0 } else { -1.0 };
    (0..=n)
        .map(|k| center + Complex64::from_polar(radius, start_angle + dir * 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // y^2 - x, parametrized by x
    fn sqrt_family(x: Complex64) -> UniPoly {
        UniPoly::new(vec![-x, c(0.0, 0.0), c(1.0, 0.0)])
    }

    #[test]
    fn square_root_swaps_sheets() {
        let path = circle(c(0.0, 0.0), 1.0, 0.0, true);
        let tr = track(sqrt_family, &path, &[c(1.0, 0.0), c(-1.0, 0.0)], &TrackerConfig::default()).unwrap();
        assert_eq!(tr.permutation, Some(vec![1, 0]));
    }

    #[test]
    fn contractible_loop_is_trivial() {
        let path = circle(c(3.0, 0.0), 1.0, std::f64::consts::PI, true);
        let r = 2f64.sqrt();
        let tr = track(sqrt_family, &path, &[c(r, 0.0), c(-r, 0.0)], &TrackerConfig::default()).unwrap();
        assert_eq!(tr.permutation, Some(vec![0, 1]));
    }

    #[test]
    fn halved_tolerances_agree() {
        let path = circle(c(0.0, 0.0), 1.0, 0.0, false);
        let cfg = TrackerConfig::default();
        let a = track(sqrt_family, &path, &[c(1.0, 0.0), c(-1.0, 0.0)], &cfg).unwrap();
        let b = track(sqrt_family, &path, &[c(1.0, 0.0), c(-1.0, 0.0)], &cfg.halved()).unwrap();
        assert_eq!(a.permutation, b.permutation);
    }
}
