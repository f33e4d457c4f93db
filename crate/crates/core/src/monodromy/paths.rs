use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numsolve::circle;
use crate::rng;

/// What a distinguished path leads to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "lowercase")]
pub enum Target {
    Critical(usize),
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguishedPath {
    pub target: Target,
    pub value: Complex64,
    /// Polyline from the base to the start of the small circle.
    pub approach: Vec<Complex64>,
    pub radius: f64,
}

impl DistinguishedPath {
    /// Small counterclockwise circle around the value, starting and ending
    /// at the end of the approach.
    pub fn circle(&self) -> Vec<Complex64> {
        let end = *self.approach.last().unwrap();
        circle(self.value, self.radius, (end - self.value).arg(), true)
    }

    /// The closed loop `approach * circle * approach^{-1}`.
    pub fn as_loop(&self) -> Vec<Complex64> {
        let mut p = self.approach.clone();
        p.extend(self.circle().into_iter().skip(1));
        p.extend(self.approach.iter().rev().skip(1));
        p
    }
}

/// Distinguished paths from a common base, in counterclockwise order of
/// their initial direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSystem {
    pub base: Complex64,
    pub paths: Vec<DistinguishedPath>,
    /// Values the paths keep clear of without encircling them.
    pub obstacles: Vec<Complex64>,
}

fn dist_to_segment(p: Complex64, a: Complex64, b: Complex64) -> (f64, f64) {
    let d = b - a;
    let t = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    ((p - (a + d * t)).norm(), t)
}

fn nearest_other(points: &[Complex64], i: usize) -> f64 {
    points.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| (q - points[i]).norm()).fold(f64::INFINITY, f64::min)
}

/// Regular base value whose straight segments to every target stay clear of
/// all other special values. Candidates are drawn from a seeded stream.
pub fn choose_base(targets: &[Complex64], avoid: &[Complex64], seed: u64) -> Complex64 {
    let all: Vec<Complex64> = targets.iter().chain(avoid).copied().collect();
    let center = all.iter().sum::<Complex64>() / all.len() as f64;
    let spread = all.iter().map(|z| (z - center).norm()).fold(0.0, f64::max).max(1e-3);
    let mut rng = rng::stream(seed, "base-value");
    let score = |b: Complex64| -> f64 {
        let mut s = all.iter().map(|z| (z - b).norm()).fold(f64::INFINITY, f64::min);
        for t in targets {
            for z in &all {
                if z != t {
                    s = s.min(dist_to_segment(*z, b, *t).0);
                }
            }
        }
        s / (b - center).norm().max(spread)
    };
    let mut best = (f64::NEG_INFINITY, center);
    for _ in 0..256 {
        let r = spread * 1.2 * rng.gen_range(0.0f64..1.0).sqrt();
        let b = center + Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU));
        let s = score(b);
        if s > best.0 {
            best = (s, b);
        }
    }
    best.1
}

fn segments_cross(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let orient = |p: Complex64, q: Complex64, r: Complex64| ((q - p).conj() * (r - p)).im;
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Route a path system from `base` to every target, with small circles of a
/// third of the distance to the nearest other special value and arcs around
/// values that come within 0.45 of their own nearest-neighbor distance.
/// Fails with `CannotRoute` when the resulting paths are not disjoint.
pub fn distinguished_paths(
    base: Complex64,
    targets: &[(Target, Complex64)],
    obstacles: &[Complex64],
) -> Result<PathSystem> {
    let all: Vec<Complex64> = targets.iter().map(|t| t.1).chain(obstacles.iter().copied()).collect();
    for z in &all {
        if (z - base).norm() < 1e-9 * z.norm().max(1.0) {
            return Err(Error::CannotRoute("base coincides with a special value".into()));
        }
    }
    let mut paths = Vec::with_capacity(targets.len());
    for (i, &(target, value)) in targets.iter().enumerate() {
        let radius = nearest_other(&all, i).min((value - base).norm()) / 3.0;
        let dir = (base - value) / (base - value).norm();
        let end = value + dir * radius;
        let mut hits: Vec<(f64, usize)> = Vec::new();
        for (j, z) in all.iter().enumerate() {
            if j != i {
                let (d, t) = dist_to_segment(*z, base, end);
                if d < 0.45 * nearest_other(&all, j) {
                    hits.push((t, j));
                }
            }
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut approach = vec![base];
        for (_, j) in hits {
            let o = all[j];
            let u = (end - base) / (end - base).norm();
            // entry and exit of the segment through the disc around o; arcs
            // around the same value nest by the distance of their segments
            let s = ((o - base) * u.conj()).re;
            let h = ((o - base) * u.conj()).im;
            let reach = 0.45 * nearest_other(&all, j);
            let r = reach * (0.8 + 0.2 * h.abs() / reach);
            let w = (r * r - h * h).max(0.0).sqrt();
            if s - w <= 0.0 || (base + u * (s + w) - base).norm() >= (end - base).norm() {
                return Err(Error::CannotRoute(format!("value {o} is too close to an endpoint")));
            }
            let (p_in, p_out) = (base + u * (s - w), base + u * (s + w));
            let (a0, a1) = ((p_in - o).arg(), (p_out - o).arg());
            let mut sweep = a1 - a0;
            if sweep > std::f64::consts::PI {
                sweep -= std::f64::consts::TAU;
            } else if sweep < -std::f64::consts::PI {
                sweep += std::f64::consts::TAU;
            }
            let pieces = ((sweep.abs() / 15f64.to_radians()).ceil() as usize).max(1);
            for q in 0..=pieces {
                approach.push(o + Complex64::from_polar(r, a0 + sweep * q as f64 / pieces as f64));
            }
        }
        approach.push(end);
        paths.push(DistinguishedPath { target, value, approach, radius });
    }
    paths.sort_by(|a, b| (a.approach[1] - base).arg().total_cmp(&(b.approach[1] - base).arg()));

    // pairwise disjointness away from the base
    let pieces: Vec<Vec<Complex64>> = paths
        .iter()
        .map(|p| {
            let mut v = p.approach.clone();
            v.extend(p.circle().into_iter().skip(1));
            v
        })
        .collect();
    for a in 0..pieces.len() {
        for b in a + 1..pieces.len() {
            for (i, sa) in pieces[a].windows(2).enumerate() {
                for (j, sb) in pieces[b].windows(2).enumerate() {
                    if (i == 0 && j == 0) || !segments_cross(sa[0], sa[1], sb[0], sb[1]) {
                        continue;
                    }
                    return Err(Error::CannotRoute(format!(
                        "paths to {:?} and {:?} intersect",
                        paths[a].target, paths[b].target
                    )));
                }
            }
        }
    }
    Ok(PathSystem { base, paths, obstacles: obstacles.to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn three_values_from_below() {
        let t = [(Target::Critical(0), c(0.0, 0.0)), (Target::Critical(1), c(1.0, 0.0)), (Target::Critical(2), c(2.0, 0.0))];
        let sys = distinguished_paths(c(0.0, -1.0), &t, &[]).unwrap();
        let order: Vec<Target> = sys.paths.iter().map(|p| p.target).collect();
        assert_eq!(order, vec![Target::Critical(2), Target::Critical(1), Target::Critical(0)]);
        for p in &sys.paths {
            let l = p.as_loop();
            assert_eq!(l[0], l[l.len() - 1]);
            assert!((p.radius - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn detour_around_an_obstacle_on_the_way() {
        let t = [(Target::Critical(0), c(0.0, 4.0))];
        let sys = distinguished_paths(c(0.0, 0.0), &t, &[c(0.01, 2.0)]).unwrap();
        let path = &sys.paths[0].approach;
        assert!(path.len() > 2);
        let clearance = path
            .windows(2)
            .map(|w| dist_to_segment(c(0.01, 2.0), w[0], w[1]).0)
            .fold(f64::INFINITY, f64::min);
        assert!(clearance > 0.35 * 2.0);
    }
}
