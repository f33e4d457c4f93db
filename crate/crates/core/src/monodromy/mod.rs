//! Monodromy of the pencil on the homology of its regular fibers.

mod paths;
mod transport;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use paths::{choose_base, distinguished_paths, DistinguishedPath, PathSystem, Target};

use crate::error::{Error, Result};
use crate::fiber::{FiberModel, HomologyClass, PointKind};
use crate::genericity::PencilSpec;
use crate::lattice::{primitive, rank_q, IntMatrix};
use crate::numsolve::{circle, uni_roots, TrackerConfig};
use crate::poly::{resultant_y, BiPoly, UniPoly};
use transport::{MergingPair, Transport};

/// Monodromy matrices along a distinguished path system, with the
/// vanishing cycles read off near each critical value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromyRep {
    pub system: PathSystem,
    /// `matrices[i]` belongs to `system.paths[i]`.
    pub matrices: Vec<IntMatrix>,
    /// Vanishing cycle of each path leading to a critical value.
    pub vanishing: Vec<Option<HomologyClass>>,
    /// Positive loop around infinity, present when infinity is exceptional.
    pub infinity: Option<IntMatrix>,
    pub intersection: IntMatrix,
}

impl MonodromyRep {
    pub fn base(&self) -> Complex64 {
        self.system.base
    }

    /// Index in path order of the loop around critical value `i`.
    pub fn path_of(&self, target: Target) -> Option<usize> {
        self.system.paths.iter().position(|p| p.target == target)
    }

    pub fn matrix(&self, target: Target) -> Option<&IntMatrix> {
        self.path_of(target).map(|i| &self.matrices[i])
    }

    pub fn at_zero(&self) -> Option<&IntMatrix> {
        self.matrix(Target::Zero)
    }

    /// `(critical index, matrix, vanishing cycle)` in path order.
    pub fn critical(&self) -> Vec<(usize, &IntMatrix, Option<&HomologyClass>)> {
        self.system
            .paths
            .iter()
            .enumerate()
            .filter_map(|(k, p)| match p.target {
                Target::Critical(i) => Some((i, &self.matrices[k], self.vanishing[k].as_ref())),
                Target::Zero => None,
            })
            .collect()
    }

    /// Product of all loop matrices in the order that composes to a loop
    /// around every exceptional point; the identity for a consistent system.
    pub fn total(&self) -> Result<IntMatrix> {
        let n = self.intersection.rows();
        let mut acc = IntMatrix::identity(n);
        for m in &self.matrices {
            acc = m.mul(&acc)?;
        }
        if let Some(m) = &self.infinity {
            acc = m.mul(&acc)?;
        }
        Ok(acc)
    }
}

/// Parameter values where the projection of the fiber degenerates without
/// the fiber becoming singular: the fiber through the vertical point at
/// infinity, and tangencies to the vertical lines over `x0`, over the
/// punctures and at infinity.
pub fn fake_values(spec: &PencilSpec, model: &FiberModel) -> Result<Vec<Complex64>> {
    let fam = model.family(spec);
    let mut out: Vec<Complex64> = fam.degenerate_value().into_iter().collect();
    let (fp, gq) = fam.halves();
    let mut lines = vec![model.x0];
    lines.extend(model.points.iter().filter(|p| matches!(p.kind, PointKind::Puncture { .. })).map(|p| p.x));
    let m = model.degree;
    let restrict = |a: Option<Complex64>| -> Vec<UniPoly> {
        (0..=m)
            .map(|j| {
                // the line at infinity keeps the top-degree part in x
                let (f, g) = match a {
                    Some(a) => (fp.y_coeff(j).eval(a), gq.y_coeff(j).eval(a)),
                    None => (fp.y_coeff(j).coeff(m - j), gq.y_coeff(j).coeff(m - j)),
                };
                UniPoly::new(vec![f, -g])
            })
            .collect()
    };
    let mut restrictions: Vec<Vec<UniPoly>> = lines.into_iter().map(|a| restrict(Some(a))).collect();
    restrictions.push(restrict(None));
    for coeffs in restrictions {
        // the leading coefficient depends on b, so no division by it
        let restricted = BiPoly::new(coeffs);
        let mut disc = resultant_y(&restricted, &restricted.deriv_y());
        if spec.p() > 1 {
            // every line meets the zero fiber in multiple points
            let tol = 1e-8 * disc.norm_inf();
            let k = disc.coeffs().iter().take_while(|c| c.norm() < tol).count();
            disc = UniPoly::new(disc.coeffs()[k..].to_vec());
        }
        if disc.degree() > 0 {
            out.extend(uni_roots(&disc)?.roots);
        }
    }
    // several lines degenerate together at the same value
    let mut merged: Vec<Complex64> = Vec::new();
    for z in out {
        if !merged.iter().any(|w| (w - z).norm() < 1e-4 * (1.0 + z.norm())) {
            merged.push(z);
        }
    }
    Ok(merged)
}

fn reversed(path: &[Complex64]) -> Vec<Complex64> {
    path.iter().rev().copied().collect()
}

/// Monodromy matrix of a closed path of regular values starting at the
/// model's base. Columns are images of basis classes.
pub fn loop_matrix(spec: &PencilSpec, model: &FiberModel, path: &[Complex64], cfg: &TrackerConfig) -> Result<IntMatrix> {
    let mut tr = Transport::new(spec, model, path[0], 1, cfg)?;
    tr.advance(path)?;
    tr.finish()
}

/// Monodromy of the pulled-back family `z -> z^{pq}` along a closed path in
/// the `z`-plane starting at a `pq`-th root of the model's base.
pub fn pulled_back_loop_matrix(
    spec: &PencilSpec,
    model: &FiberModel,
    path: &[Complex64],
    cfg: &TrackerConfig,
) -> Result<IntMatrix> {
    let mut tr = Transport::new(spec, model, path[0], spec.p() * spec.q(), cfg)?;
    tr.advance(path)?;
    tr.finish()
}

/// Vanishing cycle along a distinguished path: the loop around the two
/// branch points that merge as the value approaches the critical value.
pub fn geometric_vanishing_cycle(
    spec: &PencilSpec,
    model: &FiberModel,
    path: &DistinguishedPath,
    cfg: &TrackerConfig,
) -> Result<HomologyClass> {
    let mut tr = Transport::new(spec, model, path.approach[0], 1, cfg)?;
    tr.advance(&path.approach)?;
    approach_vanishing(&tr, path)
}

fn approach_vanishing(tr: &Transport, path: &DistinguishedPath) -> Result<HomologyClass> {
    let mut tr = tr.clone();
    let end = *path.approach.last().unwrap();
    let mut last: Option<MergingPair> = None;
    for s in [0.3, 0.1, 0.03, 0.01, 3e-3, 1e-3, 3e-4, 1e-4] {
        let next = path.value + (end - path.value) * s;
        tr.advance(&[tr.position(), next])?;
        let pair = tr.merging_pair(0.1);
        if let (Some(old), Some(new)) = (last, pair) {
            // a node pinches its pair at the square root of the distance
            if old.ids == new.ids && new.distance < 0.8 * old.distance {
                let c = tr.pair_cycle(new.positions.0, new.positions.1)?;
                return Ok(HomologyClass(primitive(&c.0)));
            }
        }
        last = pair;
    }
    Err(Error::Consistency("no isolated pair of branch points near the critical value".into()))
}

/// Vanishing cycle from a Picard-Lefschetz matrix: the primitive generator
/// of the image of `M - I`.
pub fn vanishing_cycle(m: &IntMatrix) -> Result<HomologyClass> {
    let d = m.sub(&IntMatrix::identity(m.rows()))?;
    let cols: Vec<Vec<i64>> = (0..d.cols()).map(|c| d.column(c)).collect();
    let rank = rank_q(&cols);
    if rank != 1 {
        return Err(Error::RankMismatch(rank));
    }
    let col = cols.iter().find(|c| c.iter().any(|v| *v != 0)).unwrap();
    Ok(HomologyClass(primitive(col)))
}

/// Whether `M v = v - (v^T J delta) delta` for every basis vector `v`.
pub fn pl_check(m: &IntMatrix, delta: &HomologyClass, j: &IntMatrix) -> bool {
    let n = m.rows();
    let Ok(jd) = j.mul_vec(&delta.0) else { return false };
    (0..n).all(|t| {
        let coef = jd[t];
        (0..n).all(|s| m.get(s, t) == i64::from(s == t) - coef * delta.0[s])
    })
}

/// Positive loop around infinity: out along the ray to the west, once
/// clockwise around everything, and back.
fn infinity_loop(base: Complex64, radius: f64) -> Vec<Complex64> {
    let far = Complex64::new(-radius, base.im);
    let mut p = vec![base];
    p.extend(circle(Complex64::new(0.0, 0.0), far.norm(), far.arg(), false));
    p.push(base);
    p
}

/// Monodromy along distinguished paths to every critical value and to the
/// exceptional values, starting at the model's base.
pub fn monodromy(
    spec: &PencilSpec,
    model: &FiberModel,
    critical_values: &[Complex64],
    cfg: &TrackerConfig,
) -> Result<MonodromyRep> {
    let mut targets: Vec<(Target, Complex64)> =
        critical_values.iter().enumerate().map(|(i, v)| (Target::Critical(i), *v)).collect();
    if spec.p() > 1 {
        targets.push((Target::Zero, Complex64::new(0.0, 0.0)));
    }
    let fakes: Vec<Complex64> = fake_values(spec, model)?
        .into_iter()
        .filter(|z| !targets.iter().any(|(_, v)| (v - z).norm() < 1e-4 * (1.0 + z.norm())))
        .collect();
    let system = distinguished_paths(model.b, &targets, &fakes)?;
    let results: Vec<(IntMatrix, Option<HomologyClass>)> = system
        .paths
        .par_iter()
        .map(|path| {
            let mut tr = Transport::new(spec, model, model.b, 1, cfg)?;
            tr.advance(&path.approach)?;
            let delta = match path.target {
                Target::Critical(_) => Some(approach_vanishing(&tr, path)?),
                Target::Zero => None,
            };
            tr.advance(&path.circle())?;
            tr.advance(&reversed(&path.approach))?;
            Ok((tr.finish()?, delta))
        })
        .collect::<Result<_>>()?;
    let infinity = if spec.q() > 1 {
        let radius = 2.0 * critical_values.iter().chain(&fakes).chain([&model.b]).map(|z| z.norm()).fold(1.0, f64::max);
        Some(loop_matrix(spec, model, &infinity_loop(model.b, radius), cfg)?)
    } else {
        None
    };
    let (matrices, vanishing) = results.into_iter().unzip();
    Ok(MonodromyRep { system, matrices, vanishing, infinity, intersection: model.intersection_matrix().clone() })
}

/// Every `pq`-th root of every value.
pub fn pullback_values(values: &[Complex64], p: u32, q: u32) -> Vec<Complex64> {
    let k = p * q;
    let mut out = Vec::with_capacity(values.len() * k as usize);
    for v in values {
        let (r, th) = v.to_polar();
        for j in 0..k {
            out.push(Complex64::from_polar(r.powf(1.0 / k as f64), (th + std::f64::consts::TAU * j as f64) / k as f64));
        }
    }
    out
}

/// Image of a polyline under `z -> z^{pq}`, subdivided so each image segment
/// turns by at most 15 degrees around the origin.
pub fn pushforward_loop(path: &[Complex64], p: u32, q: u32) -> Vec<Complex64> {
    let k = p * q;
    let mut out = vec![path[0].powu(k)];
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        let turn = ((b / a).arg().abs() * k as f64).max(((b.norm() / a.norm()).ln().abs()) * k as f64);
        let pieces = ((turn / 15f64.to_radians()).ceil() as usize).max(1);
        for s in 1..=pieces {
            out.push((a + (b - a) * (s as f64 / pieces as f64)).powu(k));
        }
    }
    out
}

/// Structural checks on one loop matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixAudit {
    pub target: Target,
    pub det: i64,
    pub preserves_form: bool,
    /// `(M - I)^2 = 0`.
    pub unipotent: bool,
    pub rank_minus_identity: usize,
    /// Picard-Lefschetz formula with the recorded vanishing cycle.
    pub picard_lefschetz: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonodromyAudit {
    pub matrices: Vec<MatrixAudit>,
    pub product_is_identity: bool,
}

impl MonodromyAudit {
    /// Every loop matrix has determinant one and preserves the form; those
    /// around critical values are unipotent of the rank their vanishing cycle
    /// dictates and obey Picard-Lefschetz; the loops compose to the identity.
    pub fn passed(&self) -> bool {
        self.product_is_identity
            && self.matrices.iter().all(|m| {
                m.det == 1
                    && m.preserves_form
                    && match m.target {
                        Target::Critical(_) => m.unipotent && m.picard_lefschetz == Some(true),
                        Target::Zero => true,
                    }
            })
    }
}

pub fn audit(rep: &MonodromyRep) -> Result<MonodromyAudit> {
    let j = &rep.intersection;
    let n = j.rows();
    let id = IntMatrix::identity(n);
    let mut matrices = Vec::with_capacity(rep.matrices.len());
    for (k, m) in rep.matrices.iter().enumerate() {
        let target = rep.system.paths[k].target;
        let d = m.sub(&id)?;
        let cols: Vec<Vec<i64>> = (0..n).map(|c| d.column(c)).collect();
        let picard_lefschetz = rep.vanishing[k].as_ref().map(|delta| {
            let radical = j.mul_vec(&delta.0).is_ok_and(|jd| jd.iter().all(|v| *v == 0));
            pl_check(m, delta, j) && rank_q(&cols) == usize::from(!radical)
        });
        matrices.push(MatrixAudit {
            target,
            det: m.det()?,
            preserves_form: m.transpose().mul(j)?.mul(m)? == *j,
            unipotent: d.mul(&d)?.is_zero(),
            rank_minus_identity: rank_q(&cols),
            picard_lefschetz,
        });
    }
    Ok(MonodromyAudit { matrices, product_is_identity: rep.total()?.is_identity() })
}
