use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::{best_chart, check_smooth, check_transversal, lift_chart, push_unique, relative_value};
use super::{CheckResult, GenericityReport, PencilSpec, Precision};
use crate::dd::{eval_exact, Cdd};
use crate::error::{Error, Result};
use crate::numsolve::{bi_relative_residual, newton2, solve2};
use crate::poly::{ChartMap, ExactPoly, MultiPoly};
use crate::{linalg, rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExceptionalValue {
    Zero,
    Infinity,
}

/// Critical points of `f` off `{FG = 0}`, their values and Hessian
/// certificates, the exceptional set `A` and the base points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalData {
    pub points: Vec<[Complex64; 3]>,
    pub values: Vec<Complex64>,
    pub hessian_dets: Vec<Complex64>,
    #[serde(rename = "A")]
    pub a: Vec<ExceptionalValue>,
    pub base_points: Vec<[Complex64; 3]>,
    pub precision: Precision,
}

impl CriticalData {
    pub fn r(&self) -> usize {
        self.points.len()
    }

    /// Smallest pairwise distance between critical values.
    pub fn min_value_separation(&self) -> f64 {
        let v = &self.values;
        let mut best = f64::INFINITY;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.min((v[i] - v[j]).norm());
            }
        }
        best
    }
}

#[allow(non_snake_case)]
pub fn critical_set_A(p: u32, q: u32) -> Vec<ExceptionalValue> {
    let mut a = Vec::new();
    if p > 1 {
        a.push(ExceptionalValue::Zero);
    }
    if q > 1 {
        a.push(ExceptionalValue::Infinity);
    }
    a
}

/// Components of the 1-form `pG dF - qF dG`.
fn form_components(f: &MultiPoly, g: &MultiPoly, p: u32, q: u32) -> Result<[MultiPoly; 3]> {
    let (gf, gg) = (f.gradient(), g.gradient());
    let pc = Complex64::new(p as f64, 0.0);
    let qc = Complex64::new(q as f64, 0.0);
    let comp = |i: usize| g.mul(&gf[i]).scale(pc).sub(&f.mul(&gg[i]).scale(qc)).map(|w| w.trimmed(1e-14));
    Ok([comp(0)?, comp(1)?, comp(2)?])
}

struct Candidate {
    point: [Complex64; 3],
    value: Complex64,
    hessian: Complex64,
    hessian_norm: f64,
}

/// Hessian determinant and Frobenius norm of `f` in the best chart at a
/// critical point.
fn hessian(spec: &PencilSpec, pt: [Complex64; 3]) -> (Complex64, f64) {
    let (k, u, v) = best_chart(pt);
    let log_hess = |h: &MultiPoly| -> ([Complex64; 3], Complex64) {
        let b = h.dehomogenize(k);
        let (bu, bv) = (b.deriv_x(), b.deriv_y());
        let val = b.eval(u, v);
        let (du, dv) = (bu.eval(u, v), bv.eval(u, v));
        let (duu, duv, dvv) = (bu.deriv_x().eval(u, v), bu.deriv_y().eval(u, v), bv.deriv_y().eval(u, v));
        let inv = Complex64::new(1.0, 0.0) / val;
        (
            [duu * inv - du * du * inv * inv, duv * inv - du * dv * inv * inv, dvv * inv - dv * dv * inv * inv],
            val,
        )
    };
    let (hf, fv) = log_hess(spec.f());
    let (hg, gv) = log_hess(spec.g());
    let fval = fv.powu(spec.p()) / gv.powu(spec.q());
    let (p, q) = (spec.p() as f64, spec.q() as f64);
    let h: [Complex64; 3] = std::array::from_fn(|i| fval * (hf[i] * p - hg[i] * q));
    let det = h[0] * h[2] - h[1] * h[1];
    let norm = (h[0].norm_sqr() + 2.0 * h[1].norm_sqr() + h[2].norm_sqr()).sqrt();
    (det, norm)
}

fn find_candidates(spec: &PencilSpec, seed: u64, precision: Precision) -> Result<Vec<Candidate>> {
    let mut rng = rng::stream(seed, "critical_points");
    let chart = ChartMap::random_unitary(&mut rng);
    let (ft, gt) = (chart.pull_back(spec.f()), chart.pull_back(spec.g()));
    let omega_t = form_components(&ft, &gt, spec.p(), spec.q())?;
    let omega = form_components(spec.f(), spec.g(), spec.p(), spec.q())?;

    let per_chart: Vec<Result<Vec<[Complex64; 3]>>> = (0..3usize)
        .into_par_iter()
        .map(|k| {
            let free: Vec<usize> = (0..3).filter(|&i| i != k).collect();
            let sols = solve2(&omega_t[free[0]].dehomogenize(k), &omega_t[free[1]].dehomogenize(k))?;
            Ok(sols
                .into_iter()
                .map(|(u, v)| linalg::mat3_mul_vec(&chart.matrix, lift_chart(k, u, v)))
                .collect())
        })
        .collect();

    let mut points: Vec<[Complex64; 3]> = Vec::new();
    for chart_points in per_chart {
        for pt in chart_points? {
            let pt = linalg::projective_normalize(pt);
            if relative_value(spec.f(), pt) < 1e-8 || relative_value(spec.g(), pt) < 1e-8 {
                continue;
            }
            let (k, u, v) = best_chart(pt);
            let free: Vec<usize> = (0..3).filter(|&i| i != k).collect();
            let (a, b) = (omega[free[0]].dehomogenize(k), omega[free[1]].dehomogenize(k));
            let (u, v) = newton2(&a, &b, u, v, 20);
            if bi_relative_residual(&a, u, v).max(bi_relative_residual(&b, u, v)) > 1e-9 {
                continue;
            }
            push_unique(&mut points, lift_chart(k, u, v));
        }
    }
    let mut out: Vec<Candidate> = points
        .into_iter()
        .map(|pt| {
            let pt = match precision {
                Precision::Double => pt,
                Precision::DoubleDouble => refine_dd(spec, pt),
            };
            let (hessian, hessian_norm) = hessian(spec, pt);
            let value = match precision {
                Precision::Double => spec.value(pt),
                Precision::DoubleDouble => value_dd(spec, pt),
            };
            Candidate { point: linalg::projective_normalize(pt), value, hessian, hessian_norm }
        })
        .collect();
    out.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    Ok(out)
}

fn value_dd(spec: &PencilSpec, pt: [Complex64; 3]) -> Complex64 {
    let x = pt.map(Cdd::from_c64);
    let fv = eval_exact(spec.f_exact(), x).powi(spec.p());
    let gv = eval_exact(spec.g_exact(), x).powi(spec.q());
    (fv / gv).to_c64()
}

/// Newton refinement of a critical point in double-double arithmetic on the
/// exact coefficients.
fn refine_dd(spec: &PencilSpec, pt: [Complex64; 3]) -> [Complex64; 3] {
    let (k, _, _) = best_chart(pt);
    let free: Vec<usize> = (0..3).filter(|&i| i != k).collect();
    let (i, j) = (free[0], free[1]);
    let partials = |e: &ExactPoly| {
        let (ei, ej) = (e.partial(i), e.partial(j));
        (e.clone(), ei.partial(i), ei.partial(j), ej.partial(j), ei, ej)
    };
    let (f, fii, fij, fjj, fi, fj) = partials(spec.f_exact());
    let (g, gii, gij, gjj, gi, gj) = partials(spec.g_exact());
    let p = Cdd::from_c64(Complex64::new(spec.p() as f64, 0.0));
    let q = Cdd::from_c64(Complex64::new(spec.q() as f64, 0.0));
    let mut x: [Cdd; 3] = pt.map(|c| Cdd::from_c64(c / pt[k]));
    for _ in 0..4 {
        let ev = |e: &ExactPoly| eval_exact(e, x);
        let (fv, fiv, fjv, fiiv, fijv, fjjv) = (ev(&f), ev(&fi), ev(&fj), ev(&fii), ev(&fij), ev(&fjj));
        let (gv, giv, gjv, giiv, gijv, gjjv) = (ev(&g), ev(&gi), ev(&gj), ev(&gii), ev(&gij), ev(&gjj));
        let w1 = p * gv * fiv - q * fv * giv;
        let w2 = p * gv * fjv - q * fv * gjv;
        // derivatives of w1 = pG F_i - qF G_i and w2 = pG F_j - qF G_j
        let a11 = p * (giv * fiv + gv * fiiv) - q * (fiv * giv + fv * giiv);
        let a12 = p * (gjv * fiv + gv * fijv) - q * (fjv * giv + fv * gijv);
        let a21 = p * (giv * fjv + gv * fijv) - q * (fiv * gjv + fv * gijv);
        let a22 = p * (gjv * fjv + gv * fjjv) - q * (fjv * gjv + fv * gjjv);
        let det = a11 * a22 - a12 * a21;
        if det.norm_sqr().to_f64() == 0.0 {
            break;
        }
        let di = (a22 * w1 - a12 * w2) / det;
        let dj = (a11 * w2 - a21 * w1) / det;
        x[i] = x[i] - di;
        x[j] = x[j] - dj;
    }
    x.map(Cdd::to_c64)
}

/// Critical data of a pencil that passes the genericity certificates.
///
/// Fails with `Degenerate` or `ValueCollision` when the critical points are
/// not Morse with distinct values.
pub fn critical_points(spec: &PencilSpec, seed: u64, precision: Precision) -> Result<CriticalData> {
    let (report, data) = certify(spec, seed, precision)?;
    let data = data.ok_or_else(|| Error::Inconclusive("genericity certificates did not pass".into()))?;
    if !report.nondegenerate.passed() {
        let worst = data
            .hessian_dets
            .iter()
            .map(|d| d.norm())
            .fold(f64::INFINITY, f64::min);
        return Err(Error::Degenerate(worst));
    }
    if !report.distinct_values.passed() {
        for i in 0..data.values.len() {
            for j in i + 1..data.values.len() {
                if !values_distinct(data.values[i], data.values[j]) {
                    return Err(Error::ValueCollision(i, j));
                }
            }
        }
    }
    if !report.passed() {
        return Err(Error::Inconclusive("genericity certificates did not pass".into()));
    }
    Ok(data)
}

fn values_distinct(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() > 1e-8 * a.norm().max(b.norm()).max(1.0)
}

/// Run all genericity certificates; critical data is returned whenever the
/// critical system could be solved, even if some certificate fails.
pub fn certify(spec: &PencilSpec, seed: u64, precision: Precision) -> Result<(GenericityReport, Option<CriticalData>)> {
    let smooth_f = check_smooth(spec.f());
    let smooth_g = check_smooth(spec.g());
    let (transversal, base_points) = match check_transversal(spec.f(), spec.g()) {
        Ok(r) => r,
        Err(Error::CountMismatch { expected, found }) => (
            CheckResult::fail(Vec::new(), format!("expected {expected} base points, found {found}")),
            Vec::new(),
        ),
        Err(e) => return Err(e),
    };
    let skipped = || CheckResult::inconclusive("not evaluated");
    if !(smooth_f.passed() && smooth_g.passed() && transversal.passed()) {
        let report = GenericityReport {
            smooth_f,
            smooth_g,
            transversal,
            nondegenerate: skipped(),
            distinct_values: skipped(),
        };
        return Ok((report, None));
    }
    let candidates = match find_candidates(spec, seed, precision) {
        Ok(c) => c,
        Err(e @ (Error::NoConvergence { .. } | Error::PositiveDimensional)) => {
            let report = GenericityReport {
                smooth_f,
                smooth_g,
                transversal,
                nondegenerate: CheckResult::inconclusive(e.to_string()),
                distinct_values: skipped(),
            };
            return Ok((report, None));
        }
        Err(e) => return Err(e),
    };
    let degenerate: Vec<[Complex64; 3]> = candidates
        .iter()
        .filter(|c| c.hessian.norm() <= 1e-8 * c.hessian_norm * c.hessian_norm)
        .map(|c| c.point)
        .collect();
    let nondegenerate = if degenerate.is_empty() {
        CheckResult::pass(format!("{} Morse critical points", candidates.len()))
    } else {
        CheckResult::fail(degenerate, "degenerate critical point")
    };
    let mut colliding = Vec::new();
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            if !values_distinct(candidates[i].value, candidates[j].value) {
                colliding.push(candidates[i].point);
                colliding.push(candidates[j].point);
            }
        }
    }
    let distinct_values = if colliding.is_empty() {
        CheckResult::pass("critical values pairwise distinct")
    } else {
        CheckResult::fail(colliding, "critical values collide")
    };
    let data = CriticalData {
        points: candidates.iter().map(|c| c.point).collect(),
        values: candidates.iter().map(|c| c.value).collect(),
        hessian_dets: candidates.iter().map(|c| c.hessian).collect(),
        a: critical_set_A(spec.p(), spec.q()),
        base_points,
        precision,
    };
    let report = GenericityReport { smooth_f, smooth_g, transversal, nondegenerate, distinct_values };
    Ok((report, Some(data)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exceptional_set() {
        assert!(critical_set_A(1, 1).is_empty());
        assert_eq!(critical_set_A(2, 1), vec![ExceptionalValue::Zero]);
        assert_eq!(critical_set_A(2, 3), vec![ExceptionalValue::Zero, ExceptionalValue::Infinity]);
    }

    #[test]
    fn cubic_pencil_has_twelve_morse_points() {
        let mut rng = rng::stream(1, "spec");
        let spec = PencilSpec::random(&mut rng, 1, 1, 3).unwrap();
        let data = critical_points(&spec, 1, Precision::Double).unwrap();
        assert_eq!(data.r(), 12);
        assert_eq!(data.base_points.len(), 9);
        assert!(data.min_value_separation() > 1e-6);
    }

    #[test]
    fn morse_form_matches_taylor_expansion() {
        let mut rng = rng::stream(2, "spec");
        let spec = PencilSpec::random(&mut rng, 1, 1, 3).unwrap();
        let data = critical_points(&spec, 2, Precision::Double).unwrap();
        let pt = data.points[0];
        let (k, u, v) = best_chart(pt);
        let f = |du: Complex64, dv: Complex64| spec.value(lift_chart(k, u + du, v + dv));
        let h = 1e-3;
        let e = Complex64::new(h, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let c0 = f(z, z);
        let huu = (f(e, z) - c0 * 2.0 + f(-e, z)) / (h * h);
        let hvv = (f(z, e) - c0 * 2.0 + f(z, -e)) / (h * h);
        let huv = (f(e, e) - f(e, -e) - f(-e, e) + f(-e, -e)) / (4.0 * h * h);
        let det = huu * hvv - huv * huv;
        assert!((c0 - data.values[0]).norm() < 1e-9 * c0.norm().max(1.0));
        assert!((det - data.hessian_dets[0]).norm() < 1e-3 * det.norm().max(1.0));
    }
}
