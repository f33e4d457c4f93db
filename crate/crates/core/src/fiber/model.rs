use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::{homology, Cell, Homology, SheetGraph, Step, Walk};
use crate::error::{Error, Result};
use crate::genericity::PencilSpec;
use crate::lattice::IntMatrix;
use crate::numsolve::{circle, min_separation, track, track_samples, uni_roots, TrackerConfig};
use crate::poly::{discriminant_y, BiPoly, ChartMap, FiberFamily};
use crate::rng;

const CHART_ATTEMPTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PointKind {
    Branch,
    /// Image of base point `index`; `y` is its chart ordinate and `sheet` the
    /// sheet over the base point that reaches it along the straight segment.
    Puncture { index: usize, y: Complex64, sheet: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XPoint {
    pub x: Complex64,
    pub kind: PointKind,
    /// Radius of the circle of its lasso.
    pub radius: f64,
}

/// Class in `H_1` of the fiber, in the model's basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HomologyClass(pub Vec<i64>);

/// A closed curve on the fiber made of lifted lassos. Each segment is the
/// lasso around x-point `point` lifted from sheet `sheet`, traversed
/// backwards when `forward` is false.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclePath {
    pub segments: Vec<Segment>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub point: usize,
    pub sheet: usize,
    pub forward: bool,
}

impl CyclePath {
    pub fn reversed(&self) -> Self {
        let segments = self.segments.iter().rev().map(|s| Segment { forward: !s.forward, ..*s }).collect();
        Self { segments }
    }

    pub fn concat(&self, other: &Self) -> Self {
        Self { segments: self.segments.iter().chain(&other.segments).copied().collect() }
    }
}

/// Combinatorial model of a smooth fiber `L_b`: its projection to the
/// x-axis of a random chart, the lasso system at a base point `x0`, and the
/// resulting homology with intersection form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberModel {
    pub b: Complex64,
    pub chart: ChartMap,
    pub degree: usize,
    pub genus: usize,
    pub x0: Complex64,
    /// Branch points and puncture abscissae in counterclockwise order around `x0`.
    pub points: Vec<XPoint>,
    /// Roots of the fiber over `x0`, sorted lexicographically.
    pub sheets: Vec<Complex64>,
    pub graph: SheetGraph,
    pub homology: Homology,
}

impl FiberModel {
    /// Rank of `H_1(L_b)`.
    pub fn rank(&self) -> usize {
        self.homology.rank()
    }

    pub fn intersection_matrix(&self) -> &IntMatrix {
        &self.homology.intersection
    }

    pub fn family(&self, spec: &PencilSpec) -> FiberFamily {
        FiberFamily::new(spec, &self.chart)
    }

    pub fn punctures(&self) -> usize {
        self.points.iter().filter(|p| matches!(p.kind, PointKind::Puncture { .. })).count()
    }

    /// Positions (in angular order) of the branch points.
    pub fn branch_positions(&self) -> Vec<usize> {
        (0..self.points.len()).filter(|&k| self.points[k].kind == PointKind::Branch).collect()
    }

    /// Polyline of the `k`-th lasso: out from `x0`, once counterclockwise
    /// around the point, and back.
    pub fn lasso(&self, k: usize) -> Vec<Complex64> {
        lasso(self.x0, self.points[k].x, self.points[k].radius)
    }

    /// Angle of a point as seen from `x0`, with the cut pointing straight down.
    pub fn angle(&self, x: Complex64) -> f64 {
        angle_from(self.x0, x)
    }

    fn walk(&self, path: &CyclePath) -> Result<Walk> {
        let walk: Walk = path
            .segments
            .iter()
            .map(|s| {
                if s.point >= self.points.len() || s.sheet >= self.degree {
                    return Err(Error::Consistency("cycle segment out of range".into()));
                }
                Ok(Step { edge: self.graph.edge(s.point, s.sheet), forward: s.forward })
            })
            .collect::<Result<_>>()?;
        if !self.graph.is_closed(&walk) {
            return Err(Error::Consistency("cycle path is not closed".into()));
        }
        Ok(walk)
    }

    fn path_of(&self, walk: &[Step]) -> CyclePath {
        let m = self.degree;
        CyclePath {
            segments: walk.iter().map(|s| Segment { point: s.edge / m, sheet: s.edge % m, forward: s.forward }).collect(),
        }
    }

    /// Class of a closed cycle path.
    pub fn express(&self, path: &CyclePath) -> Result<HomologyClass> {
        let walk = self.walk(path)?;
        Ok(HomologyClass(self.homology.class_of_chain(&self.graph.chain(&walk))?))
    }

    /// Class of an integer chain on the sheet graph edges.
    pub fn class_of_chain(&self, chain: &[i64]) -> Result<HomologyClass> {
        Ok(HomologyClass(self.homology.class_of_chain(chain)?))
    }

    /// Cycle paths representing the basis, in order.
    pub fn basis_paths(&self) -> Vec<CyclePath> {
        (0..self.rank())
            .map(|t| self.path_of(&self.homology.walk_of(&self.graph, &self.homology.section.column(t))))
            .collect()
    }

    /// Intersection number of two closed cycle paths, computed on the curves.
    pub fn intersect_paths(&self, a: &CyclePath, b: &CyclePath) -> Result<i64> {
        Ok(self.graph.intersection(&super::graph::reduce(&self.walk(a)?), &super::graph::reduce(&self.walk(b)?)))
    }

    /// Small positive loop around base point `index`.
    pub fn puncture_path(&self, index: usize) -> Option<CyclePath> {
        self.points.iter().enumerate().find_map(|(k, p)| match p.kind {
            PointKind::Puncture { index: i, sheet, .. } if i == index => {
                Some(CyclePath { segments: vec![Segment { point: k, sheet, forward: true }] })
            }
            _ => None,
        })
    }

    pub fn puncture_class(&self, index: usize) -> Result<HomologyClass> {
        let path = self.puncture_path(index).ok_or_else(|| Error::Consistency(format!("no base point {index}")))?;
        self.express(&path)
    }
}

pub(crate) fn angle_from(x0: Complex64, x: Complex64) -> f64 {
    ((x - x0) * Complex64::new(0.0, -1.0)).arg()
}

pub(crate) fn lasso(x0: Complex64, s: Complex64, radius: f64) -> Vec<Complex64> {
    let mut path = vec![x0];
    path.extend(circle(s, radius, (x0 - s).arg(), true));
    path.push(x0);
    path
}

fn dist_to_segment(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let t = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

fn sort_lex(z: &mut [Complex64]) {
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Simple roots of a polynomial expected to have exactly `count` of them.
fn simple_roots(p: &crate::poly::UniPoly, count: usize) -> Result<Vec<Complex64>> {
    let rs = uni_roots(p)?;
    if !rs.is_simple() || rs.roots.len() != count {
        return Err(Error::NonSimpleBranching(format!("expected {count} simple roots, found {}", rs.roots.len())));
    }
    Ok(rs.roots)
}

/// Build the model of the fiber over a regular value `b`.
///
/// `base_points` are the projective base points of the pencil. Only pencils
/// with `min(p, q) = 1` are supported, where every fiber is smooth at the
/// base points.
pub fn build_fiber(
    spec: &PencilSpec,
    b: Complex64,
    base_points: &[[Complex64; 3]],
    seed: u64,
    cfg: &TrackerConfig,
) -> Result<FiberModel> {
    if spec.p().min(spec.q()) != 1 {
        return Err(Error::Unsupported("fibers are singular at the base points when min(p, q) > 1".into()));
    }
    if base_points.len() != spec.base_point_count() {
        return Err(Error::CountMismatch { expected: spec.base_point_count(), found: base_points.len() });
    }
    let mut last = Error::InadmissibleChart("no chart attempted".into());
    for attempt in 0..CHART_ATTEMPTS {
        let mut rng = rng::stream(seed, &format!("fiber-chart-{attempt}"));
        let chart = ChartMap::random_unitary(&mut rng);
        match build_in_chart(spec, b, base_points, chart, cfg) {
            Ok(model) => return Ok(model),
            Err(e @ (Error::InadmissibleChart(_) | Error::NonSimpleBranching(_) | Error::NoConvergence { .. })) => {
                last = e
            }
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

fn build_in_chart(
    spec: &PencilSpec,
    b: Complex64,
    base_points: &[[Complex64; 3]],
    chart: ChartMap,
    cfg: &TrackerConfig,
) -> Result<FiberModel> {
    let fam = FiberFamily::new(spec, &chart);
    let m = fam.degree();
    let fiber = fam.at(b);
    if fam.leading(b).norm() < 1e-6 * fiber.norm_inf() {
        return Err(Error::InadmissibleChart("fiber nearly passes through the vertical point".into()));
    }
    let mut punctures = Vec::with_capacity(base_points.len());
    for pt in base_points {
        let (x, y) = chart
            .to_affine(*pt, 1e-6)
            .ok_or_else(|| Error::InadmissibleChart("base point at infinity".into()))?;
        punctures.push((x, y));
    }
    let branch = simple_roots(&discriminant_y(&fiber), m * (m - 1))?;

    let all_x: Vec<Complex64> = branch.iter().copied().chain(punctures.iter().map(|p| p.0)).collect();
    let n = all_x.len();
    let center = all_x.iter().sum::<Complex64>() / n as f64;
    let spread = all_x.iter().map(|x| (x - center).norm()).fold(0.0, f64::max);
    if min_separation(&all_x) < 1e-6 * spread.max(1.0) {
        return Err(Error::InadmissibleChart("x-points nearly collide".into()));
    }
    let x0 = center - Complex64::new(0.0, 3.0 * spread + 1.0);

    // angular order, then lasso radii
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| angle_from(x0, all_x[a]).total_cmp(&angle_from(x0, all_x[b])));
    let xs: Vec<Complex64> = order.iter().map(|&i| all_x[i]).collect();
    let radii: Vec<f64> = (0..n)
        .map(|k| {
            let mut r = f64::INFINITY;
            for j in 0..n {
                if j != k {
                    r = r.min((xs[j] - xs[k]).norm() / 3.0);
                    r = r.min(0.5 * dist_to_segment(xs[k], x0, xs[j]));
                }
            }
            r
        })
        .collect();

    let mut sheets = simple_roots(&fiber.at_x(x0), m)?;
    sort_lex(&mut sheets);
    let over_x = |x: Complex64| fiber.at_x(x);

    let perms: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|k| {
            if order[k] >= branch.len() {
                return Ok((0..m).collect());
            }
            let tr = track(over_x, &lasso(x0, xs[k], radii[k]), &sheets, cfg)?;
            let perm = tr.permutation.expect("lassos are closed");
            let moved = (0..m).filter(|&j| perm[j] != j).count();
            if moved != 2 {
                return Err(Error::NonSimpleBranching(format!("lasso {k} moves {moved} sheets")));
            }
            Ok(perm)
        })
        .collect::<Result<_>>()?;

    let mut total: Vec<usize> = (0..m).collect();
    for p in &perms {
        total = total.iter().map(|&j| p[j]).collect();
    }
    if total.iter().enumerate().any(|(j, &t)| j != t) {
        return Err(Error::Consistency("lasso permutations do not multiply to the identity".into()));
    }

    let mut points = Vec::with_capacity(n);
    for k in 0..n {
        let kind = if order[k] < branch.len() {
            PointKind::Branch
        } else {
            let index = order[k] - branch.len();
            let (x, y) = punctures[index];
            let sheet = puncture_sheet(&fiber, x0, x, y, &sheets, cfg)?;
            PointKind::Puncture { index, y, sheet }
        };
        points.push(XPoint { x: xs[k], kind, radius: radii[k] });
    }

    let graph = SheetGraph::new(m, perms)?;
    let (cells, radical) = cells_and_radical(&graph, &points);
    let homology = homology(&graph, &cells, &radical)?;
    let genus = (m - 1) * (m - 2) / 2;
    // Riemann-Hurwitz for simple branching against the degree-genus formula
    let branch_genus = (branch.len() + 2 - 2 * m) / 2;
    if homology.genus != genus || branch_genus != genus {
        return Err(Error::Consistency(format!(
            "genus {} from the intersection form, {branch_genus} from branching, expected {genus}",
            homology.genus
        )));
    }
    if homology.rank() != 2 * genus + base_points.len() - 1 {
        return Err(Error::Consistency(format!("homology has rank {}", homology.rank())));
    }
    Ok(FiberModel { b, chart, degree: m, genus, x0, points, sheets, graph, homology })
}

/// Sheet over `x0` carried to the base point `(x, y)` along the straight segment.
fn puncture_sheet(
    fiber: &BiPoly,
    x0: Complex64,
    x: Complex64,
    y: Complex64,
    sheets: &[Complex64],
    cfg: &TrackerConfig,
) -> Result<usize> {
    let (samples, _) = track_samples(|t| fiber.at_x(t), &[x0, x], sheets, cfg)?;
    let end = &samples.last().unwrap().1;
    let dists: Vec<f64> = end.iter().map(|r| (r - y).norm()).collect();
    let best = (0..end.len()).min_by(|&a, &b| dists[a].total_cmp(&dists[b])).unwrap();
    if dists[best] > min_separation(end) / 3.0 {
        return Err(Error::Consistency("base point is not over any tracked sheet".into()));
    }
    Ok(best)
}

/// Cells filling the discs over every x-point except the punctures, and
/// the discs at infinity; and the puncture loops spanning the radical.
fn cells_and_radical(graph: &SheetGraph, points: &[XPoint]) -> (Vec<Cell>, Vec<Walk>) {
    let m = graph.m;
    let mut cells = Vec::new();
    let mut radical = Vec::new();
    for (k, p) in points.iter().enumerate() {
        let letter = (k + 1) as i32;
        match p.kind {
            PointKind::Branch => {
                let mut done = vec![false; m];
                for j in 0..m {
                    if done[j] {
                        continue;
                    }
                    let mut word = vec![letter];
                    let mut cur = graph.perms[k][j];
                    done[j] = true;
                    while cur != j {
                        done[cur] = true;
                        word.push(letter);
                        cur = graph.perms[k][cur];
                    }
                    cells.push(Cell { walk: graph.lift_word(&word, j) });
                }
            }
            PointKind::Puncture { index, sheet, .. } => {
                for j in (0..m).filter(|&j| j != sheet) {
                    cells.push(Cell { walk: graph.lift_word(&[letter], j) });
                }
                if index + 1 < count_punctures(points) {
                    radical.push((index, graph.lift_word(&[letter], sheet)));
                }
            }
        }
    }
    let around: Vec<i32> = (1..=points.len() as i32).collect();
    for j in 0..m {
        cells.push(Cell { walk: graph.lift_word(&around, j) });
    }
    radical.sort_by_key(|(i, _)| *i);
    (cells, radical.into_iter().map(|(_, w)| w).collect())
}

fn count_punctures(points: &[XPoint]) -> usize {
    points.iter().filter(|p| matches!(p.kind, PointKind::Puncture { .. })).count()
}
