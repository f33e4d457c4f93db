//! Transport of a fiber model along a path of regular values.
//!
//! The x-points move with the parameter while the base point `x0` and the
//! puncture abscissae stay put. The lasso system is kept straight; each time
//! two points exchange their angular order around `x0` the lassos undergo a
//! Hurwitz move. `words[k]` expresses the current `k`-th lasso in the lassos
//! of the starting fiber carried along by the isotopy.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fiber::{angle_from, FiberModel, HomologyClass, PointKind};
use crate::genericity::PencilSpec;
use crate::lattice::IntMatrix;
use crate::numsolve::{match_roots, track, track_samples, TrackerConfig};
use crate::poly::{discriminant_y, FiberFamily, UniPoly};

const MAX_DEPTH: usize = 40;
const MAX_WORD: usize = 1 << 16;

pub type Word = Vec<i32>;
type Sample = (Complex64, Vec<Complex64>);


fn inverse(w: &[i32]) -> Word {
    w.iter().rev().map(|l| -l).collect()
}

fn product(parts: &[&[i32]]) -> Result<Word> {
    let mut out: Word = Vec::new();
    for p in parts {
        for &l in p.iter() {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
    }
    if out.len() > MAX_WORD {
        return Err(Error::Consistency("braid word grew too long".into()));
    }
    Ok(out)
}

#[derive(Clone)]
pub(crate) struct Transport<'a> {
    model: &'a FiberModel,
    fam: FiberFamily,
    /// The fiber over parameter `t` is the fiber over `t^power`.
    power: u32,
    t: Complex64,
    /// Current x-points by identity (identity = starting angular position).
    pts: Vec<Complex64>,
    branch_ids: Vec<usize>,
    /// `order[k]` is the identity at angular position `k`.
    order: Vec<usize>,
    words: Vec<Word>,
    /// Current roots over `x0`, by starting sheet.
    sheets: Vec<Complex64>,
    cfg: TrackerConfig,
}

/// Two branch points close together, by identity and angular position.
#[derive(Clone, Copy, Debug)]
pub struct MergingPair {
    pub ids: (usize, usize),
    pub positions: (usize, usize),
    pub distance: f64,
}

impl<'a> Transport<'a> {
    pub fn new(spec: &PencilSpec, model: &'a FiberModel, start: Complex64, power: u32, cfg: &TrackerConfig) -> Result<Self> {
        let param = start.powu(power);
        if (param - model.b).norm() > 1e-9 * model.b.norm().max(1.0) {
            return Err(Error::Consistency(format!("transport starts over {param}, model is over {}", model.b)));
        }
        let n = model.points.len();
        Ok(Self {
            model,
            fam: model.family(spec),
            power,
            t: start,
            pts: model.points.iter().map(|p| p.x).collect(),
            branch_ids: model.branch_positions(),
            order: (0..n).collect(),
            words: (1..=n as i32).map(|l| vec![l]).collect(),
            sheets: model.sheets.clone(),
            cfg: *cfg,
        })
    }

    pub fn position(&self) -> Complex64 {
        self.t
    }

    fn disc(&self, t: Complex64) -> UniPoly {
        discriminant_y(&self.fam.at(t.powu(self.power)))
    }

    fn track_branch(&self, path: &[Complex64], start: &[Complex64], cfg: &TrackerConfig) -> Result<Vec<Sample>> {
        Ok(track_samples(|t| self.disc(t), path, start, cfg)?.0)
    }

    fn branch_points(&self) -> Vec<Complex64> {
        self.branch_ids.iter().map(|&i| self.pts[i]).collect()
    }

    /// Move along a polyline starting at the current parameter.
    pub fn advance(&mut self, path: &[Complex64]) -> Result<()> {
        if path.len() < 2 {
            return Ok(());
        }
        if (path[0] - self.t).norm() > 1e-12 * self.t.norm().max(1.0) {
            return Err(Error::Consistency("path does not start at the current parameter".into()));
        }
        let x0 = self.model.x0;
        let power = self.power;
        let fam = &self.fam;
        let over_x0 = |t: Complex64| fam.at(t.powu(power)).at_x(x0);
        let sheets = track(over_x0, path, &self.sheets, &self.cfg)?.end;
        let samples = self.track_branch(path, &self.branch_points(), &self.cfg)?;
        for w in samples.windows(2) {
            self.step(&w[0], &w[1], 0)?;
        }
        self.sheets = sheets;
        self.t = *path.last().unwrap();
        Ok(())
    }

    fn configuration(&self, branch: &[Complex64]) -> Vec<Complex64> {
        let mut c = self.pts.clone();
        for (&i, &z) in self.branch_ids.iter().zip(branch) {
            c[i] = z;
        }
        c
    }

    fn sorted(&self, conf: &[Complex64]) -> Vec<usize> {
        let x0 = self.model.x0;
        let mut o: Vec<usize> = (0..conf.len()).collect();
        o.sort_by(|&a, &b| angle_from(x0, conf[a]).total_cmp(&angle_from(x0, conf[b])));
        o
    }

    fn step(&mut self, s: &Sample, e: &Sample, depth: usize) -> Result<()> {
        let x0 = self.model.x0;
        let (cs, ce) = (self.configuration(&s.1), self.configuration(&e.1));
        let ang = |z: Complex64| angle_from(x0, z);
        // a point crossing the ray below x0 only changes where the angular
        // order starts
        let pi = std::f64::consts::PI;
        let jumps: Vec<(usize, f64)> = self
            .branch_ids
            .iter()
            .map(|&i| (i, ang(ce[i]) - ang(cs[i])))
            .filter(|(_, d)| d.abs() > pi)
            .collect();
        let mut shift = vec![0.0; cs.len()];
        let mut rotated = false;
        if let [(i, d)] = jumps[..] {
            let n = self.order.len();
            if d < 0.0 && self.order[n - 1] == i {
                shift[i] = -2.0 * pi;
                rotated = true;
            } else if d > 0.0 && self.order[0] == i {
                shift[i] = 2.0 * pi;
                rotated = true;
            }
        }
        let resolvable_wrap = jumps.is_empty() || rotated;
        let ang_s = |i: usize| ang(cs[i]) + shift[i];
        let mut start_order = self.order.clone();
        if rotated {
            if shift.iter().any(|v| *v < 0.0) {
                start_order.rotate_right(1);
            } else {
                start_order.rotate_left(1);
            }
        }
        let new_order = self.sorted(&ce);
        let diff: Vec<usize> = (0..new_order.len()).filter(|&k| new_order[k] != start_order[k]).collect();
        let motion = |i: usize| (ce[i] - cs[i]).norm() / (cs[i] - x0).norm().min((ce[i] - x0).norm());
        let single = diff.len() == 2 && diff[1] == diff[0] + 1 && new_order[diff[0]] == start_order[diff[1]];
        // a pair whose angular gap is small against its motion might swap twice
        let ambiguous = (0..new_order.len().saturating_sub(1)).any(|k| {
            if single && k == diff[0] {
                return false;
            }
            let (a, b) = (new_order[k], new_order[k + 1]);
            let gap = (ang_s(b) - ang_s(a)).min(ang(ce[b]) - ang(ce[a]));
            gap < 2.0 * (motion(a) + motion(b))
        });
        if resolvable_wrap && (diff.is_empty() || single) && !ambiguous {
            if rotated {
                self.order = start_order;
                if shift.iter().any(|v| *v < 0.0) {
                    self.words.rotate_right(1);
                } else {
                    self.words.rotate_left(1);
                }
            }
            if single {
                self.swap(diff[0], &cs, &ce)?;
            }
            self.pts = ce;
            return Ok(());
        }
        if depth >= MAX_DEPTH {
            return Err(Error::Consistency("cannot resolve the braid of the x-points".into()));
        }
        let sub = TrackerConfig { initial_step: 0.25, min_step: self.cfg.min_step.min(1e-3), ..self.cfg };
        let samples = self.track_branch(&[s.0, e.0], &s.1, &sub)?;
        if samples.len() == 2 {
            // tracker took a single step: bisect explicitly
            let mid = (s.0 + e.0) * 0.5;
            let half = self.track_branch(&[s.0, mid], &s.1, &sub)?;
            let m = half.last().unwrap().clone();
            self.step(s, &m, depth + 1)?;
            let rest = self.track_branch(&[mid, e.0], &m.1, &sub)?;
            for w in rest.windows(2) {
                self.step(&w[0], &w[1], depth + 1)?;
            }
            return Ok(());
        }
        for w in samples.windows(2) {
            self.step(&w[0], &w[1], depth + 1)?;
        }
        Ok(())
    }

    /// Hurwitz move for the points at positions `k` and `k + 1` exchanging order.
    fn swap(&mut self, k: usize, cs: &[Complex64], ce: &[Complex64]) -> Result<()> {
        let x0 = self.model.x0;
        let (a, b) = (self.order[k], self.order[k + 1]);
        let at = |i: usize, t: f64| cs[i] + (ce[i] - cs[i]) * t;
        let cross = |t: f64| ((at(a, t) - x0).conj() * (at(b, t) - x0)).im;
        let (mut lo, mut hi) = (0.0, 1.0);
        let sign_lo = cross(lo) > 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if (cross(mid) > 0.0) == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let (da, db) = ((at(a, t) - x0).norm(), (at(b, t) - x0).norm());
        if (da - db).abs() <= 1e-9 * da.max(db) {
            return Err(Error::Consistency("two x-points collide during transport".into()));
        }
        let (wa, wb) = (self.words[k].clone(), self.words[k + 1].clone());
        if db > da {
            // the point coming from behind passes beyond its neighbor
            self.words[k] = product(&[&wa, &wb, &inverse(&wa)])?;
            self.words[k + 1] = wa;
        } else {
            self.words[k + 1] = product(&[&inverse(&wb), &wa, &wb])?;
            self.words[k] = wb;
        }
        self.order.swap(k, k + 1);
        Ok(())
    }

    /// Chain on the starting sheet graph of the lift of a word.
    fn lift_chain(&self, word: &[i32], sheet: usize) -> Vec<i64> {
        self.model.graph.chain(&self.model.graph.lift_word(word, sheet))
    }

    /// Closest pair of branch points, when that pair is much closer than
    /// either point is to any other x-point.
    pub fn merging_pair(&self, isolation: f64) -> Option<MergingPair> {
        let n = self.order.len();
        let is_branch = |i: usize| self.model.points[i].kind == PointKind::Branch;
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            for j in i + 1..n {
                if is_branch(i) && is_branch(j) {
                    let d = (self.pts[i] - self.pts[j]).norm();
                    if best.is_none_or(|b| d < b.0) {
                        best = Some((d, i, j));
                    }
                }
            }
        }
        let (d, i, j) = best?;
        let others = (0..n)
            .filter(|&k| k != i && k != j)
            .map(|k| (self.pts[k] - self.pts[i]).norm().min((self.pts[k] - self.pts[j]).norm()))
            .fold(f64::INFINITY, f64::min);
        let (pi, pj) = (self.order.iter().position(|&x| x == i)?, self.order.iter().position(|&x| x == j)?);
        (d < isolation * others).then_some(MergingPair { ids: (i, j), positions: (pi.min(pj), pi.max(pj)), distance: d })
    }

    /// Class, in the starting fiber, of a loop around just the branch points
    /// at positions `a < b`, lifted to a sheet they exchange. Its tail passes
    /// clockwise of the x-points lying angularly between them and in front.
    pub fn pair_cycle(&self, a: usize, b: usize) -> Result<HomologyClass> {
        let g = &self.model.graph;
        let x0 = self.model.x0;
        let mid = (self.pts[self.order[a]] + self.pts[self.order[b]]) * 0.5;
        let front: Vec<usize> =
            (a + 1..b).filter(|&k| (self.pts[self.order[k]] - x0).norm() < (mid - x0).norm()).collect();
        let mut conj: Word = Vec::new();
        for &k in &front {
            conj = product(&[&conj, &self.words[k]])?;
        }
        let w1 = self.words[a].clone();
        let w2 = product(&[&conj, &self.words[b], &inverse(&conj)])?;
        let m = g.m;
        let sheet = (0..m)
            .find(|&j| g.word_perm(&w1, j) != j)
            .ok_or_else(|| Error::Consistency("merging lasso does not branch".into()))?;
        if (0..m).any(|j| g.word_perm(&w1, j) != g.word_perm(&w2, j)) {
            return Err(Error::Consistency("merging branch points have different monodromy".into()));
        }
        let w = product(&[&w1, &w2])?;
        self.model.class_of_chain(&self.lift_chain(&w, sheet))
    }

    /// Monodromy matrix of the closed path followed so far.
    pub fn finish(&self) -> Result<IntMatrix> {
        let model = self.model;
        let scale = model.points.iter().map(|p| (p.x - model.x0).norm()).fold(0.0, f64::max);
        for (k, p) in model.points.iter().enumerate() {
            if (self.pts[self.order[k]] - p.x).norm() > 1e-6 * scale {
                return Err(Error::Consistency("path is not closed on the x-points".into()));
            }
        }
        // tau[i]: starting sheet now occupied by the sheet that started at i
        let tau = match_roots(&model.sheets, &self.sheets)?;
        let m = model.degree;
        let mut tau_inv = vec![0; m];
        for (i, &t) in tau.iter().enumerate() {
            tau_inv[t] = i;
        }
        let g = &model.graph;
        let ne = g.edges();
        // image of every edge under the inverse of the monodromy
        let mut images = Vec::with_capacity(ne);
        for e in 0..ne {
            let (k, l) = (e / m, e % m);
            let from = tau_inv[l];
            if tau_inv[g.head(e)] != g.word_perm(&self.words[k], from) {
                return Err(Error::Consistency("transported lasso lands on the wrong sheet".into()));
            }
            images.push(self.lift_chain(&self.words[k], from));
        }
        let h = &model.homology;
        let rank = model.rank();
        let mut cols = Vec::with_capacity(rank);
        for t in 0..rank {
            let coords = h.section.column(t);
            let mut cycle = vec![0i64; ne];
            for (i, &c) in coords.iter().enumerate() {
                if c != 0 {
                    for s in h.fundamental_cycle(g, i) {
                        cycle[s.edge] += if s.forward { c } else { -c };
                    }
                }
            }
            let mut image = vec![0i64; ne];
            for (e, &c) in cycle.iter().enumerate() {
                if c != 0 {
                    for (acc, v) in image.iter_mut().zip(&images[e]) {
                        *acc += c * v;
                    }
                }
            }
            cols.push(h.class_of_chain(&image)?);
        }
        let inv = IntMatrix::from_columns(&cols, rank);
        let m = inv.inverse_unimodular()?;
        let j = model.intersection_matrix();
        if m.transpose().mul(j)?.mul(&m)? != *j {
            return Err(Error::Consistency("monodromy does not preserve the intersection form".into()));
        }
        Ok(m)
    }
}
