//! The sheet graph of a branched cover of the line and the integer homology
//! of the punctured surface it spans.
//!
//! Vertices are the sheets over the base point. Edge `(k, j)` is the lift of
//! the `k`-th lasso starting on sheet `j`; it ends on sheet `perms[k][j]`.
//! Lassos are numbered in counterclockwise order around the base point and
//! each one leaves slightly clockwise of where it returns, which fixes the
//! cyclic order of half-edges at every vertex.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, smith_normal_form, IntMatrix};

/// One traversal of an edge of the sheet graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    pub edge: usize,
    pub forward: bool,
}

pub type Walk = Vec<Step>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheetGraph {
    pub m: usize,
    pub perms: Vec<Vec<usize>>,
}

impl SheetGraph {
    pub fn new(m: usize, perms: Vec<Vec<usize>>) -> Result<Self> {
        for p in &perms {
            let mut seen = vec![false; m];
            if p.len() != m || p.iter().any(|&j| j >= m || std::mem::replace(&mut seen[j], true)) {
                return Err(Error::Consistency("sheet permutation is not a bijection".into()));
            }
        }
        Ok(Self { m, perms })
    }

    pub fn points(&self) -> usize {
        self.perms.len()
    }

    pub fn edges(&self) -> usize {
        self.m * self.perms.len()
    }

    pub fn edge(&self, k: usize, j: usize) -> usize {
        k * self.m + j
    }

    pub fn tail(&self, e: usize) -> usize {
        e % self.m
    }

    pub fn head(&self, e: usize) -> usize {
        self.perms[e / self.m][e % self.m]
    }

    /// Vertex reached after the step, and the vertex it starts from.
    pub fn step_ends(&self, s: Step) -> (usize, usize) {
        if s.forward {
            (self.tail(s.edge), self.head(s.edge))
        } else {
            (self.head(s.edge), self.tail(s.edge))
        }
    }

    /// Half-edge position of the arrival at the end of a step.
    fn arrival(&self, s: Step) -> usize {
        let k = s.edge / self.m;
        if s.forward {
            2 * k + 1
        } else {
            2 * k
        }
    }

    /// Half-edge position of the departure at the start of a step.
    fn departure(&self, s: Step) -> usize {
        let k = s.edge / self.m;
        if s.forward {
            2 * k
        } else {
            2 * k + 1
        }
    }

    /// Composite sheet permutation of a word of lassos, letters `±(k + 1)`.
    pub fn word_perm(&self, word: &[i32], start: usize) -> usize {
        let mut cur = start;
        for &l in word {
            let k = l.unsigned_abs() as usize - 1;
            cur = if l > 0 { self.perms[k][cur] } else { self.perms[k].iter().position(|&x| x == cur).unwrap() };
        }
        cur
    }

    /// Lift of a word of lassos from a sheet, as a walk.
    pub fn lift_word(&self, word: &[i32], start: usize) -> Walk {
        let mut cur = start;
        let mut walk = Vec::with_capacity(word.len());
        for &l in word {
            let k = l.unsigned_abs() as usize - 1;
            if l > 0 {
                walk.push(Step { edge: self.edge(k, cur), forward: true });
                cur = self.perms[k][cur];
            } else {
                let prev = self.perms[k].iter().position(|&x| x == cur).unwrap();
                walk.push(Step { edge: self.edge(k, prev), forward: false });
                cur = prev;
            }
        }
        walk
    }

    pub fn is_closed(&self, walk: &[Step]) -> bool {
        walk.windows(2).all(|w| self.step_ends(w[0]).1 == self.step_ends(w[1]).0)
            && walk.first().is_none_or(|f| self.step_ends(*f).0 == self.step_ends(*walk.last().unwrap()).1)
    }

    pub fn chain(&self, walk: &[Step]) -> Vec<i64> {
        let mut c = vec![0i64; self.edges()];
        for s in walk {
            c[s.edge] += if s.forward { 1 } else { -1 };
        }
        c
    }

    /// Algebraic intersection number of two closed walks; the second walk is
    /// pushed off to its left, so crossings occur only inside vertex discs.
    pub fn intersection(&self, a: &[Step], b: &[Step]) -> i64 {
        let circle = 8 * self.points() as i64;
        let visits = |w: &[Step]| -> Vec<(usize, i64, i64)> {
            (0..w.len())
                .map(|t| {
                    let (prev, next) = (w[t], w[(t + 1) % w.len()]);
                    (self.step_ends(prev).1, self.arrival(prev) as i64, self.departure(next) as i64)
                })
                .collect()
        };
        let in_arc = |x: i64, from: i64, to: i64| {
            let d = (x - from).rem_euclid(circle);
            d > 0 && d < (to - from).rem_euclid(circle)
        };
        let (va, vb) = (visits(a), visits(b));
        let mut total = 0;
        for &(v, ai, ao) in &va {
            let (ai, ao) = (4 * ai, 4 * ao);
            for &(w, bi, bo) in &vb {
                if v != w {
                    continue;
                }
                let (bi, bo) = ((4 * bi - 1).rem_euclid(circle), (4 * bo + 1).rem_euclid(circle));
                match (in_arc(bi, ai, ao), in_arc(bo, ai, ao)) {
                    (true, false) => total += 1,
                    (false, true) => total -= 1,
                    _ => {}
                }
            }
        }
        total
    }
}

/// Remove immediate backtracks, keeping the starting vertex.
pub fn reduce_free(walk: &[Step]) -> Walk {
    let mut out: Walk = Vec::with_capacity(walk.len());
    for &s in walk {
        if out.last().is_some_and(|l| l.edge == s.edge && l.forward != s.forward) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    out
}

/// Remove immediate backtracks, including across the closing point.
pub fn reduce(walk: &[Step]) -> Walk {
    let mut out = reduce_free(walk);
    while out.len() >= 2 {
        let (f, l) = (out[0], out[out.len() - 1]);
        if f.edge == l.edge && f.forward != l.forward {
            out.pop();
            out.remove(0);
        } else {
            break;
        }
    }
    out
}

pub fn reverse(walk: &[Step]) -> Walk {
    walk.iter().rev().map(|s| Step { edge: s.edge, forward: !s.forward }).collect()
}

/// A two-cell attached along a closed walk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub walk: Walk,
}

/// Integer first homology of the surface obtained by attaching cells to the
/// sheet graph, with a symplectic-then-radical basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homology {
    /// Edges outside the spanning tree; coordinate `i` of a cycle is its
    /// coefficient on `nontree[i]`.
    pub nontree: Vec<usize>,
    /// Walk from the root sheet to each sheet along the tree.
    pub tree_paths: Vec<Walk>,
    /// Class coordinates of a cycle: `projection * cycle_coordinates`.
    pub projection: IntMatrix,
    /// Columns are cycle coordinates of basis representatives.
    pub section: IntMatrix,
    pub intersection: IntMatrix,
    pub genus: usize,
    /// Cycle-space dimension and number of attached cells.
    pub cycle_rank: usize,
    pub cells: usize,
}

impl Homology {
    pub fn rank(&self) -> usize {
        self.projection.rows()
    }

    pub fn cycle_coordinates(&self, chain: &[i64]) -> Vec<i64> {
        self.nontree.iter().map(|&e| chain[e]).collect()
    }

    pub fn class_of_chain(&self, chain: &[i64]) -> Result<Vec<i64>> {
        self.projection.mul_vec(&self.cycle_coordinates(chain))
    }

    /// Closed walk at the root sheet representing a cycle-coordinate vector.
    pub fn walk_of(&self, graph: &SheetGraph, coords: &[i64]) -> Walk {
        let mut w = Walk::new();
        for (i, &c) in coords.iter().enumerate() {
            let cyc = self.fundamental_cycle(graph, i);
            let piece = if c >= 0 { cyc } else { reverse(&cyc) };
            for _ in 0..c.unsigned_abs() {
                w.extend_from_slice(&piece);
            }
        }
        reduce_free(&w)
    }

    /// Fundamental cycle of the `i`-th non-tree edge, based at sheet 0.
    pub fn fundamental_cycle(&self, graph: &SheetGraph, i: usize) -> Walk {
        let e = self.nontree[i];
        let mut w = self.tree_paths[graph.tail(e)].clone();
        w.push(Step { edge: e, forward: true });
        w.extend(reverse(&self.tree_paths[graph.head(e)]));
        reduce_free(&w)
    }
}

/// Homology of the sheet graph with the given cells attached.
///
/// `radical_walks` are closed walks whose classes replace the radical part
/// of the basis, in order; they must span the radical of the intersection
/// form.
pub fn homology(graph: &SheetGraph, cells: &[Cell], radical_walks: &[Walk]) -> Result<Homology> {
    let (m, ne) = (graph.m, graph.edges());
    // spanning tree by breadth-first search from sheet 0
    let mut tree_paths: Vec<Option<Walk>> = vec![None; m];
    tree_paths[0] = Some(Vec::new());
    let mut in_tree = vec![false; ne];
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for e in 0..ne {
            for forward in [true, false] {
                let s = Step { edge: e, forward };
                let (from, to) = graph.step_ends(s);
                if from == v && tree_paths[to].is_none() {
                    let mut p = tree_paths[v].clone().unwrap();
                    p.push(s);
                    tree_paths[to] = Some(p);
                    in_tree[e] = true;
                    queue.push_back(to);
                }
            }
        }
    }
    let tree_paths: Vec<Walk> = tree_paths
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Consistency("sheet graph is disconnected".into()))?;
    let nontree: Vec<usize> = (0..ne).filter(|&e| !in_tree[e]).collect();
    let n_cyc = nontree.len();
    debug_assert_eq!(n_cyc, ne + 1 - m);

    let mut h = Homology {
        nontree,
        tree_paths,
        projection: IntMatrix::identity(n_cyc),
        section: IntMatrix::identity(n_cyc),
        intersection: IntMatrix::zeros(n_cyc, n_cyc),
        genus: 0,
        cycle_rank: n_cyc,
        cells: cells.len(),
    };

    let fund: Vec<Walk> = (0..n_cyc).map(|i| reduce(&h.fundamental_cycle(graph, i))).collect();
    let mut j_fund = IntMatrix::zeros(n_cyc, n_cyc);
    for a in 0..n_cyc {
        for b in a + 1..n_cyc {
            let v = graph.intersection(&fund[a], &fund[b]);
            j_fund.set(a, b, v);
            j_fund.set(b, a, -v);
        }
    }

    let mut rel_rows = Vec::with_capacity(cells.len());
    for c in cells {
        if !graph.is_closed(&c.walk) {
            return Err(Error::Consistency("cell boundary is not closed".into()));
        }
        rel_rows.push(h.cycle_coordinates(&graph.chain(&c.walk)));
    }
    let rel = IntMatrix::from_rows(rel_rows.clone())?;
    // boundaries of cells pair trivially with every cycle
    for r in &rel_rows {
        if j_fund.mul_vec(r)?.iter().any(|v| *v != 0) {
            return Err(Error::Consistency("cell boundary has nonzero intersection".into()));
        }
    }
    let snf = smith_normal_form(&rel)?;
    if snf.invariants().iter().any(|d| *d != 1) {
        return Err(Error::Consistency(format!("torsion in homology: {:?}", snf.invariants())));
    }
    let s = snf.rank;
    let hr = n_cyc - s;
    let mut p0 = IntMatrix::zeros(hr, n_cyc);
    let mut s0 = IntMatrix::zeros(n_cyc, hr);
    for t in 0..hr {
        for i in 0..n_cyc {
            p0.set(t, i, snf.v.get(i, s + t));
            s0.set(i, t, snf.v_inv.get(s + t, i));
        }
    }
    let j0 = s0.transpose().mul(&j_fund)?.mul(&s0)?;
    let (sk, inv) = lattice::skew_normal_form(&j0)?;
    if inv.iter().any(|d| *d != 1) {
        return Err(Error::Consistency(format!("intersection form is not unimodular: {inv:?}")));
    }
    let g = inv.len();
    if radical_walks.len() != hr - 2 * g {
        return Err(Error::Consistency(format!("radical has rank {}, {} loops given", hr - 2 * g, radical_walks.len())));
    }
    let mut cols: Vec<Vec<i64>> = (0..2 * g).map(|c| sk.column(c)).collect();
    for w in radical_walks {
        if !graph.is_closed(w) {
            return Err(Error::Consistency("radical walk is not closed".into()));
        }
        cols.push(p0.mul_vec(&h.cycle_coordinates(&graph.chain(w)))?);
    }
    let basis = IntMatrix::from_columns(&cols, hr);
    let basis_inv = basis.inverse_unimodular()?;
    h.projection = basis_inv.mul(&p0)?;
    h.section = s0.mul(&basis)?;
    h.intersection = basis.transpose().mul(&j0)?.mul(&basis)?;
    h.genus = g;
    debug_assert!(h.projection.mul(&h.section)?.is_identity());
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_cover(branch: usize, punctures: &[usize]) -> (SheetGraph, Vec<Cell>, Vec<Walk>) {
        let n = branch + punctures.len();
        let mut perms = vec![vec![1, 0]; branch];
        perms.extend(std::iter::repeat_n(vec![0, 1], punctures.len()));
        let g = SheetGraph::new(2, perms).unwrap();
        let mut cells = Vec::new();
        for k in 0..branch {
            cells.push(Cell { walk: g.lift_word(&[(k + 1) as i32, (k + 1) as i32], 0) });
        }
        for (r, &sheet) in punctures.iter().enumerate() {
            let k = branch + r;
            cells.push(Cell { walk: vec![Step { edge: g.edge(k, 1 - sheet), forward: true }] });
        }
        let all: Vec<i32> = (1..=n as i32).collect();
        for j in 0..2 {
            cells.push(Cell { walk: g.lift_word(&all, j) });
        }
        let radical: Vec<Walk> = punctures
            .iter()
            .enumerate()
            .take(punctures.len().saturating_sub(1))
            .map(|(r, &sheet)| vec![Step { edge: g.edge(branch + r, sheet), forward: true }])
            .collect();
        (g, cells, radical)
    }

    #[test]
    fn torus_from_four_branch_points() {
        let (g, cells, rad) = double_cover(4, &[]);
        let h = homology(&g, &cells, &rad).unwrap();
        assert_eq!(h.genus, 1);
        assert_eq!(h.rank(), 2);
        assert_eq!(h.intersection.to_rows(), vec![vec![0, 1], vec![-1, 0]]);
    }

    #[test]
    fn punctured_torus_has_radical() {
        let (g, cells, rad) = double_cover(4, &[0, 1, 1]);
        let h = homology(&g, &cells, &rad).unwrap();
        assert_eq!(h.rank(), 2 + 3 - 1);
        for i in 2..4 {
            for k in 0..4 {
                assert_eq!(h.intersection.get(i, k), 0);
            }
        }
        // puncture loops sum to zero
        let mut total = vec![0i64; h.rank()];
        for r in 0..3 {
            let w = [Step { edge: g.edge(4 + r, [0, 1, 1][r]), forward: true }];
            let c = h.class_of_chain(&g.chain(&w)).unwrap();
            total.iter_mut().zip(c).for_each(|(t, v)| *t += v);
        }
        assert!(total.iter().all(|v| *v == 0));
    }

    #[test]
    fn sphere_with_two_punctures() {
        let (g, cells, rad) = double_cover(2, &[0, 1]);
        let h = homology(&g, &cells, &rad).unwrap();
        assert_eq!(h.genus, 0);
        assert_eq!(h.rank(), 1);
        assert!(h.intersection.is_zero());
    }

    #[test]
    fn intersection_is_antisymmetric_on_walks() {
        let (g, cells, rad) = double_cover(4, &[0]);
        let h = homology(&g, &cells, &rad).unwrap();
        let a = h.walk_of(&g, &h.section.column(0));
        let b = h.walk_of(&g, &h.section.column(1));
        assert_eq!(g.intersection(&a, &b), -g.intersection(&b, &a));
        assert_eq!(g.intersection(&a, &a), 0);
        assert_eq!(g.intersection(&a, &b), h.intersection.get(0, 1));
    }
}
