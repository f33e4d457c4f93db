//! Exact integer linear algebra: matrices over `Z`, Smith and skew normal
//! forms, and ranks over `Q`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense integer matrix, serialized row-major as nested arrays.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<i64>>", try_from = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.to_rows()
    }
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

fn checked(v: i128) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow)
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Parse("ragged matrix".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<i64>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        m
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<i64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == 0)
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == -self.get(j, i)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Consistency(format!(
                "shape mismatch {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s: i128 = (0..self.cols)
                    .map(|k| self.get(i, k) as i128 * other.get(k, j) as i128)
                    .sum();
                out.set(i, j, checked(s)?);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.cols {
            return Err(Error::Consistency("vector length mismatch".into()));
        }
        (0..self.rows)
            .map(|i| checked((0..self.cols).map(|k| self.get(i, k) as i128 * v[k] as i128).sum()))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.checked_add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.checked_sub(b))
    }

    fn zip(&self, other: &Self, f: impl Fn(i64, i64) -> Option<i64>) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Consistency("shape mismatch".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f(*a, *b).ok_or(Error::Overflow))
            .collect::<Result<_>>()?;
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn neg(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| -v).collect() }
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Bilinear form `uᵀ M v`.
    pub fn pair(&self, u: &[i64], v: &[i64]) -> Result<i64> {
        let mv = self.mul_vec(v)?;
        checked(u.iter().zip(&mv).map(|(a, b)| *a as i128 * *b as i128).sum())
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<i64> {
        if self.rows != self.cols {
            return Err(Error::Consistency("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(1);
        }
        let mut a: Vec<BigInt> = self.data.iter().map(|v| BigInt::from(*v)).collect();
        let mut sign = 1i64;
        let mut prev = BigInt::from(1);
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                    return Ok(0);
                };
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j]) / &prev;
                    a[i * n + j] = v;
                }
            }
            prev = a[k * n + k].clone();
        }
        let d = &a[n * n - 1] * sign;
        i64::try_from(d).map_err(|_| Error::Overflow)
    }

    /// Exact inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Result<Self> {
        let n = self.rows;
        let snf = smith_normal_form(self)?;
        if (0..n).any(|i| snf.d.get(i, i).abs() != 1) {
            return Err(Error::Consistency("matrix is not unimodular".into()));
        }
        // U A V = D with D = diag(±1), so A^{-1} = V D U.
        let inv = snf.v.mul(&snf.d)?.mul(&snf.u)?;
        debug_assert!(self.mul(&inv)?.is_identity());
        Ok(inv)
    }
}

/// `U A V = D` with `U`, `V` unimodular and `D` diagonal, each diagonal entry
/// dividing the next. `v_inv` is `V^{-1}`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub rank: usize,
}

impl Smith {
    pub fn invariants(&self) -> Vec<i64> {
        (0..self.rank).map(|i| self.d.get(i, i)).collect()
    }
}

struct Work {
    a: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        for m in [&mut self.a, &mut self.u] {
            for c in 0..m.cols {
                let t = m.get(i, c);
                m.set(i, c, m.get(j, c));
                m.set(j, c, t);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for m in [&mut self.a, &mut self.v] {
            for r in 0..m.rows {
                let t = m.get(r, i);
                m.set(r, i, m.get(r, j));
                m.set(r, j, t);
            }
        }
        let m = &mut self.v_inv;
        for c in 0..m.cols {
            let t = m.get(i, c);
            m.set(i, c, m.get(j, c));
            m.set(j, c, t);
        }
    }

    // row_i -= k * row_j
    fn row_axpy(&mut self, i: usize, j: usize, k: i64) -> Result<()> {
        for m in [&mut self.a, &mut self.u] {
            for c in 0..m.cols {
                let v = checked(m.get(i, c) as i128 - k as i128 * m.get(j, c) as i128)?;
                m.set(i, c, v);
            }
        }
        Ok(())
    }

    // col_i -= k * col_j
    fn col_axpy(&mut self, i: usize, j: usize, k: i64) -> Result<()> {
        for m in [&mut self.a, &mut self.v] {
            for r in 0..m.rows {
                let v = checked(m.get(r, i) as i128 - k as i128 * m.get(r, j) as i128)?;
                m.set(r, i, v);
            }
        }
        let m = &mut self.v_inv;
        for c in 0..m.cols {
            let v = checked(m.get(j, c) as i128 + k as i128 * m.get(i, c) as i128)?;
            m.set(j, c, v);
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        for m in [&mut self.a, &mut self.u] {
            for c in 0..m.cols {
                m.set(i, c, -m.get(i, c));
            }
        }
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> Result<Smith> {
    let (rows, cols) = (a.rows, a.cols);
    let mut w = Work {
        a: a.clone(),
        u: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
        v_inv: IntMatrix::identity(cols),
    };
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                let v = w.a.get(r, c);
                if v != 0 && best.is_none_or(|(br, bc)| v.abs() < w.a.get(br, bc).abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        w.swap_rows(t, pr);
        w.swap_cols(t, pc);
        loop {
            let p = w.a.get(t, t);
            let mut clean = true;
            for r in t + 1..rows {
                let q = Integer::div_floor(&w.a.get(r, t), &p);
                if q != 0 {
                    w.row_axpy(r, t, q)?;
                }
                if w.a.get(r, t) != 0 {
                    clean = false;
                }
            }
            for c in t + 1..cols {
                let q = Integer::div_floor(&w.a.get(t, c), &p);
                if q != 0 {
                    w.col_axpy(c, t, q)?;
                }
                if w.a.get(t, c) != 0 {
                    clean = false;
                }
            }
            if clean {
                // divisibility of the trailing block
                let bad = (t + 1..rows)
                    .flat_map(|r| (t + 1..cols).map(move |c| (r, c)))
                    .find(|&(r, c)| w.a.get(r, c) % p != 0);
                match bad {
                    None => break,
                    Some((r, _)) => {
                        w.row_axpy(t, r, -1)?;
                        continue;
                    }
                }
            }
            // move the smallest remaining entry of row/column t to the pivot
            let mut best = (t, t);
            for r in t..rows {
                let v = w.a.get(r, t);
                if v != 0 && v.abs() < w.a.get(best.0, best.1).abs() {
                    best = (r, t);
                }
            }
            for c in t..cols {
                let v = w.a.get(t, c);
                if v != 0 && v.abs() < w.a.get(best.0, best.1).abs() {
                    best = (t, c);
                }
            }
            w.swap_rows(t, best.0);
            w.swap_cols(t, best.1);
        }
        if w.a.get(t, t) < 0 {
            w.negate_row(t);
        }
        t += 1;
    }
    Ok(Smith { u: w.u, d: w.a, v: w.v, v_inv: w.v_inv, rank: t })
}

/// Symplectic reduction of an antisymmetric matrix: returns `S` unimodular
/// with `Sᵀ J S` block diagonal, `k` blocks `[[0, d_i], [-d_i, 0]]` followed
/// by zeros, together with the `d_i`.
pub fn skew_normal_form(j: &IntMatrix) -> Result<(IntMatrix, Vec<i64>)> {
    if !j.is_antisymmetric() {
        return Err(Error::Consistency("matrix is not antisymmetric".into()));
    }
    let n = j.rows;
    let mut a = j.clone();
    let mut s = IntMatrix::identity(n);

    fn swap(a: &mut IntMatrix, s: &mut IntMatrix, i: usize, k: usize) {
        if i == k {
            return;
        }
        let n = a.rows;
        for r in 0..n {
            let t = a.get(r, i);
            a.set(r, i, a.get(r, k));
            a.set(r, k, t);
            let t = s.get(r, i);
            s.set(r, i, s.get(r, k));
            s.set(r, k, t);
        }
        for c in 0..n {
            let t = a.get(i, c);
            a.set(i, c, a.get(k, c));
            a.set(k, c, t);
        }
    }
    // basis_i += m * basis_k
    fn axpy(a: &mut IntMatrix, s: &mut IntMatrix, i: usize, k: usize, m: i64) -> Result<()> {
        let n = a.rows;
        for r in 0..n {
            a.set(r, i, checked(a.get(r, i) as i128 + m as i128 * a.get(r, k) as i128)?);
            s.set(r, i, checked(s.get(r, i) as i128 + m as i128 * s.get(r, k) as i128)?);
        }
        for c in 0..n {
            a.set(i, c, checked(a.get(i, c) as i128 + m as i128 * a.get(k, c) as i128)?);
        }
        Ok(())
    }

    let mut invariants = Vec::new();
    let mut t = 0;
    while t + 1 < n {
        let mut best: Option<(usize, usize)> = None;
        for r in t..n {
            for c in r + 1..n {
                let v = a.get(r, c);
                if v != 0 && best.is_none_or(|(br, bc)| v.abs() < a.get(br, bc).abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((r, c)) = best else { break };
        swap(&mut a, &mut s, t, r);
        let c = if c == t { r } else { c };
        swap(&mut a, &mut s, t + 1, c);
        if a.get(t, t + 1) < 0 {
            swap(&mut a, &mut s, t, t + 1);
        }
        let p = a.get(t, t + 1);
        let mut clean = true;
        for k in t + 2..n {
            // entry (t, k) changes by m * a(t, t+1) under basis_k += m basis_{t+1}
            let m = -Integer::div_floor(&a.get(t, k), &p);
            if m != 0 {
                axpy(&mut a, &mut s, k, t + 1, m)?;
            }
            // entry (t+1, k) changes by m * a(t+1, t) = -m p under basis_k += m basis_t
            let m = Integer::div_floor(&a.get(t + 1, k), &p);
            if m != 0 {
                axpy(&mut a, &mut s, k, t, m)?;
            }
            if a.get(t, k) != 0 || a.get(t + 1, k) != 0 {
                clean = false;
            }
        }
        if clean {
            invariants.push(p);
            t += 2;
        }
    }
    debug_assert!(s.transpose().mul(j)?.mul(&s)? == a);
    Ok((s, invariants))
}

/// Rank over `Q` of a list of integer vectors, by fraction-free elimination.
pub fn rank_q(vectors: &[Vec<i64>]) -> usize {
    let mut rows: Vec<Vec<BigInt>> = vectors
        .iter()
        .map(|v| v.iter().map(|x| BigInt::from(*x)).collect())
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for r in rank + 1..rows.len() {
            if rows[r][c].is_zero() {
                continue;
            }
            let f = rows[r][c].clone();
            let row: Vec<BigInt> = rows[r]
                .iter()
                .zip(&pivot)
                .map(|(x, y)| x * &pivot[c] - y * &f)
                .collect();
            let g = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            rows[r] = if g.is_zero() { row } else { row.into_iter().map(|x| x / &g).collect() };
        }
        rank += 1;
    }
    rank
}

/// Divide by the gcd of the entries and make the first nonzero entry positive.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, x| g.gcd(x));
    if g == 0 {
        return v.to_vec();
    }
    let mut out: Vec<i64> = v.iter().map(|x| x / g).collect();
    if out.iter().find(|x| **x != 0).is_some_and(|x| *x < 0) {
        out.iter_mut().for_each(|x| *x = -*x);
    }
    out
}
