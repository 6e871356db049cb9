//! Exact dense linear algebra over the rationals, plus an incremental sparse
//! echelon form used by the larger equation systems.

use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

/// Output of [`ExactMatrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: ExactMatrix,
    pub pivot_cols: Vec<usize>,
    pub rank: usize,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: entries.len() });
        }
        Ok(Self { rows, cols, entries })
    }

    /// Builds a matrix from rows; all rows must share a length.
    pub fn from_rows(rows: &[Vec<Rational>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            entries.extend(r.iter().cloned());
        }
        Ok(Self { rows: rows.len(), cols, entries })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: c.len() });
            }
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Rational>> = rows.iter().map(|r| rational::vec_from_i64(r)).collect();
        Self::from_rows(&rows).expect("ragged integer matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.rows * self.cols, found: other.rows * other.cols });
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, entries })
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|a| a * s).collect() }
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).fold(Rational::zero(), |acc, i| acc + &self[(i, i)])
    }

    /// Gauss-Jordan elimination with the first nonzero entry as pivot.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let v = &f * &m[(r, j)];
                    m[(i, j)] -= v;
                }
            }
            pivot_cols.push(c);
            r += 1;
        }
        let rank = pivot_cols.len();
        Rref { reduced: m, pivot_cols, rank }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Kernel basis: one vector per free column, with a 1 in that column.
    pub fn nullspace_basis(&self) -> Vec<Vec<Rational>> {
        let rref = self.rref();
        nullspace_from_rref(&rref.reduced, &rref.pivot_cols)
    }

    /// Exact inverse, or `Singular`.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let rref = aug.rref();
        if rref.pivot_cols.iter().filter(|&&p| p < n).count() < n {
            return Err(Error::Singular);
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = rref.reduced[(i, n + j)].clone();
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl Index<(usize, usize)> for ExactMatrix {
    type Output = Rational;

    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        &self.entries[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        &mut self.entries[r * self.cols + c]
    }
}

fn nullspace_from_rref(reduced: &ExactMatrix, pivots: &[usize]) -> Vec<Vec<Rational>> {
    let cols = reduced.cols();
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -reduced[(r, f)].clone();
            }
            v
        })
        .collect()
}

/// Rank of the matrix whose rows are `vectors`.
pub fn rank_of(vectors: &[Vec<Rational>]) -> Result<usize> {
    let mut e = Echelon::new(vectors.first().map_or(0, Vec::len));
    for v in vectors {
        e.insert_dense(v)?;
    }
    Ok(e.rank())
}

/// True iff the two families span the same subspace.
pub fn span_equal(b1: &[Vec<Rational>], b2: &[Vec<Rational>]) -> Result<bool> {
    let len = b1.first().or(b2.first()).map_or(0, Vec::len);
    if let Some(v) = b1.iter().chain(b2).find(|v| v.len() != len) {
        return Err(Error::DimensionMismatch { expected: len, found: v.len() });
    }
    let r1 = rank_of(b1)?;
    let r2 = rank_of(b2)?;
    let all: Vec<Vec<Rational>> = b1.iter().chain(b2).cloned().collect();
    Ok(r1 == r2 && rank_of(&all)? == r1)
}

/// Sparse vector: `(column, value)` pairs sorted by column, no explicit zeros.
pub type SparseRow = Vec<(usize, Rational)>;

pub fn sparse_from_dense(v: &[Rational]) -> SparseRow {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

/// `a - f * b` for sparse rows.
fn axpy(a: &SparseRow, f: &Rational, b: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map_or(usize::MAX, |e| e.0);
        let cb = b.get(j).map_or(usize::MAX, |e| e.0);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            out.push((cb, -(f * &b[j].1)));
            j += 1;
        } else {
            let v = &a[i].1 - f * &b[j].1;
            if !v.is_zero() {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Incrementally maintained reduced row echelon form of a row space.
///
/// Rows are kept fully reduced against each other, so the sorted row list is
/// always the unique rref of everything inserted so far.
#[derive(Clone, Debug)]
pub struct Echelon {
    cols: usize,
    // (pivot column, row with a 1 at the pivot)
    rows: Vec<(usize, SparseRow)>,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Self { cols, rows: Vec::new() }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current rows; the result is zero iff `v` lies
    /// in the row space.
    pub fn reduce(&self, v: &SparseRow) -> SparseRow {
        let mut v = v.clone();
        for (p, row) in &self.rows {
            if let Ok(pos) = v.binary_search_by_key(p, |e| e.0) {
                let f = v[pos].1.clone();
                v = axpy(&v, &f, row);
            }
        }
        v
    }

    pub fn contains(&self, v: &[Rational]) -> Result<bool> {
        self.check_len(v.len())?;
        Ok(self.reduce(&sparse_from_dense(v)).is_empty())
    }

    pub fn insert_dense(&mut self, v: &[Rational]) -> Result<bool> {
        self.check_len(v.len())?;
        Ok(self.insert(sparse_from_dense(v)))
    }

    /// Adds a row; returns whether the rank grew.
    pub fn insert(&mut self, v: SparseRow) -> bool {
        let r = self.reduce(&v);
        let Some((p, lead)) = r.first().cloned() else {
            return false;
        };
        let inv = lead.recip();
        let r: SparseRow = r.into_iter().map(|(c, x)| (c, x * &inv)).collect();
        for (_, row) in self.rows.iter_mut() {
            if let Ok(pos) = row.binary_search_by_key(&p, |e| e.0) {
                let f = row[pos].1.clone();
                *row = axpy(row, &f, &r);
            }
        }
        let at = self.rows.partition_point(|(q, _)| *q < p);
        self.rows.insert(at, (p, r));
        true
    }

    pub fn pivot_cols(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    /// The nonzero rows of the rref, in pivot order.
    pub fn to_matrix(&self) -> ExactMatrix {
        let mut m = ExactMatrix::zeros(self.rows.len(), self.cols);
        for (r, (_, row)) in self.rows.iter().enumerate() {
            for (c, x) in row {
                m[(r, *c)] = x.clone();
            }
        }
        m
    }

    pub fn basis(&self) -> Vec<Vec<Rational>> {
        let m = self.to_matrix();
        (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
    }

    /// Canonical free-column kernel basis, identical to
    /// [`ExactMatrix::nullspace_basis`] on the same row space.
    pub fn nullspace_basis(&self) -> Vec<Vec<Rational>> {
        let mut is_pivot = vec![false; self.cols];
        for (p, _) in &self.rows {
            is_pivot[*p] = true;
        }
        let mut out: Vec<Vec<Rational>> = Vec::new();
        let mut index_of_free = vec![usize::MAX; self.cols];
        for f in (0..self.cols).filter(|&f| !is_pivot[f]) {
            index_of_free[f] = out.len();
            let mut v = vec![Rational::zero(); self.cols];
            v[f] = Rational::one();
            out.push(v);
        }
        for (p, row) in &self.rows {
            for (c, x) in row {
                if *c != *p {
                    out[index_of_free[*c]][*p] = -x.clone();
                }
            }
        }
        out
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: len });
        }
        Ok(())
    }
}
