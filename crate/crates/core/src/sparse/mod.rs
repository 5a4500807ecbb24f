//! Coordinate (triplet) and compressed sparse column storage.
//!
//! `CscMatrix` is immutable: it is built once from triplets, with duplicate
//! entries summed, and only read afterwards.

mod market;

pub use market::{format_matrix_market, parse_matrix_market, read_matrix_market, write_matrix_market};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Coordinate-format entries of an `m x n` matrix. Duplicates are allowed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Triplets {
    pub m: usize,
    pub n: usize,
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub s: Vec<f64>,
}

impl Triplets {
    pub fn new(m: usize, n: usize) -> Self {
        Triplets {
            m,
            n,
            ..Default::default()
        }
    }

    pub fn with_capacity(m: usize, n: usize, cap: usize) -> Self {
        Triplets {
            m,
            n,
            i: Vec::with_capacity(cap),
            j: Vec::with_capacity(cap),
            s: Vec::with_capacity(cap),
        }
    }

    pub fn from_parts(m: usize, n: usize, i: Vec<usize>, j: Vec<usize>, s: Vec<f64>) -> Result<Self> {
        let t = Triplets { m, n, i, j, s };
        t.validate()?;
        Ok(t)
    }

    #[inline]
    pub fn push(&mut self, i: usize, j: usize, s: f64) {
        self.i.push(i);
        self.j.push(j);
        self.s.push(s);
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.i.len() != self.s.len() || self.j.len() != self.s.len() {
            return Err(Error::ShapeMismatch(format!(
                "triplet arrays have lengths {}, {}, {}",
                self.i.len(),
                self.j.len(),
                self.s.len()
            )));
        }
        if let Some(&r) = self.i.iter().find(|&&r| r >= self.m) {
            return Err(Error::IndexOutOfRange { index: r, bound: self.m });
        }
        if let Some(&c) = self.j.iter().find(|&&c| c >= self.n) {
            return Err(Error::IndexOutOfRange { index: c, bound: self.n });
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.i
            .iter()
            .zip(&self.j)
            .zip(&self.s)
            .map(|((&i, &j), &s)| (i, j, s))
    }
}

/// Compressed sparse column matrix.
///
/// Row indices are strictly increasing within each column and no stored
/// value is exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    m: usize,
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Stable counting sort of `order` by `key[order[k]]`, keys in `0..bound`.
fn counting_sort(order: &[usize], key: &[usize], bound: usize) -> Vec<usize> {
    let mut start = vec![0usize; bound + 1];
    for &p in order {
        start[key[p] + 1] += 1;
    }
    for k in 0..bound {
        start[k + 1] += start[k];
    }
    let mut out = vec![0usize; order.len()];
    for &p in order {
        let slot = &mut start[key[p]];
        out[*slot] = p;
        *slot += 1;
    }
    out
}

impl CscMatrix {
    /// Builds a CSC matrix, summing duplicates in input order and dropping exact zeros.
    ///
    /// Two stable counting sorts (by row, then by column) give column-major
    /// order in time linear in the number of triplets.
    pub fn from_triplets(t: &Triplets) -> Result<Self> {
        t.validate()?;
        let identity: Vec<usize> = (0..t.len()).collect();
        let by_row = counting_sort(&identity, &t.i, t.m);
        let order = counting_sort(&by_row, &t.j, t.n);

        let mut col_ptr = vec![0usize; t.n + 1];
        let mut row_idx = Vec::with_capacity(t.len());
        let mut values = Vec::with_capacity(t.len());
        let mut k = 0;
        while k < order.len() {
            let (r, c) = (t.i[order[k]], t.j[order[k]]);
            let mut sum = t.s[order[k]];
            k += 1;
            while k < order.len() && t.i[order[k]] == r && t.j[order[k]] == c {
                sum += t.s[order[k]];
                k += 1;
            }
            if sum != 0.0 {
                row_idx.push(r);
                values.push(sum);
                col_ptr[c + 1] += 1;
            }
        }
        for c in 0..t.n {
            col_ptr[c + 1] += col_ptr[c];
        }
        Ok(CscMatrix {
            m: t.m,
            n: t.n,
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        CscMatrix {
            m: n,
            n,
            col_ptr: (0..=n).collect(),
            row_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        CscMatrix {
            m,
            n,
            col_ptr: vec![0; n + 1],
            row_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Converts a dense matrix, keeping every nonzero entry.
    pub fn from_dense(a: &DenseMatrix) -> Self {
        let (m, n) = a.shape();
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for c in 0..n {
            for r in 0..m {
                let v = a.get(r, c);
                if v != 0.0 {
                    row_idx.push(r);
                    values.push(v);
                }
            }
            col_ptr.push(values.len());
        }
        CscMatrix {
            m,
            n,
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.m
    }

    pub fn ncols(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_idx(&self) -> &[usize] {
        &self.row_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row indices and values of column `c`.
    pub fn column(&self, c: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.col_ptr[c], self.col_ptr[c + 1]);
        (&self.row_idx[a..b], &self.values[a..b])
    }

    /// Entry `(r, c)`, zero when not stored. Binary search within the column.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (rows, vals) = self.column(c);
        rows.binary_search(&r).map(|k| vals[k]).unwrap_or(0.0)
    }

    /// Column-major triplets; `from_triplets(find(A)) == A`.
    pub fn find(&self) -> Triplets {
        let mut t = Triplets::with_capacity(self.m, self.n, self.nnz());
        for c in 0..self.n {
            let (rows, vals) = self.column(c);
            for (&r, &v) in rows.iter().zip(vals) {
                t.push(r, c, v);
            }
        }
        t
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.m];
        self.matvec_into(x, &mut y)?;
        Ok(y)
    }

    /// `y = A x`, column by column.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.n || y.len() != self.m {
            return Err(Error::ShapeMismatch(format!(
                "matvec of {}x{} matrix with x of length {} into y of length {}",
                self.m,
                self.n,
                x.len(),
                y.len()
            )));
        }
        y.fill(0.0);
        for (c, &xc) in x.iter().enumerate() {
            let (a, b) = (self.col_ptr[c], self.col_ptr[c + 1]);
            for k in a..b {
                y[self.row_idx[k]] += self.values[k] * xc;
            }
        }
        Ok(())
    }

    /// `A(rows, cols)` for strictly increasing index sets.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        check_index_set(rows, self.m)?;
        check_index_set(cols, self.n)?;
        let mut map = vec![usize::MAX; self.m];
        for (p, &r) in rows.iter().enumerate() {
            map[r] = p;
        }
        let mut col_ptr = Vec::with_capacity(cols.len() + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for &c in cols {
            let (rs, vs) = self.column(c);
            for (&r, &v) in rs.iter().zip(vs) {
                if map[r] != usize::MAX {
                    row_idx.push(map[r]);
                    values.push(v);
                }
            }
            col_ptr.push(values.len());
        }
        Ok(CscMatrix {
            m: rows.len(),
            n: cols.len(),
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Triplets::with_capacity(self.n, self.m, self.nnz());
        for (r, c, v) in self.find().iter() {
            t.push(c, r, v);
        }
        Self::from_triplets(&t).expect("transpose of a valid matrix")
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.m.min(self.n)).map(|k| self.get(k, k)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.m, self.n);
        for c in 0..self.n {
            let (rs, vs) = self.column(c);
            for (&r, &v) in rs.iter().zip(vs) {
                d.set(r, c, v);
            }
        }
        d
    }

    /// Checks the structural invariants. Used by tests and after parsing.
    pub fn check_invariants(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::ShapeMismatch(msg.to_string()));
        if self.col_ptr.len() != self.n + 1 || self.col_ptr[0] != 0 || self.col_ptr[self.n] != self.nnz() {
            return bad("column pointer does not span the stored entries");
        }
        if self.row_idx.len() != self.values.len() {
            return bad("row index and value arrays differ in length");
        }
        for c in 0..self.n {
            if self.col_ptr[c] > self.col_ptr[c + 1] {
                return bad("column pointer decreases");
            }
            let (rs, vs) = self.column(c);
            if rs.windows(2).any(|w| w[0] >= w[1]) {
                return bad("row indices not strictly increasing");
            }
            if rs.iter().any(|&r| r >= self.m) {
                return bad("row index out of range");
            }
            if vs.contains(&0.0) {
                return bad("explicit zero stored");
            }
        }
        Ok(())
    }
}

fn check_index_set(idx: &[usize], bound: usize) -> Result<()> {
    for (k, w) in idx.windows(2).enumerate() {
        if w[0] >= w[1] {
            return Err(Error::UnsortedIndexSet(k + 1));
        }
    }
    if let Some(&last) = idx.last() {
        if last >= bound {
            return Err(Error::IndexOutOfRange { index: last, bound });
        }
    }
    Ok(())
}

/// Dense accumulation: `out[k] = sum of vals where idx == k`.
pub fn accumulate(idx: &[usize], vals: &[f64], size: usize) -> Result<Vec<f64>> {
    if idx.len() != vals.len() {
        return Err(Error::ShapeMismatch(format!(
            "accumulate with {} indices and {} values",
            idx.len(),
            vals.len()
        )));
    }
    let mut out = vec![0.0; size];
    for (&k, &v) in idx.iter().zip(vals) {
        if k >= size {
            return Err(Error::IndexOutOfRange { index: k, bound: size });
        }
        out[k] += v;
    }
    Ok(out)
}
