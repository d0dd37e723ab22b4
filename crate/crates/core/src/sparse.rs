//! Compressed sparse row matrices.
//!
//! Invariants held by every constructor: column indices strictly increase
//! within a row, no explicit zeros are stored, and all values are finite.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// One sparse row of a fixed logical length.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseRow {
    pub len: usize,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseRow {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            ..Self::default()
        }
    }

    /// Builds a row from unsorted entries; duplicates are summed and zeros
    /// dropped.
    pub fn from_entries(len: usize, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.sort_by_key(|e| e.0);
        let mut row = SparseRow::new(len);
        for (j, v) in entries {
            if j >= len {
                return Err(Error::DimensionMismatch {
                    context: "sparse row column",
                    expected: len,
                    found: j,
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("sparse row"));
            }
            match row.indices.last() {
                Some(&last) if last == j => *row.values.last_mut().unwrap() += v,
                _ => {
                    row.indices.push(j);
                    row.values.push(v);
                }
            }
        }
        row.drop_zeros();
        Ok(row)
    }

    fn drop_zeros(&mut self) {
        let mut k = 0;
        for i in 0..self.indices.len() {
            if self.values[i] != 0.0 {
                self.indices[k] = self.indices[i];
                self.values[k] = self.values[i];
                k += 1;
            }
        }
        self.indices.truncate(k);
        self.values.truncate(k);
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        for (j, v) in self.iter() {
            out[j] = v;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            indptr: vec![0; n_rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Sums duplicate coordinates and drops resulting zeros.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_rows];
        for &(i, j, v) in triplets {
            if i >= n_rows {
                return Err(Error::DimensionMismatch {
                    context: "sparse triplet row",
                    expected: n_rows,
                    found: i,
                });
            }
            per_row[i].push((j, v));
        }
        let rows = per_row
            .into_iter()
            .map(|entries| SparseRow::from_entries(n_cols, entries))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(n_cols, &rows)
    }

    pub fn from_rows(n_cols: usize, rows: &[SparseRow]) -> Result<Self> {
        let mut m = Self::zeros(0, n_cols);
        m.indptr = Vec::with_capacity(rows.len() + 1);
        m.indptr.push(0);
        for r in rows {
            if r.len != n_cols {
                return Err(Error::DimensionMismatch {
                    context: "sparse row length",
                    expected: n_cols,
                    found: r.len,
                });
            }
            m.indices.extend_from_slice(&r.indices);
            m.values.extend_from_slice(&r.values);
            m.indptr.push(m.indices.len());
        }
        m.n_rows = rows.len();
        Ok(m)
    }

    pub fn from_dense(d: &DenseMatrix) -> Self {
        let mut m = Self::zeros(0, d.cols());
        for i in 0..d.rows() {
            for (j, &v) in d.row(i).iter().enumerate() {
                if v != 0.0 {
                    m.indices.push(j);
                    m.values.push(v);
                }
            }
            m.indptr.push(m.indices.len());
        }
        m.n_rows = d.rows();
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn row_indices(&self, i: usize) -> &[usize] {
        &self.indices[self.indptr[i]..self.indptr[i + 1]]
    }

    pub fn row_values(&self, i: usize) -> &[f64] {
        &self.values[self.indptr[i]..self.indptr[i + 1]]
    }

    pub fn row_iter(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.row_indices(i)
            .iter()
            .copied()
            .zip(self.row_values(i).iter().copied())
    }

    pub fn row(&self, i: usize) -> SparseRow {
        SparseRow {
            len: self.n_cols,
            indices: self.row_indices(i).to_vec(),
            values: self.row_values(i).to_vec(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self.row_indices(i).binary_search(&j) {
            Ok(k) => self.row_values(i)[k],
            Err(_) => 0.0,
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n_rows)
            .map(|i| self.row_values(i).iter().sum())
            .collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            for (j, v) in self.row_iter(i) {
                d[(i, j)] = v;
            }
        }
        d
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &j in &self.indices {
            counts[j + 1] += 1;
        }
        for j in 0..self.n_cols {
            counts[j + 1] += counts[j];
        }
        let indptr = counts.clone();
        let mut next = counts;
        let mut indices = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.n_rows {
            for (j, v) in self.row_iter(i) {
                let k = next[j];
                indices[k] = i;
                values[k] = v;
                next[j] += 1;
            }
        }
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            indptr,
            indices,
            values,
        }
    }

    /// Largest `|S_ij - S_ji|` over the stored pattern of both triangles.
    pub fn asymmetry(&self) -> f64 {
        if self.n_rows != self.n_cols {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.n_rows {
            for (j, v) in self.row_iter(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Sparse–dense product `S · X`. Rows are accumulated in stored column
    /// order, so the result is bitwise reproducible.
    pub fn spmm(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if self.n_cols != x.rows() {
            return Err(Error::DimensionMismatch {
                context: "spmm inner dimension",
                expected: self.n_cols,
                found: x.rows(),
            });
        }
        let mut out = DenseMatrix::zeros(self.n_rows, x.cols());
        for i in 0..self.n_rows {
            let orow = out.row_mut(i);
            for (j, v) in self
                .row_indices(i)
                .iter()
                .zip(&self.values[self.indptr[i]..self.indptr[i + 1]])
            {
                for (o, &b) in orow.iter_mut().zip(x.row(*j)) {
                    *o += v * b;
                }
            }
        }
        Ok(out)
    }

    /// `Sᵀ · X` without building the transpose.
    pub fn t_spmm(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if self.n_rows != x.rows() {
            return Err(Error::DimensionMismatch {
                context: "transposed spmm inner dimension",
                expected: self.n_rows,
                found: x.rows(),
            });
        }
        let mut out = DenseMatrix::zeros(self.n_cols, x.cols());
        for i in 0..self.n_rows {
            let xrow = x.row(i);
            for (j, v) in self.row_iter(i) {
                for (o, &b) in out.row_mut(j).iter_mut().zip(xrow) {
                    *o += v * b;
                }
            }
        }
        Ok(out)
    }

    /// Sparse matrix–vector product.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.n_cols != x.len() {
            return Err(Error::DimensionMismatch {
                context: "spmv",
                expected: self.n_cols,
                found: x.len(),
            });
        }
        Ok((0..self.n_rows)
            .map(|i| self.row_iter(i).map(|(j, v)| v * x[j]).sum())
            .collect())
    }

    /// Divides every row by its L1 norm; all-zero rows stay all-zero.
    pub fn normalize_rows_l1(&self) -> SparseMatrix {
        let mut out = self.clone();
        for i in 0..self.n_rows {
            let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
            let s: f64 = out.values[lo..hi].iter().map(|v| v.abs()).sum();
            if s > 0.0 {
                for v in &mut out.values[lo..hi] {
                    *v /= s;
                }
            }
        }
        out
    }

    /// Keeps stored entry `k` iff `keep[k]`, scaling kept values by `scale`.
    pub fn mask_entries(&self, keep: &[bool], scale: f64) -> SparseMatrix {
        debug_assert_eq!(keep.len(), self.nnz());
        let mut out = Self::zeros(0, self.n_cols);
        for i in 0..self.n_rows {
            for k in self.indptr[i]..self.indptr[i + 1] {
                if keep[k] {
                    out.indices.push(self.indices[k]);
                    out.values.push(self.values[k] * scale);
                }
            }
            out.indptr.push(out.indices.len());
        }
        out.n_rows = self.n_rows;
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> SparseMatrix {
        let mut out = Self::zeros(0, self.n_cols);
        for &i in rows {
            out.indices.extend_from_slice(self.row_indices(i));
            out.values.extend_from_slice(self.row_values(i));
            out.indptr.push(out.indices.len());
        }
        out.n_rows = rows.len();
        out
    }

    /// Checks the structural invariants; used by tests and after parsing.
    pub fn check_invariants(&self) -> bool {
        self.indptr.len() == self.n_rows + 1
            && (0..self.n_rows).all(|i| {
                let idx = self.row_indices(i);
                idx.windows(2).all(|w| w[0] < w[1])
                    && idx.iter().all(|&j| j < self.n_cols)
                    && self.row_values(i).iter().all(|v| *v != 0.0 && v.is_finite())
            })
    }
}
