//! Compressed-sparse-row complex matrices.
//!
//! Just enough sparse algebra for building Hamiltonians and superoperators:
//! Kronecker products, products, adjoints and matrix-vector multiplication.
//! Factorizations are delegated to `faer` through [`CsrMatrix::to_faer_csc`].

use std::ops::{Add, Mul, Neg, Sub};

use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        indptr.push(0);
        for (i, &v) in diag.iter().enumerate() {
            if v != C64::new(0.0, 0.0) {
                indices.push(i);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        Self {
            nrows: n,
            ncols: n,
            indptr,
            indices,
            values,
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed
    /// and exact zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, C64)]) -> Self {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![C64::new(0.0, 0.0); triplets.len()];
        for &(r, c, v) in triplets {
            let slot = next[r];
            cols[slot] = c;
            vals[slot] = v;
            next[r] += 1;
        }

        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        indptr.push(0);
        let mut row: Vec<(usize, C64)> = Vec::new();
        for r in 0..nrows {
            row.clear();
            row.extend((counts[r]..counts[r + 1]).map(|k| (cols[k], vals[k])));
            row.sort_unstable_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                let mut acc = C64::new(0.0, 0.0);
                while k < row.len() && row[k].0 == c {
                    acc += row[k].1;
                    k += 1;
                }
                if acc != C64::new(0.0, 0.0) {
                    indices.push(c);
                    values.push(acc);
                }
            }
            indptr.push(indices.len());
        }
        Self {
            nrows,
            ncols,
            indptr,
            indices,
            values,
        }
    }

    pub fn from_dense(dense: &Mat<C64>) -> Self {
        let mut triplets = Vec::new();
        for i in 0..dense.nrows() {
            for j in 0..dense.ncols() {
                let v = dense[(i, j)];
                if v != C64::new(0.0, 0.0) {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(dense.nrows(), dense.ncols(), &triplets)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Fraction of structurally zero entries.
    pub fn sparsity(&self) -> f64 {
        let total = (self.nrows * self.ncols) as f64;
        if total == 0.0 {
            return 1.0;
        }
        1.0 - self.nnz() as f64 / total
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let range = self.indptr[i]..self.indptr[i + 1];
        self.indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let range = self.indptr[i]..self.indptr[i + 1];
        match self.indices[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn transpose(&self) -> Self {
        let triplets: Vec<_> = self.iter().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, &triplets)
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn adjoint(&self) -> Self {
        let triplets: Vec<_> = self.iter().map(|(i, j, v)| (j, i, v.conj())).collect();
        Self::from_triplets(self.ncols, self.nrows, &triplets)
    }

    pub fn scale(&self, factor: C64) -> Self {
        let triplets: Vec<_> = self.iter().map(|(i, j, v)| (i, j, v * factor)).collect();
        Self::from_triplets(self.nrows, self.ncols, &triplets)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// Kronecker product `self ⊗ other`; `self` indexes the slow (outer) factor.
    pub fn kron(&self, other: &Self) -> Self {
        let mut triplets = Vec::with_capacity(self.nnz() * other.nnz());
        for (i, j, a) in self.iter() {
            for (k, l, b) in other.iter() {
                triplets.push((i * other.nrows + k, j * other.ncols + l, a * b));
            }
        }
        Self::from_triplets(self.nrows * other.nrows, self.ncols * other.ncols, &triplets)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "matmul shape mismatch");
        let mut triplets = Vec::new();
        let mut acc = vec![C64::new(0.0, 0.0); other.ncols];
        let mut touched = vec![false; other.ncols];
        let mut cols: Vec<usize> = Vec::new();
        for i in 0..self.nrows {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if !touched[j] {
                        touched[j] = true;
                        cols.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            for &j in &cols {
                triplets.push((i, j, acc[j]));
                acc[j] = C64::new(0.0, 0.0);
                touched[j] = false;
            }
            cols.clear();
        }
        Self::from_triplets(self.nrows, other.ncols, &triplets)
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.indptr[i]..self.indptr[i + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *yi = acc;
        }
    }

    /// Row-vector product `xᵀ A`.
    pub fn vecmat(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![C64::new(0.0, 0.0); self.ncols];
        for (i, &xi) in x.iter().enumerate() {
            if xi == C64::new(0.0, 0.0) {
                continue;
            }
            for (j, v) in self.row(i) {
                y[j] += xi * v;
            }
        }
        y
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// Keeps the rows and columns listed in `keep`, in that order.
    pub fn submatrix(&self, keep: &[usize]) -> Self {
        let mut position = vec![usize::MAX; self.ncols];
        for (new, &old) in keep.iter().enumerate() {
            position[old] = new;
        }
        let mut triplets = Vec::new();
        for (new_row, &old_row) in keep.iter().enumerate() {
            for (j, v) in self.row(old_row) {
                if position[j] != usize::MAX {
                    triplets.push((new_row, position[j], v));
                }
            }
        }
        Self::from_triplets(keep.len(), keep.len(), &triplets)
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let mut m = Mat::<C64>::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn to_faer_csc(&self) -> SparseColMat<usize, C64> {
        let triplets: Vec<_> = self.iter().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &triplets)
            .expect("valid triplets from an existing CSR matrix")
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        assert_eq!(
            (self.nrows, self.ncols),
            (other.nrows, other.ncols),
            "shape mismatch"
        );
        let triplets: Vec<_> = self
            .iter()
            .chain(other.iter().map(|(i, j, v)| (i, j, v * sign)))
            .collect();
        Self::from_triplets(self.nrows, self.ncols, &triplets)
    }
}

impl Add for &CsrMatrix {
    type Output = CsrMatrix;
    fn add(self, rhs: Self) -> CsrMatrix {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &CsrMatrix {
    type Output = CsrMatrix;
    fn sub(self, rhs: Self) -> CsrMatrix {
        self.combine(rhs, -1.0)
    }
}

impl Mul for &CsrMatrix {
    type Output = CsrMatrix;
    fn mul(self, rhs: Self) -> CsrMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &CsrMatrix {
    type Output = CsrMatrix;
    fn neg(self) -> CsrMatrix {
        self.scale_real(-1.0)
    }
}
