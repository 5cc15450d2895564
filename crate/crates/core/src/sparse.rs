//! Square sparse complex matrices in canonical compressed-row form.
//!
//! Canonical means: column indices strictly increasing inside every row and
//! no stored entry equal to exactly zero. Two matrices are equal as values iff
//! their storage is identical, so `==` is entrywise equality.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        SparseMatrix {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); dim])
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        Self::from_triplets(diag.len(), diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    /// Builds a matrix from `(row, col, value)` triplets in any order.
    /// Duplicates are summed; entries that end up exactly zero are dropped.
    ///
    /// Panics if an index is out of range.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let trip: Vec<(usize, usize, C64)> = triplets.into_iter().collect();
        // bucket by row, then sort and merge each row in place
        let mut start = vec![0usize; dim + 1];
        for &(r, c, _) in &trip {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside {dim}x{dim}");
            start[r + 1] += 1;
        }
        for r in 0..dim {
            start[r + 1] += start[r];
        }
        let mut next = start.clone();
        let mut buf = vec![(0usize, C64::new(0.0, 0.0)); trip.len()];
        for (r, c, v) in trip {
            buf[next[r]] = (c, v);
            next[r] += 1;
        }
        let mut out = SparseMatrix::zeros(dim);
        out.cols.reserve(buf.len());
        out.vals.reserve(buf.len());
        for r in 0..dim {
            let row = &mut buf[start[r]..start[r + 1]];
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
                    out.cols.push(c);
                    out.vals.push(acc);
                }
            }
            out.row_ptr[r + 1] = out.cols.len();
        }
        out
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "square matrix required");
        let n = m.nrows();
        Self::from_triplets(
            n,
            (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).map(|(r, c)| (r, c, m[(r, c)])),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    /// All stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.dim, self.iter().map(|(r, c, v)| (c, r, v)))
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.iter().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_triplets(self.dim, self.iter().map(|(r, c, v)| (r, c, v * s)))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product `self ⊗ other`; `self` indexes the slow factor.
    pub fn kron(&self, other: &SparseMatrix) -> Self {
        let n = other.dim;
        let mut trip = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.iter() {
            for (r2, c2, v2) in other.iter() {
                trip.push((r1 * n + r2, c1 * n + c2, v1 * v2));
            }
        }
        Self::from_triplets(self.dim * n, trip)
    }

    pub fn matmul(&self, other: &SparseMatrix) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let mut trip = Vec::new();
        for r in 0..self.dim {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    trip.push((r, c, a * b));
                }
            }
        }
        Self::from_triplets(self.dim, trip)
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for (r, yr) in y.iter_mut().enumerate() {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            *yr = self.cols[span.clone()]
                .iter()
                .zip(&self.vals[span])
                .map(|(&c, &v)| v * x[c])
                .sum();
        }
    }

    /// `self · m` for a dense `m`.
    pub fn mul_dense(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        assert_eq!(m.nrows(), self.dim);
        let mut out = DMatrix::zeros(self.dim, m.ncols());
        for j in 0..m.ncols() {
            let col = m.column(j);
            for r in 0..self.dim {
                let mut acc = C64::new(0.0, 0.0);
                for (c, v) in self.row(r) {
                    acc += v * col[c];
                }
                out[(r, j)] = acc;
            }
        }
        out
    }

    /// `m · self` for a dense `m`.
    pub fn dense_mul(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        assert_eq!(m.ncols(), self.dim);
        let mut out = DMatrix::zeros(m.nrows(), self.dim);
        for (k, c, v) in self.iter() {
            let src = m.column(k);
            let mut dst = out.column_mut(c);
            dst.axpy(v, &src, C64::new(1.0, 0.0));
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }

    /// Largest `|M[i,j] - conj(M[j,i])|` over all entries.
    pub fn hermitian_defect(&self) -> f64 {
        let diff = self - &self.adjoint();
        diff.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }

    fn combine(&self, other: &SparseMatrix, sign: f64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Self::from_triplets(
            self.dim,
            self.iter().chain(other.iter().map(|(r, c, v)| (r, c, v * sign))),
        )
    }
}

impl Add for &SparseMatrix {
    type Output = SparseMatrix;
    fn add(self, rhs: &SparseMatrix) -> SparseMatrix {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &SparseMatrix {
    type Output = SparseMatrix;
    fn sub(self, rhs: &SparseMatrix) -> SparseMatrix {
        self.combine(rhs, -1.0)
    }
}

impl Mul for &SparseMatrix {
    type Output = SparseMatrix;
    fn mul(self, rhs: &SparseMatrix) -> SparseMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &SparseMatrix {
    type Output = SparseMatrix;
    fn neg(self) -> SparseMatrix {
        self.scale_re(-1.0)
    }
}
