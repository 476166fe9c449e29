//! Small column-major dense matrices and the kernels the factorizations need.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::{Error, Result};

/// Column-major dense matrix.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct DenseMat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data, which is how literals read in tests.
    pub fn from_row_major(rows: usize, cols: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), rows * cols);
        Self::from_fn(rows, cols, |i, j| values[i * cols + j])
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    /// Number of stored reals.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Copies out the sub-block at the given row and column positions.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    /// Copies out the contiguous sub-block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Copies `src` into this matrix with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, src: &DenseMat) {
        for j in 0..src.cols {
            let dst = &mut self.col_mut(c0 + j)[r0..r0 + src.rows];
            dst.copy_from_slice(src.col(j));
        }
    }

    /// Adds `src` into this matrix with its top-left corner at `(r0, c0)`.
    pub fn add_block(&mut self, r0: usize, c0: usize, src: &DenseMat) {
        for j in 0..src.cols {
            let dst = &mut self.col_mut(c0 + j)[r0..r0 + src.rows];
            for (d, s) in dst.iter_mut().zip(src.col(j)) {
                *d += s;
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| v.abs().max(m))
    }

    pub fn scale(&mut self, alpha: f64) {
        self.data.iter_mut().for_each(|v| *v *= alpha);
    }

    pub fn sub(&self, other: &DenseMat) -> DenseMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self::from_col_major(self.rows, self.cols, data)
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.matvec_acc(1.0, x, &mut y);
        y
    }

    /// `y += alpha A x`.
    pub fn matvec_acc(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (j, &xj) in x.iter().enumerate() {
            let s = alpha * xj;
            if s != 0.0 {
                axpy(s, self.col(j), y);
            }
        }
    }

    /// `y += alpha Aᵀ x`.
    pub fn matvec_transpose_acc(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(y.len(), self.cols);
        for (j, yj) in y.iter_mut().enumerate() {
            *yj += alpha * dot(self.col(j), x);
        }
    }

    /// `A B`.
    pub fn matmul(&self, other: &DenseMat) -> DenseMat {
        let mut out = DenseMat::zeros(self.rows, other.cols);
        gemm_acc(1.0, self, other, &mut out);
        out
    }

    /// `A Bᵀ`, the outer-product form used by low-rank blocks.
    pub fn matmul_transpose(&self, other: &DenseMat) -> DenseMat {
        assert_eq!(self.cols, other.cols);
        let mut out = DenseMat::zeros(self.rows, other.rows);
        for k in 0..self.cols {
            let a = self.col(k);
            let b = other.col(k);
            for (j, &bj) in b.iter().enumerate() {
                if bj != 0.0 {
                    axpy(bj, a, out.col_mut(j));
                }
            }
        }
        out
    }

    /// `Aᵀ B`.
    pub fn transpose_matmul(&self, other: &DenseMat) -> DenseMat {
        assert_eq!(self.rows, other.rows);
        DenseMat::from_fn(self.cols, other.cols, |i, j| dot(self.col(i), other.col(j)))
    }

    /// Concatenates columns of `self` and `other`.
    pub fn hcat(&self, other: &DenseMat) -> DenseMat {
        assert_eq!(self.rows, other.rows);
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        Self::from_col_major(self.rows, self.cols + other.cols, data)
    }
}

impl Index<(usize, usize)> for DenseMat {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    libm::sqrt(dot(x, x))
}

/// `C += alpha A B`.
pub fn gemm_acc(alpha: f64, a: &DenseMat, b: &DenseMat, c: &mut DenseMat) {
    assert_eq!(a.cols, b.rows);
    assert_eq!((c.rows, c.cols), (a.rows, b.cols));
    if a.rows == 0 {
        return;
    }
    for j in 0..b.cols {
        let bj = b.col(j);
        let cj = &mut c.data[j * a.rows..(j + 1) * a.rows];
        for (k, &bkj) in bj.iter().enumerate() {
            if bkj != 0.0 {
                axpy(alpha * bkj, &a.data[k * a.rows..(k + 1) * a.rows], cj);
            }
        }
    }
}

/// LU factorization with partial (row) pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct DenseLu {
    lu: DenseMat,
    swaps: Vec<usize>,
}

impl DenseLu {
    /// Factorizes `a` in place. Fails only on an exactly zero (or non-finite)
    /// pivot column.
    pub fn factor(mut a: DenseMat) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::NotSquare {
                rows: a.rows,
                cols: a.cols,
            });
        }
        let n = a.rows;
        let mut swaps = Vec::with_capacity(n);
        for k in 0..n {
            let col = a.col(k);
            let (p, pmax) =
                col[k..].iter().enumerate().fold(
                    (k, 0.0f64),
                    |(bi, bv), (i, v)| {
                        if v.abs() > bv {
                            (k + i, v.abs())
                        } else {
                            (bi, bv)
                        }
                    },
                );
            if pmax == 0.0 || !pmax.is_finite() {
                return Err(Error::SingularPivot { step: k });
            }
            swaps.push(p);
            if p != k {
                for j in 0..n {
                    a.data.swap(j * n + k, j * n + p);
                }
            }
            let inv = 1.0 / a.data[k * n + k];
            for v in &mut a.data[k * n + k + 1..(k + 1) * n] {
                *v *= inv;
            }
            let (left, right) = a.data.split_at_mut((k + 1) * n);
            let lcol = &left[k * n + k + 1..(k + 1) * n];
            for j in 0..n - k - 1 {
                let cj = &mut right[j * n..(j + 1) * n];
                let f = cj[k];
                if f != 0.0 {
                    axpy(-f, lcol, &mut cj[k + 1..]);
                }
            }
        }
        Ok(Self { lu: a, swaps })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    /// Stored reals (the pivot vector is not counted).
    pub fn stored_reals(&self) -> usize {
        self.lu.len()
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        debug_assert_eq!(b.len(), n);
        for (k, &p) in self.swaps.iter().enumerate() {
            b.swap(k, p);
        }
        // forward, unit lower
        for k in 0..n {
            let bk = b[k];
            if bk != 0.0 {
                axpy(-bk, &self.lu.col(k)[k + 1..], &mut b[k + 1..]);
            }
        }
        // backward
        for k in (0..n).rev() {
            let col = self.lu.col(k);
            b[k] /= col[k];
            let bk = b[k];
            if bk != 0.0 {
                axpy(-bk, &col[..k], &mut b[..k]);
            }
        }
    }

    pub fn solve_mat_in_place(&self, b: &mut DenseMat) {
        debug_assert_eq!(b.rows, self.dim());
        for j in 0..b.cols {
            self.solve_in_place(b.col_mut(j));
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Solves `X U = B` in place for the leading `r x r` upper triangle of `u`.
pub(crate) fn solve_upper_right(u: &DenseMat, r: usize, b: &mut DenseMat) {
    debug_assert_eq!(b.cols, r);
    for j in 0..r {
        for k in 0..j {
            let ukj = u[(k, j)];
            if ukj != 0.0 {
                let (left, right) = b.data.split_at_mut(j * b.rows);
                axpy(-ukj, &left[k * b.rows..(k + 1) * b.rows], &mut right[..b.rows]);
            }
        }
        let inv = 1.0 / u[(j, j)];
        b.col_mut(j).iter_mut().for_each(|v| *v *= inv);
    }
}

/// Solves `L X = B` in place for the leading `r x r` unit lower triangle of `l`.
pub(crate) fn solve_unit_lower_left(l: &DenseMat, r: usize, b: &mut DenseMat) {
    debug_assert_eq!(b.rows, r);
    for j in 0..b.cols {
        let x = b.col_mut(j);
        for k in 0..r {
            let xk = x[k];
            if xk != 0.0 {
                for i in k + 1..r {
                    x[i] -= l[(i, k)] * xk;
                }
            }
        }
    }
}
