//! Boundary-distance low-rank compression.
//!
//! An off-diagonal block `B` is approximated from a few of its own rows and
//! columns. The candidate rows `I` and columns `J` are the vertices that lie
//! within graph distance `d` of the opposite index set; the intersection
//! `B(I, J)` is factorized with complete pivoting and truncated at the first
//! pivot that falls below `eps` relative to the first one. With
//! `P B(I,J) Q = L U`,
//!
//! ```text
//! C~ = B(:, J Q)(:, 1:r) U(1:r,1:r)^-1
//! R~ = L(1:r,1:r)^-1 B(I P, :)(1:r, :)
//! B  ~ C~ R~
//! ```
//!
//! Only the `r` pivot rows and columns of `B` are sampled beyond `B(I, J)`.

use alloc::vec::Vec;

use crate::dense::{self, DenseMat};
use crate::ordering::bfs_distances;
use crate::sparse::AdjGraph;
use crate::{Error, Result};

/// Pivots at or below this fraction of the first pivot count as zero.
pub const ZERO_PIVOT_RATIO: f64 = 1e-14;

/// Entry access to a (logically dense) block.
///
/// `sample(rows, cols)` must return the `rows.len() x cols.len()` block at
/// those positions, deterministically.
pub trait BlockSampler {
    fn n_rows(&self) -> usize;
    fn n_cols(&self) -> usize;
    fn sample(&self, rows: &[usize], cols: &[usize]) -> Result<DenseMat>;
}

impl BlockSampler for DenseMat {
    fn n_rows(&self) -> usize {
        self.nrows()
    }

    fn n_cols(&self) -> usize {
        self.ncols()
    }

    fn sample(&self, rows: &[usize], cols: &[usize]) -> Result<DenseMat> {
        for &i in rows {
            if i >= self.nrows() {
                return Err(Error::IndexOutOfRange {
                    row: i,
                    col: 0,
                    n_rows: self.nrows(),
                    n_cols: self.ncols(),
                });
            }
        }
        for &j in cols {
            if j >= self.ncols() {
                return Err(Error::IndexOutOfRange {
                    row: 0,
                    col: j,
                    n_rows: self.nrows(),
                    n_cols: self.ncols(),
                });
            }
        }
        Ok(self.select(rows, cols))
    }
}

impl<S: BlockSampler + ?Sized> BlockSampler for &S {
    fn n_rows(&self) -> usize {
        (**self).n_rows()
    }

    fn n_cols(&self) -> usize {
        (**self).n_cols()
    }

    fn sample(&self, rows: &[usize], cols: &[usize]) -> Result<DenseMat> {
        (**self).sample(rows, cols)
    }
}

/// Window `[row0, row0 + n_rows) x [col0, col0 + n_cols)` of another sampler.
pub struct SubBlock<'a, S: ?Sized> {
    pub inner: &'a S,
    pub row0: usize,
    pub col0: usize,
    pub n_rows: usize,
    pub n_cols: usize,
}

impl<S: BlockSampler + ?Sized> BlockSampler for SubBlock<'_, S> {
    fn n_rows(&self) -> usize {
        self.n_rows
    }

    fn n_cols(&self) -> usize {
        self.n_cols
    }

    fn sample(&self, rows: &[usize], cols: &[usize]) -> Result<DenseMat> {
        let r: Vec<usize> = rows.iter().map(|i| i + self.row0).collect();
        let c: Vec<usize> = cols.iter().map(|j| j + self.col0).collect();
        self.inner.sample(&r, &c)
    }
}

/// Skeleton factorization `B ~ C~ R~` of an `n_rows x n_cols` block.
#[derive(Clone, Debug, PartialEq)]
pub struct LowRankFactor {
    /// `n_rows x r`.
    pub c_tilde: DenseMat,
    /// `r x n_cols`.
    pub r_tilde: DenseMat,
    /// Candidate rows `I` (block-local positions).
    pub selected_rows: Vec<usize>,
    /// Candidate columns `J` (block-local positions).
    pub selected_cols: Vec<usize>,
    /// Magnitudes of the complete-pivoting pivots in the order they were
    /// found, including the first rejected one when truncation happened.
    pub pivots: Vec<f64>,
}

impl LowRankFactor {
    pub fn zero(n_rows: usize, n_cols: usize) -> Self {
        Self {
            c_tilde: DenseMat::zeros(n_rows, 0),
            r_tilde: DenseMat::zeros(0, n_cols),
            selected_rows: Vec::new(),
            selected_cols: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Wraps explicit factors `B = u vᵀ`-style: `c` is `n_rows x r`, `r` is `r x n_cols`.
    pub fn from_factors(c_tilde: DenseMat, r_tilde: DenseMat) -> Self {
        assert_eq!(c_tilde.ncols(), r_tilde.nrows());
        Self {
            c_tilde,
            r_tilde,
            selected_rows: Vec::new(),
            selected_cols: Vec::new(),
            pivots: Vec::new(),
        }
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.c_tilde.ncols()
    }

    pub fn n_rows(&self) -> usize {
        self.c_tilde.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.r_tilde.ncols()
    }

    pub fn stored_reals(&self) -> usize {
        self.c_tilde.len() + self.r_tilde.len()
    }

    pub fn to_dense(&self) -> DenseMat {
        self.c_tilde.matmul(&self.r_tilde)
    }

    /// Ratio of the first rejected pivot to the first pivot, or zero when
    /// the factorization ran to completion.
    pub fn achieved_ratio(&self) -> f64 {
        match (self.pivots.first(), self.pivots.get(self.rank())) {
            (Some(&u11), Some(&next)) if u11 > 0.0 => next / u11,
            _ => 0.0,
        }
    }

    /// `y += alpha C~ (R~ x)`.
    pub fn matvec_acc(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        if self.rank() == 0 {
            return;
        }
        let t = self.r_tilde.matvec(x);
        self.c_tilde.matvec_acc(alpha, &t, y);
    }

    /// `y += alpha (C~ R~)ᵀ x`.
    pub fn matvec_transpose_acc(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        if self.rank() == 0 {
            return;
        }
        let mut t = alloc::vec![0.0; self.rank()];
        self.c_tilde.matvec_transpose_acc(1.0, x, &mut t);
        self.r_tilde.matvec_transpose_acc(alpha, &t, y);
    }

    /// Rows `rows` and columns `cols` of the approximation.
    pub fn entries(&self, rows: &[usize], cols: &[usize]) -> DenseMat {
        if self.rank() == 0 {
            return DenseMat::zeros(rows.len(), cols.len());
        }
        let r = self.rank();
        let c = DenseMat::from_fn(rows.len(), r, |i, k| self.c_tilde[(rows[i], k)]);
        let rt = DenseMat::from_fn(r, cols.len(), |k, j| self.r_tilde[(k, cols[j])]);
        c.matmul(&rt)
    }
}

/// Rows within distance `d` of the column set, and columns within distance
/// `d` of the row set, in `g`. An empty side falls back to the full list.
pub fn select_boundary_indices(
    rows: &[usize],
    cols: &[usize],
    g: &AdjGraph,
    d: usize,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = g.n_vertices();
    if let Some(&vertex) = rows.iter().chain(cols).find(|&&v| v >= n) {
        return Err(Error::VertexOutOfRange { vertex, n_vertices: n });
    }
    let pick = |from: &[usize], to: &[usize]| -> Vec<usize> {
        let dist = bfs_distances(g, to, d);
        let mut chosen: Vec<usize> = from.iter().copied().filter(|&v| dist[v] <= d).collect();
        if chosen.is_empty() {
            chosen = from.to_vec();
        }
        chosen.sort_unstable();
        chosen
    };
    Ok((pick(rows, cols), pick(cols, rows)))
}

/// Pseudoskeleton factorization of the block exposed by `s` from candidate
/// rows `i_set` and columns `j_set`.
pub fn pseudoskeleton_compress(
    s: &(impl BlockSampler + ?Sized),
    i_set: &[usize],
    j_set: &[usize],
    eps: f64,
    max_rank: usize,
) -> Result<LowRankFactor> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter("eps must lie in (0, 1)"));
    }
    if max_rank == 0 {
        return Err(Error::InvalidParameter("max_rank must be at least 1"));
    }
    let (n_rows, n_cols) = (s.n_rows(), s.n_cols());
    if i_set.is_empty() || j_set.is_empty() {
        return Ok(LowRankFactor::zero(n_rows, n_cols));
    }
    let b_hat = s.sample(i_set, j_set)?;
    let piv = complete_pivot_lu(b_hat, eps, max_rank);
    let r = piv.rank;
    let mut out = LowRankFactor::zero(n_rows, n_cols);
    out.selected_rows = i_set.to_vec();
    out.selected_cols = j_set.to_vec();
    out.pivots = piv.pivots;
    if r == 0 {
        return Ok(out);
    }

    let all_rows: Vec<usize> = (0..n_rows).collect();
    let all_cols: Vec<usize> = (0..n_cols).collect();
    let skel_cols: Vec<usize> = piv.col_perm[..r].iter().map(|&q| j_set[q]).collect();
    let skel_rows: Vec<usize> = piv.row_perm[..r].iter().map(|&p| i_set[p]).collect();

    let mut c_tilde = s.sample(&all_rows, &skel_cols)?;
    dense::solve_upper_right(&piv.lu, r, &mut c_tilde);
    let mut r_tilde = s.sample(&skel_rows, &all_cols)?;
    dense::solve_unit_lower_left(&piv.lu, r, &mut r_tilde);
    out.c_tilde = c_tilde;
    out.r_tilde = r_tilde;
    Ok(out)
}

pub(crate) struct CompletePivotLu {
    /// Packed `L` (strictly lower, unit diagonal implied) and `U`, permuted.
    pub lu: DenseMat,
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
    pub rank: usize,
    pub pivots: Vec<f64>,
}

/// Gaussian elimination with complete pivoting, stopped at the first pivot
/// whose ratio to the first pivot drops below `eps` (or the zero threshold),
/// or once `max_rank` pivots were accepted.
pub(crate) fn complete_pivot_lu(mut a: DenseMat, eps: f64, max_rank: usize) -> CompletePivotLu {
    let (m, n) = (a.nrows(), a.ncols());
    let mut row_perm: Vec<usize> = (0..m).collect();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::new();
    let mut u11 = 0.0;
    let mut rank = 0;
    for step in 0..m.min(n) {
        let (mut p, mut q, mut best) = (step, step, -1.0);
        for j in step..n {
            for (i, v) in a.col(j)[step..].iter().enumerate() {
                if v.abs() > best {
                    best = v.abs();
                    p = step + i;
                    q = j;
                }
            }
        }
        if step == 0 {
            u11 = best;
            if best == 0.0 || !best.is_finite() {
                break;
            }
        }
        pivots.push(best);
        if step >= max_rank || best / u11 < eps || best <= ZERO_PIVOT_RATIO * u11 {
            break;
        }
        if p != step {
            row_perm.swap(step, p);
            for j in 0..n {
                let c = a.col_mut(j);
                c.swap(step, p);
            }
        }
        if q != step {
            col_perm.swap(step, q);
            for i in 0..m {
                let t = a[(i, step)];
                a[(i, step)] = a[(i, q)];
                a[(i, q)] = t;
            }
        }
        let inv = 1.0 / a[(step, step)];
        for v in &mut a.col_mut(step)[step + 1..] {
            *v *= inv;
        }
        let l: Vec<f64> = a.col(step)[step + 1..].to_vec();
        for j in step + 1..n {
            let f = a[(step, j)];
            if f != 0.0 {
                dense::axpy(-f, &l, &mut a.col_mut(j)[step + 1..]);
            }
        }
        rank = step + 1;
    }
    CompletePivotLu {
        lu: a,
        row_perm,
        col_perm,
        rank,
        pivots,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn path(n: usize) -> AdjGraph {
        AdjGraph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn boundary_selection_on_a_path() {
        let g = path(6);
        let (i, j) = select_boundary_indices(&[0, 1, 2], &[3, 4, 5], &g, 1).unwrap();
        assert_eq!((i, j), (vec![2], vec![3]));
        let (i, j) = select_boundary_indices(&[0, 1, 2], &[3, 4, 5], &g, 2).unwrap();
        assert_eq!((i, j), (vec![1, 2], vec![3, 4]));
    }

    #[test]
    fn disconnected_sides_fall_back_to_everything() {
        let g = AdjGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let (i, j) = select_boundary_indices(&[0, 1], &[2, 3], &g, 1).unwrap();
        assert_eq!((i, j), (vec![0, 1], vec![2, 3]));
    }

    #[test]
    fn unknown_vertex_is_an_error() {
        let err = select_boundary_indices(&[0], &[7], &path(3), 1).unwrap_err();
        assert_eq!(
            err,
            Error::VertexOutOfRange {
                vertex: 7,
                n_vertices: 3
            }
        );
    }

    #[test]
    fn zero_block_has_rank_zero() {
        let b = DenseMat::zeros(5, 4);
        let f = pseudoskeleton_compress(&b, &[0, 2], &[1, 3], 1e-8, usize::MAX).unwrap();
        assert_eq!(f.rank(), 0);
        assert_eq!(f.to_dense(), DenseMat::zeros(5, 4));
    }

    #[test]
    fn rank_one_block_is_exact() {
        let u = [1.0, -2.0, 0.5, 3.0];
        let v = [2.0, 1.0, -1.0];
        let b = DenseMat::from_fn(4, 3, |i, j| u[i] * v[j]);
        let f = pseudoskeleton_compress(&b, &[0, 1, 2, 3], &[0, 1, 2], 1e-8, usize::MAX).unwrap();
        assert_eq!(f.rank(), 1);
        let err = f.to_dense().sub(&b).frobenius_norm() / b.frobenius_norm();
        assert!(err <= 1e-12, "{err}");
    }

    #[test]
    fn max_rank_caps_the_factor() {
        let b = DenseMat::identity(6);
        let all: Vec<usize> = (0..6).collect();
        let f = pseudoskeleton_compress(&b, &all, &all, 1e-12, 2).unwrap();
        assert_eq!(f.rank(), 2);
        assert!((f.achieved_ratio() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parameter_validation() {
        let b = DenseMat::identity(2);
        assert!(pseudoskeleton_compress(&b, &[0], &[0], 0.0, 1).is_err());
        assert!(pseudoskeleton_compress(&b, &[0], &[0], 1.0, 1).is_err());
        assert!(pseudoskeleton_compress(&b, &[0], &[0], 0.1, 0).is_err());
    }

    #[test]
    fn sub_block_shifts_indices() {
        let b = DenseMat::from_fn(4, 4, |i, j| (10 * i + j) as f64);
        let s = SubBlock {
            inner: &b,
            row0: 2,
            col0: 1,
            n_rows: 2,
            n_cols: 3,
        };
        assert_eq!(s.sample(&[1], &[0, 2]).unwrap().as_slice(), &[31.0, 33.0]);
    }
}
