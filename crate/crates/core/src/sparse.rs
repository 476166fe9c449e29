//! Compressed sparse column storage and the adjacency graph of its pattern.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMat;
use crate::{Error, Result};

/// Sparse matrix in compressed sparse column form.
///
/// Row indices inside every column are strictly increasing, so there are
/// never duplicate `(i, j)` pairs. `symmetric` records that the stored
/// entries are symmetric in both pattern and value; the full pattern is
/// always stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

impl SparseMatrix {
    /// Assembles a matrix from `(row, col, value)` triplets. Duplicate
    /// positions are summed, which is what finite-element assembly wants.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (i, j, v) in triplets {
            if i >= n_rows || j >= n_cols {
                return Err(Error::IndexOutOfRange {
                    row: i,
                    col: j,
                    n_rows,
                    n_cols,
                });
            }
            entries.push((j, i, v));
        }
        entries.sort_unstable_by_key(|&(j, i, _)| (j, i));

        let mut col_ptr = vec![0usize; n_cols + 1];
        let mut row_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (j, i, v) in entries {
            if last == Some((j, i)) {
                *values.last_mut().unwrap() += v;
            } else {
                row_idx.push(i);
                values.push(v);
                col_ptr[j + 1] += 1;
                last = Some((j, i));
            }
        }
        for j in 0..n_cols {
            col_ptr[j + 1] += col_ptr[j];
        }
        Ok(Self {
            n_rows,
            n_cols,
            col_ptr,
            row_idx,
            values,
            symmetric: false,
        })
    }

    /// Builds the matrix from already-compressed arrays, validating them.
    pub fn from_csc(
        n_rows: usize,
        n_cols: usize,
        col_ptr: Vec<usize>,
        row_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if col_ptr.len() != n_cols + 1 {
            return Err(Error::DimensionMismatch {
                expected: n_cols + 1,
                found: col_ptr.len(),
            });
        }
        if row_idx.len() != values.len() || col_ptr[n_cols] != row_idx.len() {
            return Err(Error::DimensionMismatch {
                expected: col_ptr[n_cols],
                found: row_idx.len(),
            });
        }
        for j in 0..n_cols {
            if col_ptr[j] > col_ptr[j + 1] {
                return Err(Error::InvalidParameter("column pointers must be non-decreasing"));
            }
            let rows = &row_idx[col_ptr[j]..col_ptr[j + 1]];
            for (k, &i) in rows.iter().enumerate() {
                if i >= n_rows {
                    return Err(Error::IndexOutOfRange {
                        row: i,
                        col: j,
                        n_rows,
                        n_cols,
                    });
                }
                if k > 0 && rows[k - 1] >= i {
                    return Err(Error::InvalidParameter(
                        "row indices must be strictly increasing within a column",
                    ));
                }
            }
        }
        Ok(Self {
            n_rows,
            n_cols,
            col_ptr,
            row_idx,
            values,
            symmetric: false,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            col_ptr: (0..=n).collect(),
            row_idx: (0..n).collect(),
            values: vec![1.0; n],
            symmetric: true,
        }
    }

    /// Sets the symmetry flag after checking it holds exactly.
    pub fn mark_symmetric(mut self) -> Result<Self> {
        if !self.is_symmetric(0.0) {
            return Err(Error::InvalidParameter("matrix is not symmetric"));
        }
        self.symmetric = true;
        Ok(self)
    }

    pub(crate) fn with_symmetric_flag(mut self, symmetric: bool) -> Self {
        self.symmetric = symmetric;
        self
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    pub fn symmetric_flag(&self) -> bool {
        self.symmetric
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_indices(&self) -> &[usize] {
        &self.row_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row indices and values of column `j`.
    #[inline]
    pub fn column(&self, j: usize) -> (&[usize], &[f64]) {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[range.clone()], &self.values[range])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (rows, vals) = self.column(j);
        rows.binary_search(&i).map_or(0.0, |k| vals[k])
    }

    /// Iterates stored entries column by column.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_cols).flat_map(move |j| {
            let (rows, vals) = self.column(j);
            rows.iter().zip(vals).map(move |(&i, &v)| (i, j, v))
        })
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols)).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n_rows];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                found: x.len(),
            });
        }
        if y.len() != self.n_rows {
            return Err(Error::DimensionMismatch {
                expected: self.n_rows,
                found: y.len(),
            });
        }
        y.iter_mut().for_each(|v| *v = 0.0);
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            let (rows, vals) = self.column(j);
            for (&i, &v) in rows.iter().zip(vals) {
                y[i] += v * xj;
            }
        }
        Ok(())
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.n_rows + 1];
        for &i in &self.row_idx {
            counts[i + 1] += 1;
        }
        for i in 0..self.n_rows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut row_idx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for (i, j, v) in self.triplets() {
            let k = next[i];
            next[i] += 1;
            row_idx[k] = j;
            values[k] = v;
        }
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            col_ptr: counts,
            row_idx,
            values,
            symmetric: self.symmetric,
        }
    }

    /// Exact pattern symmetry plus value symmetry within `tol` (absolute,
    /// relative to the largest entry).
    pub fn is_symmetric(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let t = self.transpose();
        if t.col_ptr != self.col_ptr || t.row_idx != self.row_idx {
            return false;
        }
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        self.values
            .iter()
            .zip(&t.values)
            .all(|(a, b)| (a - b).abs() <= tol * scale)
    }

    /// Symmetric permutation `P A Pᵀ`, where `perm[old] = new`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Result<SparseMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.n_rows,
                cols: self.n_cols,
            });
        }
        if perm.len() != self.n_rows {
            return Err(Error::DimensionMismatch {
                expected: self.n_rows,
                found: perm.len(),
            });
        }
        let n = self.n_rows;
        let mut inv = vec![usize::MAX; n];
        for (old, &new) in perm.iter().enumerate() {
            if new >= n || inv[new] != usize::MAX {
                return Err(Error::InvalidParameter("not a permutation"));
            }
            inv[new] = old;
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        col_ptr.push(0);
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for &old_j in &inv {
            let (rows, vals) = self.column(old_j);
            scratch.clear();
            scratch.extend(rows.iter().zip(vals).map(|(&i, &v)| (perm[i], v)));
            scratch.sort_unstable_by_key(|e| e.0);
            for &(i, v) in &scratch {
                row_idx.push(i);
                values.push(v);
            }
            col_ptr.push(row_idx.len());
        }
        Ok(SparseMatrix {
            n_rows: n,
            n_cols: n,
            col_ptr,
            row_idx,
            values,
            symmetric: self.symmetric,
        })
    }

    pub fn to_dense(&self) -> DenseMat {
        let mut d = DenseMat::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.triplets() {
            d[(i, j)] = v;
        }
        d
    }

    /// Multiplies row `i` by `factors[i]`.
    pub fn scale_rows(&self, factors: &[f64]) -> SparseMatrix {
        let mut out = self.clone();
        for (k, &i) in self.row_idx.iter().enumerate() {
            out.values[k] *= factors[i];
        }
        out.symmetric = false;
        out
    }
}

/// Divisors applied by [`row_scale`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRecord {
    pub row_scales: Vec<f64>,
}

impl ScalingRecord {
    /// Multiplies the rows of a scaled matrix back by their divisors.
    pub fn unscale(&self, scaled: &SparseMatrix) -> SparseMatrix {
        scaled.scale_rows(&self.row_scales)
    }
}

/// Divides every row of `a` (and the matching entry of `b`) by the row's
/// largest absolute entry.
pub fn row_scale(a: &SparseMatrix, b: &[f64]) -> Result<(SparseMatrix, Vec<f64>, ScalingRecord)> {
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.len(),
        });
    }
    let mut row_max = vec![0.0f64; a.nrows()];
    for (i, _, v) in a.triplets() {
        row_max[i] = row_max[i].max(v.abs());
    }
    if let Some(row) = row_max.iter().position(|&m| m == 0.0) {
        return Err(Error::ZeroRow { row });
    }
    let mut scaled = a.clone();
    for (k, &i) in a.row_idx.iter().enumerate() {
        scaled.values[k] = a.values[k] / row_max[i];
    }
    scaled.symmetric = false;
    let b_scaled = b.iter().zip(&row_max).map(|(v, m)| v / m).collect();
    Ok((scaled, b_scaled, ScalingRecord { row_scales: row_max }))
}

/// Undirected graph stored as sorted, duplicate-free adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AdjGraph {
    xadj: Vec<usize>,
    adj: Vec<usize>,
}

impl AdjGraph {
    /// Builds a graph from an edge list; edges are symmetrized, self-loops
    /// and duplicates dropped.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut lists: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange {
                        vertex: w,
                        n_vertices: n,
                    });
                }
            }
            if u != v {
                lists[u].push(v);
                lists[v].push(u);
            }
        }
        Ok(Self::from_lists(lists))
    }

    fn from_lists(mut lists: Vec<Vec<usize>>) -> Self {
        let mut xadj = Vec::with_capacity(lists.len() + 1);
        let mut adj = Vec::new();
        xadj.push(0);
        for l in &mut lists {
            l.sort_unstable();
            l.dedup();
            adj.extend_from_slice(l);
            xadj.push(adj.len());
        }
        Self { xadj, adj }
    }

    #[inline]
    pub fn n_vertices(&self) -> usize {
        self.xadj.len().saturating_sub(1)
    }

    /// Number of undirected edges.
    pub fn n_edges(&self) -> usize {
        self.adj.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.xadj[v]..self.xadj[v + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Relabels vertices with `perm[old] = new`.
    pub fn permuted(&self, perm: &[usize]) -> AdjGraph {
        let n = self.n_vertices();
        let mut lists = vec![Vec::new(); n];
        for v in 0..n {
            lists[perm[v]] = self.neighbors(v).iter().map(|&w| perm[w]).collect();
        }
        Self::from_lists(lists)
    }

    /// Subgraph induced by `vertices` (sorted, distinct), relabelled to
    /// their positions `0..vertices.len()`.
    pub fn induced(&self, vertices: &[usize]) -> AdjGraph {
        let mut xadj = Vec::with_capacity(vertices.len() + 1);
        let mut adj = Vec::new();
        xadj.push(0);
        for &v in vertices {
            // both lists are sorted: merge
            let nb = self.neighbors(v);
            let (mut a, mut b) = (0, 0);
            while a < nb.len() && b < vertices.len() {
                match nb[a].cmp(&vertices[b]) {
                    core::cmp::Ordering::Less => a += 1,
                    core::cmp::Ordering::Greater => b += 1,
                    core::cmp::Ordering::Equal => {
                        adj.push(b);
                        a += 1;
                        b += 1;
                    }
                }
            }
            xadj.push(adj.len());
        }
        AdjGraph { xadj, adj }
    }
}

/// Symmetrized pattern of a square matrix with the diagonal dropped.
pub fn adjacency_graph(a: &SparseMatrix) -> Result<AdjGraph> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let mut lists = vec![Vec::new(); a.nrows()];
    for j in 0..a.ncols() {
        for &i in a.column(j).0 {
            if i != j {
                lists[i].push(j);
                lists[j].push(i);
            }
        }
    }
    Ok(AdjGraph::from_lists(lists))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize) -> SparseMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        SparseMatrix::from_triplets(n, n, t).unwrap()
    }

    #[test]
    fn triplets_are_sorted_and_summed() {
        let a = SparseMatrix::from_triplets(2, 2, [(1, 0, 1.0), (0, 0, 2.0), (1, 0, 3.0)]).unwrap();
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(1, 0), 4.0);
        assert_eq!(a.row_indices(), &[0, 1]);
    }

    #[test]
    fn out_of_range_triplet_is_rejected() {
        let err = SparseMatrix::from_triplets(2, 2, [(2, 0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { row: 2, .. }));
    }

    #[test]
    fn spmv_examples() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(SparseMatrix::identity(3).spmv(&x).unwrap(), x.to_vec());
        let zero = SparseMatrix::from_triplets(3, 3, []).unwrap();
        assert_eq!(zero.spmv(&x).unwrap(), vec![0.0; 3]);
        assert_eq!(tridiag(3).spmv(&[1.0; 3]).unwrap(), vec![1.0, 0.0, 1.0]);
        assert!(matches!(
            tridiag(3).spmv(&[1.0; 2]),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn row_scale_examples() {
        let a = SparseMatrix::from_triplets(2, 2, [(0, 0, 2.0), (1, 1, 4.0)]).unwrap();
        let (s, b, rec) = row_scale(&a, &[2.0, 4.0]).unwrap();
        assert_eq!(s.to_dense(), DenseMat::identity(2));
        assert_eq!(b, vec![1.0, 1.0]);
        assert_eq!(rec.row_scales, vec![2.0, 4.0]);

        let (s2, _, rec2) = row_scale(&s, &b).unwrap();
        assert_eq!(s2.values(), s.values());
        assert_eq!(rec2.row_scales, vec![1.0, 1.0]);

        let r = SparseMatrix::from_triplets(1, 3, [(0, 0, 3.0), (0, 1, -6.0), (0, 2, 1.5)]).unwrap();
        let (s3, _, rec3) = row_scale(&r, &[1.0]).unwrap();
        assert_eq!(s3.values(), &[0.5, -1.0, 0.25]);
        assert_eq!(rec3.row_scales, vec![6.0]);
    }

    #[test]
    fn zero_row_is_named() {
        let a = SparseMatrix::from_triplets(3, 3, [(0, 0, 1.0), (2, 2, 1.0), (1, 1, 0.0)]).unwrap();
        assert_eq!(row_scale(&a, &[1.0; 3]).unwrap_err(), Error::ZeroRow { row: 1 });
    }

    #[test]
    fn adjacency_examples() {
        let d = SparseMatrix::identity(4);
        assert_eq!(adjacency_graph(&d).unwrap().n_edges(), 0);

        let g = adjacency_graph(&tridiag(4)).unwrap();
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.neighbors(2), &[1, 3]);
        assert_eq!(g.neighbors(3), &[2]);

        let u = SparseMatrix::from_triplets(2, 2, [(0, 1, 5.0)]).unwrap();
        let gu = adjacency_graph(&u).unwrap();
        assert!(gu.has_edge(0, 1) && gu.has_edge(1, 0));

        let rect = SparseMatrix::from_triplets(2, 3, []).unwrap();
        assert_eq!(
            adjacency_graph(&rect).unwrap_err(),
            Error::NotSquare { rows: 2, cols: 3 }
        );
    }

    #[test]
    fn induced_subgraph_relabels() {
        let g = adjacency_graph(&tridiag(5)).unwrap();
        let h = g.induced(&[1, 2, 4]);
        assert_eq!(h.neighbors(0), &[1]);
        assert_eq!(h.neighbors(1), &[0]);
        assert!(h.neighbors(2).is_empty());
    }

    #[test]
    fn symmetric_permutation() {
        let a = tridiag(3);
        let p = a.permute_symmetric(&[2, 0, 1]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let (ni, nj) = ([2, 0, 1][i], [2, 0, 1][j]);
                assert_eq!(p.get(ni, nj), a.get(i, j));
            }
        }
        assert!(a.is_symmetric(0.0));
    }
}
