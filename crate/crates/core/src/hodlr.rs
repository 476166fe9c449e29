//! Hierarchically off-diagonal low-rank (HODLR) matrices.
//!
//! A HODLR matrix splits its index range at the midpoint, keeps the two
//! diagonal halves as HODLR matrices themselves, and stores both
//! off-diagonal blocks as skeleton factors. Recursion stops at dense leaves.
//!
//! The factorization is exact with respect to the stored representation:
//! writing a split node as `H = D + Z Wᵀ` with `D = diag(A1, A2)`,
//! `Z = diag(U1, U2)` and `Wᵀ = [[0, R1], [R2, 0]]`, the solve applies
//! `H⁻¹ = D⁻¹ - Y K⁻¹ Wᵀ D⁻¹` with `Y = D⁻¹ Z` and `K = I + Wᵀ Y`.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::bdlr::{pseudoskeleton_compress, select_boundary_indices, BlockSampler, LowRankFactor, SubBlock};
use crate::dense::{self, DenseLu, DenseMat};
use crate::sparse::AdjGraph;
use crate::{Error, Result};

const PROBE_MIN: usize = 8;

pub const DEFAULT_LEAF_SIZE: usize = 64;

/// Construction parameters shared by every off-diagonal compression.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HodlrOptions {
    pub n_leaf: usize,
    /// Relative pivot tolerance of the skeleton factorization.
    pub eps: f64,
    /// BDLR boundary distance.
    pub depth: usize,
    pub max_rank: usize,
    /// Doubles the boundary distance while every candidate pivot is
    /// accepted, ending at the full index sets.
    pub grow_depth: bool,
}

impl Default for HodlrOptions {
    fn default() -> Self {
        Self {
            n_leaf: DEFAULT_LEAF_SIZE,
            eps: 1e-8,
            depth: 1,
            max_rank: usize::MAX,
            grow_depth: true,
        }
    }
}

impl HodlrOptions {
    fn validate(&self) -> Result<()> {
        if self.n_leaf == 0 {
            return Err(Error::InvalidParameter("n_leaf must be at least 1"));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidParameter("eps must lie in (0, 1)"));
        }
        if self.max_rank == 0 {
            return Err(Error::InvalidParameter("max_rank must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Leaf(DenseMat),
    Split {
        /// Size of the first child.
        mid: usize,
        first: Box<Node>,
        second: Box<Node>,
        /// Block `(first rows, second cols)`.
        upper: LowRankFactor,
        /// Block `(second rows, first cols)`.
        lower: LowRankFactor,
    },
}

/// HODLR approximation of a square block.
#[derive(Clone, Debug, PartialEq)]
pub struct HodlrMatrix {
    n: usize,
    n_leaf: usize,
    root: Node,
}

/// Rank statistics of one level of the hierarchy.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelRanks {
    pub level: usize,
    pub blocks: usize,
    pub min_rank: usize,
    pub mean_rank: f64,
    pub max_rank: usize,
}

/// Compresses the block of `s` with top-left corner `(row0, col0)` whose
/// rows and columns carry the sorted graph vertices `row_ids` and `col_ids`.
pub(crate) fn compress_block(
    s: &(impl BlockSampler + ?Sized),
    g: &AdjGraph,
    row_ids: &[usize],
    col_ids: &[usize],
    row0: usize,
    col0: usize,
    opts: &HodlrOptions,
) -> Result<LowRankFactor> {
    let block = SubBlock {
        inner: s,
        row0,
        col0,
        n_rows: row_ids.len(),
        n_cols: col_ids.len(),
    };
    let local = |ids: &[usize], chosen: &[usize]| -> Vec<usize> {
        chosen.iter().map(|v| ids.binary_search(v).unwrap_or(0)).collect()
    };
    let all_rows: Vec<usize> = (0..row_ids.len()).collect();
    let all_cols: Vec<usize> = (0..col_ids.len()).collect();
    let mut depth = opts.depth;
    let (i_set, j_set) = select_boundary_indices(row_ids, col_ids, g, depth)?;
    let mut reach = (i_set.len(), j_set.len());
    let (mut rows, mut cols) = (local(row_ids, &i_set), local(col_ids, &j_set));
    loop {
        let f = pseudoskeleton_compress(&block, &rows, &cols, opts.eps, opts.max_rank)?;
        let full = rows.len() == row_ids.len() && cols.len() == col_ids.len();
        if !opts.grow_depth || full || f.rank() >= opts.max_rank {
            return Ok(f);
        }
        depth = depth.saturating_mul(2);
        let (i_set, j_set) = select_boundary_indices(row_ids, col_ids, g, depth)?;
        let exhausted = (i_set.len(), j_set.len()) == reach;
        reach = (i_set.len(), j_set.len());
        let (next_rows, next_cols) = if exhausted {
            (all_rows.clone(), all_cols.clone())
        } else {
            (
                with_probes(local(row_ids, &i_set), row_ids.len(), rows.len()),
                with_probes(local(col_ids, &j_set), col_ids.len(), cols.len()),
            )
        };
        let exact = block.sample(&next_rows, &next_cols)?;
        let err = f.entries(&next_rows, &next_cols).sub(&exact).max_abs();
        if err <= opts.eps * exact.max_abs() {
            return Ok(f);
        }
        rows = next_rows;
        cols = next_cols;
    }
}

/// Adds evenly spaced positions of `0..n` to `set` so a check also sees
/// rows far from the boundary.
fn with_probes(mut set: Vec<usize>, n: usize, count: usize) -> Vec<usize> {
    let count = count.max(PROBE_MIN).min(n);
    set.extend((0..count).map(|k| k * n / count));
    set.sort_unstable();
    set.dedup();
    set
}

/// Builds a HODLR matrix from entry samples of the square block `s`.
///
/// Position `i` of the block is vertex `ids[i]` of the interaction graph
/// `g`; `ids` must be strictly increasing.
pub fn build_hodlr(
    s: &(impl BlockSampler + ?Sized),
    ids: &[usize],
    g: &AdjGraph,
    opts: &HodlrOptions,
) -> Result<HodlrMatrix> {
    opts.validate()?;
    let n = s.n_rows();
    if s.n_cols() != n {
        return Err(Error::NotSquare {
            rows: n,
            cols: s.n_cols(),
        });
    }
    if ids.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: ids.len(),
        });
    }
    if !ids.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter("graph ids must be strictly increasing"));
    }
    let root = build_node(s, ids, g, 0, n, opts)?;
    Ok(HodlrMatrix {
        n,
        n_leaf: opts.n_leaf,
        root,
    })
}

fn build_node(
    s: &(impl BlockSampler + ?Sized),
    ids: &[usize],
    g: &AdjGraph,
    lo: usize,
    hi: usize,
    opts: &HodlrOptions,
) -> Result<Node> {
    let size = hi - lo;
    if size <= opts.n_leaf {
        let pos: Vec<usize> = (lo..hi).collect();
        return Ok(Node::Leaf(s.sample(&pos, &pos)?));
    }
    let mid = lo + size / 2;
    let first = build_node(s, ids, g, lo, mid, opts)?;
    let second = build_node(s, ids, g, mid, hi, opts)?;
    let upper = compress_block(s, g, &ids[lo..mid], &ids[mid..hi], lo, mid, opts)?;
    let lower = compress_block(s, g, &ids[mid..hi], &ids[lo..mid], mid, lo, opts)?;
    Ok(Node::Split {
        mid: mid - lo,
        first: Box::new(first),
        second: Box::new(second),
        upper,
        lower,
    })
}

impl HodlrMatrix {
    /// A single dense leaf.
    pub fn from_dense(m: DenseMat) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self {
            n: m.nrows(),
            n_leaf: m.nrows().max(1),
            root: Node::Leaf(m),
        }
    }

    /// Assembles a one-level HODLR matrix from explicit parts; mostly for tests.
    pub fn from_parts(
        first: HodlrMatrix,
        second: HodlrMatrix,
        upper: LowRankFactor,
        lower: LowRankFactor,
    ) -> Result<Self> {
        let (n1, n2) = (first.n, second.n);
        if upper.n_rows() != n1 || upper.n_cols() != n2 || lower.n_rows() != n2 || lower.n_cols() != n1 {
            return Err(Error::DimensionMismatch {
                expected: n1 + n2,
                found: upper.n_rows() + lower.n_rows(),
            });
        }
        Ok(Self {
            n: n1 + n2,
            n_leaf: first.n_leaf.max(second.n_leaf),
            root: Node::Split {
                mid: n1,
                first: Box::new(first.root),
                second: Box::new(second.root),
                upper,
                lower,
            },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_leaf(&self) -> usize {
        self.n_leaf
    }

    pub fn stored_reals(&self) -> usize {
        fn walk(node: &Node) -> usize {
            match node {
                Node::Leaf(m) => m.len(),
                Node::Split {
                    first,
                    second,
                    upper,
                    lower,
                    ..
                } => walk(first) + walk(second) + upper.stored_reals() + lower.stored_reals(),
            }
        }
        walk(&self.root)
    }

    /// Largest off-diagonal rank anywhere in the hierarchy.
    pub fn max_rank(&self) -> usize {
        self.rank_table().iter().map(|l| l.max_rank).max().unwrap_or(0)
    }

    /// Number of dense leaves and their largest size.
    pub fn leaf_sizes(&self) -> Vec<usize> {
        fn walk(node: &Node, out: &mut Vec<usize>) {
            match node {
                Node::Leaf(m) => out.push(m.nrows()),
                Node::Split { first, second, .. } => {
                    walk(first, out);
                    walk(second, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    pub fn rank_table(&self) -> Vec<LevelRanks> {
        fn walk(node: &Node, level: usize, acc: &mut Vec<Vec<usize>>) {
            if let Node::Split {
                first,
                second,
                upper,
                lower,
                ..
            } = node
            {
                if acc.len() <= level {
                    acc.push(Vec::new());
                }
                acc[level].push(upper.rank());
                acc[level].push(lower.rank());
                walk(first, level + 1, acc);
                walk(second, level + 1, acc);
            }
        }
        let mut acc = Vec::new();
        walk(&self.root, 0, &mut acc);
        acc.into_iter()
            .enumerate()
            .map(|(level, ranks)| LevelRanks {
                level,
                blocks: ranks.len(),
                min_rank: ranks.iter().copied().min().unwrap_or(0),
                mean_rank: ranks.iter().sum::<usize>() as f64 / ranks.len() as f64,
                max_rank: ranks.iter().copied().max().unwrap_or(0),
            })
            .collect()
    }

    /// `level,blocks,min_rank,mean_rank,max_rank` CSV of [`Self::rank_table`].
    pub fn rank_table_csv(&self) -> String {
        let mut s = String::from("level,blocks,min_rank,mean_rank,max_rank\n");
        for l in self.rank_table() {
            let _ = writeln!(
                s,
                "{},{},{},{:.3},{}",
                l.level, l.blocks, l.min_rank, l.mean_rank, l.max_rank
            );
        }
        s
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let mut y = vec![0.0; self.n];
        matvec_node(&self.root, x, &mut y);
        Ok(y)
    }

    pub fn to_dense(&self) -> DenseMat {
        let all: Vec<usize> = (0..self.n).collect();
        self.extract(&all, &all)
    }

    /// Entries at sorted, distinct local positions, touching only the
    /// blocks that intersect the request.
    pub fn extract(&self, rows: &[usize], cols: &[usize]) -> DenseMat {
        debug_assert!(rows.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(cols.windows(2).all(|w| w[0] < w[1]));
        let mut out = DenseMat::zeros(rows.len(), cols.len());
        extract_node(&self.root, 0, rows, cols, &mut out, 0, 0);
        out
    }

    /// Factorizes a copy of the matrix.
    pub fn factorize(&self) -> Result<HodlrFactorization> {
        self.clone().into_factorization()
    }

    /// Factorizes, consuming the matrix. Leaf blocks are overwritten by their
    /// LU factors and the column bases by `D⁻¹ Z`.
    pub fn into_factorization(self) -> Result<HodlrFactorization> {
        let mut counter = 0;
        let root = factor_node(self.root, 0, self.n, &mut counter)?;
        Ok(HodlrFactorization { n: self.n, root })
    }
}

fn matvec_node(node: &Node, x: &[f64], y: &mut [f64]) {
    match node {
        Node::Leaf(m) => m.matvec_acc(1.0, x, y),
        Node::Split {
            mid,
            first,
            second,
            upper,
            lower,
        } => {
            let (x1, x2) = x.split_at(*mid);
            let (y1, y2) = y.split_at_mut(*mid);
            matvec_node(first, x1, y1);
            upper.matvec_acc(1.0, x2, y1);
            matvec_node(second, x2, y2);
            lower.matvec_acc(1.0, x1, y2);
        }
    }
}

fn extract_node(node: &Node, lo: usize, rows: &[usize], cols: &[usize], out: &mut DenseMat, r0: usize, c0: usize) {
    if rows.is_empty() || cols.is_empty() {
        return;
    }
    match node {
        Node::Leaf(m) => {
            for (b, &j) in cols.iter().enumerate() {
                for (a, &i) in rows.iter().enumerate() {
                    out[(r0 + a, c0 + b)] = m[(i - lo, j - lo)];
                }
            }
        }
        Node::Split {
            mid,
            first,
            second,
            upper,
            lower,
        } => {
            let split = lo + mid;
            let a = rows.partition_point(|&i| i < split);
            let b = cols.partition_point(|&j| j < split);
            extract_node(first, lo, &rows[..a], &cols[..b], out, r0, c0);
            extract_node(second, split, &rows[a..], &cols[b..], out, r0 + a, c0 + b);
            if a > 0 && b < cols.len() && upper.rank() > 0 {
                let r: Vec<usize> = rows[..a].iter().map(|i| i - lo).collect();
                let c: Vec<usize> = cols[b..].iter().map(|j| j - split).collect();
                out.set_block(r0, c0 + b, &upper.entries(&r, &c));
            }
            if a < rows.len() && b > 0 && lower.rank() > 0 {
                let r: Vec<usize> = rows[a..].iter().map(|i| i - split).collect();
                let c: Vec<usize> = cols[..b].iter().map(|j| j - lo).collect();
                out.set_block(r0 + a, c0, &lower.entries(&r, &c));
            }
        }
    }
}

#[derive(Clone, Debug)]
enum FactorNode {
    Leaf(DenseLu),
    Split {
        mid: usize,
        first: Box<FactorNode>,
        second: Box<FactorNode>,
        /// `A1⁻¹ U1`.
        y_upper: DenseMat,
        /// `A2⁻¹ U2`.
        y_lower: DenseMat,
        /// `R1`, row basis of the upper block.
        r_upper: DenseMat,
        /// `R2`, row basis of the lower block.
        r_lower: DenseMat,
        /// LU of `K = I + Wᵀ Y`; `None` when both ranks are zero.
        core: Option<DenseLu>,
    },
}

/// Factorization of a [`HodlrMatrix`], exact with respect to the stored
/// representation.
#[derive(Clone, Debug)]
pub struct HodlrFactorization {
    n: usize,
    root: FactorNode,
}

fn factor_node(node: Node, lo: usize, hi: usize, counter: &mut usize) -> Result<FactorNode> {
    match node {
        Node::Leaf(m) => DenseLu::factor(m)
            .map(FactorNode::Leaf)
            .map_err(|_| Error::SingularLeaf { start: lo, end: hi }),
        Node::Split {
            mid,
            first,
            second,
            upper,
            lower,
        } => {
            let id = *counter;
            *counter += 1;
            let first = factor_node(*first, lo, lo + mid, counter)?;
            let second = factor_node(*second, lo + mid, hi, counter)?;
            let mut y_upper = upper.c_tilde;
            solve_rows(&first, &mut y_upper, 0);
            let mut y_lower = lower.c_tilde;
            solve_rows(&second, &mut y_lower, 0);
            let (r1, r2) = (y_upper.ncols(), y_lower.ncols());
            let core = if r1 + r2 > 0 {
                let mut k = DenseMat::identity(r1 + r2);
                if r1 > 0 && r2 > 0 {
                    k.set_block(0, r1, &upper.r_tilde.matmul(&y_lower));
                    k.set_block(r1, 0, &lower.r_tilde.matmul(&y_upper));
                }
                Some(DenseLu::factor(k).map_err(|_| Error::SingularCore { node: id })?)
            } else {
                None
            };
            Ok(FactorNode::Split {
                mid,
                first: Box::new(first),
                second: Box::new(second),
                y_upper,
                y_lower,
                r_upper: upper.r_tilde,
                r_lower: lower.r_tilde,
                core,
            })
        }
    }
}

/// Solves in place on rows `lo..lo + n(node)` of every column of `b`.
fn solve_rows(node: &FactorNode, b: &mut DenseMat, lo: usize) {
    match node {
        FactorNode::Leaf(lu) => {
            let n = lu.dim();
            for j in 0..b.ncols() {
                lu.solve_in_place(&mut b.col_mut(j)[lo..lo + n]);
            }
        }
        FactorNode::Split {
            mid,
            first,
            second,
            y_upper,
            y_lower,
            r_upper,
            r_lower,
            core,
        } => {
            solve_rows(first, b, lo);
            solve_rows(second, b, lo + mid);
            let Some(core) = core else { return };
            let (r1, r2) = (r_upper.nrows(), r_lower.nrows());
            let n2 = y_lower.nrows();
            let mut t = vec![0.0; r1 + r2];
            for j in 0..b.ncols() {
                let col = b.col_mut(j);
                let (head, tail) = col[lo..lo + mid + n2].split_at_mut(*mid);
                t.iter_mut().for_each(|v| *v = 0.0);
                r_upper.matvec_acc(1.0, tail, &mut t[..r1]);
                r_lower.matvec_acc(1.0, head, &mut t[r1..]);
                core.solve_in_place(&mut t);
                y_upper.matvec_acc(-1.0, &t[..r1], head);
                y_lower.matvec_acc(-1.0, &t[r1..], tail);
            }
        }
    }
}

fn factor_reals(node: &FactorNode) -> usize {
    match node {
        FactorNode::Leaf(lu) => lu.stored_reals(),
        FactorNode::Split {
            first,
            second,
            y_upper,
            y_lower,
            r_upper,
            r_lower,
            core,
            ..
        } => {
            factor_reals(first)
                + factor_reals(second)
                + y_upper.len()
                + y_lower.len()
                + r_upper.len()
                + r_lower.len()
                + core.as_ref().map_or(0, DenseLu::stored_reals)
        }
    }
}

impl HodlrFactorization {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stored_reals(&self) -> usize {
        factor_reals(&self.root)
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<()> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: b.len(),
            });
        }
        let mut m = DenseMat::from_col_major(self.n, 1, b.to_vec());
        solve_rows(&self.root, &mut m, 0);
        b.copy_from_slice(m.as_slice());
        Ok(())
    }

    /// Solves for every column of `b` at once.
    pub fn solve_mat_in_place(&self, b: &mut DenseMat) -> Result<()> {
        if b.nrows() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: b.nrows(),
            });
        }
        solve_rows(&self.root, b, 0);
        Ok(())
    }
}

/// Free-function form of [`HodlrMatrix::factorize`].
pub fn hodlr_factorize(h: &HodlrMatrix) -> Result<HodlrFactorization> {
    h.factorize()
}

/// Deferred child update `F_ff - W Vᵀ` over sorted global indices.
#[derive(Clone, Debug, PartialEq)]
pub struct UpdateRep {
    pub hodlr: HodlrMatrix,
    /// `n x r`.
    pub w: DenseMat,
    /// `n x r`.
    pub v: DenseMat,
    pub global_ids: Vec<usize>,
}

impl UpdateRep {
    pub fn new(hodlr: HodlrMatrix, w: DenseMat, v: DenseMat, global_ids: Vec<usize>) -> Result<Self> {
        let n = hodlr.n();
        for found in [w.nrows(), v.nrows(), global_ids.len()] {
            if found != n {
                return Err(Error::DimensionMismatch { expected: n, found });
            }
        }
        if w.ncols() != v.ncols() {
            return Err(Error::DimensionMismatch {
                expected: w.ncols(),
                found: v.ncols(),
            });
        }
        if !global_ids.windows(2).all(|p| p[0] < p[1]) {
            return Err(Error::InvalidParameter("global ids must be strictly increasing"));
        }
        Ok(Self {
            hodlr,
            w,
            v,
            global_ids,
        })
    }

    pub fn n(&self) -> usize {
        self.global_ids.len()
    }

    /// Rank of the outer product part.
    pub fn rank(&self) -> usize {
        self.w.ncols()
    }

    pub fn stored_reals(&self) -> usize {
        self.hodlr.stored_reals() + self.w.len() + self.v.len()
    }

    /// Local position of a global id.
    pub fn position(&self, id: usize) -> Result<usize> {
        self.global_ids
            .binary_search(&id)
            .map_err(|_| Error::MissingIndex { index: id })
    }

    /// Block at sorted, distinct local positions.
    pub fn sample_local(&self, rows: &[usize], cols: &[usize]) -> DenseMat {
        let mut out = self.hodlr.extract(rows, cols);
        if self.rank() > 0 && !rows.is_empty() && !cols.is_empty() {
            let r = self.rank();
            let wr = DenseMat::from_fn(rows.len(), r, |i, k| self.w[(rows[i], k)]);
            let vc = DenseMat::from_fn(cols.len(), r, |j, k| self.v[(cols[j], k)]);
            dense::gemm_acc(-1.0, &wr, &vc.transpose(), &mut out);
        }
        out
    }

    /// Block at arbitrary global ids (any order, repeats allowed).
    pub fn sample_update(&self, rows: &[usize], cols: &[usize]) -> Result<DenseMat> {
        let r: Vec<usize> = rows.iter().map(|&id| self.position(id)).collect::<Result<_>>()?;
        let c: Vec<usize> = cols.iter().map(|&id| self.position(id)).collect::<Result<_>>()?;
        Ok(self.sample_positions(&r, &c))
    }

    /// Block at arbitrary local positions (any order, repeats allowed).
    pub fn sample_positions(&self, rows: &[usize], cols: &[usize]) -> DenseMat {
        let (ur, rmap) = unique_sorted(rows);
        let (uc, cmap) = unique_sorted(cols);
        let block = self.sample_local(&ur, &uc);
        if rmap.is_none() && cmap.is_none() {
            return block;
        }
        let rm = rmap.unwrap_or_else(|| (0..rows.len()).collect());
        let cm = cmap.unwrap_or_else(|| (0..cols.len()).collect());
        DenseMat::from_fn(rows.len(), cols.len(), |i, j| block[(rm[i], cm[j])])
    }

    /// Dense value of the update. Materializes the full outer product.
    pub fn to_dense(&self) -> DenseMat {
        let all: Vec<usize> = (0..self.n()).collect();
        self.sample_local(&all, &all)
    }
}

/// Sorted distinct copy of `pos`, plus a gather map when `pos` was not
/// already sorted and distinct.
fn unique_sorted(pos: &[usize]) -> (Vec<usize>, Option<Vec<usize>>) {
    if pos.windows(2).all(|w| w[0] < w[1]) {
        return (pos.to_vec(), None);
    }
    let mut uniq = pos.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    let map = pos.iter().map(|p| uniq.binary_search(p).unwrap_or(0)).collect();
    (uniq, Some(map))
}
