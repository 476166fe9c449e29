//! Multifrontal LU factorization and the two-pass solve.
//!
//! Every elimination-tree node assembles a frontal matrix over its pivot
//! indices `I_p` followed by its frontal indices `I_p^f`:
//!
//! ```text
//!       | F_pp  F_pf |
//! F_p = |            |
//!       | F_fp  F_ff |
//! ```
//!
//! from the entries of `A` (the seed, with the `F_ff` block zeroed) plus the
//! update matrices of its children, eliminates `F_pp` and hands
//! `F_ff - F_fp F_pp⁻¹ F_pf` to its parent.
//!
//! In [`FactorMode::Accelerated`], fronts of size at least `n_c` are never
//! formed densely. `F_pp` and `F_ff` become HODLR matrices and the couplings
//! skeleton factors, all built by sampling entries, and the update is kept
//! as `F_ff - W Vᵀ` without multiplying the outer product out.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::Cell;
use core::fmt::Write;
use core::ops::Range;

use crate::bdlr::{BlockSampler, LowRankFactor, SubBlock};
use crate::dense::{self, DenseLu, DenseMat};
use crate::hodlr::{build_hodlr, compress_block, HodlrFactorization, HodlrMatrix, HodlrOptions, UpdateRep};
use crate::ordering::{build_elimination_tree, nested_dissection, EliminationTree};
use crate::sparse::{adjacency_graph, AdjGraph, SparseMatrix};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorMode {
    /// Every front is dense.
    Conventional,
    /// Fronts of size `>= n_c` use HODLR and skeleton compression.
    Accelerated,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MfParams {
    /// Smallest front size handled by the structured path.
    pub n_c: usize,
    /// Relative pivot tolerance of every skeleton compression.
    pub eps: f64,
    /// Boundary distance used to pick candidate rows and columns.
    pub d: usize,
    /// HODLR leaf size inside structured fronts.
    pub n_leaf: usize,
    /// Hard cap on every compressed rank.
    pub max_rank: usize,
    /// Widen the candidate rows and columns when they cannot resolve `eps`.
    pub grow_depth: bool,
}

impl Default for MfParams {
    fn default() -> Self {
        Self {
            n_c: 256,
            eps: 1e-1,
            d: 1,
            n_leaf: 64,
            max_rank: usize::MAX,
            grow_depth: true,
        }
    }
}

impl MfParams {
    pub fn hodlr_options(&self) -> HodlrOptions {
        HodlrOptions {
            n_leaf: self.n_leaf,
            eps: self.eps,
            depth: self.d,
            max_rank: self.max_rank,
            grow_depth: self.grow_depth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_c == 0 {
            return Err(Error::InvalidParameter("n_c must be at least 1"));
        }
        if self.d == 0 {
            return Err(Error::InvalidParameter("d must be at least 1"));
        }
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

/// Entries of `A` on one front, in local positions, with the `F_ff` block
/// left empty.
#[derive(Clone, Debug, PartialEq)]
pub struct FrontSeed {
    ids: Vec<usize>,
    n_pivots: usize,
    local: SparseMatrix,
}

impl FrontSeed {
    /// Seed from local `(row, col, value)` triplets; duplicates are summed.
    /// `ids` are the sorted global indices of the front, pivots first.
    pub fn new(
        ids: Vec<usize>,
        n_pivots: usize,
        entries: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        if n_pivots > ids.len() {
            return Err(Error::DimensionMismatch {
                expected: ids.len(),
                found: n_pivots,
            });
        }
        if !ids.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter("front ids must be strictly increasing"));
        }
        let n = ids.len();
        let local = SparseMatrix::from_triplets(n, n, entries)?;
        Ok(Self { ids, n_pivots, local })
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn n_pivots(&self) -> usize {
        self.n_pivots
    }

    pub fn nnz(&self) -> usize {
        self.local.nnz()
    }

    /// Local position of a global index.
    pub fn position(&self, id: usize) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub fn to_dense(&self) -> DenseMat {
        self.local.to_dense()
    }
}

/// Builds the seed `F̄_p` of node `p` from `ap`, the matrix in the tree's
/// permuted numbering.
pub fn assemble_fbar(p: usize, ap: &SparseMatrix, tree: &EliminationTree) -> Result<FrontSeed> {
    let node = tree
        .nodes()
        .get(p)
        .ok_or(Error::InvalidParameter("node id out of range"))?;
    if ap.nrows() != tree.n() || ap.ncols() != tree.n() {
        return Err(Error::DimensionMismatch {
            expected: tree.n(),
            found: ap.nrows(),
        });
    }
    let pivots = node.pivots.clone();
    let np = pivots.len();
    let local = |g: usize| -> Result<usize> {
        if pivots.contains(&g) {
            Ok(g - pivots.start)
        } else {
            node.frontal
                .binary_search(&g)
                .map(|k| np + k)
                .map_err(|_| Error::StructuralMismatch { index: g })
        }
    };
    let ids = node.front_indices();
    let mut entries = Vec::new();
    for (lj, &gj) in ids.iter().enumerate() {
        let (rows, vals) = ap.column(gj);
        for (&gi, &v) in rows.iter().zip(vals) {
            let keep = if lj < np {
                gi >= pivots.start
            } else {
                pivots.contains(&gi)
            };
            if keep {
                entries.push((local(gi)?, lj, v));
            }
        }
    }
    FrontSeed::new(ids, np, entries)
}

/// Dense update matrix with its sorted global index map.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseUpdate {
    pub ids: Vec<usize>,
    pub mat: DenseMat,
}

/// Update matrix handed from a child to its parent.
#[derive(Clone, Debug, PartialEq)]
pub enum ChildUpdate {
    Dense(DenseUpdate),
    Structured(UpdateRep),
}

impl ChildUpdate {
    pub fn ids(&self) -> &[usize] {
        match self {
            ChildUpdate::Dense(u) => &u.ids,
            ChildUpdate::Structured(u) => &u.global_ids,
        }
    }

    pub fn n(&self) -> usize {
        self.ids().len()
    }

    pub fn stored_reals(&self) -> usize {
        match self {
            ChildUpdate::Dense(u) => u.mat.len(),
            ChildUpdate::Structured(u) => u.stored_reals(),
        }
    }

    pub fn to_dense(&self) -> DenseMat {
        match self {
            ChildUpdate::Dense(u) => u.mat.clone(),
            ChildUpdate::Structured(u) => u.to_dense(),
        }
    }
}

/// Parent positions of a child's indices.
fn relative_map(seed: &FrontSeed, child: &ChildUpdate) -> Result<Vec<usize>> {
    child
        .ids()
        .iter()
        .map(|&id| seed.position(id).ok_or(Error::StructuralMismatch { index: id }))
        .collect()
}

/// Dense frontal matrix: the seed plus every child update scattered by
/// global index. Structured updates are expanded densely.
pub fn extend_add_dense(seed: &FrontSeed, updates: &[ChildUpdate]) -> Result<DenseMat> {
    let mut f = seed.to_dense();
    for u in updates {
        let map = relative_map(seed, u)?;
        let m = u.to_dense();
        for (b, &pb) in map.iter().enumerate() {
            let src = m.col(b);
            let dst = f.col_mut(pb);
            for (a, &pa) in map.iter().enumerate() {
                dst[pa] += src[a];
            }
        }
    }
    Ok(f)
}

/// Factors kept by a dense front for the solve.
#[derive(Clone, Debug)]
pub struct DenseElimination {
    pub lu: DenseLu,
    pub f_fp: DenseMat,
    pub f_pf: DenseMat,
    /// `F_ff - F_fp F_pp⁻¹ F_pf`.
    pub update: DenseMat,
}

/// Eliminates the leading `n_p` pivots of a dense front.
pub fn eliminate_dense(f: DenseMat, n_p: usize) -> Result<DenseElimination> {
    if f.nrows() != f.ncols() {
        return Err(Error::NotSquare {
            rows: f.nrows(),
            cols: f.ncols(),
        });
    }
    if n_p > f.nrows() {
        return Err(Error::DimensionMismatch {
            expected: f.nrows(),
            found: n_p,
        });
    }
    let nf = f.nrows() - n_p;
    let f_pf = f.block(0, n_p, n_p, nf);
    let f_fp = f.block(n_p, 0, nf, n_p);
    let mut update = f.block(n_p, n_p, nf, nf);
    let lu = DenseLu::factor(f.block(0, 0, n_p, n_p))?;
    if n_p > 0 && nf > 0 {
        let mut x = f_pf.clone();
        lu.solve_mat_in_place(&mut x);
        dense::gemm_acc(-1.0, &f_fp, &x, &mut update);
    }
    Ok(DenseElimination { lu, f_fp, f_pf, update })
}

/// Entry sampler of a frontal matrix that is never formed: seed entries
/// plus child updates, looked up by local position.
pub struct FrontSampler<'a> {
    seed: &'a FrontSeed,
    children: Vec<(&'a ChildUpdate, Vec<usize>)>,
    n_leaf: usize,
    full_outer_products: Cell<usize>,
}

impl<'a> FrontSampler<'a> {
    /// `n_leaf` is the size above which expanding a whole structured child
    /// update counts as a full outer-product materialization.
    pub fn new(seed: &'a FrontSeed, children: &'a [ChildUpdate], n_leaf: usize) -> Result<Self> {
        let children = children
            .iter()
            .map(|c| Ok((c, relative_map(seed, c)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            seed,
            children,
            n_leaf,
            full_outer_products: Cell::new(0),
        })
    }

    /// Requests so far that expanded a structured child of size above
    /// `n_leaf` over all of its rows and columns.
    pub fn full_outer_products(&self) -> usize {
        self.full_outer_products.get()
    }
}

/// `(request slot, child position)` pairs for requested parent positions
/// that belong to the child.
fn child_hits(request: &[usize], map: &[usize]) -> (Vec<usize>, Vec<usize>) {
    request
        .iter()
        .enumerate()
        .filter_map(|(a, r)| map.binary_search(r).ok().map(|pos| (a, pos)))
        .unzip()
}

impl BlockSampler for FrontSampler<'_> {
    fn n_rows(&self) -> usize {
        self.seed.n()
    }

    fn n_cols(&self) -> usize {
        self.seed.n()
    }

    fn sample(&self, rows: &[usize], cols: &[usize]) -> Result<DenseMat> {
        let n = self.seed.n();
        if let Some(&bad) = rows.iter().chain(cols).find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange {
                row: bad,
                col: bad,
                n_rows: n,
                n_cols: n,
            });
        }
        let mut out = DenseMat::zeros(rows.len(), cols.len());

        let mut order: Vec<(usize, usize)> = rows.iter().enumerate().map(|(a, &r)| (r, a)).collect();
        order.sort_unstable();
        for (b, &c) in cols.iter().enumerate() {
            let (ri, rv) = self.seed.local.column(c);
            for (&r, &v) in ri.iter().zip(rv) {
                let mut k = order.partition_point(|e| e.0 < r);
                while k < order.len() && order[k].0 == r {
                    out[(order[k].1, b)] += v;
                    k += 1;
                }
            }
        }

        for (child, map) in &self.children {
            let (ra, rp) = child_hits(rows, map);
            let (ca, cp) = child_hits(cols, map);
            if rp.is_empty() || cp.is_empty() {
                continue;
            }
            match child {
                ChildUpdate::Dense(u) => {
                    for (b, &q) in cp.iter().enumerate() {
                        let src = u.mat.col(q);
                        let dst = out.col_mut(ca[b]);
                        for (a, &p) in rp.iter().enumerate() {
                            dst[ra[a]] += src[p];
                        }
                    }
                }
                ChildUpdate::Structured(u) => {
                    let k = u.n();
                    if k > self.n_leaf && rp.len() >= k && cp.len() >= k && u.rank() > 0 {
                        self.full_outer_products.set(self.full_outer_products.get() + 1);
                    }
                    let blk = u.sample_positions(&rp, &cp);
                    for (b, &cb) in ca.iter().enumerate() {
                        let src = blk.col(b);
                        let dst = out.col_mut(cb);
                        for (a, &p) in ra.iter().enumerate() {
                            dst[p] += src[a];
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Compressed frontal matrix ready for elimination.
#[derive(Clone, Debug)]
pub struct StructuredFront {
    pub ids: Vec<usize>,
    pub n_pivots: usize,
    pub f_pp: HodlrMatrix,
    pub f_ff: HodlrMatrix,
    /// `n_f x n_p` coupling.
    pub f_fp: LowRankFactor,
    /// `n_p x n_f` coupling.
    pub f_pf: LowRankFactor,
    /// Full outer-product materializations that assembly needed.
    pub full_outer_products: usize,
}

impl StructuredFront {
    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn stored_reals(&self) -> usize {
        self.f_pp.stored_reals() + self.f_ff.stored_reals() + self.f_fp.stored_reals() + self.f_pf.stored_reals()
    }

    pub fn max_rank(&self) -> usize {
        self.f_pp
            .max_rank()
            .max(self.f_ff.max_rank())
            .max(self.f_fp.rank())
            .max(self.f_pf.rank())
    }

    /// Dense value of the compressed front.
    pub fn to_dense(&self) -> DenseMat {
        let np = self.n_pivots;
        let mut f = DenseMat::zeros(self.n(), self.n());
        f.set_block(0, 0, &self.f_pp.to_dense());
        f.set_block(np, np, &self.f_ff.to_dense());
        f.set_block(np, 0, &self.f_fp.to_dense());
        f.set_block(0, np, &self.f_pf.to_dense());
        f
    }
}

/// Builds the compressed frontal matrix by sampling the seed and the child
/// updates. Local position `i` of the front is vertex `vertices[i]` of the
/// interaction graph `g`; the pivot and non-pivot parts of `vertices`
/// must each be strictly increasing.
pub fn extend_add_hodlr(
    seed: &FrontSeed,
    children: &[ChildUpdate],
    g: &AdjGraph,
    vertices: &[usize],
    opts: &HodlrOptions,
) -> Result<StructuredFront> {
    let sampler = FrontSampler::new(seed, children, opts.n_leaf)?;
    let np = seed.n_pivots();
    let n = seed.n();
    let nf = n - np;
    if vertices.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: vertices.len(),
        });
    }
    let (pids, fids) = vertices.split_at(np);
    let sub = |r0: usize, c0: usize, rows: usize, cols: usize| SubBlock {
        inner: &sampler,
        row0: r0,
        col0: c0,
        n_rows: rows,
        n_cols: cols,
    };
    let f_pp = build_hodlr(&sub(0, 0, np, np), pids, g, opts)?;
    let f_ff = build_hodlr(&sub(np, np, nf, nf), fids, g, opts)?;
    let f_fp = compress_block(&sampler, g, fids, pids, np, 0, opts)?;
    let f_pf = compress_block(&sampler, g, pids, fids, 0, np, opts)?;
    Ok(StructuredFront {
        ids: seed.ids().to_vec(),
        n_pivots: np,
        f_pp,
        f_ff,
        f_fp,
        f_pf,
        full_outer_products: sampler.full_outer_products(),
    })
}

/// Factors kept by a structured front for the solve.
#[derive(Clone, Debug)]
pub struct StructuredElimination {
    pub f_pp: HodlrFactorization,
    pub f_fp: LowRankFactor,
    pub f_pf: LowRankFactor,
}

/// Factorizes `F_pp` and forms the deferred update
/// `F_ff - (C_fp R_fp F_pp⁻¹ C_pf) R_pf`, keeping the smaller inner rank.
pub fn eliminate_hodlr(front: StructuredFront) -> Result<(StructuredElimination, UpdateRep)> {
    let StructuredFront {
        ids,
        n_pivots,
        f_pp,
        f_ff,
        f_fp,
        f_pf,
        ..
    } = front;
    let nf = ids.len() - n_pivots;
    let f_pp = f_pp.into_factorization()?;
    let (r1, r2) = (f_fp.rank(), f_pf.rank());
    let (w, v) = if r1 == 0 || r2 == 0 {
        (DenseMat::zeros(nf, 0), DenseMat::zeros(nf, 0))
    } else {
        let mut y = f_pf.c_tilde.clone();
        f_pp.solve_mat_in_place(&mut y)?;
        let t = f_fp.r_tilde.matmul(&y);
        if r1 <= r2 {
            (f_fp.c_tilde.clone(), f_pf.r_tilde.transpose_matmul(&t.transpose()))
        } else {
            (f_fp.c_tilde.matmul(&t), f_pf.r_tilde.transpose())
        }
    };
    let update = UpdateRep::new(f_ff, w, v, ids[n_pivots..].to_vec())?;
    Ok((StructuredElimination { f_pp, f_fp, f_pf }, update))
}

#[derive(Clone, Debug)]
enum NodeFactor {
    Dense {
        lu: DenseLu,
        f_fp: DenseMat,
        f_pf: DenseMat,
    },
    Structured(StructuredElimination),
}

impl NodeFactor {
    fn stored_reals(&self) -> usize {
        match self {
            NodeFactor::Dense { lu, f_fp, f_pf } => lu.stored_reals() + f_fp.len() + f_pf.len(),
            NodeFactor::Structured(s) => s.f_pp.stored_reals() + s.f_fp.stored_reals() + s.f_pf.stored_reals(),
        }
    }

    fn solve_pivots(&self, x: &mut [f64]) -> Result<()> {
        match self {
            NodeFactor::Dense { lu, .. } => {
                lu.solve_in_place(x);
                Ok(())
            }
            NodeFactor::Structured(s) => s.f_pp.solve_in_place(x),
        }
    }

    /// `y += alpha F_fp x`.
    fn apply_fp(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        match self {
            NodeFactor::Dense { f_fp, .. } => f_fp.matvec_acc(alpha, x, y),
            NodeFactor::Structured(s) => s.f_fp.matvec_acc(alpha, x, y),
        }
    }

    /// `y += alpha F_pf x`.
    fn apply_pf(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        match self {
            NodeFactor::Dense { f_pf, .. } => f_pf.matvec_acc(alpha, x, y),
            NodeFactor::Structured(s) => s.f_pf.matvec_acc(alpha, x, y),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrontPath {
    Dense,
    Structured,
}

impl FrontPath {
    pub fn as_str(self) -> &'static str {
        match self {
            FrontPath::Dense => "dense",
            FrontPath::Structured => "structured",
        }
    }
}

/// Per-node factorization record.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeStats {
    pub node: usize,
    /// `|I_p| + |I_p^f|`.
    pub front_size: usize,
    pub n_pivots: usize,
    /// Largest off-diagonal or coupling rank; 0 on the dense path.
    pub max_rank: usize,
    pub path: FrontPath,
    /// Reals retained for the solve.
    pub stored_reals: usize,
}

#[derive(Clone, Debug)]
struct SolveNode {
    pivots: Range<usize>,
    frontal: Vec<usize>,
    factor: NodeFactor,
}

/// Complete factorization, ready to solve.
#[derive(Clone, Debug)]
pub struct MfFactorization {
    mode: FactorMode,
    params: MfParams,
    perm: Vec<usize>,
    order: Vec<usize>,
    nodes: Vec<SolveNode>,
    stats: Vec<NodeStats>,
    peak_stored_reals: usize,
    full_outer_products: usize,
    dense_expansions: usize,
}

/// Factorizes `a` along `tree`. Boundary distances for structured fronts
/// are measured in the graph of the whole permuted matrix.
pub fn mf_factorize(
    a: &SparseMatrix,
    tree: &EliminationTree,
    mode: FactorMode,
    params: MfParams,
) -> Result<MfFactorization> {
    params.validate()?;
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.nrows() != tree.n() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: tree.n(),
        });
    }
    let ap = a.permute_symmetric(tree.permutation())?;
    let g = match mode {
        FactorMode::Accelerated => Some(adjacency_graph(&ap)?),
        FactorMode::Conventional => None,
    };
    let opts = params.hodlr_options();
    let m = tree.nodes().len();
    let mut pending: Vec<Option<ChildUpdate>> = vec![None; m];
    let mut factors: Vec<Option<SolveNode>> = vec![None; m];
    let mut stats = Vec::with_capacity(m);
    let (mut retained, mut live, mut peak) = (0usize, 0usize, 0usize);
    let mut full_outer_products = 0;
    let mut dense_expansions = 0;

    for &p in tree.post_order() {
        let node = &tree.nodes()[p];
        let at = |e: Error| e.at_front(p);
        let seed = assemble_fbar(p, &ap, tree).map_err(at)?;
        let children: Vec<ChildUpdate> = node.children.iter().filter_map(|&c| pending[c].take()).collect();
        let child_reals: usize = children.iter().map(ChildUpdate::stored_reals).sum();
        let np = node.n_pivots();
        let structured = g.is_some() && node.front_size() >= params.n_c && np > 0;

        let (factor, update, max_rank) = if let (true, Some(g)) = (structured, &g) {
            let front = extend_add_hodlr(&seed, &children, g, seed.ids(), &opts).map_err(at)?;
            full_outer_products += front.full_outer_products;
            peak = peak.max(retained + live + front.stored_reals());
            let max_rank = front.max_rank();
            let (el, upd) = eliminate_hodlr(front).map_err(at)?;
            (NodeFactor::Structured(el), ChildUpdate::Structured(upd), max_rank)
        } else {
            dense_expansions += children
                .iter()
                .filter(|c| matches!(c, ChildUpdate::Structured(_)))
                .count();
            let f = extend_add_dense(&seed, &children).map_err(at)?;
            peak = peak.max(retained + live + f.len());
            let el = eliminate_dense(f, np).map_err(at)?;
            let upd = DenseUpdate {
                ids: node.frontal.clone(),
                mat: el.update,
            };
            let factor = NodeFactor::Dense {
                lu: el.lu,
                f_fp: el.f_fp,
                f_pf: el.f_pf,
            };
            (factor, ChildUpdate::Dense(upd), 0)
        };
        drop(children);
        live -= child_reals;
        let kept = factor.stored_reals();
        retained += kept;
        if update.n() > 0 {
            live += update.stored_reals();
            pending[p] = Some(update);
        }
        peak = peak.max(retained + live);
        stats.push(NodeStats {
            node: p,
            front_size: node.front_size(),
            n_pivots: np,
            max_rank,
            path: if structured {
                FrontPath::Structured
            } else {
                FrontPath::Dense
            },
            stored_reals: kept,
        });
        factors[p] = Some(SolveNode {
            pivots: node.pivots.clone(),
            frontal: node.frontal.clone(),
            factor,
        });
    }

    Ok(MfFactorization {
        mode,
        params,
        perm: tree.permutation().to_vec(),
        order: tree.post_order().to_vec(),
        nodes: factors
            .into_iter()
            .map(|f| f.expect("post-order visits every node"))
            .collect(),
        stats,
        peak_stored_reals: peak,
        full_outer_products,
        dense_expansions,
    })
}

/// Orders `a` by nested dissection with the given leaf size, then
/// factorizes it.
pub fn analyze_and_factorize(
    a: &SparseMatrix,
    leaf_size: usize,
    mode: FactorMode,
    params: MfParams,
) -> Result<(EliminationTree, MfFactorization)> {
    let g = adjacency_graph(a)?;
    let sep = nested_dissection(&g, leaf_size)?;
    let tree = build_elimination_tree(&sep, a)?;
    let f = mf_factorize(a, &tree, mode, params)?;
    Ok((tree, f))
}

/// Solves with a factorization; free-function form of
/// [`MfFactorization::solve`].
pub fn mf_solve(f: &MfFactorization, b: &[f64]) -> Result<Vec<f64>> {
    f.solve(b)
}

impl MfFactorization {
    pub fn mode(&self) -> FactorMode {
        self.mode
    }

    pub fn params(&self) -> &MfParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// Per-node records in elimination order.
    pub fn stats(&self) -> &[NodeStats] {
        &self.stats
    }

    /// Reals retained for the solve.
    pub fn stored_reals(&self) -> usize {
        self.nodes.iter().map(|n| n.factor.stored_reals()).sum()
    }

    /// Largest value of retained factors + live updates + current front
    /// reached during the factorization.
    pub fn peak_stored_reals(&self) -> usize {
        self.peak_stored_reals
    }

    /// Full outer-product materializations of child updates larger than
    /// `n_leaf` while assembling structured fronts.
    pub fn full_outer_products(&self) -> usize {
        self.full_outer_products
    }

    /// Structured updates expanded densely because their parent front was
    /// below `n_c`.
    pub fn dense_expansions(&self) -> usize {
        self.dense_expansions
    }

    pub fn structured_fronts(&self) -> usize {
        self.stats.iter().filter(|s| s.path == FrontPath::Structured).count()
    }

    /// `node,front_size,pivots,max_rank,path,stored_reals` CSV.
    pub fn stats_csv(&self) -> String {
        let mut s = String::from("node,front_size,pivots,max_rank,path,stored_reals\n");
        for st in &self.stats {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                st.node,
                st.front_size,
                st.n_pivots,
                st.max_rank,
                st.path.as_str(),
                st.stored_reals
            );
        }
        s
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    /// Upward pass leaf to root, downward pass root to leaf, both on one
    /// permuted work vector.
    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<()> {
        let n = self.n();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let mut x = vec![0.0; n];
        for (old, &new) in self.perm.iter().enumerate() {
            x[new] = b[old];
        }
        let mut bp = Vec::new();
        let mut bf = Vec::new();
        for &p in &self.order {
            let node = &self.nodes[p];
            if node.pivots.is_empty() || node.frontal.is_empty() {
                continue;
            }
            bp.clear();
            bp.extend_from_slice(&x[node.pivots.clone()]);
            node.factor.solve_pivots(&mut bp)?;
            bf.clear();
            bf.resize(node.frontal.len(), 0.0);
            node.factor.apply_fp(1.0, &bp, &mut bf);
            for (&i, v) in node.frontal.iter().zip(&bf) {
                x[i] -= v;
            }
        }
        for &p in self.order.iter().rev() {
            let node = &self.nodes[p];
            if node.pivots.is_empty() {
                continue;
            }
            bp.clear();
            bp.extend_from_slice(&x[node.pivots.clone()]);
            if !node.frontal.is_empty() {
                bf.clear();
                bf.extend(node.frontal.iter().map(|&i| x[i]));
                node.factor.apply_pf(-1.0, &bf, &mut bp);
            }
            node.factor.solve_pivots(&mut bp)?;
            x[node.pivots.clone()].copy_from_slice(&bp);
        }
        for (old, &new) in self.perm.iter().enumerate() {
            b[old] = x[new];
        }
        Ok(())
    }
}
