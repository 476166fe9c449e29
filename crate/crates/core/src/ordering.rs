//! Nested-dissection ordering and the multifrontal elimination tree.
//!
//! Separators come from BFS level structures rooted at a pseudo-peripheral
//! vertex: the median level, trimmed to the vertices that actually touch the
//! next level, separates the levels below it from the levels above it.
//! Nodes are numbered in post-order, and every node's vertices receive
//! consecutive new indices, so a separator is always numbered after both of
//! its subtrees.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;
use core::ops::Range;

use crate::sparse::{adjacency_graph, AdjGraph, SparseMatrix};
use crate::{Error, Result};

pub const DEFAULT_LEAF_SIZE: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatorNode {
    /// Original vertex ids, sorted. Empty for the artificial root that
    /// joins disconnected components.
    pub vertices: Vec<usize>,
    pub children: Vec<usize>,
}

impl SeparatorNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Separator hierarchy in post-order (children precede their parent; the
/// last node is the root) with the induced permutation.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SeparatorTree {
    nodes: Vec<SeparatorNode>,
    perm: Vec<usize>,
}

impl SeparatorTree {
    pub fn nodes(&self) -> &[SeparatorNode] {
        &self.nodes
    }

    pub fn root(&self) -> Option<usize> {
        self.nodes.len().checked_sub(1)
    }

    /// `perm[old] = new`.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn n_vertices(&self) -> usize {
        self.perm.len()
    }
}

struct Dissector<'g> {
    g: &'g AdjGraph,
    leaf_size: usize,
    mark: Vec<usize>,
    stamp: usize,
    level: Vec<usize>,
    nodes: Vec<SeparatorNode>,
}

impl<'g> Dissector<'g> {
    fn new_stamp(&mut self, region: &[usize]) -> usize {
        self.stamp += 1;
        for &v in region {
            self.mark[v] = self.stamp;
        }
        self.stamp
    }

    /// Connected components of `region`, each sorted, ordered by smallest vertex.
    fn components(&mut self, region: &[usize]) -> Vec<Vec<usize>> {
        let inside = self.new_stamp(region);
        let mut out = Vec::new();
        for &s in region {
            if self.mark[s] != inside {
                continue;
            }
            self.stamp += 1;
            let seen = self.stamp;
            self.mark[s] = seen;
            let mut comp = vec![s];
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head];
                head += 1;
                for &w in self.g.neighbors(v) {
                    if self.mark[w] == inside {
                        self.mark[w] = seen;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Groups components into regions: small ones are packed together up to
    /// the leaf size, large ones stay alone.
    fn bins(&self, comps: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        let mut bins: Vec<Vec<usize>> = Vec::new();
        let mut open: Vec<usize> = Vec::new();
        for c in comps {
            if c.len() > self.leaf_size {
                bins.push(c);
            } else {
                if open.len() + c.len() > self.leaf_size {
                    bins.push(core::mem::take(&mut open));
                }
                open.extend(c);
            }
        }
        if !open.is_empty() {
            bins.push(open);
        }
        for b in &mut bins {
            b.sort_unstable();
        }
        bins
    }

    /// BFS level structure of the component of `root` within the marked region.
    fn levels(&mut self, root: usize, inside: usize) -> Vec<Vec<usize>> {
        self.stamp += 1;
        let seen = self.stamp;
        let mut levels: Vec<Vec<usize>> = vec![vec![root]];
        self.mark[root] = seen;
        loop {
            let mut next = Vec::new();
            for &v in levels.last().unwrap() {
                for &w in self.g.neighbors(v) {
                    if self.mark[w] == inside {
                        self.mark[w] = seen;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort_unstable();
            levels.push(next);
        }
        // restore membership for the next traversal
        for l in &levels {
            for &v in l {
                self.mark[v] = inside;
            }
        }
        levels
    }

    fn degree_in(&self, v: usize, inside: usize) -> usize {
        self.g.neighbors(v).iter().filter(|&&w| self.mark[w] == inside).count()
    }

    fn pseudo_peripheral_levels(&mut self, region: &[usize]) -> Vec<Vec<usize>> {
        let inside = self.new_stamp(region);
        let mut levels = self.levels(region[0], inside);
        loop {
            let last = levels.last().unwrap();
            let candidate = last
                .iter()
                .copied()
                .min_by_key(|&u| (self.degree_in(u, inside), u))
                .unwrap();
            let trial = self.levels(candidate, inside);
            if trial.len() > levels.len() {
                levels = trial;
            } else {
                return levels;
            }
        }
    }

    fn push(&mut self, vertices: Vec<usize>, children: Vec<usize>) -> usize {
        self.nodes.push(SeparatorNode { vertices, children });
        self.nodes.len() - 1
    }

    fn dissect(&mut self, region: Vec<usize>) -> usize {
        if region.len() <= self.leaf_size {
            return self.push(region, Vec::new());
        }
        let levels = self.pseudo_peripheral_levels(&region);
        let reached: usize = levels.iter().map(Vec::len).sum();
        debug_assert_eq!(reached, region.len(), "regions above leaf size are connected");

        let mut cum = 0;
        let mut m = 0;
        for (k, l) in levels.iter().enumerate() {
            cum += l.len();
            if 2 * cum >= region.len() {
                m = k;
                break;
            }
        }
        if m + 1 == levels.len() {
            m = m.saturating_sub(1);
        }

        for (k, l) in levels.iter().enumerate() {
            for &v in l {
                self.level[v] = k;
            }
        }
        let mut separator = Vec::new();
        let mut lower: Vec<usize> = levels[..m].concat();
        for &v in &levels[m] {
            if self
                .g
                .neighbors(v)
                .iter()
                .any(|&w| self.level[w] == m + 1 && region.binary_search(&w).is_ok())
            {
                separator.push(v);
            } else {
                lower.push(v);
            }
        }
        let upper: Vec<usize> = levels[m + 1..].concat();
        lower.sort_unstable();
        let mut upper = upper;
        upper.sort_unstable();
        separator.sort_unstable();

        let mut children = Vec::new();
        for side in [lower, upper] {
            if side.is_empty() {
                continue;
            }
            let comps = self.components(&side);
            for bin in self.bins(comps) {
                children.push(self.dissect(bin));
            }
        }
        self.push(separator, children)
    }
}

/// Recursive vertex bisection of `g` until regions have at most `leaf_size`
/// vertices.
pub fn nested_dissection(g: &AdjGraph, leaf_size: usize) -> Result<SeparatorTree> {
    if leaf_size == 0 {
        return Err(Error::InvalidParameter("leaf_size must be at least 1"));
    }
    let n = g.n_vertices();
    if n == 0 {
        return Ok(SeparatorTree::default());
    }
    let mut d = Dissector {
        g,
        leaf_size,
        mark: vec![0; n],
        stamp: 0,
        level: vec![usize::MAX; n],
        nodes: Vec::new(),
    };
    let all: Vec<usize> = (0..n).collect();
    let comps = d.components(&all);
    let mut bins = d.bins(comps);
    if bins.len() == 1 {
        let region = bins.pop().unwrap();
        d.dissect(region);
    } else {
        let children: Vec<usize> = bins.into_iter().map(|b| d.dissect(b)).collect();
        d.push(Vec::new(), children);
    }

    let mut perm = vec![usize::MAX; n];
    let mut next = 0;
    for node in &d.nodes {
        for &v in &node.vertices {
            perm[v] = next;
            next += 1;
        }
    }
    debug_assert_eq!(next, n);
    Ok(SeparatorTree { nodes: d.nodes, perm })
}

/// One elimination-tree node. Index sets are in permuted numbering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtreeNode {
    /// Pivot indices `I_p`; contiguous because of the post-order numbering.
    pub pivots: Range<usize>,
    /// Indices above `max(I_p)` coupled to a pivot in the graph of `A`.
    pub coupled: Vec<usize>,
    /// Frontal indices `I_p^f`, sorted.
    pub frontal: Vec<usize>,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
}

impl EtreeNode {
    pub fn n_pivots(&self) -> usize {
        self.pivots.len()
    }

    /// `|I_p| + |I_p^f|`.
    pub fn front_size(&self) -> usize {
        self.pivots.len() + self.frontal.len()
    }

    /// Global indices of the whole front, sorted.
    pub fn front_indices(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.pivots.clone().collect();
        ids.extend_from_slice(&self.frontal);
        ids
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationTree {
    nodes: Vec<EtreeNode>,
    post_order: Vec<usize>,
    perm: Vec<usize>,
    inv_perm: Vec<usize>,
}

impl EliminationTree {
    pub fn nodes(&self) -> &[EtreeNode] {
        &self.nodes
    }

    pub fn post_order(&self) -> &[usize] {
        &self.post_order
    }

    /// `perm[old] = new`.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// `inv_perm[new] = old`.
    pub fn inverse_permutation(&self) -> &[usize] {
        &self.inv_perm
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn root(&self) -> Option<usize> {
        self.post_order.last().copied()
    }

    /// Indented outline, one line per node: id, `|I_p|`, `|I_p^f|`.
    pub fn outline(&self) -> String {
        let mut out = String::new();
        let Some(root) = self.root() else {
            return out;
        };
        let mut stack = vec![(root, 0usize)];
        while let Some((p, depth)) = stack.pop() {
            let node = &self.nodes[p];
            let _ = writeln!(
                out,
                "{:indent$}node {} pivots={} frontal={}",
                "",
                p,
                node.n_pivots(),
                node.frontal.len(),
                indent = 2 * depth
            );
            for &c in node.children.iter().rev() {
                stack.push((c, depth + 1));
            }
        }
        out
    }
}

/// Derives pivot, coupling and frontal index sets for every separator node.
///
/// Couplings are taken from the symmetrized pattern of `a`, so an entry
/// `a_ji` with `a_ij = 0` still reaches the front.
pub fn build_elimination_tree(t: &SeparatorTree, a: &SparseMatrix) -> Result<EliminationTree> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if t.n_vertices() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: t.n_vertices(),
        });
    }
    let n = a.nrows();
    let perm = t.perm.clone();
    let mut inv_perm = vec![0; n];
    for (old, &new) in perm.iter().enumerate() {
        inv_perm[new] = old;
    }
    let g = adjacency_graph(a)?.permuted(&perm);

    let mut mark = vec![usize::MAX; n];
    let mut nodes: Vec<EtreeNode> = Vec::with_capacity(t.nodes.len());
    let mut start = 0;
    for (p, sn) in t.nodes.iter().enumerate() {
        let pivots = start..start + sn.vertices.len();
        start = pivots.end;
        // every vertex of the node must have received a number in this range
        for &v in &sn.vertices {
            if !pivots.contains(&perm[v]) {
                return Err(Error::InvalidParameter("separator tree numbering is inconsistent"));
            }
        }

        let mut coupled = Vec::new();
        if !pivots.is_empty() {
            let last = pivots.end - 1;
            for i in pivots.clone() {
                for &j in g.neighbors(i) {
                    if j > last && mark[j] != p {
                        mark[j] = p;
                        coupled.push(j);
                    }
                }
            }
        }
        coupled.sort_unstable();

        let mut frontal = coupled.clone();
        for &c in &sn.children {
            if c >= p {
                return Err(Error::InvalidParameter("separator tree is not in post-order"));
            }
            for &j in &nodes[c].frontal {
                if !pivots.contains(&j) && mark[j] != p {
                    mark[j] = p;
                    frontal.push(j);
                }
            }
        }
        frontal.sort_unstable();
        if let (Some(&first), false) = (frontal.first(), pivots.is_empty()) {
            if first < pivots.end {
                return Err(Error::StructuralMismatch { index: first });
            }
        }
        nodes.push(EtreeNode {
            pivots,
            coupled,
            frontal,
            children: sn.children.clone(),
            parent: None,
        });
    }
    for p in 0..nodes.len() {
        for c in nodes[p].children.clone() {
            nodes[c].parent = Some(p);
        }
    }
    let post_order = (0..nodes.len()).collect();
    Ok(EliminationTree {
        nodes,
        post_order,
        perm,
        inv_perm,
    })
}

/// Unweighted multi-source BFS distances from `sources`, truncated at `max_depth`.
/// Unreached vertices get `usize::MAX`.
pub(crate) fn bfs_distances(g: &AdjGraph, sources: &[usize], max_depth: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n_vertices()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s] == usize::MAX {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let dv = dist[v];
        if dv == max_depth {
            continue;
        }
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dv + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> AdjGraph {
        AdjGraph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    fn grid(nx: usize, ny: usize) -> AdjGraph {
        let mut e = Vec::new();
        for r in 0..ny {
            for c in 0..nx {
                let v = r * nx + c;
                if c + 1 < nx {
                    e.push((v, v + 1));
                }
                if r + 1 < ny {
                    e.push((v, v + nx));
                }
            }
        }
        AdjGraph::from_edges(nx * ny, e).unwrap()
    }

    fn chain_matrix(n: usize) -> SparseMatrix {
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
    fn path_of_seven_splits_at_the_middle() {
        let t = nested_dissection(&path(7), 3).unwrap();
        let root = &t.nodes()[t.root().unwrap()];
        assert_eq!(root.vertices, vec![3]);
        let kids: Vec<&Vec<usize>> = root.children.iter().map(|&c| &t.nodes()[c].vertices).collect();
        assert_eq!(kids, vec![&vec![0, 1, 2], &vec![4, 5, 6]]);
    }

    #[test]
    fn small_clique_is_a_single_leaf() {
        let k4 = AdjGraph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let t = nested_dissection(&k4, 4).unwrap();
        assert_eq!(t.nodes().len(), 1);
        assert!(t.nodes()[0].is_leaf());
        assert_eq!(t.nodes()[0].vertices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn three_by_three_grid_has_balanced_separator() {
        let t = nested_dissection(&grid(3, 3), 3).unwrap();
        let root = &t.nodes()[t.root().unwrap()];
        assert_eq!(root.vertices.len(), 3);
        assert_eq!(root.children.len(), 2);
        for &c in &root.children {
            assert_eq!(t.nodes()[c].vertices.len(), 3);
            assert!(t.nodes()[c].is_leaf());
        }
    }

    #[test]
    fn empty_graph_gives_empty_tree() {
        let t = nested_dissection(&AdjGraph::default(), 4).unwrap();
        assert!(t.root().is_none());
        assert!(matches!(
            nested_dissection(&path(3), 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn disconnected_components_hang_off_an_empty_root() {
        let mut e: Vec<(usize, usize)> = (0..9).map(|i| (i, i + 1)).collect();
        e.extend((10..19).map(|i| (i, i + 1)));
        let g = AdjGraph::from_edges(20, e).unwrap();
        let t = nested_dissection(&g, 4).unwrap();
        let root = &t.nodes()[t.root().unwrap()];
        assert!(root.vertices.is_empty());
        assert_eq!(root.children.len(), 2);
    }

    #[test]
    fn chain_of_three_index_sets() {
        let a = chain_matrix(3);
        let t = nested_dissection(&adjacency_graph(&a).unwrap(), 1).unwrap();
        assert_eq!(t.permutation(), &[0, 2, 1]);
        let e = build_elimination_tree(&t, &a).unwrap();
        let nodes = e.nodes();
        assert_eq!(nodes.len(), 3);
        assert_eq!(nodes[0].pivots, 0..1);
        assert_eq!(nodes[0].coupled, vec![2]);
        assert_eq!(nodes[1].pivots, 1..2);
        assert_eq!(nodes[1].coupled, vec![2]);
        assert_eq!(nodes[2].pivots, 2..3);
        assert!(nodes[2].frontal.is_empty());
        assert_eq!(nodes[0].parent, Some(2));
    }

    #[test]
    fn diagonal_matrix_has_no_couplings() {
        let a = SparseMatrix::identity(10);
        let t = nested_dissection(&adjacency_graph(&a).unwrap(), 3).unwrap();
        let e = build_elimination_tree(&t, &a).unwrap();
        assert!(e.nodes().iter().all(|n| n.coupled.is_empty() && n.frontal.is_empty()));
    }

    #[test]
    fn grid_leaves_see_the_separator() {
        let g = grid(3, 3);
        let mut trip: Vec<(usize, usize, f64)> = (0..9).map(|i| (i, i, 4.0)).collect();
        for v in 0..9 {
            for &w in g.neighbors(v) {
                trip.push((v, w, -1.0));
            }
        }
        let a = SparseMatrix::from_triplets(9, 9, trip).unwrap();
        let t = nested_dissection(&g, 3).unwrap();
        let e = build_elimination_tree(&t, &a).unwrap();
        let root = e.root().unwrap();
        assert!(e.nodes()[root].frontal.is_empty());
        let sep: Vec<usize> = e.nodes()[root].pivots.clone().collect();
        for &c in &e.nodes()[root].children {
            assert_eq!(e.nodes()[c].frontal, sep);
        }
        assert!(e.outline().starts_with("node 2 pivots=3 frontal=0\n  node 0"));
    }

    #[test]
    fn bfs_is_truncated() {
        let d = bfs_distances(&path(6), &[3, 4, 5], 1);
        assert_eq!(d, vec![usize::MAX, usize::MAX, 1, 0, 0, 0]);
    }
}
