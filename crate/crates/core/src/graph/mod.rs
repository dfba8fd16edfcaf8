//! Weighted digraphs, their Laplacians, reachability and cuts.

mod generators;
mod parse;

use std::collections::{HashSet, VecDeque};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub use generators::{
    cycle_graph, path_graph, random_connected_digraph, random_connected_undirected, roach_graph,
    star_graph,
};
pub use parse::{parse_edge_list, write_edge_list};

/// Relative tolerance on Laplacian row sums.
pub const ROW_SUM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// A weighted digraph on nodes `0..n` with strictly positive weights, no
/// self-loops and at most one edge per ordered pair.
///
/// Each node carries an external label (the id it had in the input file).
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    n: usize,
    edges: Vec<Edge>,
    labels: Vec<u64>,
}

impl DirectedGraph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(Error::InvalidGraph("graph must have at least one node".into()));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (src, dst, weight) in edges {
            if src >= n || dst >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {src}->{dst} references a node outside 0..{n}"
                )));
            }
            if src == dst {
                return Err(Error::InvalidGraph(format!("self-loop at node {src}")));
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge {src}->{dst} has non-positive weight {weight}"
                )));
            }
            if !seen.insert((src, dst)) {
                return Err(Error::InvalidGraph(format!("duplicate edge {src}->{dst}")));
            }
            out.push(Edge { src, dst, weight });
        }
        Ok(Self {
            n,
            edges: out,
            labels: (0..n as u64).collect(),
        })
    }

    pub fn with_labels(mut self, labels: Vec<u64>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// True when every edge has a reverse edge of identical weight.
    pub fn is_undirected(&self) -> bool {
        let a = self.adjacency();
        (0..self.n).all(|i| (0..i).all(|j| a[(i, j)] == a[(j, i)]))
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            a[(e.src, e.dst)] = e.weight;
        }
        a
    }

    /// Applies a node permutation: node `i` becomes node `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: perm.len(),
            });
        }
        let mut labels = vec![0; self.n];
        for (i, &p) in perm.iter().enumerate() {
            labels[p] = self.labels[i];
        }
        Self::new(
            self.n,
            self.edges.iter().map(|e| (perm[e.src], perm[e.dst], e.weight)),
        )?
        .with_labels(labels)
    }

    fn out_lists(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for e in &self.edges {
            out[e.src].push(e.dst);
        }
        out
    }

    /// Sum of weights of edges leaving `p` for its complement.
    pub fn cut_weight(&self, p: &NodePartition) -> f64 {
        self.edges
            .iter()
            .filter(|e| p.contains(e.src) && !p.contains(e.dst))
            .map(|e| e.weight)
            .sum()
    }
}

/// Dense Laplacian `L = D - A` (out-degrees on the diagonal, zero row sums).
///
/// Also used for symmetrized Laplacians, which may carry positive
/// off-diagonal entries (negative edge weights).
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix(DMatrix<f64>);

impl LaplacianMatrix {
    /// Wraps a square matrix after checking that its rows sum to zero.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidArgument("empty Laplacian".into()));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("Laplacian has non-finite entries".into()));
        }
        let scale = m.amax().max(f64::MIN_POSITIVE);
        for (i, row) in m.row_iter().enumerate() {
            let s = row.sum();
            if s.abs() > ROW_SUM_TOL * scale {
                return Err(Error::InvalidArgument(format!(
                    "row {i} sums to {s:e}, not zero"
                )));
            }
        }
        Ok(Self(m))
    }

    /// Wraps a square matrix without checking row sums. Meant for fault
    /// injection and for feeding slightly inconsistent matrices to the
    /// verification routines.
    pub fn from_matrix_unchecked(m: DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "Laplacian must be square");
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// Column-sum vector `1ᵀL`.
    pub fn column_sums(&self) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.0.column_iter().map(|c| c.sum()))
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        symmetry_residual(&self.0) <= tol * self.0.amax().max(f64::MIN_POSITIVE)
    }

    /// Globally reachable nodes of the graph given by the off-diagonal
    /// nonzero pattern (`i -> j` whenever `L[i][j] != 0`).
    pub fn globally_reachable_nodes(&self) -> Vec<usize> {
        let n = self.dim();
        let out: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && self.0[(i, j)] != 0.0).collect())
            .collect();
        globally_reachable(&out)
    }

    pub fn is_connected(&self) -> bool {
        !self.globally_reachable_nodes().is_empty()
    }
}

pub(crate) fn symmetry_residual(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

pub fn laplacian(g: &DirectedGraph) -> LaplacianMatrix {
    let n = g.node_count();
    let mut l = DMatrix::zeros(n, n);
    for e in g.edges() {
        l[(e.src, e.dst)] -= e.weight;
        l[(e.src, e.src)] += e.weight;
    }
    LaplacianMatrix(l)
}

fn globally_reachable(out: &[Vec<usize>]) -> Vec<usize> {
    let n = out.len();
    let mut rev = vec![Vec::new(); n];
    for (i, nbrs) in out.iter().enumerate() {
        for &j in nbrs {
            rev[j].push(i);
        }
    }
    let bfs = |adj: &[Vec<usize>], start: usize| {
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    };
    // Every globally reachable node is reachable from node 0.
    let from_zero = bfs(out, 0);
    for k in (0..n).filter(|&k| from_zero[k]) {
        if bfs(&rev, k).iter().all(|&s| s) {
            // The globally reachable set is the terminal strong component,
            // i.e. everything reachable from k.
            let fwd = bfs(out, k);
            return (0..n).filter(|&i| fwd[i]).collect();
        }
    }
    Vec::new()
}

/// Nodes `k` such that every node has a directed path to `k`.
pub fn globally_reachable_nodes(g: &DirectedGraph) -> Vec<usize> {
    globally_reachable(&g.out_lists())
}

pub fn is_connected(g: &DirectedGraph) -> bool {
    !globally_reachable_nodes(g).is_empty()
}

/// A bipartition `(P, P̄)` of `0..n` with both sides nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodePartition {
    mask: Vec<bool>,
}

impl NodePartition {
    pub fn new(n: usize, members: &[usize]) -> Result<Self> {
        let mut mask = vec![false; n];
        for &m in members {
            if m >= n {
                return Err(Error::InvalidArgument(format!(
                    "partition member {m} out of range 0..{n}"
                )));
            }
            if mask[m] {
                return Err(Error::InvalidArgument(format!("duplicate partition member {m}")));
            }
            mask[m] = true;
        }
        Self::from_mask(mask)
    }

    pub fn from_mask(mask: Vec<bool>) -> Result<Self> {
        let k = mask.iter().filter(|&&b| b).count();
        if k == 0 || k == mask.len() {
            return Err(Error::InvalidArgument(
                "partition sides must both be nonempty".into(),
            ));
        }
        Ok(Self { mask })
    }

    /// Partition from the low `n` bits of `bits` (bit i set = node i in P).
    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        Self::from_mask((0..n).map(|i| bits >> i & 1 == 1).collect())
    }

    pub fn node_count(&self) -> usize {
        self.mask.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&i| self.mask[i]).collect()
    }

    pub fn complement_members(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&i| !self.mask[i]).collect()
    }

    pub fn size(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn complement_size(&self) -> usize {
        self.mask.len() - self.size()
    }

    pub fn complement(&self) -> Self {
        Self {
            mask: self.mask.iter().map(|b| !b).collect(),
        }
    }

    /// Indicator vector `y` with `y_i = 1` on P and 0 on P̄.
    pub fn indicator(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.mask.len(),
            self.mask.iter().map(|&b| if b { 1.0 } else { 0.0 }),
        )
    }
}

/// `cut(P, P̄) = ½ yᵀ(L + Lᵀ)y`, the weight directed from P into P̄.
pub fn directed_cut(l: &LaplacianMatrix, p: &NodePartition) -> Result<f64> {
    if p.node_count() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            found: p.node_count(),
        });
    }
    let y = p.indicator();
    let m = l.matrix();
    Ok(0.5 * (y.dot(&(m * &y)) + y.dot(&(m.transpose() * &y))))
}
