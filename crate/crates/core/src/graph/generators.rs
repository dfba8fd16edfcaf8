//! Fixture graphs: cycles, paths, stars, roach graphs and random connected
//! digraphs.

use rand::Rng;

use super::DirectedGraph;
use crate::error::{Error, Result};

fn bidirected(edges: impl IntoIterator<Item = (usize, usize)>) -> Vec<(usize, usize, f64)> {
    edges
        .into_iter()
        .flat_map(|(a, b)| [(a, b, 1.0), (b, a, 1.0)])
        .collect()
}

/// Unit-weight cycle `0 -> 1 -> ... -> n-1 -> 0` (bidirected if `!directed`).
pub fn cycle_graph(n: usize, directed: bool) -> Result<DirectedGraph> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("cycle needs n >= 3, got {n}")));
    }
    let ring = (0..n).map(|i| (i, (i + 1) % n));
    if directed {
        DirectedGraph::new(n, ring.map(|(a, b)| (a, b, 1.0)))
    } else {
        DirectedGraph::new(n, bidirected(ring))
    }
}

/// Unit-weight path `0 - 1 - ... - n-1`; the directed variant points towards
/// the last node.
pub fn path_graph(n: usize, directed: bool) -> Result<DirectedGraph> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("path needs n >= 2, got {n}")));
    }
    let links = (0..n - 1).map(|i| (i, i + 1));
    if directed {
        DirectedGraph::new(n, links.map(|(a, b)| (a, b, 1.0)))
    } else {
        DirectedGraph::new(n, bidirected(links))
    }
}

/// Star with center 0 and `leaves` leaves. The directed variant points every
/// leaf at the center (an in-star, so the center is the only globally
/// reachable node).
pub fn star_graph(leaves: usize, directed: bool) -> Result<DirectedGraph> {
    if leaves < 1 {
        return Err(Error::InvalidArgument("star needs at least one leaf".into()));
    }
    let spokes = (1..=leaves).map(|i| (i, 0));
    if directed {
        DirectedGraph::new(leaves + 1, spokes.map(|(a, b)| (a, b, 1.0)))
    } else {
        DirectedGraph::new(leaves + 1, bidirected(spokes))
    }
}

/// Roach graph: an upper path `0..path_len` and a lower path
/// `path_len..2*path_len`, joined by `vertical_edges` rungs at the right end
/// (rung `i` joins upper node `i` with lower node `path_len + i` for the last
/// `vertical_edges` positions).
///
/// Orientation of the directed variant (fixed, version 1):
/// - upper path runs left to right,
/// - lower path runs right to left,
/// - rungs point from upper to lower,
/// - one closing edge runs from the lower path's left end to the upper path's
///   left end, so every node reaches every other.
///
/// The undirected variant has no closing edge and all edges bidirected.
pub fn roach_graph(path_len: usize, vertical_edges: usize, directed: bool) -> Result<DirectedGraph> {
    if path_len < 2 || vertical_edges < 1 || vertical_edges > path_len {
        return Err(Error::InvalidArgument(format!(
            "roach needs path_len >= 2 and 1 <= vertical_edges <= path_len, got ({path_len}, {vertical_edges})"
        )));
    }
    let upper = |i: usize| i;
    let lower = |i: usize| path_len + i;
    let rungs = (path_len - vertical_edges..path_len).map(|i| (upper(i), lower(i)));
    let n = 2 * path_len;
    if directed {
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        edges.extend((0..path_len - 1).map(|i| (upper(i), upper(i + 1), 1.0)));
        edges.extend((0..path_len - 1).map(|i| (lower(i + 1), lower(i), 1.0)));
        edges.extend(rungs.map(|(a, b)| (a, b, 1.0)));
        edges.push((lower(0), upper(0), 1.0));
        DirectedGraph::new(n, edges)
    } else {
        let links = (0..path_len - 1)
            .flat_map(|i| [(upper(i), upper(i + 1)), (lower(i), lower(i + 1))])
            .chain(rungs);
        DirectedGraph::new(n, bidirected(links))
    }
}

/// Random connected digraph: a random in-arborescence (every node gets one
/// edge towards an earlier node of a random ordering, so the root is
/// globally reachable) plus independent extra edges with probability
/// `edge_prob`. Weights are uniform in `[0.5, 1.5)`.
pub fn random_connected_digraph<R: Rng + ?Sized>(
    n: usize,
    edge_prob: f64,
    rng: &mut R,
) -> Result<DirectedGraph> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let order = random_order(n, rng);
    let mut adj = vec![vec![0.0; n]; n];
    for k in 1..n {
        let parent = order[rng.random_range(0..k)];
        adj[order[k]][parent] = rng.random_range(0.5..1.5);
    }
    for (i, row) in adj.iter_mut().enumerate() {
        for (j, w) in row.iter_mut().enumerate() {
            if i != j && *w == 0.0 && rng.random_bool(edge_prob) {
                *w = rng.random_range(0.5..1.5);
            }
        }
    }
    from_dense(adj)
}

/// Random connected undirected graph (random spanning tree plus extra
/// edges), stored with both orientations.
pub fn random_connected_undirected<R: Rng + ?Sized>(
    n: usize,
    edge_prob: f64,
    rng: &mut R,
) -> Result<DirectedGraph> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let order = random_order(n, rng);
    let mut adj = vec![vec![0.0; n]; n];
    for k in 1..n {
        let (a, b) = (order[k], order[rng.random_range(0..k)]);
        let w = rng.random_range(0.5..1.5);
        adj[a][b] = w;
        adj[b][a] = w;
    }
    for i in 0..n {
        for j in 0..i {
            if adj[i][j] == 0.0 && rng.random_bool(edge_prob) {
                let w = rng.random_range(0.5..1.5);
                adj[i][j] = w;
                adj[j][i] = w;
            }
        }
    }
    from_dense(adj)
}

fn random_order<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    order
}

fn from_dense(adj: Vec<Vec<f64>>) -> Result<DirectedGraph> {
    let n = adj.len();
    let edges = adj.iter().enumerate().flat_map(|(i, row)| {
        row.iter()
            .enumerate()
            .filter(|&(_, &w)| w > 0.0)
            .map(move |(j, &w)| (i, j, w))
    });
    DirectedGraph::new(n, edges)
}
