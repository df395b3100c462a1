#![allow(dead_code)]

use exforce::graph::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi G(n, p) as an edge list.
pub fn gnp_edges(n: usize, p: f64, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

pub fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 0 {
        return true;
    }
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Random connected graph on `n` nodes: rejection sampling over G(n, p)
/// with a random density.
pub fn random_connected(n: usize, rng: &mut impl Rng) -> Graph {
    loop {
        let p = rng.random_range(0.15..0.9);
        let edges = gnp_edges(n, p, rng);
        if is_connected(n, &edges) {
            return Graph::from_unlabeled(n, edges).unwrap();
        }
    }
}

/// Random connected sparse graph: a random tree plus extra random edges.
pub fn random_sparse_connected(n: usize, extra: usize, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.random_range(0..v), v));
    }
    for _ in 0..extra {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        edges.push((u, v));
    }
    Graph::from_unlabeled(n, edges).unwrap()
}

pub fn adjacency_matrix(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut m = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        m[u][v] = true;
        m[v][u] = true;
    }
    m
}

pub fn complete(n: usize) -> Graph {
    let mut e = vec![];
    for u in 0..n {
        for v in u + 1..n {
            e.push((u, v));
        }
    }
    Graph::from_unlabeled(n, e).unwrap()
}

pub fn star(leaves: usize) -> Graph {
    Graph::from_unlabeled(leaves + 1, (1..=leaves).map(|l| (0, l))).unwrap()
}

pub fn path(n: usize) -> Graph {
    Graph::from_unlabeled(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
}
