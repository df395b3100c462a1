//! Whole-network summary statistics: size, density, diameter and leading
//! adjacency eigenvalue of the largest connected component.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{largest_component, Graph, GraphError, NodeId};
use crate::metrics::{leading_eigenpair, MetricsError, DEFAULT_MAX_ITER, DEFAULT_TOL};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("leading eigenvalue: {0}")]
    Eigen(#[from] MetricsError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkStats {
    pub nodes: usize,
    pub edges: usize,
    /// Edges per node.
    pub density: f64,
    /// `2 * edges / nodes`, reported alongside density.
    pub mean_degree: f64,
    /// Hop diameter of the largest connected component.
    pub diameter: usize,
    /// Whether `diameter` is certified exact (always true unless a BFS
    /// budget cut the bounding search short, in which case it is a lower
    /// bound).
    pub diameter_exact: bool,
    pub leading_eigenvalue: f64,
    pub lcc_size: usize,
    pub lcc_edges: usize,
}

pub fn network_stats(g: &Graph, exact_diameter: bool) -> Result<NetworkStats, StatsError> {
    g.require_edges()?;
    let (lcc, _) = largest_component(g);
    let diameter = if exact_diameter {
        let d = exact_diameter_of(&lcc);
        DiameterEstimate {
            lower: d,
            upper: d,
            bfs_runs: lcc.node_count(),
        }
    } else {
        bounded_diameter(&lcc, usize::MAX)
    };
    let pair = leading_eigenpair(&lcc, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    let nodes = g.node_count();
    let edges = g.edge_count();
    Ok(NetworkStats {
        nodes,
        edges,
        density: edges as f64 / nodes as f64,
        mean_degree: 2.0 * edges as f64 / nodes as f64,
        diameter: diameter.lower,
        diameter_exact: diameter.is_exact(),
        leading_eigenvalue: pair.value,
        lcc_size: lcc.node_count(),
        lcc_edges: lcc.edge_count(),
    })
}

/// Breadth-first distances from `source`; unreachable nodes get `usize::MAX`.
pub fn bfs_distances(g: &Graph, source: NodeId) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.node_count()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        for &v in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = next;
                queue.push_back(v);
            }
        }
    }
    dist
}

fn eccentricity(dist: &[usize]) -> usize {
    dist.iter().copied().filter(|&d| d != usize::MAX).max().unwrap_or(0)
}

/// Maximum eccentricity over all sources of a connected graph.
pub fn exact_diameter_of(g: &Graph) -> usize {
    let ecc = |s: NodeId| eccentricity(&bfs_distances(g, s));
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..g.node_count()).into_par_iter().map(ecc).max().unwrap_or(0)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..g.node_count()).map(ecc).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiameterEstimate {
    pub lower: usize,
    pub upper: usize,
    pub bfs_runs: usize,
}

impl DiameterEstimate {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Diameter of a connected graph, from a double sweep followed by
/// eccentricity bounding: every BFS tightens per-node eccentricity
/// intervals, and nodes that can no longer change either global bound are
/// pruned. Stops after `max_bfs` traversals, returning the bounds reached.
pub fn bounded_diameter(g: &Graph, max_bfs: usize) -> DiameterEstimate {
    let n = g.node_count();
    if n <= 1 {
        return DiameterEstimate {
            lower: 0,
            upper: 0,
            bfs_runs: 0,
        };
    }

    let mut ecc_lo = vec![0usize; n];
    let mut ecc_hi = vec![usize::MAX; n];
    let mut alive: Vec<NodeId> = (0..n).collect();
    let mut lower = 0usize;
    let mut upper = usize::MAX;
    let mut runs = 0usize;

    // double sweep: hub, then its farthest node
    let hub = (0..n).max_by_key(|&u| (g.degree(u), std::cmp::Reverse(u))).unwrap();
    let mut next = Some(hub);
    let mut sweep = 0;
    let mut pick_high = true;

    while lower < upper && !alive.is_empty() && runs < max_bfs {
        let v = match next.take() {
            Some(v) => v,
            None => {
                let key = |&u: &NodeId| (ecc_hi[u], g.degree(u), std::cmp::Reverse(u));
                let chosen = if pick_high {
                    alive.iter().copied().max_by_key(key)
                } else {
                    alive
                        .iter()
                        .copied()
                        .min_by_key(|&u| (ecc_lo[u], std::cmp::Reverse(g.degree(u)), u))
                };
                pick_high = !pick_high;
                chosen.unwrap()
            }
        };
        let dist = bfs_distances(g, v);
        runs += 1;
        let ecc = eccentricity(&dist);
        lower = lower.max(ecc);
        upper = upper.min(2 * ecc);
        ecc_lo[v] = ecc;
        ecc_hi[v] = ecc;

        if sweep == 0 {
            let far = (0..n).filter(|&u| dist[u] == ecc).min().unwrap();
            next = Some(far);
        }
        sweep += 1;

        for &w in &alive {
            let d = dist[w];
            if d == usize::MAX {
                continue;
            }
            ecc_lo[w] = ecc_lo[w].max(d.max(ecc - d));
            ecc_hi[w] = ecc_hi[w].min(ecc + d);
        }
        alive.retain(|&w| {
            let settled = ecc_lo[w] == ecc_hi[w];
            let irrelevant = ecc_hi[w] <= lower && 2 * ecc_lo[w] >= upper;
            !(settled || irrelevant)
        });
        if let Some(bound) = alive.iter().map(|&w| ecc_hi[w]).max() {
            upper = upper.min(bound.max(lower));
        } else {
            upper = lower;
        }
    }

    DiameterEstimate {
        lower,
        upper: upper.max(lower),
        bfs_runs: runs,
    }
}
