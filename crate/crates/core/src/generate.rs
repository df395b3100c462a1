//! Preferential-attachment generator with a tunable share of degree-one
//! arrivals, used as a desk-scale stand-in for AS-level topologies.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, GraphError, NodeId};

/// Grows a graph from a single edge `0 - 1`. Each later arrival attaches
/// with one edge with probability `leaf_fraction`, otherwise with
/// `m_per_node` edges (capped by the number of nodes already present), to
/// distinct targets chosen with probability proportional to degree.
pub fn generate_pa_graph(
    n: usize,
    m_per_node: usize,
    leaf_fraction: f64,
    rng_seed: u64,
) -> Result<Graph, GraphError> {
    if m_per_node < 1 {
        return Err(GraphError::Argument("m_per_node must be at least 1".into()));
    }
    if n < m_per_node + 1 || n < 2 {
        return Err(GraphError::Argument(format!(
            "n = {n} must be at least m_per_node + 1 = {}",
            m_per_node + 1
        )));
    }
    if !(0.0..=1.0).contains(&leaf_fraction) {
        return Err(GraphError::Argument(format!(
            "leaf_fraction must lie in [0, 1], got {leaf_fraction}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    // every edge endpoint, so a uniform pick is degree-proportional
    let mut endpoints: Vec<NodeId> = vec![0, 1];
    let mut edges: Vec<(NodeId, NodeId)> = vec![(0, 1)];
    let mut targets: Vec<NodeId> = Vec::with_capacity(m_per_node);

    for new in 2..n {
        let wanted = if rng.random_bool(leaf_fraction) { 1 } else { m_per_node };
        let wanted = wanted.min(new);
        targets.clear();
        while targets.len() < wanted {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, new));
            endpoints.push(t);
            endpoints.push(new);
        }
    }

    Graph::from_unlabeled(n, edges)
}
