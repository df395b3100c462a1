//! Expected force: the entropy of the cluster out-degree distribution over
//! every ordered two-transmission sequence starting at a seed.

use std::collections::BTreeMap;

use crate::graph::{Graph, NodeId};

use super::MetricsError;

pub const DEFAULT_ALPHA: f64 = 2.0;

/// Out-degree of the cluster reached by each ordered transmission sequence
/// from `seed`, folded into a histogram `d_k -> multiplicity`.
///
/// The first transmission goes to a neighbor `a` of the seed. The second
/// leaves either the seed or `a` towards some `b` outside `{seed, a}`. A
/// cluster reachable by several sequences is counted once per sequence.
pub fn cluster_degree_histogram(g: &Graph, seed: NodeId) -> BTreeMap<usize, u64> {
    let mut hist = BTreeMap::new();
    let seed_deg = g.degree(seed);
    for &a in g.neighbors(seed) {
        let base = seed_deg + g.degree(a);
        for (from, other) in [(seed, a), (a, seed)] {
            for &b in g.neighbors(from) {
                if b == seed || b == a {
                    continue;
                }
                // edges seed-a and from-b are internal, b-other maybe
                let internal = 2 + usize::from(g.has_edge(b, other));
                let d = base + g.degree(b) - 2 * internal;
                *hist.entry(d).or_insert(0) += 1;
            }
        }
    }
    hist
}

/// Shannon entropy (natural log) of the normalized cluster out-degrees.
///
/// Zero when the seed has no two-transmission sequence or when every
/// cluster has out-degree 0.
pub fn expected_force(g: &Graph, seed: NodeId) -> Result<f64, MetricsError> {
    g.check_node(seed)?;
    Ok(entropy_of_histogram(&cluster_degree_histogram(g, seed)))
}

pub(crate) fn entropy_of_histogram(hist: &BTreeMap<usize, u64>) -> f64 {
    let total: f64 = hist.iter().map(|(&d, &c)| d as f64 * c as f64).sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for (&d, &count) in hist {
        if d == 0 {
            continue;
        }
        let p = d as f64 / total;
        h -= count as f64 * p * p.ln();
    }
    // all-equal terms give exactly ln(T) up to rounding; clamp the -0.0 case
    h.max(0.0)
}

/// `ln(alpha * deg(seed)) * ExF(seed)`, and 0 for isolated seeds.
pub fn expected_force_modified(g: &Graph, seed: NodeId, alpha: f64) -> Result<f64, MetricsError> {
    check_alpha(alpha)?;
    g.check_node(seed)?;
    Ok(modify(expected_force(g, seed)?, g.degree(seed), alpha))
}

pub(crate) fn modify(exf: f64, degree: usize, alpha: f64) -> f64 {
    if degree == 0 {
        0.0
    } else {
        (alpha * degree as f64).ln() * exf
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<(), MetricsError> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(MetricsError::Argument(format!("alpha must be positive, got {alpha}")))
    }
}
