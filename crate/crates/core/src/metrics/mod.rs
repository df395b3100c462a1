//! Per-node spreading-power metrics: expected force (plain and
//! degree-modified), k-shell index and eigenvector centrality.

mod eigen;
mod exf;
mod kshell;

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::format::sig6;
use crate::graph::{label_cmp, Graph, GraphError, NodeId};

pub use eigen::{eigenvector_centrality, leading_eigenpair, EigenPair, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use exf::{cluster_degree_histogram, expected_force, expected_force_modified, DEFAULT_ALPHA};
pub use kshell::k_shell;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{0}")]
    Argument(String),
    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        last: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeMetricsRecord {
    pub node: NodeId,
    pub degree: usize,
    pub exf: f64,
    pub exf_m: f64,
    pub kshell: usize,
    pub evc: f64,
}

/// Metrics for the requested nodes.
///
/// k-shell and eigenvector centrality are computed once for the whole graph;
/// expected force is computed per requested node.
pub fn all_metrics(
    g: &Graph,
    nodes: &[NodeId],
    alpha: f64,
) -> Result<Vec<NodeMetricsRecord>, MetricsError> {
    exf::check_alpha(alpha)?;
    for &u in nodes {
        g.check_node(u)?;
    }
    if nodes.is_empty() {
        return Ok(Vec::new());
    }
    let shells = k_shell(g);
    let (evc, _) = eigenvector_centrality(g, DEFAULT_TOL, DEFAULT_MAX_ITER)?;

    let record = |u: NodeId| {
        let exf = exf::entropy_of_histogram(&cluster_degree_histogram(g, u));
        NodeMetricsRecord {
            node: u,
            degree: g.degree(u),
            exf,
            exf_m: exf::modify(exf, g.degree(u), alpha),
            kshell: shells[u],
            evc: evc[u],
        }
    };

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok(nodes.par_iter().map(|&u| record(u)).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(nodes.iter().map(|&u| record(u)).collect())
    }
}

/// Writes `node,degree,exf,exfm,kshell,evc` rows ordered by external label,
/// reals with six significant digits.
pub fn write_metrics_csv<W: Write>(
    g: &Graph,
    records: &[NodeMetricsRecord],
    mut out: W,
) -> std::io::Result<()> {
    let mut sorted: Vec<&NodeMetricsRecord> = records.iter().collect();
    sorted.sort_by(|a, b| label_cmp(g.label(a.node), g.label(b.node)));
    writeln!(out, "node,degree,exf,exfm,kshell,evc")?;
    for r in sorted {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            g.label(r.node),
            r.degree,
            sig6(r.exf),
            sig6(r.exf_m),
            r.kshell,
            sig6(r.evc)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(leaves: usize) -> Graph {
        Graph::from_unlabeled(leaves + 1, (1..=leaves).map(|l| (0, l))).unwrap()
    }

    #[test]
    fn k4_records_identical() {
        let g = Graph::from_unlabeled(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let recs = all_metrics(&g, &[0, 1, 2, 3], 2.0).unwrap();
        for r in &recs[1..] {
            assert_eq!((r.degree, r.kshell), (recs[0].degree, recs[0].kshell));
            assert!((r.exf - recs[0].exf).abs() < 1e-12);
            assert!((r.exf_m - recs[0].exf_m).abs() < 1e-12);
            assert!((r.evc - recs[0].evc).abs() < 1e-9);
        }
    }

    #[test]
    fn star_center_dominates_leaf() {
        let g = star(5);
        let recs = all_metrics(&g, &[0, 1], 2.0).unwrap();
        let (center, leaf) = (&recs[0], &recs[1]);
        assert!(center.exf > leaf.exf);
        assert!(center.evc > leaf.evc);
        assert_eq!((center.kshell, leaf.kshell), (1, 1));
    }

    #[test]
    fn empty_request() {
        assert!(all_metrics(&star(3), &[], 2.0).unwrap().is_empty());
    }

    #[test]
    fn invalid_node_propagates() {
        assert!(matches!(all_metrics(&star(3), &[7], 2.0), Err(MetricsError::Graph(_))));
    }

    #[test]
    fn csv_rows_follow_label_order() {
        let g = crate::graph::load_edge_list("10 2\n10 9\n".as_bytes()).unwrap();
        let recs = all_metrics(&g, &[0, 1, 2], 2.0).unwrap();
        let mut out = Vec::new();
        write_metrics_csv(&g, &recs, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let first_col: Vec<&str> = text.lines().map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(first_col, ["node", "2", "9", "10"]);
        assert!(text.contains("\n10,2,0,0,1,1\n"), "{text}");
    }
}
