//! Eigenvector centrality by power iteration on the adjacency operator.

use crate::graph::{largest_component, Graph};

use super::MetricsError;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Principal eigenpair of a connected graph's adjacency matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    /// Max-normalized, so the largest entry is exactly 1.
    pub vector: Vec<f64>,
    /// Rayleigh quotient at the final iterate.
    pub value: f64,
    pub iterations: usize,
}

/// Power iteration on `g`, which should be connected.
///
/// Bipartite graphs have `-λ` in the spectrum and plain iteration on `A`
/// oscillates, so every step is damped: the next iterate is the average of
/// `A x / ‖A x‖∞` and `x`, which is power iteration on `A + I` up to scale.
/// Convergence is declared when successive max-normalized iterates differ
/// by less than `tol` in max-norm.
pub fn leading_eigenpair(g: &Graph, tol: f64, max_iter: usize) -> Result<EigenPair, MetricsError> {
    let n = g.node_count();
    if n == 0 {
        return Ok(EigenPair {
            vector: Vec::new(),
            value: 0.0,
            iterations: 0,
        });
    }
    if g.edge_count() == 0 {
        // every vector is an eigenvector of the zero matrix
        return Ok(EigenPair {
            vector: vec![1.0; n],
            value: 0.0,
            iterations: 0,
        });
    }

    let mut x = vec![1.0; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iter in 1..=max_iter {
        for (u, slot) in next.iter_mut().enumerate() {
            *slot = x[u] + g.neighbors(u).iter().map(|&v| x[v]).sum::<f64>();
        }
        let scale = next.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
        if scale == 0.0 {
            return Err(MetricsError::NoConvergence {
                iterations: iter,
                residual,
                last: x,
            });
        }
        residual = 0.0;
        for (xi, ni) in x.iter_mut().zip(&next) {
            let v = ni / scale;
            residual = residual.max((v - *xi).abs());
            *xi = v;
        }
        if residual < tol {
            let value = rayleigh_quotient(g, &x);
            return Ok(EigenPair {
                vector: x,
                value,
                iterations: iter,
            });
        }
    }
    Err(MetricsError::NoConvergence {
        iterations: max_iter,
        residual,
        last: x,
    })
}

pub(crate) fn rayleigh_quotient(g: &Graph, x: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (u, &xu) in x.iter().enumerate() {
        num += xu * g.neighbors(u).iter().map(|&v| x[v]).sum::<f64>();
        den += xu * xu;
    }
    num / den
}

/// Eigenvector centrality of every node, max-normalized, with the leading
/// eigenvalue.
///
/// The iteration runs on the largest connected component; nodes outside it
/// get 0.
pub fn eigenvector_centrality(
    g: &Graph,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, f64), MetricsError> {
    let (lcc, map) = largest_component(g);
    let pair = leading_eigenpair(&lcc, tol, max_iter)?;
    let mut out = vec![0.0; g.node_count()];
    for (old, new) in map.iter().enumerate() {
        if let Some(new) = *new {
            out[old] = pair.vector[new].max(0.0);
        }
    }
    Ok((out, pair.value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        let mut e = vec![];
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v));
            }
        }
        Graph::from_unlabeled(n, e).unwrap()
    }

    #[test]
    fn complete_graph_uniform() {
        for n in 3..=20 {
            let (v, lambda) = eigenvector_centrality(&complete(n), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            assert!(v.iter().all(|&x| (x - 1.0).abs() < 1e-12));
            assert!((lambda - (n as f64 - 1.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn star_closed_form() {
        // star with 4 leaves: center 1, leaves 1/2, lambda 2
        let g = Graph::from_unlabeled(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let (v, lambda) = eigenvector_centrality(&g, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-9);
        for leaf in &v[1..] {
            assert!((leaf - 0.5).abs() < 1e-8, "{leaf}");
        }
        assert!((lambda - 2.0).abs() < 1e-9);
    }

    #[test]
    fn path_p4_golden_ratio() {
        let g = Graph::from_unlabeled(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let (_, lambda) = eigenvector_centrality(&g, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((lambda - phi).abs() < 1e-9);
    }

    #[test]
    fn outside_largest_component_is_zero() {
        let g = Graph::from_unlabeled(6, [(0, 1), (3, 4), (4, 5), (3, 5)]).unwrap();
        let (v, lambda) = eigenvector_centrality(&g, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(&v[..3], &[0.0, 0.0, 0.0]);
        assert!((lambda - 2.0).abs() < 1e-9);
    }

    #[test]
    fn non_convergence_reports_residual() {
        let g = Graph::from_unlabeled(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        match leading_eigenpair(&g, 1e-15, 2) {
            Err(MetricsError::NoConvergence { iterations, residual, last }) => {
                assert_eq!(iterations, 2);
                assert!(residual > 0.0);
                assert_eq!(last.len(), 4);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
