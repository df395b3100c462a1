//! k-shell, eigenvector centrality and diameter against slow reference
//! implementations.

mod common;

use common::*;
use exforce::graph::{largest_component, Graph};
use exforce::metrics::{eigenvector_centrality, k_shell, DEFAULT_MAX_ITER, DEFAULT_TOL};
use exforce::stats::{bounded_diameter, bfs_distances, exact_diameter_of, network_stats};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::Rng;

/// Core numbers by repeated full scans: for k = 1, 2, ... keep deleting any
/// node whose remaining degree is below k until nothing changes.
fn naive_core_numbers(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let mut core = vec![0; n];
    let mut alive = vec![true; n];
    let mut k = 1;
    while alive.iter().any(|&a| a) {
        loop {
            let doomed: Vec<usize> = (0..n)
                .filter(|&u| alive[u] && g.neighbors(u).iter().filter(|&&v| alive[v]).count() < k)
                .collect();
            if doomed.is_empty() {
                break;
            }
            for u in doomed {
                alive[u] = false;
            }
        }
        for u in 0..n {
            if alive[u] {
                core[u] = k;
            }
        }
        k += 1;
    }
    core
}

#[test]
fn k_shell_matches_naive_pruning() {
    let mut r = rng(11);
    for i in 0..200 {
        let n = r.random_range(1..=300);
        let g = if i % 2 == 0 {
            let mean_degree = r.random_range(0.5..12.0);
            let p = (mean_degree / n as f64).min(1.0);
            Graph::from_unlabeled(n, gnp_edges(n, p, &mut r)).unwrap()
        } else {
            random_sparse_connected(n, r.random_range(0..3 * n), &mut r)
        };
        let shells = k_shell(&g);
        assert_eq!(shells, naive_core_numbers(&g), "graph {i}");
        for u in 0..n {
            assert!(shells[u] <= g.degree(u));
        }
    }
}

#[test]
fn k_shell_pendant_on_clique() {
    let g = Graph::from_unlabeled(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)]).unwrap();
    assert_eq!(k_shell(&g), vec![3, 3, 3, 3, 1]);
}

fn dense_top_eigenpair(g: &Graph) -> (f64, Vec<f64>) {
    let n = g.node_count();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (u, v) in g.edges() {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
    }
    let eig = SymmetricEigen::new(a);
    let top = eig.eigenvalues.imax();
    let vector = eig.eigenvectors.column(top).iter().map(|x| x.abs()).collect();
    (eig.eigenvalues[top], vector)
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

#[test]
fn eigenvector_matches_dense_solver() {
    let mut r = rng(5);
    for i in 0..300 {
        let n = r.random_range(2..=50);
        let g = if i % 3 == 0 {
            random_connected(n, &mut r)
        } else {
            random_sparse_connected(n, r.random_range(0..n), &mut r)
        };
        let (vec, lambda) = eigenvector_centrality(&g, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let (want_lambda, want_vec) = dense_top_eigenpair(&g);
        assert!((lambda - want_lambda).abs() < 1e-6, "graph {i}: {lambda} vs {want_lambda}");
        let c = cosine(&vec, &want_vec);
        assert!(c >= 1.0 - 1e-6, "graph {i}: cosine {c}");
        let max = vec.iter().cloned().fold(0.0, f64::max);
        assert!((max - 1.0).abs() < 1e-12);
        assert!(vec.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }
}

#[test]
fn closed_form_spectra() {
    // P4: golden ratio; star with 4 leaves: sqrt(4) with leaves at 1/2
    let (_, lambda) = eigenvector_centrality(&path(4), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    assert!((lambda - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-8);
    assert!((lambda - dense_top_eigenpair(&path(4)).0).abs() < 1e-8);
    let (v, lambda) = eigenvector_centrality(&star(4), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    assert!((lambda - 2.0).abs() < 1e-8);
    assert!((v[0] - 1.0).abs() < 1e-12 && (v[1] - 0.5).abs() < 1e-8);
    for n in 3..=20 {
        let stats = network_stats(&complete(n), false).unwrap();
        assert!((stats.leading_eigenvalue - (n - 1) as f64).abs() < 1e-8);
    }
}

/// Eccentricity of every node by plain BFS, no parallelism, no pruning.
fn brute_diameter(g: &Graph) -> usize {
    (0..g.node_count())
        .map(|s| bfs_distances(g, s).into_iter().filter(|&d| d != usize::MAX).max().unwrap_or(0))
        .max()
        .unwrap_or(0)
}

#[test]
fn certified_diameter_equals_exact() {
    let mut r = rng(3);
    for i in 0..100 {
        let n = r.random_range(2..=200);
        let raw = if i % 2 == 0 {
            let p = (r.random_range(1.0..4.0) / n as f64).min(1.0);
            Graph::from_unlabeled(n, gnp_edges(n, p, &mut r)).unwrap()
        } else {
            random_sparse_connected(n, r.random_range(0..n / 4 + 1), &mut r)
        };
        let (g, _) = largest_component(&raw);
        let exact = brute_diameter(&g);
        assert_eq!(exact_diameter_of(&g), exact, "graph {i}");
        let est = bounded_diameter(&g, usize::MAX);
        assert!(est.is_exact(), "graph {i}: {est:?}");
        assert_eq!(est.lower, exact, "graph {i}");
    }
}

#[test]
fn budgeted_diameter_brackets_exact() {
    let mut r = rng(8);
    for _ in 0..30 {
        let g = random_sparse_connected(150, 10, &mut r);
        let exact = exact_diameter_of(&g);
        let est = bounded_diameter(&g, 2);
        assert!(est.lower <= exact && exact <= est.upper, "{est:?} vs {exact}");
    }
}

proptest! {
    #[test]
    fn loaded_graphs_satisfy_invariants(
        n in 1usize..40,
        raw in prop::collection::vec((0usize..40, 0usize..40), 0..120),
    ) {
        let text: String = raw.iter().map(|(u, v)| format!("{} {}\n", u % n, v % n)).collect();
        match exforce::graph::parse_edge_list(text.as_bytes()) {
            Ok((g, _)) => {
                prop_assert!(g.validate().is_ok());
                let degree_sum: usize = (0..g.node_count()).map(|u| g.degree(u)).sum();
                prop_assert_eq!(degree_sum, 2 * g.edge_count());
                for u in 0..g.node_count() {
                    let nb = g.neighbors(u);
                    prop_assert!(nb.windows(2).all(|w| w[0] < w[1]));
                    prop_assert!(!nb.contains(&u));
                    for &v in nb {
                        prop_assert!(g.has_edge(v, u));
                    }
                }
            }
            Err(e) => prop_assert!(text.is_empty(), "unexpected error {e}"),
        }
    }
}
