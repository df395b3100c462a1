//! Expected force against a brute-force enumeration that materializes every
//! ordered two-transmission sequence from an adjacency matrix.

mod common;

use common::*;
use exforce::graph::Graph;
use exforce::metrics::{expected_force, expected_force_modified};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

/// Every (seed, first, second) triple as a materialized list.
fn sequences(adj: &[Vec<bool>], seed: usize) -> Vec<[usize; 3]> {
    let n = adj.len();
    let mut out = Vec::new();
    for a in 0..n {
        if !adj[seed][a] {
            continue;
        }
        for x in [seed, a] {
            for b in 0..n {
                if adj[x][b] && b != seed && b != a {
                    out.push([seed, a, b]);
                }
            }
        }
    }
    out
}

fn cluster_out_degree(adj: &[Vec<bool>], cluster: &[usize; 3]) -> usize {
    let mut d = 0;
    for &u in cluster {
        for v in 0..adj.len() {
            if adj[u][v] && !cluster.contains(&v) {
                d += 1;
            }
        }
    }
    d
}

fn brute_force_exf(g: &Graph, seed: usize) -> f64 {
    let adj = adjacency_matrix(g);
    let degrees: Vec<usize> = sequences(&adj, seed)
        .iter()
        .map(|c| cluster_out_degree(&adj, c))
        .collect();
    let total: usize = degrees.iter().sum();
    if total == 0 {
        return 0.0;
    }
    degrees
        .iter()
        .filter(|&&d| d > 0)
        .map(|&d| {
            let p = d as f64 / total as f64;
            -p * p.ln()
        })
        .sum()
}

#[test]
fn all_connected_graphs_up_to_five_nodes() {
    let mut checked = 0;
    for n in 1..=5usize {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &e)| e)
                .collect();
            if !is_connected(n, &edges) {
                continue;
            }
            let g = Graph::from_unlabeled(n, edges).unwrap();
            for seed in 0..n {
                let got = expected_force(&g, seed).unwrap();
                let want = brute_force_exf(&g, seed);
                assert!((got - want).abs() < 1e-12, "n={n} mask={mask} seed={seed}: {got} vs {want}");
                checked += 1;
            }
        }
    }
    assert!(checked > 3000);
}

#[test]
fn random_connected_graphs_up_to_seven_nodes() {
    let mut r = rng(2014);
    for _ in 0..500 {
        let n = r.random_range(2..=7);
        let g = random_connected(n, &mut r);
        for seed in 0..n {
            let got = expected_force(&g, seed).unwrap();
            let want = brute_force_exf(&g, seed);
            assert!((got - want).abs() < 1e-12, "{g:?} seed={seed}: {got} vs {want}");
        }
    }
}

#[test]
fn larger_sparse_graphs_match_oracle() {
    let mut r = rng(7);
    for _ in 0..40 {
        let n = r.random_range(10..60);
        let g = random_sparse_connected(n, n / 2, &mut r);
        for seed in 0..n {
            let got = expected_force(&g, seed).unwrap();
            assert!((got - brute_force_exf(&g, seed)).abs() < 1e-12);
        }
    }
}

#[test]
fn analytic_values() {
    for n in 3..=10 {
        // n leaves, seed a leaf: n - 1 equal terms leaf -> center -> other leaf
        let exf = expected_force(&star(n), 1).unwrap();
        assert!((exf - ((n - 1) as f64).ln()).abs() < 1e-12, "n={n}: {exf}");
    }
    assert!((expected_force(&complete(4), 2).unwrap() - 12f64.ln()).abs() < 1e-12);
    assert_eq!(expected_force(&path(4), 0).unwrap(), 0.0);
}

#[test]
fn depends_only_on_radius_three_ball() {
    let mut r = rng(99);
    let mut edited = 0;
    for _ in 0..200 {
        let n = r.random_range(12..40);
        let g = random_sparse_connected(n, 2, &mut r);
        let seed = r.random_range(0..n);
        let dist = exforce::stats::bfs_distances(&g, seed);
        let far: Vec<usize> = (0..n).filter(|&u| dist[u] >= 4).collect();
        if far.len() < 2 {
            continue;
        }
        let (u, v) = (far[0], far[far.len() - 1]);
        let mut edges: Vec<(usize, usize)> = g.edges().collect();
        if let Some(pos) = edges.iter().position(|&e| e == (u.min(v), u.max(v))) {
            edges.remove(pos);
        } else {
            edges.push((u, v));
        }
        let h = Graph::from_unlabeled(n, edges).unwrap();
        assert_eq!(expected_force(&g, seed).unwrap(), expected_force(&h, seed).unwrap());
        edited += 1;
    }
    assert!(edited > 20, "only {edited} graphs had two far nodes");
}

fn edge_list_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2usize..12).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 1..40)))
}

proptest! {
    #[test]
    fn invariant_under_relabeling((n, edges) in edge_list_strategy(), shuffle_seed in any::<u64>()) {
        let g = Graph::from_unlabeled(n, edges.clone()).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng(shuffle_seed));
        let h = Graph::from_unlabeled(n, edges.iter().map(|&(u, v)| (perm[u], perm[v]))).unwrap();
        for u in 0..n {
            let a = expected_force(&g, u).unwrap();
            let b = expected_force(&h, perm[u]).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn non_negative_and_modified_formula((n, edges) in edge_list_strategy(), alpha in 0.1f64..5.0) {
        let g = Graph::from_unlabeled(n, edges).unwrap();
        for u in 0..n {
            let exf = expected_force(&g, u).unwrap();
            prop_assert!(exf >= 0.0);
            let m = expected_force_modified(&g, u, alpha).unwrap();
            let want = if g.degree(u) == 0 { 0.0 } else { (alpha * g.degree(u) as f64).ln() * exf };
            prop_assert!((m - want).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_terms_give_log_count(k in 4usize..30) {
        // complete graphs: every cluster has the same out-degree 3(k-3)
        let g = complete(k);
        let terms = (k - 1) * 2 * (k - 2);
        prop_assert!((expected_force(&g, 0).unwrap() - (terms as f64).ln()).abs() < 1e-12);
    }
}
