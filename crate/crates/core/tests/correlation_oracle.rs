mod common;

use common::rng;
use exforce::correlation::{fisher_interval, pearson_correlation_ci, spearman_correlation_ci};
use rand::Rng;

/// Textbook route: mean of products of z-scores with sample standard
/// deviations.
fn textbook_r(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
    let sd = |v: &[f64], m: f64| (v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let (mx, my) = (mean(x), mean(y));
    let (sx, sy) = (sd(x, mx), sd(y, my));
    x.iter().zip(y).map(|(a, b)| ((a - mx) / sx) * ((b - my) / sy)).sum::<f64>() / (n - 1.0)
}

const Z975: f64 = 1.959963984540054;

#[test]
fn matches_textbook_oracle_on_random_pairs() {
    let mut r = rng(1000);
    for _ in 0..1000 {
        let n = r.random_range(4..300);
        let slope = r.random_range(-3.0..3.0);
        let noise = r.random_range(0.01..5.0);
        let x: Vec<f64> = (0..n).map(|_| r.random_range(-10.0..10.0)).collect();
        let y: Vec<f64> = x.iter().map(|a| slope * a + noise * r.random_range(-10.0..10.0)).collect();
        let est = pearson_correlation_ci(&x, &y, 0.95).unwrap();
        let want = textbook_r(&x, &y);
        assert!((est.r - want).abs() < 1e-12, "{} vs {want}", est.r);
        assert!(est.lower <= est.r && est.r <= est.upper);
        assert!(-1.0 <= est.lower && est.upper <= 1.0);
        assert!((est.half_width - (est.upper - est.lower) / 2.0).abs() < 1e-15);

        let se = 1.0 / ((n - 3) as f64).sqrt();
        let z = want.atanh();
        assert!((est.lower - (z - Z975 * se).tanh()).abs() < 1e-9);
        assert!((est.upper - (z + Z975 * se).tanh()).abs() < 1e-9);
    }
}

#[test]
fn half_width_shrinks_as_inverse_sqrt_n() {
    for r in [-0.6, 0.0, 0.3, 0.71, 0.93] {
        for n in [100, 250, 1000] {
            let ratio = fisher_interval(r, n, 0.95).half_width / fisher_interval(r, 4 * n, 0.95).half_width;
            assert!((ratio - 2.0).abs() < 0.1, "r={r} n={n}: ratio {ratio}");
        }
    }
}

#[test]
fn supplementary_table_rounding() {
    assert_eq!(fisher_interval(0.93, 1000, 0.95).display_pm(), "0.93 ± 0.01");
    assert_eq!(fisher_interval(0.71, 1000, 0.95).display_pm(), "0.71 ± 0.03");
}

#[test]
fn spearman_is_pearson_of_ranks_without_ties() {
    let mut r = rng(3);
    let x: Vec<f64> = (0..50).map(|_| r.random::<f64>()).collect();
    let y: Vec<f64> = x.iter().map(|a| a.powi(3) + 0.1 * r.random::<f64>()).collect();
    let rank = |v: &[f64]| {
        v.iter().map(|a| v.iter().filter(|b| *b < a).count() as f64 + 1.0).collect::<Vec<_>>()
    };
    let want = textbook_r(&rank(&x), &rank(&y));
    assert!((spearman_correlation_ci(&x, &y, 0.95).unwrap().r - want).abs() < 1e-12);
}
