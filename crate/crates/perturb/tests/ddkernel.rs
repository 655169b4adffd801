mod common;

use common::rng;
use num_complex::Complex64;
use perturb::ddkernel::{dd_exp, dd_exp_batch};
use proptest::prelude::*;
use rand::Rng;

/// Partial-fraction form, usable only for well-separated nodes.
fn naive(nodes: &[f64], t: f64) -> Complex64 {
    nodes
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let d: f64 = nodes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &y)| x - y)
                .product();
            Complex64::from_polar(1.0, -x * t) / d
        })
        .sum()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

#[test]
fn matches_partial_fractions_for_separated_nodes() {
    let mut r = rng(21);
    for _ in 0..500 {
        let m = r.random_range(2..=7);
        let nodes: Vec<f64> = (0..m).map(|i| i as f64 * 0.7 + r.random_range(-0.2..0.2)).collect();
        let t = r.random_range(-5.0..5.0);
        let want = naive(&nodes, t);
        assert!((dd_exp(&nodes, t) - want).norm() < 1e-11 * (1.0 + want.norm()));
    }
}

#[test]
fn batch_matches_elementwise() {
    let mut r = rng(22);
    let lists: Vec<Vec<f64>> = (0..1000)
        .map(|_| (0..4).map(|_| r.random_range(-3.0..3.0)).collect())
        .collect();
    let got = dd_exp_batch(&lists, 2.5);
    assert_eq!(got.len(), 1000);
    for (nodes, v) in lists.iter().zip(&got) {
        assert_eq!(*v, dd_exp(nodes, 2.5));
    }
    assert!(dd_exp_batch(&[], 1.0).is_empty());
}

#[test]
fn confluence_pair() {
    let mut r = rng(23);
    for _ in 0..2000 {
        let e = r.random_range(-10.0..10.0);
        let t = r.random_range(-100.0..100.0);
        let got = dd_exp(&[e, e + 1e-8], t);
        let want = Complex64::new(0.0, -t) * Complex64::from_polar(1.0, -e * t);
        assert!(rel(got, want) < 1e-6, "e={e} t={t}");
    }
}

#[test]
fn all_equal_nodes() {
    for l in 0..=6 {
        for &(e, t) in &[(0.0, 1.0), (1.3, -2.0), (-4.0, 7.5), (9.0, 0.3)] {
            let got = dd_exp(&vec![e; l + 1], t);
            let want = Complex64::new(0.0, -t).powi(l as i32) / factorial(l) * Complex64::from_polar(1.0, -e * t);
            assert!(rel(got, want) < 1e-12, "l={l} e={e} t={t}");
        }
    }
}

proptest! {
    #[test]
    fn permutation_symmetry(nodes in prop::collection::vec(-3.0f64..3.0, 2..=7), t in -20.0f64..20.0, seed in any::<u64>()) {
        let mut shuffled = nodes.clone();
        // Deterministic shuffle by rotating and reversing.
        shuffled.rotate_left((seed as usize) % nodes.len());
        if seed & 1 == 1 {
            shuffled.reverse();
        }
        let a = dd_exp(&nodes, t);
        let b = dd_exp(&shuffled, t);
        prop_assert!((a - b).norm() <= 1e-8 * a.norm().max(b.norm()) + 1e-14);
    }

    #[test]
    fn clustered_permutation_symmetry(base in -3.0f64..3.0, offsets in prop::collection::vec(0.0f64..1e-6, 2..=6), t in -10.0f64..10.0) {
        let nodes: Vec<f64> = offsets.iter().map(|o| base + o).collect();
        let mut rev = nodes.clone();
        rev.reverse();
        let a = dd_exp(&nodes, t);
        let b = dd_exp(&rev, t);
        prop_assert!((a - b).norm() <= 1e-8 * a.norm() + 1e-14);
    }

    #[test]
    fn recurrence(steps in prop::collection::vec(1e-3f64..1.0, 1..=6), start in -3.0f64..3.0, t in -10.0f64..10.0) {
        let mut nodes = vec![start];
        for s in &steps {
            let last = *nodes.last().unwrap();
            nodes.push(last + s);
        }
        let m = nodes.len();
        let lhs = dd_exp(&nodes, t);
        let rhs = (dd_exp(&nodes[..m - 1], t) - dd_exp(&nodes[1..], t)) / (nodes[0] - nodes[m - 1]);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(rhs.norm()) + 1e-12);
    }

    #[test]
    fn hermite_genocchi_bound(nodes in prop::collection::vec(-5.0f64..5.0, 1..=7), t in -30.0f64..30.0) {
        let m = nodes.len();
        let bound = t.abs().powi(m as i32 - 1) / factorial(m - 1);
        prop_assert!(dd_exp(&nodes, t).norm() <= bound * (1.0 + 1e-10) + 1e-14);
    }
}
