//! Confluent divided differences of `f(x) = exp(-i x t)`.
//!
//! The divided difference over nodes `x_1..x_m` equals entry `(1, m)` of
//! `exp(-i t Z)`, where `Z` is upper bidiagonal with the nodes on its
//! diagonal and ones above it. Repeated nodes need no special casing, so the
//! confluent limits come out exact.

use num_complex::Complex64;

/// Taylor degree for the scaled exponential. With `||M|| <= 1/2` the
/// truncation error is below `0.5^19 / 19! ~ 2e-23`.
const TAYLOR_DEGREE: usize = 18;
const SCALED_NORM: f64 = 0.5;

/// Divided difference `f[x_1, ..., x_m]` of `exp(-i x t)`.
///
/// Returns `exp(-i x_1 t)` for a single node and zero for an empty list.
pub fn dd_exp(nodes: &[f64], t: f64) -> Complex64 {
    let m = nodes.len();
    match m {
        0 => return Complex64::new(0.0, 0.0),
        1 => return phase(nodes[0], t),
        _ => {}
    }

    // Shifting every node by c multiplies the result by exp(-i c t).
    let (lo, hi) = nodes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    });
    let centre = 0.5 * (lo + hi);
    let radius = 0.5 * (hi - lo);

    // One-norm of t * (Z - c I) is at most |t| (radius + 1).
    let norm = t.abs() * (radius + 1.0);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > SCALED_NORM {
        scale *= 0.5;
        squarings += 1;
    }

    // M = -i t scale (Z - c I), stored as its diagonal and constant superdiagonal.
    let factor = Complex64::new(0.0, -t * scale);
    let diag: Vec<Complex64> = nodes.iter().map(|&x| factor * (x - centre)).collect();
    let sup = factor;

    let mut s = taylor_exp(&diag, sup);
    for _ in 0..squarings {
        s = upper_mul(&s, &s, m);
    }
    s[m - 1] * phase(centre, t)
}

/// Element-wise [`dd_exp`] over several node lists, preserving order.
pub fn dd_exp_batch(node_lists: &[Vec<f64>], t: f64) -> Vec<Complex64> {
    node_lists.iter().map(|nodes| dd_exp(nodes, t)).collect()
}

fn phase(x: f64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, -x * t)
}

/// Horner evaluation of `sum_k M^k / k!` for bidiagonal `M`, returned as a
/// dense row-major upper-triangular matrix.
fn taylor_exp(diag: &[Complex64], sup: Complex64) -> Vec<Complex64> {
    let m = diag.len();
    let one = Complex64::new(1.0, 0.0);
    let mut acc = identity(m);
    for k in (1..=TAYLOR_DEGREE).rev() {
        // acc <- I + (M / k) acc
        let inv_k = 1.0 / k as f64;
        let mut next = vec![Complex64::new(0.0, 0.0); m * m];
        for i in 0..m {
            for j in i..m {
                let mut v = diag[i] * acc[i * m + j];
                if i + 1 < m && j > i {
                    v += sup * acc[(i + 1) * m + j];
                }
                next[i * m + j] = v * inv_k;
            }
            next[i * m + i] += one;
        }
        acc = next;
    }
    acc
}

fn identity(m: usize) -> Vec<Complex64> {
    let mut a = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        a[i * m + i] = Complex64::new(1.0, 0.0);
    }
    a
}

fn upper_mul(a: &[Complex64], b: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in i..m {
            let mut v = Complex64::new(0.0, 0.0);
            for k in i..=j {
                v += a[i * m + k] * b[k * m + j];
            }
            c[i * m + j] = v;
        }
    }
    c
}
