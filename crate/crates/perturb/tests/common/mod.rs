#![allow(dead_code)]

use num_complex::Complex64;
use perturb::model::{redivide, SplitSystem, SystemSpec};
use perturb::CMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded RNG; `PERTURB_SEED` overrides the per-test default.
pub fn rng(default_seed: u64) -> ChaCha8Rng {
    let seed = std::env::var("PERTURB_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(default_seed);
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Random Hermitian matrix scaled to the given Frobenius norm.
pub fn random_hermitian(rng: &mut impl Rng, n: usize, frobenius: f64) -> CMatrix {
    let mut h = CMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = c(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..n {
            let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    let norm = h.norm();
    if norm > 0.0 {
        h *= c(frobenius / norm, 0.0);
    }
    h
}

pub fn min_gap(e: &[f64]) -> f64 {
    let mut s = e.to_vec();
    s.sort_by(f64::total_cmp);
    s.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// Random spec on `[-2, 2]` whose redivided energies keep `gap` apart.
pub fn random_spec(rng: &mut impl Rng, n: usize, frobenius: f64, gap: f64) -> (SystemSpec, SplitSystem) {
    loop {
        let energies: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        if min_gap(&energies) <= gap {
            continue;
        }
        let spec = SystemSpec::new(energies, random_hermitian(rng, n, frobenius));
        let sys = redivide(&spec).expect("random system redivides");
        if min_gap(&sys.energies) > gap {
            return (spec, sys);
        }
    }
}

pub fn random_system(rng: &mut impl Rng, n: usize, frobenius: f64, gap: f64) -> SplitSystem {
    random_spec(rng, n, frobenius, gap).1
}

pub fn two_state(v: Complex64) -> SplitSystem {
    let g = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), v, v.conj(), c(0.0, 0.0)]);
    SplitSystem::from_parts(vec![0.0, 1.0], g).unwrap()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

/// `max |a - b| / (1 + max |b|)`.
pub fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b)) / (1.0 + max_abs(b))
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Rayleigh-Schroedinger energy corrections `E^(1)..E^(max)` of level `c`
/// for `diag(energies) + g`.
pub fn rs_energies(energies: &[f64], g: &CMatrix, c: usize, max: usize) -> Vec<f64> {
    let n = energies.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut psi = vec![vec![zero; n]];
    psi[0][c] = Complex64::new(1.0, 0.0);
    let mut e = vec![0.0];
    for k in 1..=max {
        let prev = &psi[k - 1];
        let gp: Vec<Complex64> = (0..n).map(|i| (0..n).map(|j| g[(i, j)] * prev[j]).sum()).collect();
        e.push(gp[c].re);
        let mut next = vec![zero; n];
        for i in (0..n).filter(|&i| i != c) {
            let mut r = gp[i];
            for j in 1..=k {
                r -= psi[k - j][i] * e[j];
            }
            next[i] = r / (energies[c] - energies[i]);
        }
        psi.push(next);
    }
    e
}
