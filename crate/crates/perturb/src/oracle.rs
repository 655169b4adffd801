//! Exact references: Hermitian eigendecomposition by cyclic Jacobi rotations,
//! the spectral propagator, and the closed-form two-level solution.

use crate::model::SplitSystem;
use crate::{CMatrix, Error, Result};
use num_complex::Complex64;

/// Relative off-diagonal Frobenius norm at which Jacobi sweeps stop.
pub const JACOBI_TOLERANCE: f64 = 1e-14;
/// Sweep cap before reporting non-convergence.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Spectral decomposition `H = V diag(E) V^dagger` with ascending eigenvalues.
///
/// Column `k` of `eigenvectors` belongs to `eigenvalues[k]`. Its
/// largest-magnitude component is real and positive.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl ExactSolution {
    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `exp(-i H t)` in the basis `H` was given in.
    pub fn propagator(&self, t: f64) -> CMatrix {
        let n = self.dimension();
        let v = &self.eigenvectors;
        let mut u = CMatrix::zeros(n, n);
        for k in 0..n {
            let ph = Complex64::from_polar(1.0, -self.eigenvalues[k] * t);
            for i in 0..n {
                let vik = v[(i, k)] * ph;
                for j in 0..n {
                    u[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        u
    }

    /// Rebuild `H` from the spectrum.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dimension();
        let v = &self.eigenvectors;
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            self.eigenvalues.iter().map(|&e| Complex64::new(e, 0.0)),
        ));
        v * d * v.adjoint()
    }
}

/// Diagonalize the working Hamiltonian `diag(E') + g` of a split system.
pub fn diagonalize(sys: &SplitSystem) -> Result<ExactSolution> {
    hermitian_eigen(&sys.hamiltonian())
}

/// Cyclic Jacobi eigensolver for a Hermitian matrix.
///
/// Only the upper triangle mirrored onto the lower one is trusted. The input
/// is symmetrised first with `(H + H^dagger) / 2`.
pub fn hermitian_eigen(h: &CMatrix) -> Result<ExactSolution> {
    let n = h.nrows();
    assert_eq!(n, h.ncols(), "hermitian_eigen needs a square matrix");
    let mut a = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let mut v = CMatrix::identity(n, n);

    let scale = a.norm();
    let target = JACOBI_TOLERANCE * scale;
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut best = 0;
        for i in 1..n {
            if v[(i, k)].norm() > v[(best, k)].norm() {
                best = i;
            }
        }
        let pivot = v[(best, k)];
        let fix = if pivot.norm() > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            eigenvectors[(i, col)] = v[(i, k)] * fix;
        }
        // The pivot is now real up to rounding; drop the residue.
        eigenvectors[(best, col)] = Complex64::new(eigenvectors[(best, col)].re, 0.0);
    }
    Ok(ExactSolution {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilate `a[p][q]` with `U = diag(1, e^{-i phi}) R(theta)` acting on
/// the `(p, q)` plane: `a <- U^dagger a U`, `v <- v U`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let n = a.nrows();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let e = apq.conj() / mag; // e^{-i phi}

    // Columns: a <- a U.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * e * s;
        a[(k, q)] = akp * s + akq * e * c;
    }
    // Rows: a <- U^dagger a.
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * e.conj() * s;
        a[(q, k)] = apk * s + aqk * e.conj() * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * e * s;
        v[(k, q)] = vkp * s + vkq * e * c;
    }
}

/// `|<to| exp(-i H t) |from>|^2` from the spectral form.
pub fn exact_transition_probability(sol: &ExactSolution, from: usize, to: usize, t: f64) -> Result<f64> {
    let n = sol.dimension();
    for &idx in &[from, to] {
        if idx >= n {
            return Err(Error::LevelOutOfRange {
                index: idx,
                dimension: n,
            });
        }
    }
    let v = &sol.eigenvectors;
    let mut amp = Complex64::new(0.0, 0.0);
    for k in 0..n {
        amp += v[(to, k)] * v[(from, k)].conj() * Complex64::from_polar(1.0, -sol.eigenvalues[k] * t);
    }
    Ok(amp.norm_sqr())
}

/// Closed-form eigenvalues and transition probability of a two-level system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStateSolution {
    pub e1_exact: f64,
    pub e2_exact: f64,
    pub omega_exact: f64,
    /// `P(1 -> 2)` at the requested time.
    pub p12: f64,
}

/// Two-level system with energies `e1 < e2` and coupling modulus `v`.
pub fn two_state_closed_form(e1: f64, e2: f64, v: f64, t: f64) -> Result<TwoStateSolution> {
    let omega = e2 - e1;
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::NonPositiveGap(omega));
    }
    let omega_exact = (4.0 * v * v + omega * omega).sqrt();
    let half = 0.5 * omega_exact;
    // (E1 + E2 -+ omega_T) / 2 written as shifts of E1 and E2.
    let shift = 0.5 * (omega - omega_exact);
    Ok(TwoStateSolution {
        e1_exact: e1 + shift,
        e2_exact: e2 - shift,
        omega_exact,
        p12: v * v * (half * t).sin().powi(2) / (half * half),
    })
}
