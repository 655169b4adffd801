use super::energies::revision_energies;
use super::ImprovedOptions;
use crate::model::SplitSystem;
use crate::{CVector, Error, Result};
use num_complex::Complex64;

/// Improved perturbed energy of one level, by approximation order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbedEnergy {
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    pub total: f64,
}

/// Coefficients of the improved perturbed state in the unperturbed basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedState {
    pub a0: CVector,
    pub a1: CVector,
    pub a2: CVector,
}

impl PerturbedState {
    /// `a0 + a1 + a2`, unnormalized.
    pub fn assembled(&self) -> CVector {
        &self.a0 + &self.a1 + &self.a2
    }
}

/// The redefined energy carries every correction: the first and second
/// improved approximations add nothing.
pub fn improved_perturbed_energy(sys: &SplitSystem, beta: usize, opts: &ImprovedOptions) -> Result<PerturbedEnergy> {
    sys.check_level(beta)?;
    let rev = revision_energies(sys, opts.g_orders)?;
    let e0 = rev.tilde_upto(opts.g_orders)[beta];
    Ok(PerturbedEnergy {
        e0,
        e1: 0.0,
        e2: 0.0,
        total: e0,
    })
}

/// `a0 = e_beta`, `a1_g = -g^{g beta} / (E_g - E_beta)` and
/// `a2_g = sum_1 g^{g 1} g^{1 beta} / ((E_g - E_beta)(E_1 - E_beta))` for
/// `g != beta`, with no normalization correction on `beta`.
pub fn improved_perturbed_state(sys: &SplitSystem, beta: usize) -> Result<PerturbedState> {
    sys.require_redivided()?;
    sys.check_level(beta)?;
    let n = sys.dimension();
    let e = &sys.energies;
    let zero = Complex64::new(0.0, 0.0);
    let mut inv = vec![0.0; n];
    for j in (0..n).filter(|&j| j != beta) {
        let d = e[j] - e[beta];
        if d == 0.0 {
            if sys.g[(j, beta)] != zero || reaches(sys, beta, j) {
                return Err(Error::VanishingDenominator { i: j, j: beta });
            }
            continue;
        }
        inv[j] = 1.0 / d;
    }
    let mut a0 = CVector::zeros(n);
    a0[beta] = Complex64::new(1.0, 0.0);
    let mut a1 = CVector::zeros(n);
    let mut a2 = CVector::zeros(n);
    for g in (0..n).filter(|&g| g != beta) {
        a1[g] = -sys.g[(g, beta)] * inv[g];
        let mut s = zero;
        for k in (0..n).filter(|&k| k != beta) {
            s += sys.g[(g, k)] * sys.g[(k, beta)] * inv[k];
        }
        a2[g] = s * inv[g];
    }
    Ok(PerturbedState { a0, a1, a2 })
}

/// Whether `j` is two coupling steps from `beta`.
fn reaches(sys: &SplitSystem, beta: usize, j: usize) -> bool {
    let zero = Complex64::new(0.0, 0.0);
    (0..sys.dimension()).any(|k| sys.g[(j, k)] != zero && sys.g[(k, beta)] != zero)
}
