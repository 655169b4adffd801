use super::amplitude::exponent_order;
use super::energies::revision_energies;
use super::ImprovedOptions;
use crate::model::SplitSystem;
use crate::{Error, Result};

/// First-order transition probabilities with and without revised
/// frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionProbability {
    /// `E'_gamma - E'_beta`.
    pub omega: f64,
    /// `E~_gamma - E~_beta`.
    pub omega_tilde: f64,
    pub p_improved: f64,
    pub p_usual: f64,
    /// `p_improved - p_usual`.
    pub delta: f64,
}

/// Transition probability from `beta` to `gamma` after time `t`.
///
/// `P_I = |g|^2 sin^2(w~ T/2) / (w/2)^2`, where the revised frequency uses
/// the same revision orders as `A_I1`.
pub fn improved_transition_probability(
    sys: &SplitSystem,
    beta: usize,
    gamma: usize,
    t: f64,
    opts: &ImprovedOptions,
) -> Result<TransitionProbability> {
    sys.check_level(beta)?;
    sys.check_level(gamma)?;
    let e = &sys.energies;
    if beta == gamma || e[beta] == e[gamma] {
        return Err(Error::DegeneratePair(beta, gamma));
    }
    let rev = revision_energies(sys, opts.g_orders)?;
    let tilde = rev.tilde_upto(exponent_order(1, opts));
    let omega = e[gamma] - e[beta];
    let omega_tilde = tilde[gamma] - tilde[beta];
    let g2 = sys.g[(gamma, beta)].norm_sqr();
    let half = omega / 2.0;
    let p_improved = g2 * (omega_tilde * t / 2.0).sin().powi(2) / (half * half);
    let p_usual = g2 * (omega * t / 2.0).sin().powi(2) / (half * half);
    // 2|g|^2 (cos wT - cos w~T) / w^2 as a product of sines, which keeps
    // its relative accuracy when w~ is close to w.
    let delta =
        4.0 * g2 * ((omega + omega_tilde) * t / 2.0).sin() * ((omega_tilde - omega) * t / 2.0).sin() / (omega * omega);
    Ok(TransitionProbability {
        omega,
        omega_tilde,
        p_improved,
        p_usual,
        delta,
    })
}
