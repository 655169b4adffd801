//! Improved scheme: revision energies, redefined level energies, improved
//! amplitudes, the improved transition probability and the revised golden
//! rule, and the improved perturbed energy and state.

mod amplitude;
mod energies;
mod golden;
mod perturbed;
mod transition;

pub use amplitude::{
    exponent_order, improved_amplitude, improved_amplitude_from, improved_evolve, improved_propagator,
    MAX_IMPROVED_ORDER,
};
pub use energies::{revision_energies, RevisionEnergies, MAX_G_ORDER, MIN_G_ORDER};
pub use golden::{golden_rule, GoldenRule, GoldenRuleInput, Intermediate, SecondOrderMap, WINDOW_HALF_WIDTH};
pub use perturbed::{improved_perturbed_energy, improved_perturbed_state, PerturbedEnergy, PerturbedState};
pub use transition::{improved_transition_probability, TransitionProbability};

/// Which revision orders enter the redefined energies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImprovedOptions {
    /// Highest `G^(a)` computed, in `2..=5`.
    pub g_orders: usize,
    /// Use every computed order in all exponents instead of the per-order
    /// caps `G^(5 - k)` of `A_Ik`.
    pub uniform_g: bool,
}

impl Default for ImprovedOptions {
    fn default() -> Self {
        Self {
            g_orders: MAX_G_ORDER,
            uniform_g: false,
        }
    }
}
