use super::energies::{revision_energies, RevisionEnergies};
use super::ImprovedOptions;
use crate::model::SplitSystem;
use crate::series::AmplitudeMatrix;
use crate::terms::closed_amplitude_with;
use crate::{CMatrix, CVector, Error, Result};
use num_complex::Complex64;

pub const MAX_IMPROVED_ORDER: usize = 3;

/// Highest revision order inside the exponentials of `A_Ik`.
pub fn exponent_order(k: usize, opts: &ImprovedOptions) -> usize {
    let literal = 5usize.saturating_sub(k).max(2);
    let top = if opts.uniform_g { 5 } else { literal };
    top.min(opts.g_orders)
}

/// Improved amplitude `A_Ik(t)` for `k` in `0..=3`.
///
/// * `A_I0` is the free evolution at the redefined energies.
/// * `A_I1[g][g'] = g^{gg'} (e^{-i E~_g t} - e^{-i E~_g' t}) / (E_g - E_g')`.
/// * `A_I2` and `A_I3` are the `t`-free parts of the order-2 and order-3
///   closed forms with every exponential taken at the redefined energies.
///
/// Exponents use `G^(2)` up to `G^(5 - k)` (at least `G^(2)`); denominators
/// use `E'`.
pub fn improved_amplitude(sys: &SplitSystem, k: usize, t: f64, opts: &ImprovedOptions) -> Result<AmplitudeMatrix> {
    let rev = revision_energies(sys, opts.g_orders)?;
    improved_amplitude_from(sys, &rev, k, t, opts)
}

/// [`improved_amplitude`] with precomputed (or substituted) revision energies.
pub fn improved_amplitude_from(
    sys: &SplitSystem,
    rev: &RevisionEnergies,
    k: usize,
    t: f64,
    opts: &ImprovedOptions,
) -> Result<AmplitudeMatrix> {
    sys.require_redivided()?;
    if k > MAX_IMPROVED_ORDER {
        return Err(Error::OrderTooHigh {
            order: k,
            max: MAX_IMPROVED_ORDER,
        });
    }
    let n = sys.dimension();
    let tilde = rev.tilde_upto(exponent_order(k, opts));
    let values = match k {
        0 => {
            let mut m = CMatrix::zeros(n, n);
            for (i, &e) in tilde.iter().enumerate() {
                m[(i, i)] = Complex64::from_polar(1.0, -e * t);
            }
            m
        }
        1 => {
            let mut m = CMatrix::zeros(n, n);
            for a in 0..n {
                for b in 0..n {
                    let g = sys.g[(a, b)];
                    if a == b || g == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let d = sys.energies[a] - sys.energies[b];
                    if d == 0.0 {
                        return Err(Error::VanishingDenominator { i: a, j: b });
                    }
                    let diff = Complex64::from_polar(1.0, -tilde[a] * t) - Complex64::from_polar(1.0, -tilde[b] * t);
                    m[(a, b)] = g * diff / d;
                }
            }
            m
        }
        _ => closed_amplitude_with(sys, k, t, &tilde, Some(0))?,
    };
    Ok(AmplitudeMatrix { order: k, t, values })
}

/// `sum_{k <= order} A_Ik(t)`.
pub fn improved_propagator(sys: &SplitSystem, t: f64, order: usize, opts: &ImprovedOptions) -> Result<CMatrix> {
    let rev = revision_energies(sys, opts.g_orders)?;
    let n = sys.dimension();
    let mut u = CMatrix::zeros(n, n);
    for k in 0..=order {
        u += improved_amplitude_from(sys, &rev, k, t, opts)?.values;
    }
    Ok(u)
}

/// `sum_{k <= order} A_Ik(t) psi0`.
pub fn improved_evolve(
    sys: &SplitSystem,
    psi0: &CVector,
    t: f64,
    order: usize,
    opts: &ImprovedOptions,
) -> Result<CVector> {
    if psi0.len() != sys.dimension() {
        return Err(Error::StateLength {
            expected: sys.dimension(),
            got: psi0.len(),
        });
    }
    Ok(improved_propagator(sys, t, order, opts)? * psi0)
}
