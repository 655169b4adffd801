use crate::{Error, Result};
use std::cmp::Ordering;
use std::f64::consts::PI;

/// The integration window must reach `|omega| = WINDOW_HALF_WIDTH / T`, where
/// `sin^2(omega T / 2) / (omega T / 2)^2` has fallen below `1e-4` of its peak.
pub const WINDOW_HALF_WIDTH: f64 = 200.0;

/// Tabulated final-state continuum for the golden rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenRuleInput {
    /// Final-state energies, strictly increasing.
    pub energies: Vec<f64>,
    /// `rho(E)`, non-negative.
    pub density: Vec<f64>,
    /// `|g^{gamma beta}|^2` as a function of the final energy.
    pub coupling: Vec<f64>,
    /// Initial level energy `E_beta`.
    pub e_beta: f64,
    /// Duration `T > 0`.
    pub duration: f64,
}

/// A discrete level `1` coupled to both the initial state and the final
/// continuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intermediate {
    /// `E_1 - E_beta`.
    pub omega: f64,
    /// `|g^{gamma 1}|^2`, taken constant across the continuum.
    pub coupling_final: f64,
    /// `|g^{beta 1}|^2`.
    pub coupling_initial: f64,
}

/// Second-order frequency map `w~(w) = w + G2_gamma - G2_beta`.
///
/// With `w_k = E_k - E_beta`, `G2_gamma = sum a_k / (w - w_k)` and
/// `G2_beta = -sum b_k / w_k`. An empty map is the identity.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SecondOrderMap {
    pub levels: Vec<Intermediate>,
}

impl SecondOrderMap {
    pub fn identity() -> Self {
        Self::default()
    }

    /// `w~(w) - w`.
    pub fn shift(&self, omega: f64) -> f64 {
        self.levels
            .iter()
            .map(|k| k.coupling_final / (omega - k.omega) + k.coupling_initial / k.omega)
            .sum()
    }

    pub fn omega_tilde(&self, omega: f64) -> f64 {
        omega + self.shift(omega)
    }

    /// `w~(0)`; the rate integral only converges when it vanishes.
    fn shift_at_resonance(&self) -> f64 {
        self.levels
            .iter()
            .map(|k| (k.coupling_initial - k.coupling_final) / k.omega)
            .sum()
    }

    /// `sum a_k / (w_k (w - w_k))`, so that `shift = s0 + w * slope(w)`.
    fn slope(&self, omega: f64) -> f64 {
        self.levels
            .iter()
            .map(|k| k.coupling_final / (k.omega * (omega - k.omega)))
            .sum()
    }

    fn scale(&self) -> f64 {
        self.levels
            .iter()
            .map(|k| (k.coupling_final + k.coupling_initial) / k.omega.abs())
            .sum()
    }
}

/// Golden-rule rate and its revision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenRule {
    pub w_f: f64,
    pub delta_w: f64,
    pub w: f64,
}

/// `w_F = 2 pi rho(E_beta) |g(E_beta)|^2` and the revision
/// `dw = int rho |g|^2 2 (cos wT - cos w~T) / (T w^2) dE` by composite
/// Simpson quadrature on the input grid.
pub fn golden_rule(input: &GoldenRuleInput, map: &SecondOrderMap) -> Result<GoldenRule> {
    check_input(input)?;
    let t = input.duration;
    let x = &input.energies;
    let (lo, hi) = (x[0] - input.e_beta, x[x.len() - 1] - input.e_beta);
    let reach = WINDOW_HALF_WIDTH / t;
    if lo > -reach || hi < reach {
        return Err(Error::GoldenRule(format!(
            "grid covers omega in [{lo}, {hi}] but must include [{}, {reach}]",
            -reach
        )));
    }
    for k in &map.levels {
        if k.omega == 0.0 || (lo..=hi).contains(&k.omega) {
            return Err(Error::GoldenRule(format!(
                "intermediate level at omega = {} lies inside the integration range",
                k.omega
            )));
        }
    }
    let mut s0 = map.shift_at_resonance();
    if s0.abs() > 1e-10 * map.scale() {
        return Err(Error::GoldenRule(format!(
            "revised frequency is {s0} at resonance; the rate integral diverges"
        )));
    }
    s0 = 0.0;

    let w_f = 2.0 * PI * interpolate(x, &input.density, input.e_beta) * interpolate(x, &input.coupling, input.e_beta);
    let f: Vec<f64> = (0..x.len())
        .map(|i| {
            let omega = x[i] - input.e_beta;
            let weight = input.density[i] * input.coupling[i];
            let slope = map.slope(omega);
            if omega == 0.0 {
                weight * t * slope * (slope + 2.0)
            } else {
                let s = s0 + omega * slope;
                4.0 * weight * ((2.0 * omega + s) * t / 2.0).sin() * (s * t / 2.0).sin() / (t * omega * omega)
            }
        })
        .collect();
    let delta_w = simpson(x, &f);
    Ok(GoldenRule {
        w_f,
        delta_w,
        w: w_f + delta_w,
    })
}

fn check_input(input: &GoldenRuleInput) -> Result<()> {
    let n = input.energies.len();
    if n < 3 {
        return Err(Error::GoldenRule(format!("need at least 3 grid points, got {n}")));
    }
    if input.density.len() != n || input.coupling.len() != n {
        return Err(Error::GoldenRule(format!(
            "grid has {n} points but density has {} and coupling {}",
            input.density.len(),
            input.coupling.len()
        )));
    }
    if let Some(i) = (1..n).find(|&i| input.energies[i].partial_cmp(&input.energies[i - 1]) != Some(Ordering::Greater))
    {
        return Err(Error::GoldenRule(format!("grid not strictly increasing at point {i}")));
    }
    if let Some(i) = input.density.iter().position(|&r| r.is_nan() || r < 0.0) {
        return Err(Error::GoldenRule(format!("negative density at point {i}")));
    }
    if !(input.duration > 0.0 && input.duration.is_finite()) {
        return Err(Error::GoldenRule(format!(
            "duration must be positive, got {}",
            input.duration
        )));
    }
    Ok(())
}

fn interpolate(x: &[f64], y: &[f64], at: f64) -> f64 {
    let i = x.partition_point(|&v| v <= at).clamp(1, x.len() - 1);
    let (x0, x1) = (x[i - 1], x[i]);
    y[i - 1] + (y[i] - y[i - 1]) * (at - x0) / (x1 - x0)
}

/// Composite Simpson rule on a non-uniform grid. An odd number of
/// intervals closes with a three-point correction on the last one.
fn simpson(x: &[f64], f: &[f64]) -> f64 {
    let n = x.len() - 1;
    let mut sum = 0.0;
    let mut i = 0;
    while i + 2 <= n {
        let h0 = x[i + 1] - x[i];
        let h1 = x[i + 2] - x[i + 1];
        let hs = h0 + h1;
        sum += hs / 6.0 * ((2.0 - h1 / h0) * f[i] + hs * hs / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
        i += 2;
    }
    if n % 2 == 1 {
        let h0 = x[n - 1] - x[n - 2];
        let h1 = x[n] - x[n - 1];
        let alpha = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        let beta = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
        let eta = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        sum += alpha * f[n] + beta * f[n - 1] - eta * f[n - 2];
    }
    sum
}
