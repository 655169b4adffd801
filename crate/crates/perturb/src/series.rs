//! Per-order amplitudes of the propagator by explicit index-path sums.
//!
//! `A_l[g][g'](t)` sums, over every path `g = j_1, ..., j_{l+1} = g'`, the
//! divided difference of `exp(-i x t)` at the path energies times the
//! product of couplings along the path.

use crate::ddkernel::dd_exp;
use crate::model::SplitSystem;
use crate::{CMatrix, CVector, Error, Result};
use num_complex::Complex64;

pub const DEFAULT_MAX_ORDER: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    pub max_order: usize,
    /// Kahan-compensated accumulation of path contributions.
    pub compensated: bool,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            max_order: DEFAULT_MAX_ORDER,
            compensated: false,
        }
    }
}

/// `A_l(t)` for one order.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeMatrix {
    pub order: usize,
    pub t: f64,
    pub values: CMatrix,
}

/// Complex sum with optional Kahan compensation.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Accumulator {
    sum: Complex64,
    carry: Complex64,
    compensated: bool,
}

impl Accumulator {
    pub(crate) fn new(compensated: bool) -> Self {
        Self {
            compensated,
            ..Default::default()
        }
    }

    pub(crate) fn add(&mut self, x: Complex64) {
        if !self.compensated {
            self.sum += x;
            return;
        }
        let y = x - self.carry;
        let s = self.sum + y;
        self.carry = (s - self.sum) - y;
        self.sum = s;
    }

    pub(crate) fn value(&self) -> Complex64 {
        self.sum
    }
}

/// Path-sum amplitude matrix of order `l` at time `t`.
///
/// Paths are visited depth-first in lexicographic order and any path that
/// crosses a zero coupling is pruned, so the summation order is fixed.
pub fn amplitude_order(sys: &SplitSystem, l: usize, t: f64, opts: &SeriesOptions) -> Result<AmplitudeMatrix> {
    if l > opts.max_order {
        return Err(Error::OrderTooHigh {
            order: l,
            max: opts.max_order,
        });
    }
    let n = sys.dimension();
    let mut values = CMatrix::zeros(n, n);
    if l == 0 {
        for (i, &e) in sys.energies.iter().enumerate() {
            values[(i, i)] = Complex64::from_polar(1.0, -e * t);
        }
        return Ok(AmplitudeMatrix { order: 0, t, values });
    }

    let zero = Complex64::new(0.0, 0.0);
    let mut acc = vec![Accumulator::new(opts.compensated); n * n];
    let mut path = Vec::with_capacity(l + 1);
    let mut nodes = Vec::with_capacity(l + 1);
    for start in 0..n {
        path.clear();
        path.push(start);
        walk(
            sys,
            l,
            t,
            &mut path,
            &mut nodes,
            Complex64::new(1.0, 0.0),
            &mut acc,
            zero,
        );
    }
    for i in 0..n {
        for j in 0..n {
            values[(i, j)] = acc[i * n + j].value();
        }
    }
    Ok(AmplitudeMatrix { order: l, t, values })
}

#[allow(clippy::too_many_arguments)]
fn walk(
    sys: &SplitSystem,
    l: usize,
    t: f64,
    path: &mut Vec<usize>,
    nodes: &mut Vec<f64>,
    weight: Complex64,
    acc: &mut [Accumulator],
    zero: Complex64,
) {
    let n = sys.dimension();
    let last = *path.last().expect("path starts non-empty");
    if path.len() == l + 1 {
        nodes.clear();
        nodes.extend(path.iter().map(|&k| sys.energies[k]));
        acc[path[0] * n + last].add(weight * dd_exp(nodes, t));
        return;
    }
    for next in 0..n {
        let g = sys.g[(last, next)];
        if g == zero {
            continue;
        }
        path.push(next);
        walk(sys, l, t, path, nodes, weight * g, acc, zero);
        path.pop();
    }
}

/// `sum_{l <= order} A_l(t)`, the truncated propagator.
pub fn truncated_propagator(sys: &SplitSystem, t: f64, order: usize, opts: &SeriesOptions) -> Result<CMatrix> {
    let n = sys.dimension();
    let mut u = CMatrix::zeros(n, n);
    for l in 0..=order {
        u += amplitude_order(sys, l, t, opts)?.values;
    }
    Ok(u)
}

/// `sum_{l <= order} A_l(t) psi0`.
pub fn evolve_truncated(
    sys: &SplitSystem,
    psi0: &CVector,
    t: f64,
    order: usize,
    opts: &SeriesOptions,
) -> Result<CVector> {
    if psi0.len() != sys.dimension() {
        return Err(Error::StateLength {
            expected: sys.dimension(),
            got: psi0.len(),
        });
    }
    Ok(truncated_propagator(sys, t, order, opts)? * psi0)
}

/// `sum_{l <= order} A_l[to][from](t)`.
pub fn transition_amplitude(
    sys: &SplitSystem,
    from: usize,
    to: usize,
    t: f64,
    order: usize,
    opts: &SeriesOptions,
) -> Result<Complex64> {
    sys.check_level(from)?;
    sys.check_level(to)?;
    Ok(truncated_propagator(sys, t, order, opts)?[(to, from)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state(v: f64) -> SplitSystem {
        let g = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(v, 0.0),
                Complex64::new(v, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        SplitSystem::from_parts(vec![0.0, 1.0], g).unwrap()
    }

    #[test]
    fn zeroth_order_is_free_phase() {
        let sys = two_state(0.1);
        let a = amplitude_order(&sys, 0, 2.0, &SeriesOptions::default()).unwrap();
        assert_eq!(a.values[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(a.values[(1, 1)], Complex64::from_polar(1.0, -2.0));
        assert_eq!(a.values[(0, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn first_order_two_state() {
        let v = 0.1;
        let t = 3.7;
        let a = amplitude_order(&two_state(v), 1, t, &SeriesOptions::default()).unwrap();
        let expected = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -t)) * v / (0.0 - 1.0);
        assert!((a.values[(0, 1)] - expected).norm() < 1e-15);
        assert_eq!(a.values[(0, 0)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn order_cap_is_enforced() {
        let err = amplitude_order(&two_state(0.1), 7, 1.0, &SeriesOptions::default()).unwrap_err();
        assert_eq!(err, Error::OrderTooHigh { order: 7, max: 6 });
    }

    #[test]
    fn transition_amplitude_at_zero_time() {
        let sys = two_state(0.1);
        let o = SeriesOptions::default();
        assert!((transition_amplitude(&sys, 0, 0, 0.0, 4, &o).unwrap() - 1.0).norm() < 1e-15);
        assert!(transition_amplitude(&sys, 0, 1, 0.0, 4, &o).unwrap().norm() < 1e-15);
        assert!(transition_amplitude(&sys, 0, 2, 0.0, 4, &o).is_err());
    }

    #[test]
    fn first_order_probability_is_usual_result() {
        let (v, t) = (0.05, 2.3);
        let c = transition_amplitude(&two_state(v), 0, 1, t, 1, &SeriesOptions::default()).unwrap();
        let usual = v * v * (t / 2.0).sin().powi(2) / 0.25;
        assert!((c.norm_sqr() - usual).abs() < 1e-15);
    }

    #[test]
    fn uncoupled_system_stays_at_zeroth_order() {
        let sys = SplitSystem::from_parts(vec![0.0, 0.4, 1.0], CMatrix::zeros(3, 3)).unwrap();
        let psi = CVector::from_vec(vec![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
            Complex64::new(0.0, 0.0),
        ]);
        let o = SeriesOptions::default();
        let a = evolve_truncated(&sys, &psi, 1.5, 0, &o).unwrap();
        let b = evolve_truncated(&sys, &psi, 1.5, 6, &o).unwrap();
        assert_eq!(a, b);
        assert!(evolve_truncated(&sys, &CVector::zeros(2), 1.0, 1, &o).is_err());
    }

    #[test]
    fn compensated_sum_agrees() {
        let sys = two_state(0.2);
        let plain = amplitude_order(&sys, 5, 4.0, &SeriesOptions::default()).unwrap();
        let kahan = amplitude_order(
            &sys,
            5,
            4.0,
            &SeriesOptions {
                compensated: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((plain.values - kahan.values).norm() < 1e-15);
    }
}
