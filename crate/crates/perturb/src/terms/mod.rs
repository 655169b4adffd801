//! Contraction/anti-contraction catalogs and their closed forms.
//!
//! Every order-`l` path-sum amplitude splits into terms labelled by which
//! chain indices coincide. Catalogs exist for orders 2 to 6; closed forms
//! are tabulated for orders 2 to 4, and any term can be evaluated directly
//! by a path sum restricted to its index partition.

mod catalog;
mod closed;
mod label;

pub use catalog::{enumerate_catalog, fixture_catalog, reconcile, rule_catalog, TermCatalog, MAX_ORDER, MIN_ORDER};
pub(crate) use closed::closed_amplitude_with;
pub use closed::{
    closed_amplitude, eval_closed_term, split_t_power_parts, ExpRole, TPowerParts, MAX_CLOSED_ORDER, MIN_CLOSED_ORDER,
};
pub use label::{Mark, TermLabel};

use crate::ddkernel::dd_exp;
use crate::model::SplitSystem;
use crate::Result;
use num_complex::Complex64;

/// Value of one term as the path sum over index chains whose coincidence
/// pattern equals the label's partition.
pub fn eval_term_by_paths(
    sys: &SplitSystem,
    label: &TermLabel,
    t: f64,
    gamma: usize,
    gamma_prime: usize,
) -> Result<Complex64> {
    sys.check_level(gamma)?;
    sys.check_level(gamma_prime)?;
    let classes = label.partition();
    let l = label.order();
    let mut path = vec![gamma];
    let mut acc = Complex64::new(0.0, 0.0);
    extend(
        sys,
        &classes,
        l,
        gamma_prime,
        t,
        &mut path,
        Complex64::new(1.0, 0.0),
        &mut acc,
    );
    Ok(acc)
}

#[allow(clippy::too_many_arguments)]
fn extend(
    sys: &SplitSystem,
    classes: &[usize],
    l: usize,
    end: usize,
    t: f64,
    path: &mut Vec<usize>,
    weight: Complex64,
    acc: &mut Complex64,
) {
    let k = path.len();
    let last = path[k - 1];
    if k == l + 1 {
        if last == end {
            let nodes: Vec<f64> = path.iter().map(|&i| sys.energies[i]).collect();
            *acc += weight * dd_exp(&nodes, t);
        }
        return;
    }
    for next in 0..sys.dimension() {
        let g = sys.g[(last, next)];
        if g == Complex64::new(0.0, 0.0) {
            continue;
        }
        if (0..k).any(|i| (path[i] == next) != (classes[i] == classes[k])) {
            continue;
        }
        path.push(next);
        extend(sys, classes, l, end, t, path, weight * g, acc);
        path.pop();
    }
}
