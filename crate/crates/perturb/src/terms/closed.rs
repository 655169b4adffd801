//! Closed-form contraction terms for orders 2 to 4, read from a small
//! bundled table.
//!
//! Each record sums over free internal levels, applies equality and
//! inequality filters, multiplies a coupling weight and adds fractions
//! `coef (-i t)^p exp(-i E_node t) / prod (E_x - E_y)^k`.

use super::label::TermLabel;
use crate::model::SplitSystem;
use crate::{CMatrix, Error, Result};
use num_complex::Complex64;
use std::sync::OnceLock;

const TABLE: &str = include_str!("../../data/closed_forms.txt");

pub const MIN_CLOSED_ORDER: usize = 2;
pub const MAX_CLOSED_ORDER: usize = 4;

/// Index symbol inside a record: the outer levels or a summed one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sym {
    First,
    Last,
    Inner(usize),
}

#[derive(Debug, Clone, Copy)]
enum Cond {
    Eq(Sym, Sym),
    Ne(Sym, Sym),
}

#[derive(Debug, Clone, Copy)]
enum Weight {
    G(Sym, Sym),
    Abs(Sym, Sym, i32),
}

#[derive(Debug, Clone)]
struct Frac {
    coef: f64,
    power: u32,
    node: Sym,
    dens: Vec<(Sym, Sym, i32)>,
}

#[derive(Debug, Clone)]
struct ClosedTerm {
    order: usize,
    label: String,
    inner: usize,
    conds: Vec<Cond>,
    weights: Vec<Weight>,
    fracs: Vec<Frac>,
    /// The last index is tied to the first by a filter.
    diagonal: bool,
}

/// Which chain index supplies the energy of an exponential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExpRole {
    /// `exp(-i E_g t)` of the first (row) index.
    First,
    /// `exp(-i E_g' t)` of the last (column) index.
    Last,
    /// Any summed intermediate level.
    Inner,
}

impl ExpRole {
    pub const ALL: [ExpRole; 3] = [ExpRole::First, ExpRole::Last, ExpRole::Inner];

    fn index(self) -> usize {
        self as usize
    }
}

fn table() -> Result<&'static [ClosedTerm]> {
    static CELL: OnceLock<Result<Vec<ClosedTerm>>> = OnceLock::new();
    CELL.get_or_init(|| parse_table(TABLE)).as_deref().map_err(Clone::clone)
}

fn parse_table(text: &str) -> Result<Vec<ClosedTerm>> {
    let mut out: Vec<ClosedTerm> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let err = |reason: String| Error::ClosedFormTable { line, reason };
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let mut words = raw.split_whitespace();
        let key = words.next().unwrap_or_default();
        let rest: Vec<&str> = words.collect();
        if key == "term" {
            let [order, label] = rest[..] else {
                return Err(err("term needs an order and a label".into()));
            };
            let order: usize = order.parse().map_err(|_| err(format!("bad order {order}")))?;
            out.push(ClosedTerm {
                order,
                label: label.to_string(),
                inner: 0,
                conds: Vec::new(),
                weights: Vec::new(),
                fracs: Vec::new(),
                diagonal: false,
            });
            continue;
        }
        let term = out.last_mut().ok_or_else(|| err(format!("{key} before any term")))?;
        match key {
            "sum" => {
                let spec = rest.first().copied().unwrap_or("-");
                term.inner = if spec == "-" { 0 } else { spec.len() };
            }
            "cond" => {
                for c in rest {
                    let (op, eq) = if let Some(p) = c.split_once('=') {
                        (p, true)
                    } else if let Some(p) = c.split_once('!') {
                        (p, false)
                    } else {
                        return Err(err(format!("bad condition {c}")));
                    };
                    let x = sym(op.0).ok_or_else(|| err(format!("bad symbol in {c}")))?;
                    let y = sym(op.1).ok_or_else(|| err(format!("bad symbol in {c}")))?;
                    if eq && matches!((x, y), (Sym::First, Sym::Last) | (Sym::Last, Sym::First)) {
                        term.diagonal = true;
                    }
                    term.conds.push(if eq { Cond::Eq(x, y) } else { Cond::Ne(x, y) });
                }
            }
            "weight" => {
                for w in rest {
                    if let Some(body) = w.strip_prefix('|') {
                        let (pair, pow) = body
                            .split_once("|^")
                            .ok_or_else(|| err(format!("bad modulus weight {w}")))?;
                        let (x, y) = pair_syms(pair).ok_or_else(|| err(format!("bad pair {pair}")))?;
                        let k: i32 = pow.parse().map_err(|_| err(format!("bad power in {w}")))?;
                        term.weights.push(Weight::Abs(x, y, k));
                    } else {
                        let (x, y) = pair_syms(w).ok_or_else(|| err(format!("bad pair {w}")))?;
                        term.weights.push(Weight::G(x, y));
                    }
                }
            }
            "frac" => {
                if rest.len() < 3 {
                    return Err(err("frac needs coefficient, power and node".into()));
                }
                let coef: f64 = rest[0]
                    .parse()
                    .map_err(|_| err(format!("bad coefficient {}", rest[0])))?;
                let power: u32 = rest[1].parse().map_err(|_| err(format!("bad power {}", rest[1])))?;
                let node = sym(rest[2]).ok_or_else(|| err(format!("bad node {}", rest[2])))?;
                let mut dens = Vec::new();
                for d in &rest[3..] {
                    let (pair, k) = match d.split_once('^') {
                        Some((p, k)) => (p, k.parse().map_err(|_| err(format!("bad power in {d}")))?),
                        None => (*d, 1),
                    };
                    let (x, y) = pair_syms(pair).ok_or_else(|| err(format!("bad pair {pair}")))?;
                    dens.push((x, y, k));
                }
                term.fracs.push(Frac {
                    coef,
                    power,
                    node,
                    dens,
                });
            }
            other => return Err(err(format!("unknown record {other}"))),
        }
    }
    Ok(out)
}

fn sym(s: &str) -> Option<Sym> {
    match s {
        "a" => Some(Sym::First),
        "b" => Some(Sym::Last),
        _ => match s.parse::<usize>() {
            Ok(k @ 1..=3) => Some(Sym::Inner(k - 1)),
            _ => None,
        },
    }
}

fn pair_syms(s: &str) -> Option<(Sym, Sym)> {
    let mut it = s.chars();
    let (x, y) = (it.next()?, it.next()?);
    if it.next().is_some() {
        return None;
    }
    Some((sym(&x.to_string())?, sym(&y.to_string())?))
}

fn lookup(label: &TermLabel) -> Result<&'static ClosedTerm> {
    let l = label.order();
    if !(MIN_CLOSED_ORDER..=MAX_CLOSED_ORDER).contains(&l) {
        return Err(Error::UnsupportedOrder {
            order: l,
            min: MIN_CLOSED_ORDER,
            max: MAX_CLOSED_ORDER,
        });
    }
    let name = label.to_string();
    table()?
        .iter()
        .find(|t| t.order == l && t.label == name)
        .ok_or(Error::LabelNotInCatalog { label: name, order: l })
}

fn terms_of_order(l: usize) -> Result<Vec<&'static ClosedTerm>> {
    if !(MIN_CLOSED_ORDER..=MAX_CLOSED_ORDER).contains(&l) {
        return Err(Error::UnsupportedOrder {
            order: l,
            min: MIN_CLOSED_ORDER,
            max: MAX_CLOSED_ORDER,
        });
    }
    Ok(table()?.iter().filter(|t| t.order == l).collect())
}

/// Loop over admissible internal assignments of one term at fixed outer
/// levels and hand every fraction to `sink` as `(power, role, value)`.
fn visit<F>(
    term: &ClosedTerm,
    sys: &SplitSystem,
    exp_energies: &[f64],
    t: f64,
    a: usize,
    b: usize,
    sink: &mut F,
) -> Result<()>
where
    F: FnMut(u32, ExpRole, Complex64),
{
    let n = sys.dimension();
    let e = &sys.energies;
    let mut inner = vec![0usize; term.inner];
    let total = n.pow(term.inner as u32);
    let minus_it = Complex64::new(0.0, -t);
    for code in 0..total {
        let mut c = code;
        for slot in inner.iter_mut() {
            *slot = c % n;
            c /= n;
        }
        let at = |s: Sym| match s {
            Sym::First => a,
            Sym::Last => b,
            Sym::Inner(k) => inner[k],
        };
        let admissible = term.conds.iter().all(|c| match *c {
            Cond::Eq(x, y) => at(x) == at(y),
            Cond::Ne(x, y) => at(x) != at(y),
        });
        if !admissible {
            continue;
        }
        let mut w = Complex64::new(1.0, 0.0);
        for wt in &term.weights {
            w *= match *wt {
                Weight::G(x, y) => sys.g[(at(x), at(y))],
                Weight::Abs(x, y, k) => Complex64::new(sys.g[(at(x), at(y))].norm().powi(k), 0.0),
            };
        }
        if w == Complex64::new(0.0, 0.0) {
            continue;
        }
        for f in &term.fracs {
            let mut den = 1.0;
            for &(x, y, k) in &f.dens {
                let (i, j) = (at(x), at(y));
                let d = e[i] - e[j];
                if d == 0.0 {
                    return Err(Error::VanishingDenominator { i, j });
                }
                den *= d.powi(k);
            }
            let node = at(f.node);
            let role = match f.node {
                Sym::First => ExpRole::First,
                Sym::Last if term.diagonal => ExpRole::First,
                Sym::Last => ExpRole::Last,
                Sym::Inner(_) => ExpRole::Inner,
            };
            let value =
                w * minus_it.powu(f.power) * Complex64::from_polar(1.0, -exp_energies[node] * t) * (f.coef / den);
            sink(f.power, role, value);
        }
    }
    Ok(())
}

/// Closed-form value of one catalog term at `(gamma, gamma')`.
pub fn eval_closed_term(
    sys: &SplitSystem,
    label: &TermLabel,
    t: f64,
    gamma: usize,
    gamma_prime: usize,
) -> Result<Complex64> {
    sys.require_redivided()?;
    sys.check_level(gamma)?;
    sys.check_level(gamma_prime)?;
    let term = lookup(label)?;
    let mut acc = Complex64::new(0.0, 0.0);
    visit(term, sys, &sys.energies, t, gamma, gamma_prime, &mut |_, _, v| acc += v)?;
    Ok(acc)
}

/// Sum of every closed-form term of order `l`, as a matrix.
pub fn closed_amplitude(sys: &SplitSystem, l: usize, t: f64) -> Result<CMatrix> {
    closed_amplitude_with(sys, l, t, &sys.energies, None)
}

/// Closed-form order-`l` amplitude with the exponentials evaluated at
/// `exp_energies` instead of `E'`, optionally keeping only one power of
/// `(-i t)`. Denominators always use `E'`.
pub(crate) fn closed_amplitude_with(
    sys: &SplitSystem,
    l: usize,
    t: f64,
    exp_energies: &[f64],
    only_power: Option<u32>,
) -> Result<CMatrix> {
    sys.require_redivided()?;
    let n = sys.dimension();
    let mut out = CMatrix::zeros(n, n);
    for term in terms_of_order(l)? {
        for a in 0..n {
            for b in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                visit(term, sys, exp_energies, t, a, b, &mut |p, _, v| {
                    if only_power.is_none_or(|q| q == p) {
                        acc += v;
                    }
                })?;
                out[(a, b)] += acc;
            }
        }
    }
    Ok(out)
}

/// Additive split of `A_l(t)` by power of `(-i t)` and exponent role.
#[derive(Debug, Clone, PartialEq)]
pub struct TPowerParts {
    pub order: usize,
    pub t: f64,
    /// `parts[p][role]`, `p = 0, 1, 2` for `e`, `t e` and `t^2 e`.
    parts: Vec<Vec<CMatrix>>,
}

impl TPowerParts {
    pub fn part(&self, power: usize, role: ExpRole) -> &CMatrix {
        &self.parts[power][role.index()]
    }

    /// All roles at one power.
    pub fn power(&self, power: usize) -> CMatrix {
        let mut m = self.parts[power][0].clone();
        m += &self.parts[power][1];
        m += &self.parts[power][2];
        m
    }

    /// Diagonal (`g = g'`) entries of a part, zero elsewhere.
    pub fn diagonal(&self, power: usize, role: ExpRole) -> CMatrix {
        let src = self.part(power, role);
        CMatrix::from_fn(src.nrows(), src.ncols(), |i, j| {
            if i == j {
                src[(i, j)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Off-diagonal (`g != g'`) entries of a part, zero on the diagonal.
    pub fn off_diagonal(&self, power: usize, role: ExpRole) -> CMatrix {
        let src = self.part(power, role);
        CMatrix::from_fn(src.nrows(), src.ncols(), |i, j| {
            if i != j {
                src[(i, j)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn total(&self) -> CMatrix {
        let mut m = self.power(0);
        m += self.power(1);
        m += self.power(2);
        m
    }
}

/// Split the closed-form order-`l` amplitude into `e`, `t e` and `t^2 e`
/// parts, further separated by whose energy sits in the exponential.
pub fn split_t_power_parts(sys: &SplitSystem, l: usize, t: f64) -> Result<TPowerParts> {
    sys.require_redivided()?;
    let n = sys.dimension();
    let mut parts = vec![vec![CMatrix::zeros(n, n); 3]; 3];
    for term in terms_of_order(l)? {
        for a in 0..n {
            for b in 0..n {
                visit(term, sys, &sys.energies, t, a, b, &mut |p, role, v| {
                    parts[p as usize][role.index()][(a, b)] += v;
                })?;
            }
        }
    }
    Ok(TPowerParts { order: l, t, parts })
}
