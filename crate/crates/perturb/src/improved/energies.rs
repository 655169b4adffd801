use crate::model::SplitSystem;
use crate::{Error, Result};
use num_complex::Complex64;

pub const MIN_G_ORDER: usize = 2;
pub const MAX_G_ORDER: usize = 5;

/// Revision energies `G^(2)..G^(5)` of every level and the redefined
/// energies built from them.
///
/// Orders above `max_order` are left at zero. The `*_im` vectors keep the
/// imaginary residue of the complex sums, which vanishes analytically.
#[derive(Debug, Clone, PartialEq)]
pub struct RevisionEnergies {
    pub max_order: usize,
    /// `E'`, which already contains the absorbed diagonal `h1`.
    pub base: Vec<f64>,
    /// `E' - E`.
    pub h1: Vec<f64>,
    pub g2: Vec<f64>,
    pub g3: Vec<f64>,
    pub g4: Vec<f64>,
    pub g5: Vec<f64>,
    pub g3_im: Vec<f64>,
    pub g4_im: Vec<f64>,
    pub g5_im: Vec<f64>,
}

impl RevisionEnergies {
    /// All revision energies zero; the redefined energies equal `E'`.
    pub fn zero(sys: &SplitSystem) -> Self {
        let n = sys.dimension();
        Self {
            max_order: MAX_G_ORDER,
            base: sys.energies.clone(),
            h1: h1_of(sys),
            g2: vec![0.0; n],
            g3: vec![0.0; n],
            g4: vec![0.0; n],
            g5: vec![0.0; n],
            g3_im: vec![0.0; n],
            g4_im: vec![0.0; n],
            g5_im: vec![0.0; n],
        }
    }

    pub fn dimension(&self) -> usize {
        self.base.len()
    }

    /// `G^(order)` of every level, for `order` in `2..=5`.
    pub fn order(&self, order: usize) -> &[f64] {
        match order {
            2 => &self.g2,
            3 => &self.g3,
            4 => &self.g4,
            5 => &self.g5,
            _ => panic!("revision energies exist for orders 2 to 5, not {order}"),
        }
    }

    /// `E' + sum_{a=2}^{top} G^(a)`, additionally capped by `max_order`.
    pub fn tilde_upto(&self, top: usize) -> Vec<f64> {
        let top = top.min(self.max_order);
        (0..self.dimension())
            .map(|i| {
                let mut e = self.base[i];
                for a in MIN_G_ORDER..=top {
                    e += self.order(a)[i];
                }
                e
            })
            .collect()
    }

    /// `E~` with every computed order.
    pub fn e_tilde(&self) -> Vec<f64> {
        self.tilde_upto(MAX_G_ORDER)
    }

    /// Largest `|Im G^(a)|` over levels and orders.
    pub fn max_imaginary(&self) -> f64 {
        self.g3_im
            .iter()
            .chain(&self.g4_im)
            .chain(&self.g5_im)
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

fn h1_of(sys: &SplitSystem) -> Vec<f64> {
    sys.energies
        .iter()
        .zip(&sys.original_energies)
        .map(|(e, e0)| e - e0)
        .collect()
}

/// Compute `G^(2)..G^(max_order)` for every level.
///
/// Denominators use the redivided energies. A vanishing denominator met
/// with a nonzero coupling product is reported as an error.
pub fn revision_energies(sys: &SplitSystem, max_order: usize) -> Result<RevisionEnergies> {
    sys.require_redivided()?;
    if !(MIN_G_ORDER..=MAX_G_ORDER).contains(&max_order) {
        return Err(Error::UnsupportedOrder {
            order: max_order,
            min: MIN_G_ORDER,
            max: MAX_G_ORDER,
        });
    }
    let mut out = RevisionEnergies::zero(sys);
    out.max_order = max_order;
    let n = sys.dimension();
    for c in 0..n {
        let k = Kernel::new(sys, c)?;
        out.g2[c] = k.g2();
        if max_order >= 3 {
            let z = k.g3();
            out.g3[c] = z.re;
            out.g3_im[c] = z.im;
        }
        if max_order >= 4 {
            let z = k.g4(out.g2[c]);
            out.g4[c] = z.re;
            out.g4_im[c] = z.im;
        }
        if max_order >= 5 {
            let z = k.g5();
            out.g5[c] = z.re;
            out.g5_im[c] = z.im;
        }
    }
    Ok(out)
}

/// Coupling matrix and inverse gaps seen from one level `c`.
struct Kernel<'a> {
    sys: &'a SplitSystem,
    c: usize,
    /// `1 / (E_c - E_j)`, zero where `j = c`.
    inv: Vec<f64>,
}

impl<'a> Kernel<'a> {
    fn new(sys: &'a SplitSystem, c: usize) -> Result<Self> {
        let e = &sys.energies;
        let n = sys.dimension();
        let mut inv = vec![0.0; n];
        for j in 0..n {
            if j == c {
                continue;
            }
            let d = e[c] - e[j];
            if d == 0.0 {
                // Allowed only if no coupling path reaches j.
                inv[j] = f64::NAN;
            } else {
                inv[j] = 1.0 / d;
            }
        }
        let k = Self { sys, c, inv };
        k.check_reachable_gaps()?;
        Ok(k)
    }

    /// Every level connected to `c` within three coupling steps must have
    /// a nonzero gap to `c`.
    fn check_reachable_gaps(&self) -> Result<()> {
        let n = self.sys.dimension();
        let zero = Complex64::new(0.0, 0.0);
        let mut frontier = vec![self.c];
        let mut seen = vec![false; n];
        seen[self.c] = true;
        for _ in 0..3 {
            let mut next = Vec::new();
            for &i in &frontier {
                for (j, s) in seen.iter_mut().enumerate() {
                    if !*s && self.sys.g[(i, j)] != zero {
                        *s = true;
                        next.push(j);
                    }
                }
            }
            frontier = next;
        }
        for (j, &s) in seen.iter().enumerate() {
            if s && self.inv[j].is_nan() {
                return Err(Error::VanishingDenominator { i: self.c, j });
            }
        }
        Ok(())
    }

    fn g(&self, i: usize, j: usize) -> Complex64 {
        self.sys.g[(i, j)]
    }

    fn others(&self) -> impl Iterator<Item = usize> + '_ {
        let c = self.c;
        (0..self.sys.dimension()).filter(move |&j| j != c && !self.inv[j].is_nan())
    }

    fn g2(&self) -> f64 {
        self.others().map(|j| self.g(self.c, j).norm_sqr() * self.inv[j]).sum()
    }

    fn g3(&self) -> Complex64 {
        let c = self.c;
        let mut s = Complex64::new(0.0, 0.0);
        for i in self.others() {
            for j in self.others() {
                s += self.g(c, i) * self.g(i, j) * self.g(j, c) * (self.inv[i] * self.inv[j]);
            }
        }
        s
    }

    fn g4(&self, g2: f64) -> Complex64 {
        let c = self.c;
        let mut s = Complex64::new(0.0, 0.0);
        for i in self.others() {
            let gi = self.g(c, i) * self.inv[i];
            for j in self.others() {
                let gij = gi * self.g(i, j) * self.inv[j];
                for k in self.others() {
                    s += gij * self.g(j, k) * self.g(k, c) * self.inv[k];
                }
            }
        }
        // The second sum factorises into G^(2) times sum |g|^2 / gap^2.
        let w: f64 = self
            .others()
            .map(|i| self.g(c, i).norm_sqr() * self.inv[i] * self.inv[i])
            .sum();
        s - g2 * w
    }

    fn g5(&self) -> Complex64 {
        let c = self.c;
        let mut first = Complex64::new(0.0, 0.0);
        for i in self.others() {
            let a = self.g(c, i) * self.inv[i];
            for j in self.others() {
                let b = a * self.g(i, j) * self.inv[j];
                for k in self.others() {
                    let d = b * self.g(j, k) * self.inv[k];
                    for m in self.others() {
                        first += d * self.g(k, m) * self.g(m, c) * self.inv[m];
                    }
                }
            }
        }
        // Second sum: |g^{c1}|^2 g^{c2} g^{23} g^{3c} with each of the three
        // gaps squared in turn.
        let mut second = Complex64::new(0.0, 0.0);
        for i in self.others() {
            let wi = self.g(c, i).norm_sqr();
            if wi == 0.0 {
                continue;
            }
            let di = self.inv[i];
            for j in self.others() {
                for k in self.others() {
                    let loop3 = self.g(c, j) * self.g(j, k) * self.g(k, c);
                    let (dj, dk) = (self.inv[j], self.inv[k]);
                    let base = di * dj * dk;
                    second += loop3 * (wi * base * (di + dj + dk));
                }
            }
        }
        first - second
    }
}
