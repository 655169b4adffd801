//! System description, validation and Hamiltonian redivision.
//!
//! Redivision moves the diagonal of `lambda * H1` into the unperturbed
//! energies and diagonalizes the full Hamiltonian inside every degenerate
//! group, leaving a coupling matrix `g` with an exactly zero diagonal.

use crate::oracle::hermitian_eigen;
use crate::{CMatrix, Error, Result};
use num_complex::Complex64;

/// Default width for treating two unperturbed energies as degenerate.
pub const DEFAULT_TOL_DEG: f64 = 1e-10;
/// Relative Hermiticity tolerance against `max |H1|`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Couplings between degenerate levels at or below this multiple of
/// `max |lambda H1|` count as vanished.
pub const RESIDUAL_COUPLING_TOL: f64 = 1e-12;

/// Unperturbed energies, perturbation matrix and coupling scale.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub energies: Vec<f64>,
    pub perturbation: CMatrix,
    pub coupling_scale: f64,
}

impl SystemSpec {
    pub fn new(energies: Vec<f64>, perturbation: CMatrix) -> Self {
        Self {
            energies,
            perturbation,
            coupling_scale: 1.0,
        }
    }

    pub fn with_coupling_scale(mut self, lambda: f64) -> Self {
        self.coupling_scale = lambda;
        self
    }

    pub fn dimension(&self) -> usize {
        self.energies.len()
    }

    /// `lambda * H1`.
    pub fn scaled_perturbation(&self) -> CMatrix {
        &self.perturbation * Complex64::new(self.coupling_scale, 0.0)
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.dimension();
        if n == 0 {
            return Err(Error::EmptySystem);
        }
        let (rows, cols) = self.perturbation.shape();
        if rows != n || cols != n {
            return Err(Error::NotSquare {
                expected: n,
                rows,
                cols,
            });
        }
        if self.energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite("energies"));
        }
        if self.perturbation.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("perturbation"));
        }
        if !self.coupling_scale.is_finite() || self.coupling_scale < 0.0 {
            return Err(Error::BadCouplingScale(self.coupling_scale));
        }
        Ok(())
    }
}

/// Maximal clusters of numerically equal energies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegeneracyStructure {
    /// Every level appears in exactly one group. Groups are sorted by their
    /// smallest member and members are ascending.
    pub groups: Vec<Vec<usize>>,
    /// Indices into `groups` of the groups with more than one member.
    pub degenerate: Vec<usize>,
}

impl DegeneracyStructure {
    /// Chain clustering: sorted neighbours closer than `tol` share a group.
    pub fn of(energies: &[f64], tol: f64) -> Self {
        let mut order: Vec<usize> = (0..energies.len()).collect();
        order.sort_by(|&i, &j| energies[i].total_cmp(&energies[j]).then(i.cmp(&j)));
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (pos, &i) in order.iter().enumerate() {
            let joins = pos > 0 && (energies[i] - energies[order[pos - 1]]).abs() <= tol;
            match groups.last_mut() {
                Some(g) if joins => g.push(i),
                _ => groups.push(vec![i]),
            }
        }
        for g in &mut groups {
            g.sort_unstable();
        }
        groups.sort_by_key(|g| g[0]);
        let degenerate = groups
            .iter()
            .enumerate()
            .filter(|(_, g)| g.len() > 1)
            .map(|(k, _)| k)
            .collect();
        Self { groups, degenerate }
    }

    pub fn is_degenerate(&self) -> bool {
        !self.degenerate.is_empty()
    }

    pub fn degenerate_groups(&self) -> impl Iterator<Item = &[usize]> {
        self.degenerate.iter().map(move |&k| self.groups[k].as_slice())
    }
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub dimension: usize,
    /// `max |H1[i][j] - conj(H1[j][i])|` of the unscaled perturbation.
    pub hermiticity_violation: f64,
    pub hermitian: bool,
    pub degeneracy: DegeneracyStructure,
    pub admissible: bool,
}

/// Check shape, finiteness and Hermiticity and report the degeneracy
/// structure of the unperturbed energies.
pub fn validate(spec: &SystemSpec, tol_deg: f64) -> Result<ValidationReport> {
    spec.check_shape()?;
    let h = &spec.perturbation;
    let n = spec.dimension();
    let mut violation: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            violation = violation.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    let scale = max_abs(h);
    let hermitian = violation <= HERMITIAN_TOL * scale;
    Ok(ValidationReport {
        dimension: n,
        hermiticity_violation: violation,
        hermitian,
        degeneracy: DegeneracyStructure::of(&spec.energies, tol_deg),
        admissible: hermitian,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RedivideOptions {
    pub tol_deg: f64,
    /// When false the energies stay unperturbed and `g` keeps the diagonal
    /// of `lambda * H1`. Only the path-sum series accepts such systems.
    pub redivision: bool,
}

impl Default for RedivideOptions {
    fn default() -> Self {
        Self {
            tol_deg: DEFAULT_TOL_DEG,
            redivision: true,
        }
    }
}

/// Working form `diag(E') + g` of a system.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSystem {
    /// Unperturbed energies `E` of the input.
    pub original_energies: Vec<f64>,
    /// `E'`, the diagonal of the working Hamiltonian.
    pub energies: Vec<f64>,
    /// Coupling matrix; zero diagonal whenever `redivided` is set.
    pub g: CMatrix,
    /// Unitary `R` with `R^dagger (diag(E') + g) R = diag(E) + lambda H1`.
    pub rotation: CMatrix,
    pub redivided: bool,
    /// Degeneracy structure of the input energies.
    pub degeneracy: DegeneracyStructure,
    pub tol_deg: f64,
}

impl SplitSystem {
    /// Working form built directly from `E'` and a Hermitian, zero-diagonal
    /// `g`, in an unrotated basis.
    pub fn from_parts(energies: Vec<f64>, g: CMatrix) -> Result<Self> {
        let spec = SystemSpec::new(energies, g);
        let report = validate(&spec, DEFAULT_TOL_DEG)?;
        if !report.hermitian {
            return Err(Error::NotHermitian {
                violation: report.hermiticity_violation,
            });
        }
        if (0..spec.dimension()).any(|i| spec.perturbation[(i, i)] != Complex64::new(0.0, 0.0)) {
            return Err(Error::NotRedivided);
        }
        let n = spec.dimension();
        Ok(Self {
            original_energies: spec.energies.clone(),
            energies: spec.energies,
            g: spec.perturbation,
            rotation: CMatrix::identity(n, n),
            redivided: true,
            degeneracy: report.degeneracy,
            tol_deg: DEFAULT_TOL_DEG,
        })
    }

    pub fn dimension(&self) -> usize {
        self.energies.len()
    }

    /// `diag(E') + g`.
    pub fn hamiltonian(&self) -> CMatrix {
        let mut h = self.g.clone();
        for (i, &e) in self.energies.iter().enumerate() {
            h[(i, i)] += e;
        }
        h
    }

    /// `max |g|`.
    pub fn coupling_norm(&self) -> f64 {
        max_abs(&self.g)
    }

    /// The working form as a fresh spec in the working basis.
    pub fn to_spec(&self) -> SystemSpec {
        SystemSpec::new(self.energies.clone(), self.g.clone())
    }

    pub(crate) fn require_redivided(&self) -> Result<()> {
        if self.redivided {
            Ok(())
        } else {
            Err(Error::NotRedivided)
        }
    }

    pub(crate) fn check_level(&self, index: usize) -> Result<()> {
        if index < self.dimension() {
            Ok(())
        } else {
            Err(Error::LevelOutOfRange {
                index,
                dimension: self.dimension(),
            })
        }
    }
}

/// Redivide with default options.
pub fn redivide(spec: &SystemSpec) -> Result<SplitSystem> {
    redivide_with(spec, RedivideOptions::default())
}

/// Move the diagonal of `lambda H1` into the energies and diagonalize the
/// Hamiltonian inside each degenerate group.
///
/// Degeneracies created by the shift itself get one further diagonalization
/// pass. Any pair still degenerate and coupled after that is reported as
/// [`Error::IncompleteDegeneracyRemoval`].
pub fn redivide_with(spec: &SystemSpec, opts: RedivideOptions) -> Result<SplitSystem> {
    let report = validate(spec, opts.tol_deg)?;
    if !report.hermitian {
        return Err(Error::NotHermitian {
            violation: report.hermiticity_violation,
        });
    }
    let n = spec.dimension();
    let raw = spec.scaled_perturbation();
    let h1 = (&raw + raw.adjoint()) * Complex64::new(0.5, 0.0);

    if !opts.redivision {
        return Ok(SplitSystem {
            original_energies: spec.energies.clone(),
            energies: spec.energies.clone(),
            g: h1,
            rotation: CMatrix::identity(n, n),
            redivided: false,
            degeneracy: report.degeneracy,
            tol_deg: opts.tol_deg,
        });
    }

    let mut h = h1.clone();
    for (i, &e) in spec.energies.iter().enumerate() {
        h[(i, i)] += e;
    }
    let threshold = RESIDUAL_COUPLING_TOL * max_abs(&h1);
    let mut rotation = CMatrix::identity(n, n);

    // First pass on the input degeneracies, second on those the shift created.
    let groups: Vec<Vec<usize>> = report.degeneracy.degenerate_groups().map(<[usize]>::to_vec).collect();
    rotate_groups(&mut h, &mut rotation, &groups)?;
    let coupled = coupled_degenerate_groups(&h, opts.tol_deg, threshold);
    if !coupled.is_empty() {
        rotate_groups(&mut h, &mut rotation, &coupled)?;
    }

    let energies: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    let after = DegeneracyStructure::of(&energies, opts.tol_deg);
    for group in after.degenerate_groups() {
        for (a, &i) in group.iter().enumerate() {
            for &j in &group[a + 1..] {
                let c = h[(i, j)].norm();
                if c > threshold {
                    return Err(Error::IncompleteDegeneracyRemoval {
                        i,
                        j,
                        energy: energies[i],
                        coupling: c,
                    });
                }
                h[(i, j)] = Complex64::new(0.0, 0.0);
                h[(j, i)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    for i in 0..n {
        h[(i, i)] = Complex64::new(0.0, 0.0);
    }

    Ok(SplitSystem {
        original_energies: spec.energies.clone(),
        energies,
        g: h,
        rotation,
        redivided: true,
        degeneracy: report.degeneracy,
        tol_deg: opts.tol_deg,
    })
}

/// Degenerate groups of the current diagonal that still carry a coupling.
fn coupled_degenerate_groups(h: &CMatrix, tol_deg: f64, threshold: f64) -> Vec<Vec<usize>> {
    let diag: Vec<f64> = (0..h.nrows()).map(|i| h[(i, i)].re).collect();
    let structure = DegeneracyStructure::of(&diag, tol_deg);
    structure
        .degenerate_groups()
        .filter(|g| {
            g.iter()
                .enumerate()
                .any(|(a, &i)| g[a + 1..].iter().any(|&j| h[(i, j)].norm() > threshold))
        })
        .map(<[usize]>::to_vec)
        .collect()
}

/// Diagonalize `h` on each index group and accumulate the rotation:
/// `h <- W h W^dagger`, `rotation <- W rotation` with `W` block-diagonal.
fn rotate_groups(h: &mut CMatrix, rotation: &mut CMatrix, groups: &[Vec<usize>]) -> Result<()> {
    let n = h.nrows();
    let mut w = CMatrix::identity(n, n);
    let mut any = false;
    for group in groups {
        let m = group.len();
        let block = CMatrix::from_fn(m, m, |a, b| h[(group[a], group[b])]);
        let off = (0..m).any(|a| (0..m).any(|b| a != b && block[(a, b)].norm() > 0.0));
        if !off {
            continue;
        }
        any = true;
        let sol = hermitian_eigen(&block)?;
        let vd = sol.eigenvectors.adjoint();
        for a in 0..m {
            for b in 0..m {
                w[(group[a], group[b])] = vd[(a, b)];
            }
        }
    }
    if !any {
        return Ok(());
    }
    let rotated = &w * &*h * w.adjoint();
    // Exactly Hermitian, so that redividing the result again is a no-op.
    *h = (&rotated + rotated.adjoint()) * Complex64::new(0.5, 0.0);
    *rotation = &w * &*rotation;
    for group in groups {
        for &i in group {
            h[(i, i)] = Complex64::new(h[(i, i)].re, 0.0);
            for &j in group {
                if i != j {
                    h[(i, j)] = Complex64::new(0.0, 0.0);
                }
            }
        }
    }
    Ok(())
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}
