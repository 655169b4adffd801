//! Perturbation theory for time-independent quantum systems built on the
//! exact path-sum expansion of the propagator.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] holds the system description and the redivision of the
//!   Hamiltonian into a diagonal part and a strictly off-diagonal coupling.
//! * [`ddkernel`] evaluates confluent divided differences of `exp(-i x t)`.
//! * [`series`] sums index paths into per-order amplitude matrices.
//! * [`terms`] enumerates contraction/anti-contraction catalogs and evaluates
//!   their closed forms up to fourth order.
//! * [`improved`] computes revision energies and the improved amplitudes,
//!   transition probabilities and perturbed energies.
//! * [`oracle`] provides exact references: a Jacobi eigensolver, the exact
//!   propagator and the two-level closed forms.

pub mod ddkernel;
pub mod error;
pub mod improved;
pub mod model;
pub mod oracle;
pub mod series;
pub mod terms;

pub use error::{Error, Result};
pub use model::{SplitSystem, SystemSpec};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<num_complex::Complex64>;
