//! Exact verification toolkit for multi-species interacting particle systems.
//!
//! Everything symbolic is computed in the ring of Laurent polynomials in a
//! deformation parameter `q` with arbitrary-precision rational coefficients,
//! so identity checks are exact rather than numerical. The crate covers:
//!
//! * [`scalar`] — the Laurent scalar ring and `q`-integers,
//! * [`statespace`] — single-site and multi-site configuration bases with
//!   conservation-sector bookkeeping,
//! * [`linop`] — sparse operators on tensor-product bases, leg embedding,
//!   and structural checks (weight preservation, commutation, row sums),
//! * [`weights`] — pair weight functions, product eigenvectors, and exact
//!   eigen-verification of lattice Hamiltonians,
//! * [`transforms`] — ground-state and gauge transformations, Yang-Baxter
//!   checks, and the diagonal-conjugator solver,
//! * [`algebra`] — a quantum-algebra representation, Hecke R-matrices, and
//!   exhaustive relation checking,
//! * [`simulate`] — seeded continuous-time Markov simulation of the
//!   resulting stochastic generators.
//!
//! The crate is `no_std`-compatible (with `alloc`); the default `std`
//! feature just forwards to the dependencies.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod algebra;
pub mod linop;
pub mod scalar;
pub mod simulate;
pub mod statespace;
pub mod transforms;
pub mod weights;

pub use linop::{SparseOperator, VectorOnBasis};
pub use scalar::{BigRational, LaurentScalar};
pub use statespace::{MultiConfig, SectorLabel, SiteConfig};
