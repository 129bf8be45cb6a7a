//! Unambiguous discrimination of two mixed quantum states.
//!
//! Given a pair of density matrices with a priori probabilities, this crate
//! decides whether the fidelity lower bounds on the failure probability are
//! attainable, constructs and validates the optimal measurement when they
//! are, and brackets the true optimum with an independent brute-force
//! optimizer when they are not.
//!
//! Modules, bottom up:
//!
//! - [`matlin`] — complex Hermitian linear algebra (Jacobi eigensolver,
//!   one-sided Jacobi SVD, PSD square roots, pseudo-inverses, supports,
//!   polar decomposition, parallel addition) under one tolerance policy.
//! - [`usd`] — fidelity data, regime classification, the three lower
//!   bounds, saturation conditions, explicit POVM construction, Helstrom
//!   benchmark.
//! - [`reduce`] — splitting off common support and trimming mutually
//!   orthogonal support parts, with the Σ⁻¹ certification.
//! - [`states`] — generators: pure pairs, the coherent-state QKD pair, the
//!   geometrically uniform counterexample, random instances.
//! - [`oracle`] — derivative-free optimizer over valid USD measurements for
//!   small dimensions.
//! - [`simulate`] — Monte-Carlo outcome sampling against the analytic
//!   failure probabilities.
//!
//! The crate is `no_std` (plus `alloc`); IO, file formats and the command
//! line live in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
mod math;
pub mod matlin;
pub mod oracle;
pub mod reduce;
pub mod simulate;
pub mod states;
pub mod usd;

pub use error::{Error, Result};
pub use matlin::{C64, ComplexMatrix, HermitianMatrix, NumericConfig, UnitaryMatrix};
pub use usd::{DensityMatrix, UsdPovm, UsdProblem};

