//! Complex Hermitian linear algebra with an explicit tolerance policy.
//!
//! All operations are pure functions on immutable values. The spectral
//! routines are complex Jacobi iterations: deterministic, accurate at desk
//! scale (dims up to ~100), and free of external solver dependencies.

mod eig;
mod matrix;
mod ops;
mod svd;

pub use eig::{eig_hermitian, EigH};
pub use matrix::{C64, ComplexMatrix, HermitianMatrix, NumericConfig, UnitaryMatrix};
pub use ops::{
    hermitize, numerical_rank, parallel_add, pinv_psd, polar_decompose, sqrt_psd,
    support_projector, trace_norm,
};
pub use svd::{svd, Svd};

pub(crate) use ops::sandwich;
