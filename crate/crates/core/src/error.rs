//! Error type shared by every module of the crate.

use core::fmt;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A matrix expected to be Hermitian deviates from its adjoint by more
    /// than the configured tolerance (max-entry norm, relative).
    NotHermitian { deviation: f64, tolerance: f64 },
    /// A matrix expected to be positive semi-definite has an eigenvalue
    /// below the configured floor.
    NotPsd { min_eigenvalue: f64, threshold: f64 },
    /// A matrix expected to be unitary fails the U†U = 1 check.
    NotUnitary { deviation: f64 },
    /// An iterative spectral routine did not reach its target accuracy.
    ConvergenceFailure { sweeps: usize },
    /// Two operands have incompatible dimensions.
    DimensionMismatch { expected: usize, found: usize },
    /// A density matrix whose trace is not one.
    InvalidTrace { trace: f64 },
    /// Priors outside (0, 1) or not summing to one. Inputs are rejected,
    /// never renormalized.
    InvalidPriors { eta0: f64, eta1: f64 },
    /// A tolerance outside the accepted range (0, 1e-3).
    InvalidTolerances,
    /// A scalar argument outside its documented domain.
    InvalidParameter { what: &'static str },
    /// Fidelity is numerically zero: the states are perfectly
    /// distinguishable and the bound machinery does not apply.
    ZeroFidelity,
    /// The supports of the two states intersect non-trivially; run the
    /// reduction first.
    OverlappingSupports,
    /// The saturation conditions fail; the closed-form POVM does not exist.
    NotSaturated { margin0: f64, margin1: f64 },
    /// The reduction removed everything: the states share their whole
    /// support and unambiguous discrimination is impossible (Q = 1).
    FullyOverlapping,
    /// A measurement that violates the POVM or unambiguity constraints.
    InvalidPovm { reason: &'static str },
    /// An outcome probability below the hard negativity floor.
    NegativeProbability { value: f64 },
    /// The brute-force optimizer only handles small dimensions.
    DimensionTooLarge { dim: usize, max: usize },
    /// A unitary that is not an involution (U² ≠ 1).
    NotInvolution { deviation: f64 },
    /// Generator coefficients that are not normalized.
    BadNormalization { norm: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotHermitian { deviation, tolerance } => write!(
                f,
                "matrix is not Hermitian: |A - A†|_max = {deviation:.3e} exceeds {tolerance:.3e}"
            ),
            Error::NotPsd { min_eigenvalue, threshold } => write!(
                f,
                "matrix is not positive semi-definite: min eigenvalue {min_eigenvalue:.3e} below {threshold:.3e}"
            ),
            Error::NotUnitary { deviation } => {
                write!(f, "matrix is not unitary: |U†U - 1|_max = {deviation:.3e}")
            }
            Error::ConvergenceFailure { sweeps } => {
                write!(f, "spectral routine failed to converge after {sweeps} sweeps")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidTrace { trace } => {
                write!(f, "density matrix trace is {trace:.12}, expected 1")
            }
            Error::InvalidPriors { eta0, eta1 } => {
                write!(f, "invalid priors eta0 = {eta0}, eta1 = {eta1}: must lie in (0,1) and sum to 1")
            }
            Error::InvalidTolerances => {
                write!(f, "tolerances must be strictly positive and below 1e-3")
            }
            Error::InvalidParameter { what } => write!(f, "invalid parameter: {what}"),
            Error::ZeroFidelity => {
                write!(f, "fidelity is zero: states are perfectly distinguishable")
            }
            Error::OverlappingSupports => {
                write!(f, "state supports overlap; reduce the problem first")
            }
            Error::NotSaturated { margin0, margin1 } => write!(
                f,
                "saturation conditions fail (min eigenvalues {margin0:.3e}, {margin1:.3e})"
            ),
            Error::FullyOverlapping => {
                write!(f, "states share their full support; USD is impossible (Q = 1)")
            }
            Error::InvalidPovm { reason } => write!(f, "invalid USD POVM: {reason}"),
            Error::NegativeProbability { value } => {
                write!(f, "outcome probability {value:.3e} below the negativity floor")
            }
            Error::DimensionTooLarge { dim, max } => {
                write!(f, "dimension {dim} exceeds the optimizer limit {max}")
            }
            Error::NotInvolution { deviation } => {
                write!(f, "unitary is not an involution: |U² - 1|_max = {deviation:.3e}")
            }
            Error::BadNormalization { norm } => {
                write!(f, "coefficients are not normalized: sum of squares is {norm:.12}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
