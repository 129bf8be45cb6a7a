//! Dense complex matrices and the validated Hermitian / unitary wrappers.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::math;

/// Complex scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// Tolerance policy for every numerical decision in the crate.
///
/// All spectral cutoffs and scalar comparisons go through one of these five
/// knobs; there are no ad-hoc magic thresholds in the operation code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericConfig {
    /// Relative bound on |A - A†|_max for accepting a matrix as Hermitian.
    pub tol_hermitian: f64,
    /// Eigenvalue floor, relative to the largest |eigenvalue|, below which a
    /// matrix is rejected as not positive semi-definite.
    pub tol_psd: f64,
    /// Singular-value / eigenvalue cutoff, relative to the largest, used for
    /// numerical rank, supports and pseudo-inverses.
    pub tol_rank: f64,
    /// Absolute bound on |U†U - 1|_max for accepting a matrix as unitary.
    pub tol_unitary: f64,
    /// Absolute tolerance for scalar comparisons (traces, probabilities,
    /// regime thresholds).
    pub tol_equality: f64,
}

impl Default for NumericConfig {
    /// Double-precision eigendecomposition noise is ~1e-13·dim at desk
    /// scale; the defaults keep two orders of safety margin above it.
    fn default() -> Self {
        NumericConfig {
            tol_hermitian: 1e-10,
            tol_psd: 1e-9,
            tol_rank: 1e-9,
            tol_unitary: 1e-9,
            tol_equality: 1e-8,
        }
    }
}

impl NumericConfig {
    /// Every tolerance must be strictly positive and below 1e-3.
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.tol_hermitian,
            self.tol_psd,
            self.tol_rank,
            self.tol_unitary,
            self.tol_equality,
        ];
        if all.iter().all(|&t| t > 0.0 && t < 1e-3) {
            Ok(())
        } else {
            Err(Error::InvalidTolerances)
        }
    }
}

/// A square complex matrix, stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        debug_assert!(dim >= 1, "matrices have dim >= 1");
        ComplexMatrix {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Build from a row-major slice of `dim * dim` entries.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Self {
        assert_eq!(entries.len(), dim * dim, "entry count must be dim^2");
        ComplexMatrix {
            dim,
            data: entries.to_vec(),
        }
    }

    /// Build entry-by-entry from a closure over (row, col).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus, the `|·|_max` norm used by the tolerances.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// |A - A†|_max.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn scale(&self, s: f64) -> Self {
        self.scale_complex(C64::new(s, 0.0))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Inner product column `x† M x` for a column vector of length dim.
    pub fn quadratic_form(&self, x: &[C64]) -> C64 {
        assert_eq!(x.len(), self.dim);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += x[i].conj() * self[(i, j)] * x[j];
            }
        }
        acc
    }

    pub(crate) fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl core::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        writeln!(f, "ComplexMatrix(dim={})", self.dim)?;
        for i in 0..self.dim {
            write!(f, "  [")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

macro_rules! elementwise {
    ($lhs:expr, $rhs:expr, $op:tt) => {{
        assert_eq!($lhs.dim, $rhs.dim, "matrix dimensions must agree");
        ComplexMatrix {
            dim: $lhs.dim,
            data: $lhs
                .data
                .iter()
                .zip($rhs.data.iter())
                .map(|(a, b)| a $op b)
                .collect(),
        }
    }};
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        elementwise!(self, rhs, +)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        elementwise!(self, rhs, -)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions must agree");
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// A matrix guaranteed Hermitian: stored data satisfies `A[j][i] == conj(A[i][j])`
/// exactly, so spectral routines may trust either triangle.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl HermitianMatrix {
    /// Accept a matrix as Hermitian and symmetrize the rounding noise away.
    ///
    /// Fails with [`Error::NotHermitian`] when `|A - A†|_max` exceeds
    /// `tol_hermitian · |A|_max`; otherwise returns `(A + A†)/2`.
    pub fn hermitize(m: &ComplexMatrix, cfg: &NumericConfig) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidParameter {
                what: "matrix entries must be finite",
            });
        }
        let dev = m.hermitian_deviation();
        let tolerance = cfg.tol_hermitian * m.max_abs();
        if dev > tolerance {
            return Err(Error::NotHermitian { deviation: dev, tolerance });
        }
        Ok(Self::symmetrize(m))
    }

    /// `(A + A†)/2` without the tolerance check. Internal chaining of
    /// operations whose output is Hermitian by algebra uses this directly;
    /// the checked [`hermitize`](Self::hermitize) is for foreign input.
    pub(crate) fn symmetrize(m: &ComplexMatrix) -> Self {
        let d = m.dim();
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            out[(i, i)] = C64::new(m[(i, i)].re, 0.0);
            for j in (i + 1)..d {
                let avg = (m[(i, j)] + m[(j, i)].conj()).scale(0.5);
                out[(i, j)] = avg;
                out[(j, i)] = avg.conj();
            }
        }
        HermitianMatrix { inner: out }
    }

    /// Build from a closure over the lower-left triangle `(i >= j)`; the
    /// upper triangle is mirrored and the diagonal's imaginary part dropped.
    pub(crate) fn from_lower(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut out = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            out[(i, i)] = C64::new(f(i, i).re, 0.0);
            for j in 0..i {
                let v = f(i, j);
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
        }
        HermitianMatrix { inner: out }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix {
            inner: ComplexMatrix::zeros(dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianMatrix {
            inner: ComplexMatrix::identity(dim),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        HermitianMatrix {
            inner: ComplexMatrix::diagonal(values),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Trace of a Hermitian matrix is real by construction.
    pub fn trace_re(&self) -> f64 {
        self.inner.trace().re
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.max_abs()
    }

    /// Scaling by a real keeps hermiticity exactly.
    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix {
            inner: self.inner.scale(s),
        }
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.inner[idx]
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

impl core::fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Hermitian{:?}", self.inner)
    }
}

/// A matrix validated as unitary at construction.
#[derive(Clone, PartialEq)]
pub struct UnitaryMatrix {
    inner: ComplexMatrix,
}

impl UnitaryMatrix {
    /// Accept a matrix as unitary when `|U†U - 1|_max <= tol_unitary`.
    pub fn new(m: ComplexMatrix, cfg: &NumericConfig) -> Result<Self> {
        let dev = Self::unitary_deviation(&m);
        if dev > cfg.tol_unitary {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(UnitaryMatrix { inner: m })
    }

    pub fn identity(dim: usize) -> Self {
        UnitaryMatrix {
            inner: ComplexMatrix::identity(dim),
        }
    }

    pub fn unitary_deviation(m: &ComplexMatrix) -> f64 {
        let gram = &m.adjoint() * m;
        (&gram - &ComplexMatrix::identity(m.dim())).max_abs()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// The adjoint of a unitary is its inverse, still unitary.
    pub fn adjoint(&self) -> Self {
        UnitaryMatrix {
            inner: self.inner.adjoint(),
        }
    }
}

impl Index<(usize, usize)> for UnitaryMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.inner[idx]
    }
}

impl core::fmt::Debug for UnitaryMatrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Unitary{:?}", self.inner)
    }
}
