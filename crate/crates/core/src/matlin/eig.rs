//! Eigendecomposition of Hermitian matrices by cyclic complex Jacobi
//! rotations. Quadratically convergent, deterministic for a given input, and
//! accurate to machine precision at the desk scales this crate targets.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::matlin::matrix::{C64, ComplexMatrix, HermitianMatrix, NumericConfig, UnitaryMatrix};

const MAX_SWEEPS: usize = 64;

/// Result of [`eig_hermitian`]: `A = Q Λ Q†` with eigenvalues descending.
#[derive(Debug, Clone)]
pub struct EigH {
    /// Real eigenvalues, sorted in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as the columns of a unitary.
    pub vectors: UnitaryMatrix,
}

impl EigH {
    /// Largest |eigenvalue|; zero for the zero matrix.
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.values.last().expect("dim >= 1")
    }
}

/// Diagonalize a Hermitian matrix.
///
/// Fails with [`Error::ConvergenceFailure`] if the off-diagonal mass does not
/// drop below machine noise within the sweep budget (unreachable for finite
/// Hermitian input, but the contract keeps the caller honest).
pub fn eig_hermitian(a: &HermitianMatrix, cfg: &NumericConfig) -> Result<EigH> {
    cfg.validate()?;
    let d = a.dim();
    let mut m = a.matrix().clone();
    let mut q = ComplexMatrix::identity(d);

    let scale = m.frobenius_norm();
    if scale > 0.0 {
        // Each rotation leaves rounding residue ~ε·‖A‖ in the off-diagonal,
        // so the reachable floor grows with dimension.
        let target = (d as f64) * f64::EPSILON * scale;
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&m) <= target {
                converged = true;
                break;
            }
            for p in 0..d {
                for r in (p + 1)..d {
                    rotate(&mut m, &mut q, p, r);
                }
            }
        }
        if !converged && off_diagonal_norm(&m) > target {
            return Err(Error::ConvergenceFailure { sweeps: MAX_SWEEPS });
        }
    }

    // Sort descending; stable in the original index for degenerate values.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re));
    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(d, |i, j| q[(i, order[j])]);

    Ok(EigH {
        values,
        vectors: UnitaryMatrix::new(vectors, cfg)?,
    })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let d = m.dim();
    let mut sum = 0.0;
    for p in 0..d {
        for r in (p + 1)..d {
            sum += m[(p, r)].norm_sqr();
        }
    }
    math::sqrt(2.0 * sum)
}

/// One Jacobi rotation zeroing `m[(p, r)]`; `m ← J† m J`, `q ← q J`.
fn rotate(m: &mut ComplexMatrix, q: &mut ComplexMatrix, p: usize, r: usize) {
    let apr = m[(p, r)];
    let abs = apr.norm();
    if abs == 0.0 {
        return;
    }
    let phase = apr.scale(1.0 / abs);
    let app = m[(p, p)].re;
    let arr = m[(r, r)].re;

    let tau = (arr - app) / (2.0 * abs);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + math::sqrt(1.0 + tau * tau))
    };
    let c = 1.0 / math::sqrt(1.0 + t * t);
    let s = t * c;

    let d = m.dim();
    // Column update (m J), then row update (J† m).
    for k in 0..d {
        let mkp = m[(k, p)];
        let mkr = m[(k, r)];
        m[(k, p)] = mkp.scale(c) - mkr * phase.conj().scale(s);
        m[(k, r)] = mkp * phase.scale(s) + mkr.scale(c);
    }
    for k in 0..d {
        let mpk = m[(p, k)];
        let mrk = m[(r, k)];
        m[(p, k)] = mpk.scale(c) - mrk * phase.scale(s);
        m[(r, k)] = mpk * phase.conj().scale(s) + mrk.scale(c);
    }
    // Clean the rotated pair: the (p, r) entry is zero by construction and
    // the diagonal stays real.
    m[(p, r)] = C64::new(0.0, 0.0);
    m[(r, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(r, r)] = C64::new(m[(r, r)].re, 0.0);

    for k in 0..q.dim() {
        let qkp = q[(k, p)];
        let qkr = q[(k, r)];
        q[(k, p)] = qkp.scale(c) - qkr * phase.conj().scale(s);
        q[(k, r)] = qkp * phase.scale(s) + qkr.scale(c);
    }
}

/// Rebuild `Q f(Λ) Q†` from an eigendecomposition, exactly Hermitian by
/// construction (lower triangle computed, upper mirrored).
pub(crate) fn spectral_rebuild(eig: &EigH, f: impl Fn(f64) -> f64) -> HermitianMatrix {
    let d = eig.vectors.dim();
    let mapped: Vec<f64> = eig.values.iter().map(|&v| f(v)).collect();
    HermitianMatrix::from_lower(d, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for (k, &fv) in mapped.iter().enumerate() {
            if fv != 0.0 {
                acc += eig.vectors[(i, k)] * eig.vectors[(j, k)].conj() * fv;
            }
        }
        acc
    })
}
