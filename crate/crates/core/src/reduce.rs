//! Standard-form reduction of a discrimination problem: split off the
//! common part of the two supports (on which no conclusive outcome can ever
//! fire), trim the mutually orthogonal support parts (on which the outcome
//! is deterministic), and certify `ρ₀ Σ⁻¹ ρ₁ = 0` on the result.
//!
//! Each step returns a [`ReductionResult`] carrying the compressed problem,
//! the basis that block-orders the original space, and the bookkeeping
//! needed to lift a reduced failure probability back to the original
//! problem.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matlin::{
    eig_hermitian, numerical_rank, parallel_add, pinv_psd, support_projector,
    C64, ComplexMatrix, HermitianMatrix, NumericConfig, UnitaryMatrix,
};
use crate::usd::{DensityMatrix, UsdProblem};

/// Outcome of one reduction step.
///
/// `basis_change` maps the original space to block order
/// `[common ⊕ trimmed₀ ⊕ trimmed₁ ⊕ reduced]` (empty blocks allowed); the
/// reduced problem lives in the final block, renormalized to unit trace
/// with priors reweighted by the retained weights.
#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub reduced: UsdProblem,
    pub common_dim: usize,
    pub trimmed_dims: (usize, usize),
    pub basis_change: UnitaryMatrix,
    /// Pseudo-inverse of `Σ = ρ₀' + ρ₁'` of the reduced problem.
    pub sigma_inv: HermitianMatrix,
    /// Weight each original state keeps in the reduced block.
    pub retained_weights: (f64, f64),
    /// Failure probability forced by the removed part (common support).
    pub lift_fail: f64,
    /// Probability weight carried by the reduced problem.
    pub lift_keep: f64,
}

impl ReductionResult {
    /// Lift a failure probability of the reduced problem back to the
    /// original one: `Q = lift_fail + lift_keep · Q_reduced`.
    pub fn lift(&self, q_reduced: f64) -> f64 {
        self.lift_fail + self.lift_keep * q_reduced
    }
}

/// `rk(ρ₀) + rk(ρ₁) = rk(ρ₀ + ρ₁)` holds exactly when the supports
/// intersect trivially.
pub fn rank_sum_check(p: &UsdProblem, cfg: &NumericConfig) -> Result<bool> {
    let r0 = numerical_rank(p.rho0().matrix(), cfg)?;
    let r1 = numerical_rank(p.rho1().matrix(), cfg)?;
    let sigma = &(p.rho0().matrix().clone()) + p.rho1().matrix();
    let rs = numerical_rank(&sigma, cfg)?;
    Ok(r0 + r1 == rs)
}

/// Projector built from an eigendecomposition with an absolute eigenvalue
/// cutoff. Parallel additions of disjoint-support operators are pure
/// rounding noise, so a cutoff relative to their own largest eigenvalue
/// would manufacture support out of nothing.
fn projector_above(m: &HermitianMatrix, cutoff: f64, cfg: &NumericConfig) -> Result<(HermitianMatrix, usize)> {
    let eig = eig_hermitian(m, cfg)?;
    let rank = eig.values.iter().filter(|&&v| v > cutoff).count();
    let d = m.dim();
    let proj = HermitianMatrix::from_lower(d, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..rank {
            acc += eig.vectors[(i, k)] * eig.vectors[(j, k)].conj();
        }
        acc
    });
    Ok((proj, rank))
}

/// Projector onto the intersection of the two supports,
/// `S_ρ₀ ∩ S_ρ₁ = S_{ρ₀:ρ₁}`, via the parallel addition.
pub fn common_subspace(p: &UsdProblem, cfg: &NumericConfig) -> Result<HermitianMatrix> {
    let joint = parallel_add(p.rho0().matrix(), p.rho1().matrix(), cfg)?;
    // Trace-one states give their parallel addition eigenvalues on the
    // order of the weight both states put on a shared direction; weights
    // below tol_rank are indistinguishable from no intersection.
    Ok(projector_above(&joint, cfg.tol_rank, cfg)?.0)
}

struct BlockBasis {
    /// Columns: accepted orthonormal basis vectors in block order.
    columns: Vec<Vec<C64>>,
}

impl BlockBasis {
    fn new() -> Self {
        BlockBasis { columns: Vec::new() }
    }

    /// Append the eigenvectors of a (near-)projector with eigenvalue above
    /// one half, i.e. an orthonormal basis of its range.
    fn push_projector_range(&mut self, proj: &HermitianMatrix, cfg: &NumericConfig) -> Result<usize> {
        let eig = eig_hermitian(proj, cfg)?;
        let mut count = 0;
        for (k, &v) in eig.values.iter().enumerate() {
            if v > 0.5 {
                self.columns.push(eig.vectors.matrix().column(k));
                count += 1;
            }
        }
        Ok(count)
    }

    /// `x_new = B x_old` with the accepted columns as the new axes.
    fn into_basis_change(self, dim: usize, cfg: &NumericConfig) -> Result<UnitaryMatrix> {
        debug_assert_eq!(self.columns.len(), dim);
        let b = ComplexMatrix::from_fn(dim, |i, j| self.columns[i][j].conj());
        UnitaryMatrix::new(b, cfg)
    }
}

/// Rotate a state into the new basis and keep the trailing block.
fn compress_state(
    rho: &DensityMatrix,
    basis: &UnitaryMatrix,
    keep_from: usize,
    cfg: &NumericConfig,
) -> Result<(DensityMatrix, f64)> {
    let d = rho.dim();
    let rotated = crate::matlin::sandwich(basis.matrix(), rho.matrix());
    let dr = d - keep_from;
    let block = HermitianMatrix::from_lower(dr, |i, j| rotated[(keep_from + i, keep_from + j)]);
    let weight = block.trace_re();
    if weight <= cfg.tol_equality {
        return Err(Error::FullyOverlapping);
    }
    let state = DensityMatrix::new(block.scale(1.0 / weight), cfg)?;
    Ok((state, weight))
}

fn identity_reduction(p: &UsdProblem, cfg: &NumericConfig) -> Result<ReductionResult> {
    let sigma = &(p.rho0().matrix().clone()) + p.rho1().matrix();
    Ok(ReductionResult {
        reduced: p.clone(),
        common_dim: 0,
        trimmed_dims: (0, 0),
        basis_change: UnitaryMatrix::identity(p.dim()),
        sigma_inv: pinv_psd(&sigma, cfg)?,
        retained_weights: (1.0, 1.0),
        lift_fail: 0.0,
        lift_keep: 1.0,
    })
}

/// First reduction: split off `S_ρ₀ ∩ S_ρ₁`.
///
/// On the common subspace no conclusive outcome can fire, so that weight is
/// forced failure; the compressed pair on the orthocomplement is the
/// remaining problem, with priors reweighted proportionally to the retained
/// weights. Fails with [`Error::FullyOverlapping`] when nothing remains
/// (`ρ₀ = ρ₁`-like inputs, where Q = 1).
pub fn split_common(p: &UsdProblem, cfg: &NumericConfig) -> Result<ReductionResult> {
    let common = common_subspace(p, cfg)?;
    let eig = eig_hermitian(&common, cfg)?;
    let common_dim = eig.values.iter().filter(|&&v| v > 0.5).count();
    if common_dim == 0 {
        return identity_reduction(p, cfg);
    }
    if common_dim == p.dim() {
        return Err(Error::FullyOverlapping);
    }

    // Eigenvectors sort descending, so the common block comes first and the
    // orthocomplement after it.
    let basis = UnitaryMatrix::new(eig.vectors.adjoint().into_matrix(), cfg)?;
    let (rho0r, w0) = compress_state(p.rho0(), &basis, common_dim, cfg)?;
    let (rho1r, w1) = compress_state(p.rho1(), &basis, common_dim, cfg)?;

    let kept = p.eta0() * w0 + p.eta1() * w1;
    let reduced = UsdProblem::new(
        rho0r,
        rho1r,
        p.eta0() * w0 / kept,
        p.eta1() * w1 / kept,
        cfg,
    )?;
    let sigma = &(reduced.rho0().matrix().clone()) + reduced.rho1().matrix();
    let sigma_inv = pinv_psd(&sigma, cfg)?;

    Ok(ReductionResult {
        reduced,
        common_dim,
        trimmed_dims: (0, 0),
        basis_change: basis,
        sigma_inv,
        retained_weights: (w0, w1),
        lift_fail: 1.0 - kept,
        lift_keep: kept,
    })
}

/// Second reduction: trim `S_ρ₀ ∩ S_ρ₁⊥` and `S_ρ₁ ∩ S_ρ₀⊥`.
///
/// On those subspaces discrimination is deterministic, so their weight
/// contributes certain success; the kept pair has equal ranks r spanning a
/// 2r space. Requires a passing [`rank_sum_check`]. A pair whose supports
/// are entirely mutually orthogonal leaves nothing to discriminate and is
/// reported as [`Error::ZeroFidelity`].
pub fn orthogonal_trim(p: &UsdProblem, cfg: &NumericConfig) -> Result<ReductionResult> {
    if !rank_sum_check(p, cfg)? {
        return Err(Error::OverlappingSupports);
    }
    let d = p.dim();
    let p0 = support_projector(p.rho0().matrix(), cfg)?;
    let p1 = support_projector(p.rho1().matrix(), cfg)?;
    let identity = ComplexMatrix::identity(d);
    let p0_perp = HermitianMatrix::symmetrize(&(&identity - p0.matrix()));
    let p1_perp = HermitianMatrix::symmetrize(&(&identity - p1.matrix()));

    // Parallel addition of two projectors has eigenvalue ~1/2 on the
    // intersection of their ranges and ~0 elsewhere.
    let (t0_proj, t0) = projector_above(&parallel_add(&p0, &p1_perp, cfg)?, 0.25, cfg)?;
    let (t1_proj, t1) = projector_above(&parallel_add(&p1, &p0_perp, cfg)?, 0.25, cfg)?;
    if t0 == 0 && t1 == 0 {
        return identity_reduction(p, cfg);
    }
    if t0 + t1 >= d {
        return Err(Error::ZeroFidelity);
    }

    let mut blocks = BlockBasis::new();
    blocks.push_projector_range(&t0_proj, cfg)?;
    blocks.push_projector_range(&t1_proj, cfg)?;
    let kept_proj = HermitianMatrix::symmetrize(
        &(&(&identity - t0_proj.matrix()) - t1_proj.matrix()),
    );
    blocks.push_projector_range(&kept_proj, cfg)?;
    let basis = blocks.into_basis_change(d, cfg)?;

    let keep_from = t0 + t1;
    let (rho0r, w0) = match compress_state(p.rho0(), &basis, keep_from, cfg) {
        Err(Error::FullyOverlapping) => return Err(Error::ZeroFidelity),
        other => other?,
    };
    let (rho1r, w1) = match compress_state(p.rho1(), &basis, keep_from, cfg) {
        Err(Error::FullyOverlapping) => return Err(Error::ZeroFidelity),
        other => other?,
    };

    let kept = p.eta0() * w0 + p.eta1() * w1;
    let reduced = UsdProblem::new(
        rho0r,
        rho1r,
        p.eta0() * w0 / kept,
        p.eta1() * w1 / kept,
        cfg,
    )?;
    let sigma = &(reduced.rho0().matrix().clone()) + reduced.rho1().matrix();
    let sigma_inv = pinv_psd(&sigma, cfg)?;

    Ok(ReductionResult {
        reduced,
        common_dim: 0,
        trimmed_dims: (t0, t1),
        basis_change: basis,
        sigma_inv,
        retained_weights: (w0, w1),
        lift_fail: 0.0,
        lift_keep: kept,
    })
}

/// `|ρ₀' Σ'⁻¹ ρ₁'|_max` for the reduced problem: zero certifies that the
/// supports intersect trivially and the POVM algebra applies.
pub fn certify_corollary1(r: &ReductionResult) -> f64 {
    let product = &(r.reduced.rho0().matrix().matrix() * r.sigma_inv.matrix())
        * r.reduced.rho1().matrix().matrix();
    product.max_abs()
}
