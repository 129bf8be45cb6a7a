//! Singular-value decomposition by one-sided Jacobi. Working directly on
//! the columns avoids forming A†A, so small singular values keep full
//! relative accuracy — this is what makes fidelity operators and trace norms
//! trustworthy near rank deficiency.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::matlin::matrix::{C64, ComplexMatrix, NumericConfig, UnitaryMatrix};

const MAX_SWEEPS: usize = 64;

/// `A = U diag(σ) V†` with σ descending and both factors full unitaries.
///
/// Singular vectors are paired by index even across zero singular values:
/// the kernel columns of `U` are completed deterministically from the
/// canonical basis, so downstream polar factors are reproducible.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: UnitaryMatrix,
    pub singular_values: Vec<f64>,
    pub v: UnitaryMatrix,
}

pub fn svd(a: &ComplexMatrix, cfg: &NumericConfig) -> Result<Svd> {
    cfg.validate()?;
    let d = a.dim();
    let mut w = a.clone();
    let mut y = ComplexMatrix::identity(d);

    let top_column_norm_sq: f64 = (0..d)
        .map(|j| (0..d).map(|i| w[(i, j)].norm_sqr()).sum())
        .fold(0.0, f64::max);
    if top_column_norm_sq > 0.0 {
        // A column whose norm has fallen this far below the dominant one
        // carries no resolvable singular value; orthogonalizing it against
        // rounding residue would cycle forever.
        let dead_sq = (d as f64) * (d as f64)
            * f64::EPSILON
            * f64::EPSILON
            * top_column_norm_sq;
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..d {
                for r in (p + 1)..d {
                    if orthogonalize_pair(&mut w, &mut y, p, r, dead_sq) {
                        rotated = true;
                    }
                }
            }
            if !rotated {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::ConvergenceFailure { sweeps: MAX_SWEEPS });
        }
    }

    // Column norms are the singular values; sort descending (stable).
    let mut norms: Vec<f64> = (0..d)
        .map(|j| math::sqrt((0..d).map(|i| w[(i, j)].norm_sqr()).sum()))
        .collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let w = ComplexMatrix::from_fn(d, |i, j| w[(i, order[j])]);
    let v = ComplexMatrix::from_fn(d, |i, j| y[(i, order[j])]);
    norms = order.iter().map(|&j| norms[j]).collect();

    // Normalize the range columns of U, complete the kernel columns.
    let sigma_max = norms[0];
    let cutoff = sigma_max * (d as f64) * f64::EPSILON;
    let mut u_cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    for (j, &sigma) in norms.iter().enumerate() {
        if sigma > cutoff {
            u_cols.push((0..d).map(|i| w[(i, j)].scale(1.0 / sigma)).collect());
        } else {
            u_cols.push(complete_column(&u_cols, d));
        }
    }
    let u = ComplexMatrix::from_fn(d, |i, j| u_cols[j][i]);

    Ok(Svd {
        u: UnitaryMatrix::new(u, cfg)?,
        singular_values: norms,
        v: UnitaryMatrix::new(v, cfg)?,
    })
}

/// Rotate columns p, r of `w` (mirrored into `y`) so they become orthogonal.
/// Returns false when the pair already is close enough — the inner product
/// of two near-orthogonal columns cannot be computed more accurately than
/// about `dim·ε` relative, so that is the orthogonality target.
fn orthogonalize_pair(
    w: &mut ComplexMatrix,
    y: &mut ComplexMatrix,
    p: usize,
    r: usize,
    dead_sq: f64,
) -> bool {
    let d = w.dim();
    let mut gpp = 0.0;
    let mut grr = 0.0;
    let mut gpr = C64::new(0.0, 0.0);
    for k in 0..d {
        let wp = w[(k, p)];
        let wr = w[(k, r)];
        gpp += wp.norm_sqr();
        grr += wr.norm_sqr();
        gpr += wp.conj() * wr;
    }
    if gpp <= dead_sq || grr <= dead_sq {
        return false;
    }
    let abs = gpr.norm();
    if abs <= (d as f64) * f64::EPSILON * math::sqrt(gpp * grr) {
        return false;
    }

    let phase = gpr.scale(1.0 / abs);
    let tau = (grr - gpp) / (2.0 * abs);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + math::sqrt(1.0 + tau * tau))
    };
    let c = 1.0 / math::sqrt(1.0 + t * t);
    let s = t * c;

    for k in 0..d {
        let wp = w[(k, p)];
        let wr = w[(k, r)];
        w[(k, p)] = wp.scale(c) - wr * phase.conj().scale(s);
        w[(k, r)] = wp * phase.scale(s) + wr.scale(c);
        let yp = y[(k, p)];
        let yr = y[(k, r)];
        y[(k, p)] = yp.scale(c) - yr * phase.conj().scale(s);
        y[(k, r)] = yp * phase.scale(s) + yr.scale(c);
    }
    true
}

/// Deterministic kernel completion: take the canonical basis vector with the
/// largest residual against the accepted columns, orthogonalize twice, and
/// normalize. First index wins ties.
fn complete_column(existing: &[Vec<C64>], d: usize) -> Vec<C64> {
    let mut best_k = 0;
    let mut best_norm = -1.0;
    for k in 0..d {
        let mut residual_sq = 1.0;
        for col in existing {
            residual_sq -= col[k].norm_sqr();
        }
        if residual_sq > best_norm + 1e-12 {
            best_norm = residual_sq;
            best_k = k;
        }
    }

    let mut v: Vec<C64> = (0..d)
        .map(|i| C64::new(if i == best_k { 1.0 } else { 0.0 }, 0.0))
        .collect();
    for _ in 0..2 {
        for col in existing {
            let overlap: C64 = col.iter().zip(v.iter()).map(|(c, x)| c.conj() * x).sum();
            for (vi, ci) in v.iter_mut().zip(col.iter()) {
                *vi -= ci * overlap;
            }
        }
    }
    let norm = math::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
    for z in v.iter_mut() {
        *z = z.scale(1.0 / norm);
    }
    v
}
