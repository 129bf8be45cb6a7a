//! Spectral operations with the crate's tolerance policy: PSD square roots,
//! pseudo-inverses, support projectors, polar decomposition, trace norm and
//! parallel addition.

use crate::error::{Error, Result};
use crate::matlin::eig::{eig_hermitian, spectral_rebuild, EigH};
use crate::matlin::matrix::{C64, ComplexMatrix, HermitianMatrix, NumericConfig, UnitaryMatrix};
use crate::matlin::svd::svd;

/// Checked symmetrization `(A + A†)/2`; see [`HermitianMatrix::hermitize`].
pub fn hermitize(m: &ComplexMatrix, cfg: &NumericConfig) -> Result<HermitianMatrix> {
    HermitianMatrix::hermitize(m, cfg)
}

/// Reject spectra with an eigenvalue below `-tol_psd · λ_abs_max`.
fn require_psd(eig: &EigH, cfg: &NumericConfig) -> Result<()> {
    let threshold = -cfg.tol_psd * eig.spectral_radius();
    let min = eig.min_eigenvalue();
    if min < threshold {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
            threshold,
        });
    }
    Ok(())
}

/// PSD square root. Eigenvalues in `[-tol_psd·λ_max, 0)` are rounding noise
/// of a genuinely PSD input and are clipped to zero; so are positives below
/// the `tol_rank` support cutoff — the square root turns an eigenvalue
/// noise floor of `ε·λ_max` into a `√ε`-sized error on the kernel, which
/// would dwarf everything else downstream.
pub fn sqrt_psd(a: &HermitianMatrix, cfg: &NumericConfig) -> Result<HermitianMatrix> {
    let eig = eig_hermitian(a, cfg)?;
    require_psd(&eig, cfg)?;
    let cutoff = cfg.tol_rank * eig.spectral_radius();
    Ok(spectral_rebuild(&eig, |v| {
        if v > cutoff {
            crate::math::sqrt(v)
        } else {
            0.0
        }
    }))
}

/// Moore–Penrose pseudo-inverse of a PSD matrix: eigenvalues at or below
/// `tol_rank · λ_max` count as zero and stay zero.
pub fn pinv_psd(a: &HermitianMatrix, cfg: &NumericConfig) -> Result<HermitianMatrix> {
    let eig = eig_hermitian(a, cfg)?;
    require_psd(&eig, cfg)?;
    let cutoff = cfg.tol_rank * eig.spectral_radius();
    Ok(spectral_rebuild(&eig, |v| {
        if v > cutoff {
            1.0 / v
        } else {
            0.0
        }
    }))
}

/// Orthogonal projector onto the numerical support of a PSD matrix.
pub fn support_projector(a: &HermitianMatrix, cfg: &NumericConfig) -> Result<HermitianMatrix> {
    let eig = eig_hermitian(a, cfg)?;
    require_psd(&eig, cfg)?;
    let cutoff = cfg.tol_rank * eig.spectral_radius();
    Ok(spectral_rebuild(&eig, |v| if v > cutoff { 1.0 } else { 0.0 }))
}

/// Number of eigenvalues above `tol_rank · λ_abs_max`.
pub fn numerical_rank(a: &HermitianMatrix, cfg: &NumericConfig) -> Result<usize> {
    let eig = eig_hermitian(a, cfg)?;
    let cutoff = cfg.tol_rank * eig.spectral_radius();
    Ok(eig.values.iter().filter(|&&v| v > cutoff).count())
}

/// Polar decomposition `A = |A| V` with `|A| = √(AA†)` PSD and `V` unitary.
///
/// `V = U Y†` from the SVD `A = U diag(σ) Y†`, singular vectors paired by
/// index including zero singular values, so the completion on the kernel of
/// `A` is the deterministic one fixed in [`svd`](crate::matlin::svd::svd).
pub fn polar_decompose(
    a: &ComplexMatrix,
    cfg: &NumericConfig,
) -> Result<(HermitianMatrix, UnitaryMatrix)> {
    let s = svd(a, cfg)?;
    let abs_a = HermitianMatrix::from_lower(a.dim(), |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for (k, &sigma) in s.singular_values.iter().enumerate() {
            if sigma != 0.0 {
                acc += s.u[(i, k)] * s.u[(j, k)].conj() * sigma;
            }
        }
        acc
    });
    let v = UnitaryMatrix::new(s.u.matrix() * &s.v.adjoint().into_matrix(), cfg)?;
    Ok((abs_a, v))
}

/// Trace norm `Tr √(AA†)`, the sum of singular values.
pub fn trace_norm(a: &ComplexMatrix, cfg: &NumericConfig) -> Result<f64> {
    Ok(svd(a, cfg)?.singular_values.iter().sum())
}

/// Parallel addition `A : B = A (A + B)⁻¹ B` of two PSD matrices. Its
/// support is the intersection of the supports of `A` and `B`.
pub fn parallel_add(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    cfg: &NumericConfig,
) -> Result<HermitianMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    require_psd(&eig_hermitian(a, cfg)?, cfg)?;
    require_psd(&eig_hermitian(b, cfg)?, cfg)?;
    let sum_inv = pinv_psd(&(a + b), cfg)?;
    let product = &(a.matrix() * sum_inv.matrix()) * b.matrix();
    // Hermitian by algebra (A(A+B)⁻¹B = B - B(A+B)⁻¹B for PSD A, B); only
    // rounding noise is discarded here.
    Ok(HermitianMatrix::symmetrize(&product))
}

/// `X M X†` for Hermitian `M`, Hermitian by construction.
pub(crate) fn sandwich(x: &ComplexMatrix, m: &HermitianMatrix) -> HermitianMatrix {
    let g = x * m.matrix();
    let d = x.dim();
    HermitianMatrix::from_lower(d, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..d {
            acc += g[(i, k)] * x[(j, k)].conj();
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> NumericConfig {
        NumericConfig::default()
    }

    fn random_complex(dim: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ComplexMatrix::from_fn(dim, |_, _| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        })
    }

    fn random_psd(dim: usize, rank: usize, seed: u64) -> HermitianMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut factor = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..rank {
                factor[(i, j)] = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
        }
        sandwich(&factor, &HermitianMatrix::identity(dim))
    }

    #[test]
    fn sqrt_of_diagonal() {
        let s = sqrt_psd(&HermitianMatrix::diagonal(&[4.0, 9.0]), &cfg()).unwrap();
        assert!((s[(0, 0)].re - 2.0).abs() < 1e-14);
        assert!((s[(1, 1)].re - 3.0).abs() < 1e-14);
        assert!(s[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn sqrt_of_scaled_identity() {
        let half = HermitianMatrix::identity(2).scale(0.5);
        let s = sqrt_psd(&half, &cfg()).unwrap();
        let expected = 0.5f64.sqrt();
        assert!((s[(0, 0)].re - expected).abs() < 1e-15);
        assert!((s[(1, 1)].re - expected).abs() < 1e-15);
    }

    #[test]
    fn sqrt_round_trip_on_random_psd() {
        for seed in 0..6 {
            let a = random_psd(5, 5, seed);
            let s = sqrt_psd(&a, &cfg()).unwrap();
            let back = sandwich(s.matrix(), &HermitianMatrix::identity(5));
            let err = (back.matrix() - a.matrix()).max_abs();
            assert!(err <= 1e-10, "seed {seed}: (√A)² error {err:.3e}");
        }
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let a = HermitianMatrix::diagonal(&[1.0, -0.5]);
        assert!(matches!(sqrt_psd(&a, &cfg()), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn pinv_of_rank_deficient_diagonal() {
        let p = pinv_psd(&HermitianMatrix::diagonal(&[2.0, 0.0]), &cfg()).unwrap();
        assert!((p[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!(p[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn pinv_identity() {
        let p = pinv_psd(&HermitianMatrix::identity(3), &cfg()).unwrap();
        assert!((p.matrix() - &ComplexMatrix::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn penrose_identities_on_random_rank_two() {
        for seed in 10..16 {
            let a = random_psd(4, 2, seed);
            let p = pinv_psd(&a, &cfg()).unwrap();
            let apa = &(a.matrix() * p.matrix()) * a.matrix();
            let pap = &(p.matrix() * a.matrix()) * p.matrix();
            assert!((&apa - a.matrix()).max_abs() <= 1e-10);
            assert!((&pap - p.matrix()).max_abs() <= 1e-10 * p.max_abs().max(1.0));
        }
    }

    #[test]
    fn support_of_diagonal() {
        let p = support_projector(&HermitianMatrix::diagonal(&[0.3, 0.0, 0.7]), &cfg()).unwrap();
        for (i, expected) in [1.0, 0.0, 1.0].into_iter().enumerate() {
            assert!((p[(i, i)].re - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn support_of_zero_matrix_is_zero() {
        let p = support_projector(&HermitianMatrix::zeros(3), &cfg()).unwrap();
        assert_eq!(p.max_abs(), 0.0);
    }

    #[test]
    fn support_is_idempotent_projector() {
        for seed in 20..26 {
            let a = random_psd(5, 3, seed);
            let p = support_projector(&a, &cfg()).unwrap();
            let p2 = p.matrix() * p.matrix();
            assert!((&p2 - p.matrix()).max_abs() <= 1e-12);
            assert!(p.matrix().hermitian_deviation() == 0.0);
            // P A = A on the support.
            let pa = p.matrix() * a.matrix();
            assert!((&pa - a.matrix()).max_abs() <= 1e-11 * a.max_abs().max(1.0));
        }
    }

    #[test]
    fn polar_of_unitary_is_identity_times_itself() {
        let c = cfg();
        // A simple unitary: swap with a phase.
        let a = ComplexMatrix::from_rows(
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        let (abs_a, v) = polar_decompose(&a, &c).unwrap();
        assert!((abs_a.matrix() - &ComplexMatrix::identity(2)).max_abs() < 1e-14);
        assert!((v.matrix() - &a).max_abs() < 1e-14);
    }

    #[test]
    fn polar_of_signed_diagonal() {
        let (abs_a, v) = polar_decompose(&ComplexMatrix::diagonal(&[2.0, -3.0]), &cfg()).unwrap();
        assert!((abs_a[(0, 0)].re - 2.0).abs() < 1e-14);
        assert!((abs_a[(1, 1)].re - 3.0).abs() < 1e-14);
        assert!((v[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!((v[(1, 1)].re + 1.0).abs() < 1e-14);
    }

    #[test]
    fn polar_reconstructs_random_matrices() {
        for seed in 30..36 {
            let a = random_complex(4, seed);
            let (abs_a, v) = polar_decompose(&a, &cfg()).unwrap();
            let back = abs_a.matrix() * v.matrix();
            assert!((&back - &a).max_abs() <= 1e-10);
            // |A| = V √(A†A) V† (Lemma form).
            let right = sqrt_psd(
                &HermitianMatrix::symmetrize(&(&a.adjoint() * &a)),
                &cfg(),
            )
            .unwrap();
            let lifted = sandwich(v.matrix(), &right);
            assert!((lifted.matrix() - abs_a.matrix()).max_abs() <= 1e-10);
        }
    }

    #[test]
    fn trace_norm_examples() {
        let c = cfg();
        assert!((trace_norm(&ComplexMatrix::identity(4), &c).unwrap() - 4.0).abs() < 1e-13);
        assert!((trace_norm(&ComplexMatrix::diagonal(&[1.0, -2.0]), &c).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn parallel_add_identities() {
        let c = cfg();
        let half = parallel_add(
            &HermitianMatrix::identity(2),
            &HermitianMatrix::identity(2),
            &c,
        )
        .unwrap();
        assert!((half.matrix() - &ComplexMatrix::identity(2).scale(0.5)).max_abs() < 1e-14);
    }

    #[test]
    fn parallel_add_orthogonal_supports_vanishes() {
        let c = cfg();
        let a = HermitianMatrix::diagonal(&[1.0, 0.0]);
        let b = HermitianMatrix::diagonal(&[0.0, 1.0]);
        let ab = parallel_add(&a, &b, &c).unwrap();
        assert!(ab.max_abs() <= 1e-12);
    }

    #[test]
    fn parallel_add_rank_matches_support_intersection() {
        let c = cfg();
        // Supports share exactly span{e0}.
        let mut a = ComplexMatrix::zeros(4);
        a[(0, 0)] = C64::new(1.0, 0.0);
        a[(1, 1)] = C64::new(0.5, 0.0);
        let mut b = ComplexMatrix::zeros(4);
        b[(0, 0)] = C64::new(0.7, 0.0);
        b[(2, 2)] = C64::new(0.3, 0.0);
        let ah = HermitianMatrix::hermitize(&a, &c).unwrap();
        let bh = HermitianMatrix::hermitize(&b, &c).unwrap();
        let ab = parallel_add(&ah, &bh, &c).unwrap();
        assert_eq!(numerical_rank(&ab, &c).unwrap(), 1);
    }

    #[test]
    fn parallel_add_is_symmetric() {
        let c = cfg();
        for seed in 40..44 {
            let a = random_psd(4, 3, seed);
            let b = random_psd(4, 2, seed + 100);
            let ab = parallel_add(&a, &b, &c).unwrap();
            let ba = parallel_add(&b, &a, &c).unwrap();
            assert!((ab.matrix() - ba.matrix()).max_abs() <= 1e-10);
        }
    }
}
