//! Generators for the concrete state families used throughout: pure pairs
//! with a given overlap, the coherent-state QKD pair and its geometrically
//! uniform relatives, the GU pair that defeats the bounds, and seeded
//! random instances.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::matlin::{C64, ComplexMatrix, HermitianMatrix, NumericConfig, UnitaryMatrix};
use crate::usd::DensityMatrix;

/// The four amplitudes of the coherent-state superposition basis; they must
/// be normalized, `Σ|cᵢ|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentCoeffs {
    c: [C64; 4],
}

impl CoherentCoeffs {
    pub fn new(c: [C64; 4], cfg: &NumericConfig) -> Result<Self> {
        let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > cfg.tol_equality {
            return Err(Error::BadNormalization { norm });
        }
        Ok(CoherentCoeffs { c })
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.c
    }
}

/// Two pure qubit states with `⟨ψ₀|ψ₁⟩ = s·e^{iφ}`.
pub fn pure_pair(
    overlap: f64,
    phase: f64,
    cfg: &NumericConfig,
) -> Result<(DensityMatrix, DensityMatrix)> {
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::InvalidParameter {
            what: "pure-pair overlap must lie in [0, 1]",
        });
    }
    let rho0 = DensityMatrix::from_pure(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], cfg)?;
    let head = C64::new(math::cos(phase), math::sin(phase)).scale(overlap);
    let tail = C64::new(math::sqrt(1.0 - overlap * overlap), 0.0);
    let rho1 = DensityMatrix::from_pure(&[head, tail], cfg)?;
    Ok((rho0, rho1))
}

fn coherent_rho0(c: &[C64; 4]) -> HermitianMatrix {
    HermitianMatrix::from_lower(4, |i, j| {
        if i == j {
            C64::new(c[i].norm_sqr(), 0.0)
        } else if (i, j) == (2, 0) || (i, j) == (3, 1) {
            c[i] * c[j].conj()
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// The phase-flip involution `diag(−1, −1, 1, 1)` relating the two
/// coherent-state mixtures.
pub fn coherent_qkd_involution() -> UnitaryMatrix {
    let cfg = NumericConfig::default();
    UnitaryMatrix::new(ComplexMatrix::diagonal(&[-1.0, -1.0, 1.0, 1.0]), &cfg)
        .expect("a diagonal sign matrix is unitary")
}

/// The two 4×4 mixtures of phase-opposite coherent states, as seen by an
/// eavesdropper on the four-state coherent QKD protocol: `ρ₀` with the
/// `c₀c₂*`, `c₁c₃*` coherences and `ρ₁ = Uρ₀U†` with the signs of those
/// coherences flipped.
pub fn coherent_qkd_pair(
    coeffs: &CoherentCoeffs,
    cfg: &NumericConfig,
) -> Result<(DensityMatrix, DensityMatrix)> {
    let rho0_mat = coherent_rho0(coeffs.amplitudes());
    let rho0 = DensityMatrix::new(rho0_mat.clone(), cfg)?;
    let u = coherent_qkd_involution();
    let rho1 = DensityMatrix::new(crate::matlin::sandwich(u.matrix(), &rho0_mat), cfg)?;
    Ok((rho0, rho1))
}

/// Closed-form fidelity of the coherent QKD pair as a function of the mean
/// photon number `|α|²`: `e^{−|α|²/2}(|cos(|α|²/2)| + |sin(|α|²/2)|)`.
pub fn coherent_fidelity(alpha_sq: f64) -> f64 {
    let half = alpha_sq / 2.0;
    math::exp(-half) * (math::cos(half).abs() + math::sin(half).abs())
}

/// The Hadamard-block involution of the counterexample pair.
pub fn counterexample_involution() -> UnitaryMatrix {
    let cfg = NumericConfig::default();
    let h = 1.0 / math::sqrt(2.0);
    let mut w = ComplexMatrix::zeros(4);
    for (i, j, v) in [
        (0, 0, h),
        (0, 1, h),
        (1, 0, h),
        (1, 1, -h),
        (2, 2, h),
        (2, 3, h),
        (3, 2, h),
        (3, 3, -h),
    ] {
        w[(i, j)] = C64::new(v, 0.0);
    }
    UnitaryMatrix::new(w, &cfg).expect("Hadamard blocks are unitary")
}

/// The geometrically uniform pair that cannot attain the fidelity bound at
/// equal priors: `ρ₀` built from `c = (√0.1, √0.4, √0.3, √0.2)` and
/// `ρ₁ = Wρ₀W†` with the Hadamard-block involution `W`. Its supports do not
/// overlap, yet `ρ₀ − F₀` and `ρ₁ − F₁` fail to be positive semi-definite.
pub fn counterexample_pair(cfg: &NumericConfig) -> (DensityMatrix, DensityMatrix) {
    let c = [
        C64::new(math::sqrt(0.1), 0.0),
        C64::new(math::sqrt(0.4), 0.0),
        C64::new(math::sqrt(0.3), 0.0),
        C64::new(math::sqrt(0.2), 0.0),
    ];
    let rho0_mat = coherent_rho0(&c);
    let w = counterexample_involution();
    let rho0 = DensityMatrix::new(rho0_mat.clone(), cfg)
        .expect("the fixed counterexample constants form a valid state");
    let rho1 = DensityMatrix::new(crate::matlin::sandwich(w.matrix(), &rho0_mat), cfg)
        .expect("conjugation by an involution preserves state validity");
    (rho0, rho1)
}

/// A geometrically uniform pair `(ρ₀, Uρ₀U†)` for an involution `U²  = 1`.
pub fn gu_pair(
    rho0: &DensityMatrix,
    u: &UnitaryMatrix,
    cfg: &NumericConfig,
) -> Result<(DensityMatrix, DensityMatrix)> {
    if u.dim() != rho0.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho0.dim(),
            found: u.dim(),
        });
    }
    let squared = u.matrix() * u.matrix();
    let deviation = (&squared - &ComplexMatrix::identity(u.dim())).max_abs();
    if deviation > cfg.tol_unitary {
        return Err(Error::NotInvolution { deviation });
    }
    let rho1 = DensityMatrix::new(crate::matlin::sandwich(u.matrix(), rho0.matrix()), cfg)?;
    Ok((rho0.clone(), rho1))
}

pub(crate) fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    math::sqrt(-2.0 * math::ln(u1)) * math::cos(2.0 * core::f64::consts::PI * u2)
}

pub(crate) fn complex_normal<R: Rng>(rng: &mut R) -> C64 {
    C64::new(standard_normal(rng), standard_normal(rng))
}

/// A random state of the requested numerical rank, deterministic per seed.
pub fn random_density(
    dim: usize,
    rank: usize,
    seed: u64,
    cfg: &NumericConfig,
) -> Result<DensityMatrix> {
    if rank < 1 || rank > dim {
        return Err(Error::InvalidParameter {
            what: "random_density needs 1 <= rank <= dim",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // ρ = BB† / Tr(BB†) for a dim×rank Gaussian factor, full rank a.s.
    let mut factor = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..rank {
            factor[(i, j)] = complex_normal(&mut rng);
        }
    }
    let gram = crate::matlin::sandwich(&factor, &HermitianMatrix::identity(dim));
    let trace = gram.trace_re();
    DensityMatrix::new(gram.scale(1.0 / trace), cfg)
}

/// A random problem whose supports intersect trivially: two random states
/// of ranks `rank0`, `rank1` with `rank0 + rank1 <= dim`, redrawn until the
/// rank-sum check passes (generic subspaces pass immediately).
pub fn random_nonoverlapping_problem(
    dim: usize,
    rank0: usize,
    rank1: usize,
    eta0: f64,
    seed: u64,
    cfg: &NumericConfig,
) -> Result<crate::usd::UsdProblem> {
    if rank0 + rank1 > dim {
        return Err(Error::InvalidParameter {
            what: "ranks must satisfy rank0 + rank1 <= dim",
        });
    }
    for attempt in 0..16u64 {
        let base = seed.wrapping_add(attempt.wrapping_mul(0x632b_e5ab));
        let rho0 = random_density(dim, rank0, base, cfg)?;
        let rho1 = random_density(dim, rank1, base ^ 0xdead_beef, cfg)?;
        let p = crate::usd::UsdProblem::new(rho0, rho1, eta0, 1.0 - eta0, cfg)?;
        if crate::reduce::rank_sum_check(&p, cfg)? {
            return Ok(p);
        }
    }
    Err(Error::InvalidParameter {
        what: "could not draw a non-overlapping pair; ranks too close to dim",
    })
}

/// A Haar-ish random unitary from Gram–Schmidt on a Gaussian matrix,
/// deterministic per seed.
pub fn random_unitary(dim: usize, seed: u64) -> UnitaryMatrix {
    let cfg = NumericConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: alloc::vec::Vec<alloc::vec::Vec<C64>> = alloc::vec::Vec::new();
    for _ in 0..dim {
        let mut v: alloc::vec::Vec<C64> = (0..dim).map(|_| complex_normal(&mut rng)).collect();
        for _ in 0..2 {
            for col in &cols {
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
        cols.push(v);
    }
    let m = ComplexMatrix::from_fn(dim, |i, j| cols[j][i]);
    UnitaryMatrix::new(m, &cfg).expect("Gram-Schmidt output is unitary")
}

/// A random unitary involution `Q diag(±1) Q†`, deterministic per seed.
pub fn random_involution(dim: usize, seed: u64) -> UnitaryMatrix {
    let cfg = NumericConfig::default();
    let q = random_unitary(dim, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let signs: alloc::vec::Vec<f64> = (0..dim)
        .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
        .collect();
    let d = ComplexMatrix::diagonal(&signs);
    let m = &(q.matrix() * &d) * &q.adjoint().into_matrix();
    UnitaryMatrix::new(m, &cfg).expect("conjugated sign matrix is unitary")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::{numerical_rank, support_projector};
    use crate::usd::{check_saturation, fidelity_data, UsdProblem};

    fn cfg() -> NumericConfig {
        NumericConfig::default()
    }

    /// Coefficients grouping a coherent state's Fock amplitudes by photon
    /// number mod 4, for mean photon number `m`:
    /// `c_k² = e^{−m} Σ_n m^{4n+k}/(4n+k)!`. Test-only oracle; the library
    /// takes the coefficients as inputs. A pair generated from these has
    /// fidelity `e^{−m}(|cos m| + |sin m|) = coherent_fidelity(2m)`, i.e.
    /// the closed form's `|α|²` corresponds to mean photon number `|α|²/2`.
    fn coherent_coeffs_for(mean_photon: f64) -> CoherentCoeffs {
        let mut sums = [0.0f64; 4];
        let mut term = 1.0; // m^k / k!
        for k in 0..80 {
            if k > 0 {
                term *= mean_photon / k as f64;
            }
            sums[k % 4] += term;
        }
        let scale = math::exp(-mean_photon);
        let c = sums.map(|s| C64::new(math::sqrt(scale * s), 0.0));
        CoherentCoeffs::new(c, &cfg()).expect("series sums to e^{m}")
    }

    #[test]
    fn pure_pair_overlap_matches_fidelity() {
        let c = cfg();
        for s in [0.0, 0.8, 1.0] {
            let (rho0, rho1) = pure_pair(s, 0.0, &c).unwrap();
            let p = UsdProblem::new(rho0, rho1, 0.5, 0.5, &c).unwrap();
            let fd = fidelity_data(&p, &c).unwrap();
            assert!((fd.fidelity - s).abs() < 1e-12, "s = {s}");
        }
        assert!(pure_pair(1.5, 0.0, &c).is_err());
    }

    #[test]
    fn pure_pair_phase_does_not_change_fidelity() {
        let c = cfg();
        let (rho0, rho1) = pure_pair(0.6, 1.234, &c).unwrap();
        let p = UsdProblem::new(rho0, rho1, 0.5, 0.5, &c).unwrap();
        let fd = fidelity_data(&p, &c).unwrap();
        assert!((fd.fidelity - 0.6).abs() < 1e-12);
    }

    #[test]
    fn coherent_pair_structure() {
        let c = cfg();
        let half = C64::new(0.5, 0.0);
        let coeffs = CoherentCoeffs::new([half; 4], &c).unwrap();
        let (rho0, rho1) = coherent_qkd_pair(&coeffs, &c).unwrap();
        assert!((rho0.matrix().trace_re() - 1.0).abs() < 1e-14);
        assert!((rho1.matrix().trace_re() - 1.0).abs() < 1e-14);
        // They differ exactly in the sign of the (0,2) and (1,3) coherences.
        for (i, j) in [(0usize, 2usize), (1, 3)] {
            let a = rho0.matrix()[(i, j)];
            let b = rho1.matrix()[(i, j)];
            assert!((a + b).norm() < 1e-15);
            assert!(a.norm() > 0.1);
        }
        for i in 0..4 {
            assert!((rho0.matrix()[(i, i)] - rho1.matrix()[(i, i)]).norm() < 1e-15);
        }
    }

    #[test]
    fn coherent_coeffs_reject_unnormalized() {
        let c = cfg();
        let bad = [C64::new(0.5, 0.0); 3];
        let mut four = [C64::new(0.9, 0.0); 4];
        four[..3].copy_from_slice(&bad);
        assert!(matches!(
            CoherentCoeffs::new(four, &c),
            Err(Error::BadNormalization { .. })
        ));
    }

    #[test]
    fn coherent_pair_saturates_at_equal_priors() {
        let c = cfg();
        for mean_photon in [0.5, 1.0, 2.0] {
            let coeffs = coherent_coeffs_for(mean_photon);
            let (rho0, rho1) = coherent_qkd_pair(&coeffs, &c).unwrap();
            let p = UsdProblem::new(rho0, rho1, 0.5, 0.5, &c).unwrap();
            let check = check_saturation(&p, &c).unwrap();
            assert!(check.saturated, "mean photon number {mean_photon}");
        }
    }

    #[test]
    fn coherent_pair_with_complex_phases() {
        let c = cfg();
        let base = coherent_coeffs_for(0.5);
        let phased: [C64; 4] = core::array::from_fn(|k| {
            let phi = 0.7 * (k as f64 + 1.0);
            base.amplitudes()[k] * C64::new(math::cos(phi), math::sin(phi))
        });
        let coeffs = CoherentCoeffs::new(phased, &c).unwrap();
        let (rho0, rho1) = coherent_qkd_pair(&coeffs, &c).unwrap();

        // Still the same geometrically uniform structure.
        let u = coherent_qkd_involution();
        let conjugated = crate::matlin::sandwich(u.matrix(), rho0.matrix());
        assert!((conjugated.matrix() - rho1.matrix().matrix()).max_abs() < 1e-15);

        // The block overlaps are |c_i|²-differences, so phases move neither
        // the fidelity nor the saturation verdict at equal priors.
        let p = UsdProblem::new(rho0, rho1, 0.5, 0.5, &c).unwrap();
        let fd = fidelity_data(&p, &c).unwrap();
        assert!((fd.fidelity - coherent_fidelity(1.0)).abs() < 1e-10);
        assert!(check_saturation(&p, &c).unwrap().saturated);
    }

    #[test]
    fn coherent_pair_fails_the_looser_outer_condition() {
        // In the outer regimes the looser bound needs ρ₁ = F₁/F exactly,
        // which a genuinely mixed pair does not satisfy.
        let c = cfg();
        let (rho0, rho1) = coherent_qkd_pair(&coherent_coeffs_for(0.5), &c).unwrap();
        let p = UsdProblem::new(rho0, rho1, 0.8, 0.2, &c).unwrap();
        let check = crate::usd::check_rudolph_saturation(&p, &c).unwrap();
        assert!(!check.saturated);
    }

    #[test]
    fn coherent_pair_needs_no_trimming() {
        let c = cfg();
        let (rho0, rho1) = coherent_qkd_pair(&coherent_coeffs_for(0.5), &c).unwrap();
        let p = UsdProblem::new(rho0, rho1, 0.5, 0.5, &c).unwrap();
        let r = crate::reduce::orthogonal_trim(&p, &c).unwrap();
        assert_eq!(r.trimmed_dims, (0, 0));
        assert_eq!(
            numerical_rank(r.reduced.rho0().matrix(), &c).unwrap()
                + numerical_rank(r.reduced.rho1().matrix(), &c).unwrap(),
            4
        );
    }

    #[test]
    fn coherent_fidelity_closed_form() {
        assert!((coherent_fidelity(0.0) - 1.0).abs() < 1e-15);
        let at_pi = coherent_fidelity(core::f64::consts::PI);
        let expected = math::exp(-core::f64::consts::PI / 2.0);
        assert!((at_pi - expected).abs() < 1e-12);
    }

    #[test]
    fn coherent_fidelity_matches_generated_pair() {
        let c = cfg();
        for alpha_sq in [0.5, 1.0, 2.0] {
            let coeffs = coherent_coeffs_for(alpha_sq / 2.0);
            let (rho0, rho1) = coherent_qkd_pair(&coeffs, &c).unwrap();
            let p = UsdProblem::new(rho0, rho1, 0.5, 0.5, &c).unwrap();
            let fd = fidelity_data(&p, &c).unwrap();
            let closed = coherent_fidelity(alpha_sq);
            assert!(
                (fd.fidelity - closed).abs() < 1e-8,
                "alpha_sq = {alpha_sq}: {} vs {closed}",
                fd.fidelity
            );
        }
    }

    #[test]
    fn counterexample_involution_squares_to_identity() {
        let w = counterexample_involution();
        let sq = w.matrix() * w.matrix();
        assert!((&sq - &ComplexMatrix::identity(4)).max_abs() < 1e-15);
    }

    #[test]
    fn counterexample_fails_saturation_at_equal_priors() {
        let c = cfg();
        let (rho0, rho1) = counterexample_pair(&c);
        let p = UsdProblem::new(rho0, rho1, 0.5, 0.5, &c).unwrap();
        assert!(crate::reduce::rank_sum_check(&p, &c).unwrap());
        let check = check_saturation(&p, &c).unwrap();
        assert!(!check.saturated);
        assert!(check.cond0_min_eig.min(check.cond1_min_eig) < -1e-6);
    }

    #[test]
    fn gu_pair_identity_and_coherent_flip() {
        let c = cfg();
        let coeffs = CoherentCoeffs::new([C64::new(0.5, 0.0); 4], &c).unwrap();
        let (rho0, expected_rho1) = coherent_qkd_pair(&coeffs, &c).unwrap();

        let (a, b) = gu_pair(&rho0, &UnitaryMatrix::identity(4), &c).unwrap();
        assert_eq!(a.matrix().matrix(), b.matrix().matrix());

        let (_, rho1) = gu_pair(&rho0, &coherent_qkd_involution(), &c).unwrap();
        assert!(
            (rho1.matrix().matrix() - expected_rho1.matrix().matrix()).max_abs() < 1e-14
        );
    }

    #[test]
    fn gu_pair_rejects_non_involution() {
        let c = cfg();
        let (rho0, _) = pure_pair(0.5, 0.0, &c).unwrap();
        // A 90° rotation is unitary but squares to −1.
        let rot = UnitaryMatrix::new(
            ComplexMatrix::from_rows(
                2,
                &[
                    C64::new(0.0, 0.0),
                    C64::new(-1.0, 0.0),
                    C64::new(1.0, 0.0),
                    C64::new(0.0, 0.0),
                ],
            ),
            &c,
        )
        .unwrap();
        assert!(matches!(
            gu_pair(&rho0, &rot, &c),
            Err(Error::NotInvolution { .. })
        ));
    }

    #[test]
    fn gu_fidelity_is_symmetric_and_spectra_agree() {
        let c = cfg();
        let rho0 = random_density(4, 2, 11, &c).unwrap();
        let u = random_involution(4, 12);
        let (a, b) = gu_pair(&rho0, &u, &c).unwrap();
        let spec_a = crate::matlin::eig_hermitian(a.matrix(), &c).unwrap().values;
        let spec_b = crate::matlin::eig_hermitian(b.matrix(), &c).unwrap().values;
        for (x, y) in spec_a.iter().zip(spec_b.iter()) {
            assert!((x - y).abs() < 1e-11);
        }
        let forward = UsdProblem::new(a.clone(), b.clone(), 0.5, 0.5, &c).unwrap();
        let backward = UsdProblem::new(b, a, 0.5, 0.5, &c).unwrap();
        let ff = fidelity_data(&forward, &c).unwrap().fidelity;
        let fb = fidelity_data(&backward, &c).unwrap().fidelity;
        assert!((ff - fb).abs() < 1e-10);
    }

    #[test]
    fn random_density_rank_and_determinism() {
        let c = cfg();
        let one = random_density(1, 1, 3, &c).unwrap();
        assert!((one.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);

        let rho = random_density(4, 2, 5, &c).unwrap();
        let proj = support_projector(rho.matrix(), &c).unwrap();
        assert!((proj.trace_re() - 2.0).abs() < 1e-9);
        assert_eq!(numerical_rank(rho.matrix(), &c).unwrap(), 2);

        let again = random_density(4, 2, 5, &c).unwrap();
        assert_eq!(rho.matrix().matrix(), again.matrix().matrix());
    }

    #[test]
    fn random_unitary_and_involution_are_what_they_claim() {
        let u = random_unitary(5, 9);
        assert!(UnitaryMatrix::unitary_deviation(u.matrix()) < 1e-12);
        let v = random_involution(5, 10);
        let sq = v.matrix() * v.matrix();
        assert!((&sq - &ComplexMatrix::identity(5)).max_abs() < 1e-11);
    }
}
