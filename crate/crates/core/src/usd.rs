//! Unambiguous discrimination of two density matrices: fidelity data,
//! regime classification, failure-probability lower bounds, the
//! necessary-and-sufficient saturation conditions, the explicit optimal
//! POVM, and the minimum-error benchmark.
//!
//! The failure probability of any unambiguous measurement obeys
//! `Q₀Q₁ ≥ η₀η₁F²`, which yields a three-regime lower bound on
//! `Q = Q₀ + Q₁` depending on where `√(η₁/η₀)` falls relative to
//! `Tr(P₁ρ₀)/F` and `F/Tr(P₀ρ₁)`. The bound of a regime is attainable iff
//! `ρ₀ − αF₀` and `ρ₁ − (1/α)F₁` are positive semi-definite for that
//! regime's `α`, in which case [`build_povm`] constructs the measurement
//! realizing it in closed form.

use crate::error::{Error, Result};
use crate::math;
use crate::matlin::{
    eig_hermitian, pinv_psd, sandwich, sqrt_psd, support_projector, svd, trace_norm,
    C64, ComplexMatrix, HermitianMatrix, NumericConfig, UnitaryMatrix,
};
use crate::reduce;

/// A trace-one positive semi-definite Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: HermitianMatrix,
}

impl DensityMatrix {
    /// Validate positivity (within `tol_psd`) and unit trace (within
    /// `tol_equality`).
    pub fn new(mat: HermitianMatrix, cfg: &NumericConfig) -> Result<Self> {
        let trace = mat.trace_re();
        if (trace - 1.0).abs() > cfg.tol_equality {
            return Err(Error::InvalidTrace { trace });
        }
        let eig = eig_hermitian(&mat, cfg)?;
        let threshold = -cfg.tol_psd * eig.spectral_radius();
        let min = eig.min_eigenvalue();
        if min < threshold {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
                threshold,
            });
        }
        Ok(DensityMatrix { mat })
    }

    /// Hermitize a raw matrix, then validate it as a state.
    pub fn from_matrix(m: &ComplexMatrix, cfg: &NumericConfig) -> Result<Self> {
        Self::new(HermitianMatrix::hermitize(m, cfg)?, cfg)
    }

    /// Rank-one state from a (not necessarily normalized) amplitude vector.
    pub fn from_pure(amplitudes: &[C64], cfg: &NumericConfig) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::InvalidParameter {
                what: "pure-state amplitudes must not all vanish",
            });
        }
        let d = amplitudes.len();
        let mat = HermitianMatrix::from_lower(d, |i, j| {
            amplitudes[i] * amplitudes[j].conj() / norm_sq
        });
        Self::new(mat, cfg)
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }
}

/// A pair of states with a priori probabilities. Priors must lie in (0, 1)
/// and sum to one within `tol_equality`; anything else is rejected rather
/// than silently renormalized.
#[derive(Debug, Clone)]
pub struct UsdProblem {
    rho0: DensityMatrix,
    rho1: DensityMatrix,
    eta0: f64,
    eta1: f64,
}

impl UsdProblem {
    pub fn new(
        rho0: DensityMatrix,
        rho1: DensityMatrix,
        eta0: f64,
        eta1: f64,
        cfg: &NumericConfig,
    ) -> Result<Self> {
        if rho0.dim() != rho1.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho0.dim(),
                found: rho1.dim(),
            });
        }
        let in_range = |e: f64| e > 0.0 && e < 1.0;
        if !in_range(eta0) || !in_range(eta1) || (eta0 + eta1 - 1.0).abs() > cfg.tol_equality {
            return Err(Error::InvalidPriors { eta0, eta1 });
        }
        Ok(UsdProblem {
            rho0,
            rho1,
            eta0,
            eta1,
        })
    }

    pub fn rho0(&self) -> &DensityMatrix {
        &self.rho0
    }

    pub fn rho1(&self) -> &DensityMatrix {
        &self.rho1
    }

    pub fn eta0(&self) -> f64 {
        self.eta0
    }

    pub fn eta1(&self) -> f64 {
        self.eta1
    }

    pub fn dim(&self) -> usize {
        self.rho0.dim()
    }

    /// `√(η₁/η₀)`, the quantity the regime thresholds compare against.
    pub fn prior_ratio_sqrt(&self) -> f64 {
        math::sqrt(self.eta1 / self.eta0)
    }
}

/// Fidelity scalar and operators from the polar decomposition
/// `√ρ₀ √ρ₁ = F₀ V = V F₁`.
#[derive(Debug, Clone)]
pub struct FidelityData {
    /// `F = Tr √(√ρ₀ ρ₁ √ρ₀) = Tr(F₀) = Tr(F₁)`, in [0, 1].
    pub fidelity: f64,
    /// `F₀ = √(√ρ₀ ρ₁ √ρ₀)`.
    pub f0: HermitianMatrix,
    /// `F₁ = √(√ρ₁ ρ₀ √ρ₁) = V† F₀ V`.
    pub f1: HermitianMatrix,
    /// The canonical SVD-completed unitary of the polar decomposition.
    pub polar_v: UnitaryMatrix,
}

/// Support projectors and the cross overlaps `Tr(P₁ρ₀)`, `Tr(P₀ρ₁)`.
#[derive(Debug, Clone)]
pub struct OverlapData {
    pub p0: HermitianMatrix,
    pub p1: HermitianMatrix,
    pub tr_p1_rho0: f64,
    pub tr_p0_rho1: f64,
}

/// Where `√(η₁/η₀)` falls relative to the two thresholds `Tr(P₁ρ₀)/F` and
/// `F/Tr(P₀ρ₁)`. Boundary variants flag a ratio within `tol_equality` of a
/// threshold, where the α of both sides coincides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    First,
    Second,
    Third,
    BoundaryFirstSecond,
    BoundarySecondThird,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::First => "first",
            Regime::Second => "second",
            Regime::Third => "third",
            Regime::BoundaryFirstSecond => "boundary-first-second",
            Regime::BoundarySecondThird => "boundary-second-third",
        }
    }
}

impl core::fmt::Display for Regime {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The regime's lower bound on the failure probability together with the
/// partial failure probabilities at the bound and the two benchmarks.
#[derive(Debug, Clone)]
pub struct BoundsReport {
    pub regime: Regime,
    /// The proportionality constant of the equality condition; `Q₀ = αη₀F`.
    pub alpha: f64,
    /// Lower bound on `Q = Q₀ + Q₁`.
    pub q_bound: f64,
    pub q0_at_bound: f64,
    pub q1_at_bound: f64,
    /// The looser fidelity bound with thresholds `F` and `1/F`.
    pub rudolph_bound: f64,
    /// Minimum-error benchmark `½(1 − Tr|η₁ρ₁ − η₀ρ₀|)`.
    pub helstrom_q: f64,
}

/// The two operators whose positivity decides attainability, with their
/// minimal eigenvalues as margins.
#[derive(Debug, Clone)]
pub struct SaturationCheck {
    /// `ρ₀ − α F₀`.
    pub cond0_matrix: HermitianMatrix,
    /// `ρ₁ − (1/α) F₁`.
    pub cond1_matrix: HermitianMatrix,
    pub cond0_min_eig: f64,
    pub cond1_min_eig: f64,
    pub saturated: bool,
}

/// The three-outcome unambiguous measurement `{E₀, E₁, E?}`.
#[derive(Debug, Clone)]
pub struct UsdPovm {
    pub e0: HermitianMatrix,
    pub e1: HermitianMatrix,
    /// The inconclusive element `E?`.
    pub e_inc: HermitianMatrix,
}

impl UsdPovm {
    /// Check the three defining properties: every element PSD within
    /// `tol_psd`, the elements sum to the identity within `tol_equality`,
    /// and conclusive outcomes never fire on the wrong state.
    pub fn validate(&self, p: &UsdProblem, cfg: &NumericConfig) -> Result<()> {
        let d = p.dim();
        for (element, name) in [
            (&self.e0, "E0 has wrong dimension"),
            (&self.e1, "E1 has wrong dimension"),
            (&self.e_inc, "E? has wrong dimension"),
        ] {
            if element.dim() != d {
                return Err(Error::InvalidPovm { reason: name });
            }
        }
        for (element, name) in [
            (&self.e0, "E0 is not positive semi-definite"),
            (&self.e1, "E1 is not positive semi-definite"),
            (&self.e_inc, "E? is not positive semi-definite"),
        ] {
            let eig = eig_hermitian(element, cfg)?;
            if eig.min_eigenvalue() < -cfg.tol_psd * eig.spectral_radius().max(1.0) {
                return Err(Error::InvalidPovm { reason: name });
            }
        }
        let sum = &(&self.e0 + &self.e1) + &self.e_inc;
        if (sum.matrix() - &ComplexMatrix::identity(d)).max_abs() > cfg.tol_equality {
            return Err(Error::InvalidPovm {
                reason: "elements do not sum to the identity",
            });
        }
        let cross0 = (self.e0.matrix() * p.rho1.matrix().matrix()).trace().norm();
        let cross1 = (self.e1.matrix() * p.rho0.matrix().matrix()).trace().norm();
        if cross0 > cfg.tol_equality || cross1 > cfg.tol_equality {
            return Err(Error::InvalidPovm {
                reason: "conclusive element fires on the wrong state",
            });
        }
        Ok(())
    }
}

/// Failure probabilities of a measurement on a problem.
#[derive(Debug, Clone, Copy)]
pub struct FailureProbs {
    /// `η₀ Tr(E? ρ₀)`.
    pub q0: f64,
    /// `η₁ Tr(E? ρ₁)`.
    pub q1: f64,
    /// `q0 + q1`.
    pub q: f64,
}

/// Fidelity scalar, fidelity operators and the canonical polar unitary.
///
/// Computed from the SVD `√ρ₀√ρ₁ = U Σ Y†`: `F₀ = UΣU†`, `F₁ = YΣY†`,
/// `V = UY†` and `F = Σσᵢ`. This keeps `Tr F₀ = Tr F₁ = F` exact and avoids
/// the precision loss of re-rooting the triple product.
pub fn fidelity_data(p: &UsdProblem, cfg: &NumericConfig) -> Result<FidelityData> {
    let sq0 = sqrt_psd(p.rho0.matrix(), cfg)?;
    let sq1 = sqrt_psd(p.rho1.matrix(), cfg)?;
    let cross = sq0.matrix() * sq1.matrix();
    let dec = svd(&cross, cfg)?;

    let mut fidelity: f64 = dec.singular_values.iter().sum();
    debug_assert!(fidelity <= 1.0 + 1e-9, "fidelity {fidelity} above 1");
    fidelity = fidelity.clamp(0.0, 1.0);

    let d = p.dim();
    let weighted = |q: &UnitaryMatrix, i: usize, j: usize| {
        let mut acc = C64::new(0.0, 0.0);
        for (k, &sigma) in dec.singular_values.iter().enumerate() {
            if sigma != 0.0 {
                acc += q[(i, k)] * q[(j, k)].conj() * sigma;
            }
        }
        acc
    };
    let f0 = HermitianMatrix::from_lower(d, |i, j| weighted(&dec.u, i, j));
    let f1 = HermitianMatrix::from_lower(d, |i, j| weighted(&dec.v, i, j));
    let polar_v = UnitaryMatrix::new(dec.u.matrix() * &dec.v.adjoint().into_matrix(), cfg)?;

    Ok(FidelityData {
        fidelity,
        f0,
        f1,
        polar_v,
    })
}

/// Support projectors of both states and the cross overlaps.
pub fn overlap_data(p: &UsdProblem, cfg: &NumericConfig) -> Result<OverlapData> {
    let p0 = support_projector(p.rho0.matrix(), cfg)?;
    let p1 = support_projector(p.rho1.matrix(), cfg)?;
    let tr_p1_rho0 = (p1.matrix() * p.rho0.matrix().matrix()).trace().re;
    let tr_p0_rho1 = (p0.matrix() * p.rho1.matrix().matrix()).trace().re;
    Ok(OverlapData {
        p0,
        p1,
        tr_p1_rho0,
        tr_p0_rho1,
    })
}

fn classify_scalars(
    fidelity: f64,
    t10: f64,
    t01: f64,
    ratio_sqrt: f64,
    cfg: &NumericConfig,
) -> Result<(Regime, f64)> {
    if fidelity <= cfg.tol_equality {
        return Err(Error::ZeroFidelity);
    }
    let first_threshold = t10 / fidelity;
    let third_threshold = if t01 > 0.0 {
        fidelity / t01
    } else {
        f64::INFINITY
    };
    // At a boundary both formulas agree within tol_equality by the branch
    // condition itself; the second-regime value is used there.
    let (regime, alpha) = if (ratio_sqrt - first_threshold).abs() <= cfg.tol_equality {
        (Regime::BoundaryFirstSecond, ratio_sqrt)
    } else if (ratio_sqrt - third_threshold).abs() <= cfg.tol_equality {
        (Regime::BoundarySecondThird, ratio_sqrt)
    } else if ratio_sqrt < first_threshold {
        (Regime::First, first_threshold)
    } else if ratio_sqrt > third_threshold {
        (Regime::Third, third_threshold)
    } else {
        (Regime::Second, ratio_sqrt)
    };
    Ok((regime, alpha))
}

/// Which regime the priors select, and that regime's `α`.
///
/// Fails with [`Error::ZeroFidelity`] when `F ≤ tol_equality`: the states
/// are then perfectly distinguishable, the bound is zero and no regime is
/// meaningful.
pub fn classify_regime(p: &UsdProblem, cfg: &NumericConfig) -> Result<(Regime, f64)> {
    let fd = fidelity_data(p, cfg)?;
    let od = overlap_data(p, cfg)?;
    classify_scalars(
        fd.fidelity,
        od.tr_p1_rho0,
        od.tr_p0_rho1,
        p.prior_ratio_sqrt(),
        cfg,
    )
}

/// The regime lower bound on the failure probability, with benchmarks.
///
/// A zero-fidelity pair yields the trivial `q_bound = 0` report instead of
/// an error: perfectly distinguishable states fail with probability zero.
pub fn lower_bound(p: &UsdProblem, cfg: &NumericConfig) -> Result<BoundsReport> {
    let helstrom_q = helstrom_bound(p, cfg)?;
    let fd = fidelity_data(p, cfg)?;
    let od = overlap_data(p, cfg)?;
    let f = fd.fidelity;
    let ratio_sqrt = p.prior_ratio_sqrt();

    if f <= cfg.tol_equality {
        return Ok(BoundsReport {
            regime: Regime::Second,
            alpha: ratio_sqrt,
            q_bound: 0.0,
            q0_at_bound: 0.0,
            q1_at_bound: 0.0,
            rudolph_bound: 0.0,
            helstrom_q,
        });
    }

    let (regime, alpha) = classify_scalars(f, od.tr_p1_rho0, od.tr_p0_rho1, ratio_sqrt, cfg)?;
    let (eta0, eta1) = (p.eta0, p.eta1);
    let q_bound = match regime {
        Regime::First => eta1 * f * f / od.tr_p1_rho0 + eta0 * od.tr_p1_rho0,
        Regime::Third => eta0 * f * f / od.tr_p0_rho1 + eta1 * od.tr_p0_rho1,
        _ => 2.0 * math::sqrt(eta0 * eta1) * f,
    };
    let rudolph_bound = if ratio_sqrt < f {
        eta1 + eta0 * f * f
    } else if ratio_sqrt * f > 1.0 {
        eta0 + eta1 * f * f
    } else {
        2.0 * math::sqrt(eta0 * eta1) * f
    };

    Ok(BoundsReport {
        regime,
        alpha,
        q_bound,
        q0_at_bound: alpha * eta0 * f,
        q1_at_bound: eta1 * f / alpha,
        rudolph_bound,
        helstrom_q,
    })
}

fn saturation_from_conditions(
    p: &UsdProblem,
    fd: &FidelityData,
    alpha: f64,
    cfg: &NumericConfig,
) -> Result<SaturationCheck> {
    let cond0_matrix = &(p.rho0.matrix().clone()) - &fd.f0.scale(alpha);
    let cond1_matrix = &(p.rho1.matrix().clone()) - &fd.f1.scale(1.0 / alpha);
    let eig0 = eig_hermitian(&cond0_matrix, cfg)?;
    let eig1 = eig_hermitian(&cond1_matrix, cfg)?;
    let rho0_eig = eig_hermitian(p.rho0.matrix(), cfg)?;
    let rho1_eig = eig_hermitian(p.rho1.matrix(), cfg)?;
    // The PSD floor is taken relative to the state's scale as well as the
    // condition matrix's own: a condition matrix that vanishes identically
    // (boundary instances) must count as satisfied, not trip on its own
    // rounding noise.
    let floor0 = -cfg.tol_psd * eig0.spectral_radius().max(rho0_eig.spectral_radius());
    let floor1 = -cfg.tol_psd * eig1.spectral_radius().max(rho1_eig.spectral_radius());
    let cond0_min_eig = eig0.min_eigenvalue();
    let cond1_min_eig = eig1.min_eigenvalue();
    Ok(SaturationCheck {
        cond0_matrix,
        cond1_matrix,
        cond0_min_eig,
        cond1_min_eig,
        saturated: cond0_min_eig >= floor0 && cond1_min_eig >= floor1,
    })
}

fn require_non_overlapping(p: &UsdProblem, cfg: &NumericConfig) -> Result<()> {
    if reduce::rank_sum_check(p, cfg)? {
        Ok(())
    } else {
        Err(Error::OverlappingSupports)
    }
}

/// Decide attainability of the regime bound: both `ρ₀ − αF₀` and
/// `ρ₁ − (1/α)F₁` must be positive semi-definite.
///
/// The supports must already be non-overlapping; this refuses overlapping
/// inputs rather than reducing them silently (the reduction module and the
/// CLI compose the two steps).
pub fn check_saturation(p: &UsdProblem, cfg: &NumericConfig) -> Result<SaturationCheck> {
    require_non_overlapping(p, cfg)?;
    let fd = fidelity_data(p, cfg)?;
    let od = overlap_data(p, cfg)?;
    let (_, alpha) = classify_scalars(
        fd.fidelity,
        od.tr_p1_rho0,
        od.tr_p0_rho1,
        p.prior_ratio_sqrt(),
        cfg,
    )?;
    saturation_from_conditions(p, &fd, alpha, cfg)
}

/// Attainability of the looser bounds whose thresholds are `F` and `1/F`.
///
/// In the outer regimes the relevant condition matrix must vanish (not
/// merely be PSD); the middle regime coincides with [`check_saturation`]'s
/// middle regime.
pub fn check_rudolph_saturation(p: &UsdProblem, cfg: &NumericConfig) -> Result<SaturationCheck> {
    require_non_overlapping(p, cfg)?;
    let fd = fidelity_data(p, cfg)?;
    let f = fd.fidelity;
    if f <= cfg.tol_equality {
        return Err(Error::ZeroFidelity);
    }
    let ratio_sqrt = p.prior_ratio_sqrt();

    if ratio_sqrt < f - cfg.tol_equality {
        // Outer: α = F, and ρ₁ − (1/F)F₁ must be exactly zero.
        let mut check = saturation_from_conditions(p, &fd, f, cfg)?;
        let zero1 = check.cond1_matrix.max_abs() <= cfg.tol_equality;
        let psd0 = check.cond0_min_eig
            >= -cfg.tol_psd
                * eig_hermitian(&check.cond0_matrix, cfg)?
                    .spectral_radius()
                    .max(1.0);
        check.saturated = psd0 && zero1;
        Ok(check)
    } else if ratio_sqrt * f > 1.0 + cfg.tol_equality {
        // Outer: α = 1/F, and ρ₀ − (1/F)F₀ must be exactly zero.
        let mut check = saturation_from_conditions(p, &fd, 1.0 / f, cfg)?;
        let zero0 = check.cond0_matrix.max_abs() <= cfg.tol_equality;
        let psd1 = check.cond1_min_eig
            >= -cfg.tol_psd
                * eig_hermitian(&check.cond1_matrix, cfg)?
                    .spectral_radius()
                    .max(1.0);
        check.saturated = psd1 && zero0;
        Ok(check)
    } else {
        saturation_from_conditions(p, &fd, ratio_sqrt, cfg)
    }
}

/// Construct the measurement that attains the regime bound.
///
/// Requires non-overlapping supports and a passing [`check_saturation`].
/// For zero fidelity the bound machinery divides by `F`, but the answer is
/// forced: project onto the support of `ρ₀` versus its complement, with no
/// inconclusive outcome.
pub fn build_povm(p: &UsdProblem, cfg: &NumericConfig) -> Result<UsdPovm> {
    require_non_overlapping(p, cfg)?;
    let fd = fidelity_data(p, cfg)?;
    let d = p.dim();

    if fd.fidelity <= cfg.tol_equality {
        let p0 = support_projector(p.rho0.matrix(), cfg)?;
        let complement =
            HermitianMatrix::symmetrize(&(&ComplexMatrix::identity(d) - p0.matrix()));
        return Ok(UsdPovm {
            e0: p0,
            e1: complement,
            e_inc: HermitianMatrix::zeros(d),
        });
    }

    let od = overlap_data(p, cfg)?;
    let (_, alpha) = classify_scalars(
        fd.fidelity,
        od.tr_p1_rho0,
        od.tr_p0_rho1,
        p.prior_ratio_sqrt(),
        cfg,
    )?;
    let check = saturation_from_conditions(p, &fd, alpha, cfg)?;
    if !check.saturated {
        return Err(Error::NotSaturated {
            margin0: check.cond0_min_eig,
            margin1: check.cond1_min_eig,
        });
    }

    let sq0 = sqrt_psd(p.rho0.matrix(), cfg)?;
    let sq1 = sqrt_psd(p.rho1.matrix(), cfg)?;
    let sigma = &(p.rho0.matrix().clone()) + p.rho1.matrix();
    let sigma_inv = pinv_psd(&sigma, cfg)?;

    let x0 = sigma_inv.matrix() * sq0.matrix();
    let e0 = sandwich(&x0, &check.cond0_matrix);
    let x1 = sigma_inv.matrix() * sq1.matrix();
    let e1 = sandwich(&x1, &check.cond1_matrix);

    let sqrt_alpha = math::sqrt(alpha);
    let carrier = &sq0.matrix().scale(sqrt_alpha)
        + &(sq1.matrix() * &fd.polar_v.adjoint().into_matrix()).scale(1.0 / sqrt_alpha);
    let b = sigma_inv.matrix() * &carrier;
    let mut e_inc = sandwich(&b, &fd.f0);

    // The formulas resolve the identity on the span of Σ; anything the
    // states cannot reach goes to the inconclusive outcome so the elements
    // form a complete POVM on the ambient space.
    let p_sigma = support_projector(&sigma, cfg)?;
    let leftover = &ComplexMatrix::identity(d) - p_sigma.matrix();
    if leftover.max_abs() > cfg.tol_equality {
        e_inc = &e_inc + &HermitianMatrix::symmetrize(&leftover);
    }

    Ok(UsdPovm { e0, e1, e_inc })
}

/// Failure probabilities `Qᵢ = ηᵢ Tr(E? ρᵢ)` of a validated measurement.
pub fn failure_probs(p: &UsdProblem, m: &UsdPovm, cfg: &NumericConfig) -> Result<FailureProbs> {
    m.validate(p, cfg)?;
    let q0 = p.eta0 * (m.e_inc.matrix() * p.rho0.matrix().matrix()).trace().re;
    let q1 = p.eta1 * (m.e_inc.matrix() * p.rho1.matrix().matrix()).trace().re;
    Ok(FailureProbs { q0, q1, q: q0 + q1 })
}

/// Minimum-error benchmark `½(1 − Tr|η₁ρ₁ − η₀ρ₀|)`, in [0, ½].
pub fn helstrom_bound(p: &UsdProblem, cfg: &NumericConfig) -> Result<f64> {
    let diff = &p.rho1.matrix().scale(p.eta1) - &p.rho0.matrix().scale(p.eta0);
    let norm = trace_norm(diff.matrix(), cfg)?;
    Ok(0.5 * (1.0 - norm))
}
