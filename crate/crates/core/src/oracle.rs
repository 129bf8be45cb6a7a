//! Independent brute-force optimization over valid unambiguous
//! measurements at desk scale. Used to certify the closed-form results and
//! to bracket the true optimum when the saturation conditions fail.
//!
//! The search space is the unconstrained parameterization
//! `E₀ = N₁ B₀†B₀ N₁†`, `E₁ = N₀ B₁†B₁ N₀†` with `N_i` an orthonormal basis
//! of the orthocomplement of the support of `ρᵢ` — every point satisfies
//! the unambiguity constraints by construction — leaving the positivity of
//! `E? = 1 − E₀ − E₁` as a smooth inequality handled by an escalating
//! eigenvalue penalty, followed by a projected feasible polish.

use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matlin::{
    eig_hermitian, support_projector, C64, ComplexMatrix, HermitianMatrix, NumericConfig,
};
use crate::reduce;
use crate::states::complex_normal;
use crate::usd::{lower_bound, UsdPovm, UsdProblem};

/// Brute force is only honest at small dimensions.
pub const MAX_ORACLE_DIM: usize = 8;

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            restarts: 32,
            max_iterations: 5000,
            step_tolerance: 1e-9,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Smallest failure probability found across restarts, evaluated on a
    /// feasible measurement.
    pub best_q: f64,
    pub best_povm: UsdPovm,
    /// `best_q − q_bound`; never meaningfully negative, since the bound is
    /// valid for every feasible measurement.
    pub gap_to_bound: f64,
    /// True when every restart's step size fell below `step_tolerance`.
    pub converged: bool,
}

/// Orthonormal basis of the orthocomplement of a state's support, as
/// columns. Empty when the support fills the space.
fn complement_basis(
    rho: &HermitianMatrix,
    cfg: &NumericConfig,
) -> Result<Vec<Vec<C64>>> {
    let proj = support_projector(rho, cfg)?;
    let eig = eig_hermitian(&proj, cfg)?;
    let mut cols = Vec::new();
    for (k, &v) in eig.values.iter().enumerate() {
        if v < 0.5 {
            cols.push(eig.vectors.matrix().column(k));
        }
    }
    Ok(cols)
}

/// Lift an m×m PSD factor into the ambient space: `N (B†B) N†`.
fn lift_gram(basis: &[Vec<C64>], b: &ComplexMatrix, dim: usize) -> HermitianMatrix {
    let m = basis.len();
    debug_assert_eq!(b.dim(), m);
    if m == 0 {
        return HermitianMatrix::zeros(dim);
    }
    // Rows of (B N†): first B, then spread over the ambient basis.
    let mut bn = ComplexMatrix::zeros(dim);
    for r in 0..m {
        for i in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..m {
                acc += b[(r, k)] * basis[k][i].conj();
            }
            bn[(r, i)] = acc;
        }
    }
    // E = (BN†)† (BN†), Hermitian by construction.
    HermitianMatrix::from_lower(dim, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..m {
            acc += bn[(r, i)].conj() * bn[(r, j)];
        }
        acc
    })
}

struct Parameterization {
    dim: usize,
    basis_e0: Vec<Vec<C64>>,
    basis_e1: Vec<Vec<C64>>,
    m0: usize,
    m1: usize,
}

impl Parameterization {
    fn new(p: &UsdProblem, cfg: &NumericConfig) -> Result<Self> {
        // E₀ may only live where ρ₁ cannot fire, and vice versa.
        let basis_e0 = complement_basis(p.rho1().matrix(), cfg)?;
        let basis_e1 = complement_basis(p.rho0().matrix(), cfg)?;
        let m0 = basis_e0.len();
        let m1 = basis_e1.len();
        Ok(Parameterization {
            dim: p.dim(),
            basis_e0,
            basis_e1,
            m0,
            m1,
        })
    }

    fn param_count(&self) -> usize {
        2 * (self.m0 * self.m0 + self.m1 * self.m1)
    }

    fn factors(&self, x: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
        let mut idx = 0;
        let mut take = || {
            let v = x[idx];
            idx += 1;
            v
        };
        let b0 = ComplexMatrix::from_fn(self.m0, |_, _| C64::new(take(), take()));
        let b1 = ComplexMatrix::from_fn(self.m1, |_, _| C64::new(take(), take()));
        (b0, b1)
    }

    fn elements(&self, x: &[f64]) -> (HermitianMatrix, HermitianMatrix) {
        let (b0, b1) = self.factors(x);
        (
            lift_gram(&self.basis_e0, &b0, self.dim),
            lift_gram(&self.basis_e1, &b1, self.dim),
        )
    }
}

fn inconclusive_of(e0: &HermitianMatrix, e1: &HermitianMatrix, dim: usize) -> HermitianMatrix {
    let sum = e0 + e1;
    HermitianMatrix::symmetrize(&(&ComplexMatrix::identity(dim) - sum.matrix()))
}

/// True failure probability of the (feasible or not) triple.
fn q_of(p: &UsdProblem, e_inc: &HermitianMatrix) -> f64 {
    let q0 = (e_inc.matrix() * p.rho0().matrix().matrix()).trace().re;
    let q1 = (e_inc.matrix() * p.rho1().matrix().matrix()).trace().re;
    p.eta0() * q0 + p.eta1() * q1
}

/// Draw a valid USD measurement: conclusive elements confined to the
/// right orthocomplements, scaled so the inconclusive remainder stays PSD.
pub fn random_usd_povm(p: &UsdProblem, seed: u64, cfg: &NumericConfig) -> Result<UsdPovm> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = rng.gen::<f64>();
    random_usd_povm_scaled(p, &mut rng, scale, cfg)
}

/// As [`random_usd_povm`] with the conclusive scale fixed: `scale = 0`
/// gives the always-fail measurement `E? = 1`, `scale = 1` pushes the
/// conclusive part to the positivity boundary of `E?`.
pub fn random_usd_povm_scaled<R: Rng>(
    p: &UsdProblem,
    rng: &mut R,
    scale: f64,
    cfg: &NumericConfig,
) -> Result<UsdPovm> {
    if !reduce::rank_sum_check(p, cfg)? {
        return Err(Error::OverlappingSupports);
    }
    if !(0.0..=1.0).contains(&scale) {
        return Err(Error::InvalidParameter {
            what: "sampler scale must lie in [0, 1]",
        });
    }
    let param = Parameterization::new(p, cfg)?;
    let d = param.dim;
    let draw = |rng: &mut R, m: usize| {
        ComplexMatrix::from_fn(m, |_, _| complex_normal(rng).scale(0.5))
    };
    let raw0 = lift_gram(&param.basis_e0, &draw(rng, param.m0), d);
    let raw1 = lift_gram(&param.basis_e1, &draw(rng, param.m1), d);
    let sum = &raw0 + &raw1;
    let top = eig_hermitian(&sum, cfg)?.spectral_radius();
    let factor = if top > 0.0 { scale / top } else { 0.0 };
    let e0 = raw0.scale(factor);
    let e1 = raw1.scale(factor);
    let e_inc = inconclusive_of(&e0, &e1, d);
    Ok(UsdPovm { e0, e1, e_inc })
}

/// Scale a parameter vector until `E? = 1 − E₀ − E₁` is PSD; the Gram
/// parameterization makes the elements quadratic in `x`.
fn project_feasible(
    param: &Parameterization,
    x: &mut [f64],
    cfg: &NumericConfig,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    loop {
        let (e0, e1) = param.elements(x);
        let sum = &e0 + &e1;
        let top = eig_hermitian(&sum, cfg)?.spectral_radius();
        if top <= 1.0 {
            return Ok((e0, e1));
        }
        let shrink = crate::math::sqrt(1.0 / top) * (1.0 - 1e-14);
        for v in x.iter_mut() {
            *v *= shrink;
        }
    }
}

/// Minimize the failure probability over valid USD measurements by random
/// restarts of a random-direction descent with shrinking steps.
///
/// Deterministic for a given config; restarts are merged by minimum, so
/// `best_q` is non-increasing in `restarts` for a fixed seed.
pub fn optimize_usd(
    p: &UsdProblem,
    ocfg: &OracleConfig,
    cfg: &NumericConfig,
) -> Result<OracleResult> {
    if p.dim() > MAX_ORACLE_DIM {
        return Err(Error::DimensionTooLarge {
            dim: p.dim(),
            max: MAX_ORACLE_DIM,
        });
    }
    if !reduce::rank_sum_check(p, cfg)? {
        return Err(Error::OverlappingSupports);
    }
    if ocfg.restarts < 1 {
        return Err(Error::InvalidParameter {
            what: "oracle needs at least one restart",
        });
    }

    let q_bound = lower_bound(p, cfg)?.q_bound;
    let param = Parameterization::new(p, cfg)?;
    let n = param.param_count();
    let d = param.dim;

    let penalized = |x: &[f64], weight: f64| -> f64 {
        let (e0, e1) = param.elements(x);
        let e_inc = inconclusive_of(&e0, &e1, d);
        let eig = eig_hermitian(&e_inc, cfg).expect("Jacobi converges on finite Hermitian input");
        let mut penalty = 0.0;
        for &v in &eig.values {
            if v < 0.0 {
                penalty += v * v;
            }
        }
        q_of(p, &e_inc) + weight * penalty
    };

    let mut best_q = f64::INFINITY;
    let mut best_x: Vec<f64> = alloc::vec![0.0; n];
    let mut converged = true;

    for restart in 0..ocfg.restarts {
        let mut rng =
            ChaCha8Rng::seed_from_u64(ocfg.seed ^ (restart as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(restart as u64));
        let mut x: Vec<f64> = (0..n)
            .map(|_| crate::states::standard_normal(&mut rng) * 0.4)
            .collect();
        let mut step = 0.25;
        let mut weight = 10.0;

        for _ in 0..ocfg.max_iterations {
            if step < ocfg.step_tolerance {
                break;
            }
            // The penalty weight moves every iteration, so the incumbent is
            // re-scored under the current weight before comparing.
            weight *= 1.002;
            let current = penalized(&x, weight);
            let direction: Vec<f64> = (0..n)
                .map(|_| crate::states::standard_normal(&mut rng))
                .collect();
            let mut improved = false;
            for sign in [1.0, -1.0] {
                let candidate: Vec<f64> = x
                    .iter()
                    .zip(direction.iter())
                    .map(|(xi, di)| xi + sign * step * di)
                    .collect();
                if penalized(&candidate, weight) < current {
                    x = candidate;
                    improved = true;
                    break;
                }
            }
            step *= if improved { 1.15 } else { 0.92 };
            step = step.min(0.5);
        }
        // Feasible polish: project onto the constraint set and take true-q
        // descent steps that stay inside it. The restart counts as converged
        // when this final phase's step collapses below the tolerance.
        let (e0, e1) = project_feasible(&param, &mut x, cfg)?;
        let mut feasible_q = q_of(p, &inconclusive_of(&e0, &e1, d));
        let mut polish_step = 0.01;
        for _ in 0..ocfg.max_iterations.min(2000) {
            if polish_step < ocfg.step_tolerance {
                break;
            }
            let direction: Vec<f64> = (0..n)
                .map(|_| crate::states::standard_normal(&mut rng))
                .collect();
            let mut improved = false;
            for sign in [1.0, -1.0] {
                let mut candidate: Vec<f64> = x
                    .iter()
                    .zip(direction.iter())
                    .map(|(xi, di)| xi + sign * polish_step * di)
                    .collect();
                let (c0, c1) = project_feasible(&param, &mut candidate, cfg)?;
                let value = q_of(p, &inconclusive_of(&c0, &c1, d));
                if value < feasible_q {
                    x = candidate;
                    feasible_q = value;
                    improved = true;
                    break;
                }
            }
            polish_step *= if improved { 1.2 } else { 0.88 };
            polish_step = polish_step.min(0.05);
        }
        if polish_step >= ocfg.step_tolerance {
            converged = false;
        }

        if feasible_q < best_q {
            best_q = feasible_q;
            best_x = x;
        }
    }

    let (e0, e1) = project_feasible(&param, &mut best_x, cfg)?;
    let e_inc = inconclusive_of(&e0, &e1, d);
    let best_povm = UsdPovm { e0, e1, e_inc };

    Ok(OracleResult {
        best_q,
        best_povm,
        gap_to_bound: best_q - q_bound,
        converged,
    })
}
