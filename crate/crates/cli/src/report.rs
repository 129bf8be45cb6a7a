//! Report data model shared by the text and machine output formats. The
//! machine format is JSON whose `problem` block is itself a loadable
//! problem file, so every number in a report can be reproduced from the
//! report alone.

use serde::{Deserialize, Serialize};

use crate::problem::MatrixJson;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToleranceEcho {
    pub hermitian: f64,
    pub psd: f64,
    pub rank: f64,
    pub unitary: f64,
    pub equality: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemEcho {
    pub eta0: f64,
    pub eta1: f64,
    pub rho0: MatrixJson,
    pub rho1: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductionBlock {
    pub common_dim: usize,
    pub trimmed_dims: (usize, usize),
    pub original_dim: usize,
    pub reduced_dim: usize,
    /// Weight each state keeps after both reductions.
    pub retained_weights: (f64, f64),
    /// Failure probability forced by the removed common part.
    pub lift_fail: f64,
    /// Probability weight carried by the reduced problem.
    pub lift_keep: f64,
    /// `|ρ₀' Σ'⁻¹ ρ₁'|_max` on the reduced problem.
    pub corollary1_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FidelityBlock {
    pub fidelity: f64,
    pub tr_p1_rho0: f64,
    pub tr_p0_rho1: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsBlock {
    pub regime: String,
    pub alpha: f64,
    pub q_bound: f64,
    pub q0_at_bound: f64,
    pub q1_at_bound: f64,
    pub rudolph_bound: f64,
    pub helstrom_q: f64,
    /// The bound lifted to the original (unreduced) problem.
    pub lifted_q_bound: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SaturationBlock {
    pub saturated: bool,
    pub cond0_min_eig: f64,
    pub cond1_min_eig: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmBlock {
    pub e0: MatrixJson,
    pub e1: MatrixJson,
    pub e_inc: MatrixJson,
    pub q0: f64,
    pub q1: f64,
    pub q: f64,
    pub lifted_q: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleBlock {
    pub restarts: usize,
    pub max_iterations: usize,
    pub seed: u64,
    pub best_q: f64,
    pub gap_to_bound: f64,
    pub converged: bool,
    pub lifted_best_q: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationBlock {
    pub shots: u64,
    pub seed: u64,
    /// Whether the shots were drawn on the reduced or the original problem.
    pub simulated_problem: String,
    pub n0: u64,
    pub n1: u64,
    pub n_inconclusive: u64,
    pub n_error: u64,
    pub empirical_q: f64,
    pub empirical_error_rate: f64,
    pub stderr_q: f64,
    pub analytic_q: f64,
}

/// Full report of one command invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub command: String,
    pub tolerances: ToleranceEcho,
    pub problem: ProblemEcho,
    /// `fully_overlapping` or `zero_fidelity` when the pair degenerates;
    /// the bound machinery is bypassed and the verdict is analytic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<FidelityBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub saturation: Option<SaturationBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rudolph_saturation: Option<SaturationBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub povm: Option<PovmBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationBlock>,
}

impl Report {
    pub fn to_machine(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("usd {} (v{})", self.command, self.version));
        line(format!(
            "problem: dim {} states with priors eta0 = {:.6}, eta1 = {:.6}",
            self.problem.rho0.len(),
            self.problem.eta0,
            self.problem.eta1
        ));
        if let Some(reason) = &self.degenerate {
            line(format!("degenerate case: {reason}"));
        }
        if let Some(r) = &self.reduction {
            line(format!(
                "reduction: common dim {}, trimmed dims ({}, {}), {} -> {} dims, retained weights ({:.6}, {:.6})",
                r.common_dim,
                r.trimmed_dims.0,
                r.trimmed_dims.1,
                r.original_dim,
                r.reduced_dim,
                r.retained_weights.0,
                r.retained_weights.1
            ));
            line(format!(
                "           lift: q_original = {:.6} + {:.6} * q_reduced; |rho0' sigma^-1 rho1'|_max = {:.3e}",
                r.lift_fail, r.lift_keep, r.corollary1_residual
            ));
        }
        if let Some(f) = &self.fidelity {
            line(format!(
                "fidelity:  F = {:.9}, Tr(P1 rho0) = {:.9}, Tr(P0 rho1) = {:.9}",
                f.fidelity, f.tr_p1_rho0, f.tr_p0_rho1
            ));
        }
        if let Some(b) = &self.bounds {
            line(format!(
                "bounds:    {} regime, alpha = {:.9}",
                b.regime, b.alpha
            ));
            line(format!(
                "           q >= {:.9} (lifted {:.9}); looser fidelity bound {:.9}; helstrom {:.9}",
                b.q_bound, b.lifted_q_bound, b.rudolph_bound, b.helstrom_q
            ));
            line(format!(
                "           at the bound: q0 = {:.9}, q1 = {:.9}",
                b.q0_at_bound, b.q1_at_bound
            ));
        }
        if let Some(s) = &self.saturation {
            line(format!(
                "saturation: {} (min eigenvalues {:.3e}, {:.3e})",
                if s.saturated { "attainable" } else { "NOT attainable" },
                s.cond0_min_eig,
                s.cond1_min_eig
            ));
        }
        if let Some(s) = &self.rudolph_saturation {
            line(format!(
                "looser-bound saturation: {} (min eigenvalues {:.3e}, {:.3e})",
                if s.saturated { "attainable" } else { "not attainable" },
                s.cond0_min_eig,
                s.cond1_min_eig
            ));
        }
        if let Some(p) = &self.povm {
            line(format!(
                "povm:      built; q0 = {:.9}, q1 = {:.9}, q = {:.9} (lifted {:.9})",
                p.q0, p.q1, p.q, p.lifted_q
            ));
        }
        if let Some(o) = &self.oracle {
            line(format!(
                "oracle:    best_q = {:.9}, gap to bound = {:.3e}, converged = {}, restarts = {}, seed = {}",
                o.best_q, o.gap_to_bound, o.converged, o.restarts, o.seed
            ));
            line(format!("           lifted best_q = {:.9}", o.lifted_best_q));
        }
        if let Some(s) = &self.simulation {
            line(format!(
                "simulate:  {} shots (seed {}, {} problem): n0 = {}, n1 = {}, inconclusive = {}, errors = {}",
                s.shots, s.seed, s.simulated_problem, s.n0, s.n1, s.n_inconclusive, s.n_error
            ));
            line(format!(
                "           empirical q = {:.6} +- {:.6}, analytic q = {:.6}",
                s.empirical_q, s.stderr_q, s.analytic_q
            ));
        }
        out
    }
}

/// One row of a prior-ratio sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub ratio: f64,
    pub eta0: f64,
    pub eta1: f64,
    pub regime: String,
    pub alpha: f64,
    pub q_bound: f64,
    pub lifted_q_bound: f64,
    pub rudolph_bound: f64,
    pub helstrom_q: f64,
    pub cond0_min_eig: f64,
    pub cond1_min_eig: f64,
    pub saturated: bool,
}

pub fn sweep_to_text(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "# ratio eta0 eta1 regime alpha q_bound lifted_q_bound rudolph_bound helstrom_q cond0_min_eig cond1_min_eig saturated\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{:.9e} {:.9} {:.9} {} {:.9} {:.9} {:.9} {:.9} {:.9} {:.6e} {:.6e} {}\n",
            r.ratio,
            r.eta0,
            r.eta1,
            r.regime,
            r.alpha,
            r.q_bound,
            r.lifted_q_bound,
            r.rudolph_bound,
            r.helstrom_q,
            r.cond0_min_eig,
            r.cond1_min_eig,
            r.saturated
        ));
    }
    out
}

pub fn sweep_to_machine(rows: &[SweepRow]) -> String {
    serde_json::to_string_pretty(rows).expect("sweep rows serialize")
}
