//! The command pipeline: reduce → bounds → saturation → POVM, with the
//! oracle and the shot sampler layered on top, and reports in text or
//! machine form.

use anyhow::Result;

use usd_core::error::Error as CoreError;
use usd_core::oracle::{optimize_usd, OracleConfig};
use usd_core::reduce::{certify_corollary1, orthogonal_trim, split_common, ReductionResult};
use usd_core::simulate::run_sim;
use usd_core::usd::{
    build_povm, check_rudolph_saturation, check_saturation, failure_probs, fidelity_data,
    lower_bound, overlap_data, BoundsReport, FailureProbs, SaturationCheck,
};
use usd_core::{HermitianMatrix, NumericConfig, UsdPovm, UsdProblem};

use crate::problem::{matrix_to_json, ProblemFile};
use crate::report::{
    sweep_to_machine, sweep_to_text, BoundsBlock, FidelityBlock, OracleBlock, PovmBlock,
    ProblemEcho, ReductionBlock, Report, SaturationBlock, SimulationBlock, SweepRow,
    ToleranceEcho,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Clone, Copy)]
pub struct CommonOpts {
    pub ratio: Option<f64>,
    pub format: Format,
    pub cfg: NumericConfig,
}

/// What a command prints and how it exits.
pub struct Outcome {
    pub stdout: String,
    pub exit_code: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Degenerate {
    /// The supports coincide entirely; Q = 1 is forced.
    FullyOverlapping,
    /// Zero fidelity; perfect discrimination, Q = 0.
    ZeroFidelity,
}

impl Degenerate {
    fn as_str(self) -> &'static str {
        match self {
            Degenerate::FullyOverlapping => "fully_overlapping",
            Degenerate::ZeroFidelity => "zero_fidelity",
        }
    }
}

/// Everything the commands need about one problem.
struct Analysis {
    original: UsdProblem,
    /// The problem actually analyzed (after both reductions).
    final_problem: UsdProblem,
    degenerate: Option<Degenerate>,
    reduction: Option<ReductionBlock>,
    fidelity: Option<FidelityBlock>,
    bounds: Option<BoundsReport>,
    saturation: Option<SaturationCheck>,
    rudolph: Option<SaturationCheck>,
    povm: Option<(UsdPovm, FailureProbs)>,
    lift_fail: f64,
    lift_keep: f64,
}

impl Analysis {
    fn lift(&self, q: f64) -> f64 {
        self.lift_fail + self.lift_keep * q
    }

    fn saturated(&self) -> bool {
        self.saturation.as_ref().map(|s| s.saturated).unwrap_or(false)
    }
}

fn reduction_block(
    original_dim: usize,
    split: &ReductionResult,
    trim: Option<&ReductionResult>,
    final_result: &ReductionResult,
) -> ReductionBlock {
    let (t0, t1) = trim.map(|t| t.trimmed_dims).unwrap_or((0, 0));
    let trim_weights = trim.map(|t| t.retained_weights).unwrap_or((1.0, 1.0));
    ReductionBlock {
        common_dim: split.common_dim,
        trimmed_dims: (t0, t1),
        original_dim,
        reduced_dim: final_result.reduced.dim(),
        retained_weights: (
            split.retained_weights.0 * trim_weights.0,
            split.retained_weights.1 * trim_weights.1,
        ),
        lift_fail: split.lift_fail,
        lift_keep: split.lift_keep * trim.map(|t| t.lift_keep).unwrap_or(1.0),
        corollary1_residual: certify_corollary1(final_result),
    }
}

/// The all-inclusive measurement: every outcome inconclusive.
fn always_fail_povm(dim: usize) -> UsdPovm {
    UsdPovm {
        e0: HermitianMatrix::zeros(dim),
        e1: HermitianMatrix::zeros(dim),
        e_inc: HermitianMatrix::identity(dim),
    }
}

fn analyze_problem(p: &UsdProblem, cfg: &NumericConfig) -> Result<Analysis> {
    let split = match split_common(p, cfg) {
        Ok(split) => split,
        Err(CoreError::FullyOverlapping) => {
            // The whole support is shared: every conclusive element must
            // vanish and the failure probability is one, attained by the
            // trivial always-fail measurement.
            let bounds = lower_bound(p, cfg)?;
            let povm = always_fail_povm(p.dim());
            let probs = failure_probs(p, &povm, cfg)?;
            let fd = fidelity_data(p, cfg)?;
            let od = overlap_data(p, cfg)?;
            return Ok(Analysis {
                original: p.clone(),
                final_problem: p.clone(),
                degenerate: Some(Degenerate::FullyOverlapping),
                reduction: None,
                fidelity: Some(FidelityBlock {
                    fidelity: fd.fidelity,
                    tr_p1_rho0: od.tr_p1_rho0,
                    tr_p0_rho1: od.tr_p0_rho1,
                }),
                bounds: Some(bounds),
                saturation: None,
                rudolph: None,
                povm: Some((povm, probs)),
                lift_fail: 1.0,
                lift_keep: 0.0,
            });
        }
        Err(e) => return Err(e.into()),
    };

    let fd_split = fidelity_data(&split.reduced, cfg)?;
    let zero_fidelity = fd_split.fidelity <= cfg.tol_equality;

    let (final_result, trim) = if zero_fidelity {
        (split.clone(), None)
    } else {
        match orthogonal_trim(&split.reduced, cfg) {
            Ok(trim) => (trim.clone(), Some(trim)),
            Err(CoreError::ZeroFidelity) => (split.clone(), None),
            Err(e) => return Err(e.into()),
        }
    };
    let final_problem = final_result.reduced.clone();
    let lift_fail = split.lift_fail;
    let lift_keep = split.lift_keep * trim.as_ref().map(|t| t.lift_keep).unwrap_or(1.0);
    let reduction = Some(reduction_block(p.dim(), &split, trim.as_ref(), &final_result));

    let fd = fidelity_data(&final_problem, cfg)?;
    let od = overlap_data(&final_problem, cfg)?;
    let fidelity = Some(FidelityBlock {
        fidelity: fd.fidelity,
        tr_p1_rho0: od.tr_p1_rho0,
        tr_p0_rho1: od.tr_p0_rho1,
    });
    let bounds = Some(lower_bound(&final_problem, cfg)?);

    if fd.fidelity <= cfg.tol_equality {
        // Perfectly distinguishable after reduction: the projective
        // measurement succeeds always; no conditions to check.
        let povm = build_povm(&final_problem, cfg)?;
        let probs = failure_probs(&final_problem, &povm, cfg)?;
        return Ok(Analysis {
            original: p.clone(),
            final_problem,
            degenerate: Some(Degenerate::ZeroFidelity),
            reduction,
            fidelity,
            bounds,
            saturation: None,
            rudolph: None,
            povm: Some((povm, probs)),
            lift_fail,
            lift_keep,
        });
    }

    let saturation = check_saturation(&final_problem, cfg)?;
    let rudolph = check_rudolph_saturation(&final_problem, cfg)?;
    let povm = if saturation.saturated {
        let povm = build_povm(&final_problem, cfg)?;
        let probs = failure_probs(&final_problem, &povm, cfg)?;
        Some((povm, probs))
    } else {
        None
    };

    Ok(Analysis {
        original: p.clone(),
        final_problem,
        degenerate: None,
        reduction,
        fidelity,
        bounds,
        saturation: Some(saturation),
        rudolph: Some(rudolph),
        povm,
        lift_fail,
        lift_keep,
    })
}

fn tolerance_echo(cfg: &NumericConfig) -> ToleranceEcho {
    ToleranceEcho {
        hermitian: cfg.tol_hermitian,
        psd: cfg.tol_psd,
        rank: cfg.tol_rank,
        unitary: cfg.tol_unitary,
        equality: cfg.tol_equality,
    }
}

fn saturation_block(s: &SaturationCheck) -> SaturationBlock {
    SaturationBlock {
        saturated: s.saturated,
        cond0_min_eig: s.cond0_min_eig,
        cond1_min_eig: s.cond1_min_eig,
    }
}

fn base_report(command: &str, analysis: &Analysis, cfg: &NumericConfig) -> Report {
    let p = &analysis.original;
    let bounds = analysis.bounds.as_ref().map(|b| BoundsBlock {
        regime: b.regime.as_str().to_string(),
        alpha: b.alpha,
        q_bound: b.q_bound,
        q0_at_bound: b.q0_at_bound,
        q1_at_bound: b.q1_at_bound,
        rudolph_bound: b.rudolph_bound,
        helstrom_q: b.helstrom_q,
        lifted_q_bound: analysis.lift(b.q_bound),
    });
    let povm = analysis.povm.as_ref().map(|(m, probs)| PovmBlock {
        e0: matrix_to_json(m.e0.matrix()),
        e1: matrix_to_json(m.e1.matrix()),
        e_inc: matrix_to_json(m.e_inc.matrix()),
        q0: probs.q0,
        q1: probs.q1,
        q: probs.q,
        lifted_q: analysis.lift(probs.q),
    });
    Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        tolerances: tolerance_echo(cfg),
        problem: ProblemEcho {
            eta0: p.eta0(),
            eta1: p.eta1(),
            rho0: matrix_to_json(p.rho0().matrix().matrix()),
            rho1: matrix_to_json(p.rho1().matrix().matrix()),
        },
        degenerate: analysis.degenerate.map(|d| d.as_str().to_string()),
        reduction: analysis.reduction.clone(),
        fidelity: analysis.fidelity.clone(),
        bounds,
        saturation: analysis.saturation.as_ref().map(saturation_block),
        rudolph_saturation: analysis.rudolph.as_ref().map(saturation_block),
        povm,
        oracle: None,
        simulation: None,
    }
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => report.to_text(),
        Format::Machine => report.to_machine(),
    }
}

/// Exit 0 on success (or analytically forced degenerate verdicts), 2 when
/// the bound is not attainable.
pub fn run_analyze(file: &ProblemFile, opts: &CommonOpts) -> Result<Outcome> {
    let p = file.problem(opts.ratio, &opts.cfg)?;
    let analysis = analyze_problem(&p, &opts.cfg)?;
    let report = base_report("analyze", &analysis, &opts.cfg);
    let exit_code = if analysis.degenerate.is_some() || analysis.saturated() {
        0
    } else {
        2
    };
    Ok(Outcome {
        stdout: render(&report, opts.format),
        exit_code,
    })
}

pub fn run_oracle(
    file: &ProblemFile,
    restarts: usize,
    seed: u64,
    opts: &CommonOpts,
) -> Result<Outcome> {
    let p = file.problem(opts.ratio, &opts.cfg)?;
    let analysis = analyze_problem(&p, &opts.cfg)?;
    let mut report = base_report("oracle", &analysis, &opts.cfg);

    // On a fully overlapping pair there is nothing to optimize: Q = 1 is
    // forced and already reported.
    if analysis.degenerate != Some(Degenerate::FullyOverlapping) {
        let ocfg = OracleConfig {
            restarts,
            seed,
            ..OracleConfig::default()
        };
        let result = optimize_usd(&analysis.final_problem, &ocfg, &opts.cfg)?;
        report.oracle = Some(OracleBlock {
            restarts,
            max_iterations: ocfg.max_iterations,
            seed,
            best_q: result.best_q,
            gap_to_bound: result.gap_to_bound,
            converged: result.converged,
            lifted_best_q: analysis.lift(result.best_q),
        });
    }
    Ok(Outcome {
        stdout: render(&report, opts.format),
        exit_code: 0,
    })
}

pub fn run_simulate(
    file: &ProblemFile,
    shots: u64,
    seed: u64,
    opts: &CommonOpts,
) -> Result<Outcome> {
    let p = file.problem(opts.ratio, &opts.cfg)?;
    let analysis = analyze_problem(&p, &opts.cfg)?;
    let mut report = base_report("simulate", &analysis, &opts.cfg);

    let inline = file.inline_povm(&opts.cfg)?;
    let (target, povm, simulated_problem, analytic_q) = match (&inline, &analysis.povm) {
        (Some(m), _) => {
            let probs = failure_probs(&p, m, &opts.cfg)?;
            (&p, m.clone(), "original", probs.q)
        }
        (None, Some((m, probs))) => (&analysis.final_problem, m.clone(), "reduced", probs.q),
        (None, None) => {
            // No measurement to run: not saturated and nothing supplied.
            return Ok(Outcome {
                stdout: render(&report, opts.format),
                exit_code: 2,
            });
        }
    };
    let sim = run_sim(target, &povm, shots, seed, &opts.cfg)?;
    report.simulation = Some(SimulationBlock {
        shots,
        seed,
        simulated_problem: simulated_problem.to_string(),
        n0: sim.n0,
        n1: sim.n1,
        n_inconclusive: sim.n_inconclusive,
        n_error: sim.n_error,
        empirical_q: sim.empirical_q,
        empirical_error_rate: sim.empirical_error_rate,
        stderr_q: sim.stderr_q,
        analytic_q,
    });
    Ok(Outcome {
        stdout: render(&report, opts.format),
        exit_code: 0,
    })
}

/// Logarithmic grid over `η₁/η₀`, one analysis per point.
pub fn run_sweep(
    file: &ProblemFile,
    ratio_min: f64,
    ratio_max: f64,
    steps: usize,
    opts: &CommonOpts,
) -> Result<Outcome> {
    if !(ratio_min > 0.0 && ratio_max >= ratio_min && steps >= 1) {
        anyhow::bail!("sweep needs 0 < ratio-min <= ratio-max and steps >= 1");
    }
    let (rho0, rho1) = file.states(&opts.cfg)?;
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let ratio = if steps == 1 {
            ratio_min
        } else {
            let t = i as f64 / (steps - 1) as f64;
            (ratio_min.ln() + t * (ratio_max.ln() - ratio_min.ln())).exp()
        };
        let eta0 = 1.0 / (1.0 + ratio);
        let eta1 = ratio / (1.0 + ratio);
        let p = UsdProblem::new(rho0.clone(), rho1.clone(), eta0, eta1, &opts.cfg)?;
        let analysis = analyze_problem(&p, &opts.cfg)?;
        let b = analysis
            .bounds
            .as_ref()
            .expect("every analysis carries a bounds report");
        // Degenerate pairs have no conditions to check: zero fidelity is
        // attained by the projective measurement, full overlap is not a
        // saturation of anything.
        let saturated = match analysis.degenerate {
            Some(Degenerate::ZeroFidelity) => true,
            Some(Degenerate::FullyOverlapping) => false,
            None => analysis.saturated(),
        };
        let (m0, m1) = analysis
            .saturation
            .as_ref()
            .map(|s| (s.cond0_min_eig, s.cond1_min_eig))
            .unwrap_or((0.0, 0.0));
        rows.push(SweepRow {
            ratio,
            eta0,
            eta1,
            regime: b.regime.as_str().to_string(),
            alpha: b.alpha,
            q_bound: b.q_bound,
            lifted_q_bound: analysis.lift(b.q_bound),
            rudolph_bound: b.rudolph_bound,
            helstrom_q: b.helstrom_q,
            cond0_min_eig: m0,
            cond1_min_eig: m1,
            saturated,
        });
    }
    let stdout = match opts.format {
        Format::Text => sweep_to_text(&rows),
        Format::Machine => sweep_to_machine(&rows),
    };
    Ok(Outcome {
        stdout,
        exit_code: 0,
    })
}

/// Sweep rows as data, for callers that want the numbers rather than the
/// rendered table.
pub fn sweep_rows(
    file: &ProblemFile,
    ratio_min: f64,
    ratio_max: f64,
    steps: usize,
    opts: &CommonOpts,
) -> Result<Vec<SweepRow>> {
    let outcome = run_sweep(
        file,
        ratio_min,
        ratio_max,
        steps,
        &CommonOpts {
            format: Format::Machine,
            ..*opts
        },
    )?;
    Ok(serde_json::from_str(&outcome.stdout)?)
}
