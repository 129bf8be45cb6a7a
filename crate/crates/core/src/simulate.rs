//! Monte-Carlo sampling of measurement outcomes: draw a signal state by its
//! prior, then an outcome by `Tr(E ρ)`, and compare the empirical failure
//! rate with the analytic one. Conclusive misidentifications are counted
//! separately; for a valid unambiguous measurement they never occur.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::matlin::NumericConfig;
use crate::usd::{UsdPovm, UsdProblem};

/// Outcome probabilities below this are a hard error; between here and zero
/// they are rounding noise, clipped and renormalized away.
const NEGATIVE_PROB_FLOOR: f64 = -1e-9;

const BATCH_SHOTS: u64 = 1 << 16;

/// Tally of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimReport {
    pub shots: u64,
    /// Conclusive "state 0" outcomes.
    pub n0: u64,
    /// Conclusive "state 1" outcomes.
    pub n1: u64,
    /// Inconclusive outcomes.
    pub n_inconclusive: u64,
    /// Conclusive outcomes naming the wrong state.
    pub n_error: u64,
    pub empirical_q: f64,
    pub empirical_error_rate: f64,
    /// Binomial standard error `√(q̂(1−q̂)/shots)`.
    pub stderr_q: f64,
}

/// Sample `shots` outcomes of the measurement, deterministic per seed.
///
/// Shots are processed in fixed-size batches with per-batch subseeds, so
/// the tally is independent of batch scheduling.
pub fn run_sim(
    p: &UsdProblem,
    m: &UsdPovm,
    shots: u64,
    seed: u64,
    cfg: &NumericConfig,
) -> Result<SimReport> {
    if shots < 1 {
        return Err(Error::InvalidParameter {
            what: "simulation needs at least one shot",
        });
    }
    m.validate(p, cfg)?;

    // outcome_probs[signal][outcome], outcomes ordered E0, E1, E?.
    let mut outcome_probs = [[0.0f64; 3]; 2];
    for (signal, rho) in [p.rho0(), p.rho1()].into_iter().enumerate() {
        for (k, element) in [&m.e0, &m.e1, &m.e_inc].into_iter().enumerate() {
            let prob = (element.matrix() * rho.matrix().matrix()).trace().re;
            if prob < NEGATIVE_PROB_FLOOR {
                return Err(Error::NegativeProbability { value: prob });
            }
            outcome_probs[signal][k] = prob.max(0.0);
        }
        let total: f64 = outcome_probs[signal].iter().sum();
        for prob in outcome_probs[signal].iter_mut() {
            *prob /= total;
        }
    }
    let cumulative = outcome_probs.map(|row| [row[0], row[0] + row[1]]);

    let mut counts = [0u64; 3];
    let mut n_error = 0u64;
    let mut remaining = shots;
    let mut batch_index = 0u64;
    while remaining > 0 {
        let batch = remaining.min(BATCH_SHOTS);
        let mut rng = ChaCha8Rng::seed_from_u64(
            seed ^ batch_index.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(batch_index),
        );
        for _ in 0..batch {
            let signal = usize::from(rng.gen::<f64>() >= p.eta0());
            let draw = rng.gen::<f64>();
            let outcome = if draw < cumulative[signal][0] {
                0
            } else if draw < cumulative[signal][1] {
                1
            } else {
                2
            };
            counts[outcome] += 1;
            if outcome < 2 && outcome != signal {
                n_error += 1;
            }
        }
        remaining -= batch;
        batch_index += 1;
    }

    let empirical_q = counts[2] as f64 / shots as f64;
    Ok(SimReport {
        shots,
        n0: counts[0],
        n1: counts[1],
        n_inconclusive: counts[2],
        n_error,
        empirical_q,
        empirical_error_rate: n_error as f64 / shots as f64,
        stderr_q: math::sqrt(empirical_q * (1.0 - empirical_q) / shots as f64),
    })
}
