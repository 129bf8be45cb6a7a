//! Problem files: a self-describing JSON document with explicit `[re, im]`
//! entry pairs, or a named generator spec, plus priors and an optional
//! inline measurement.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use usd_core::states;
use usd_core::usd::UsdPovm;
use usd_core::{C64, ComplexMatrix, DensityMatrix, HermitianMatrix, NumericConfig, UsdProblem};

/// Row-major matrix of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.dim())
        .map(|i| {
            (0..m.dim())
                .map(|j| {
                    let z = m[(i, j)];
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix> {
    let dim = rows.len();
    if dim == 0 {
        bail!("matrix must have at least one row");
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim {
            bail!("matrix row {i} has {} entries, expected {dim}", row.len());
        }
    }
    Ok(ComplexMatrix::from_fn(dim, |i, j| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}

/// Named generator alternatives to explicit matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// Two pure qubit states with `⟨ψ₀|ψ₁⟩ = overlap · e^{i·phase}`.
    PurePair {
        overlap: f64,
        #[serde(default)]
        phase: f64,
    },
    /// The 4×4 coherent-state mixtures from four normalized amplitudes.
    CoherentQkd { c: [[f64; 2]; 4] },
    /// The fixed geometrically uniform pair that defeats the bounds.
    Counterexample,
    /// Random states of the given ranks with non-overlapping supports.
    RandomPair {
        dim: usize,
        rank0: usize,
        rank1: usize,
        seed: u64,
    },
}

/// Inline measurement, used by the simulate command when the closed-form
/// POVM is not available.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmJson {
    pub e0: MatrixJson,
    pub e1: MatrixJson,
    pub e_inc: MatrixJson,
}

/// On-disk problem description. Exactly one of the explicit matrices or
/// the generator spec must be present.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub eta0: f64,
    pub eta1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho0: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho1: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub povm: Option<PovmJson>,
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read problem file {}", path.display()))?;
        let file: ProblemFile = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse problem file {}", path.display()))?;
        Ok(file)
    }

    /// Materialize the two states, running the generator if present.
    pub fn states(&self, cfg: &NumericConfig) -> Result<(DensityMatrix, DensityMatrix)> {
        match (&self.rho0, &self.rho1, &self.generator) {
            (Some(r0), Some(r1), None) => {
                let rho0 = DensityMatrix::from_matrix(&matrix_from_json(r0)?, cfg)
                    .context("rho0 is not a valid density matrix")?;
                let rho1 = DensityMatrix::from_matrix(&matrix_from_json(r1)?, cfg)
                    .context("rho1 is not a valid density matrix")?;
                Ok((rho0, rho1))
            }
            (None, None, Some(generator)) => generate(generator, cfg),
            (None, Some(_), None) | (Some(_), None, None) => {
                bail!("explicit problems need both rho0 and rho1")
            }
            _ => bail!("provide either explicit matrices or a generator spec, not both"),
        }
    }

    /// Build the problem with priors taken from the file, or overridden by
    /// an `η₁/η₀` ratio.
    pub fn problem(&self, ratio: Option<f64>, cfg: &NumericConfig) -> Result<UsdProblem> {
        let (rho0, rho1) = self.states(cfg)?;
        let (eta0, eta1) = match ratio {
            Some(r) => {
                if !(r > 0.0 && r.is_finite()) {
                    bail!("--ratio must be a positive finite number");
                }
                (1.0 / (1.0 + r), r / (1.0 + r))
            }
            None => (self.eta0, self.eta1),
        };
        Ok(UsdProblem::new(rho0, rho1, eta0, eta1, cfg)?)
    }

    pub fn inline_povm(&self, cfg: &NumericConfig) -> Result<Option<UsdPovm>> {
        let Some(raw) = &self.povm else {
            return Ok(None);
        };
        let lift = |m: &MatrixJson, name: &str| -> Result<HermitianMatrix> {
            HermitianMatrix::hermitize(&matrix_from_json(m)?, cfg)
                .with_context(|| format!("inline POVM element {name} is not Hermitian"))
        };
        Ok(Some(UsdPovm {
            e0: lift(&raw.e0, "e0")?,
            e1: lift(&raw.e1, "e1")?,
            e_inc: lift(&raw.e_inc, "e_inc")?,
        }))
    }
}

fn generate(
    spec: &GeneratorSpec,
    cfg: &NumericConfig,
) -> Result<(DensityMatrix, DensityMatrix)> {
    match spec {
        GeneratorSpec::PurePair { overlap, phase } => {
            Ok(states::pure_pair(*overlap, *phase, cfg)?)
        }
        GeneratorSpec::CoherentQkd { c } => {
            let amplitudes = c.map(|[re, im]| C64::new(re, im));
            let coeffs = states::CoherentCoeffs::new(amplitudes, cfg)?;
            Ok(states::coherent_qkd_pair(&coeffs, cfg)?)
        }
        GeneratorSpec::Counterexample => Ok(states::counterexample_pair(cfg)),
        GeneratorSpec::RandomPair {
            dim,
            rank0,
            rank1,
            seed,
        } => {
            let p = states::random_nonoverlapping_problem(*dim, *rank0, *rank1, 0.5, *seed, cfg)?;
            Ok((p.rho0().clone(), p.rho1().clone()))
        }
    }
}
