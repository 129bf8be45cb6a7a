use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use usd_cli::{run_analyze, run_oracle, run_simulate, run_sweep, CommonOpts, ProblemFile};
use usd_core::NumericConfig;

/// Unambiguous discrimination of two mixed quantum states: fidelity
/// bounds, attainability conditions, optimal measurements, brute-force
/// bracketing and Monte-Carlo validation.
#[derive(Parser)]
#[command(name = "usd", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce the problem, evaluate the bounds and saturation conditions,
    /// and build the optimal measurement when it exists.
    Analyze {
        /// Problem file (JSON).
        file: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Bracket the optimum with the derivative-free optimizer.
    Oracle {
        file: PathBuf,
        /// Independent optimizer restarts, merged by minimum.
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Sample measurement outcomes and compare with the analytic failure
    /// probability.
    Simulate {
        file: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Scan the prior ratio η₁/η₀ over a logarithmic grid and emit
    /// plot-ready columns.
    Sweep {
        file: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        ratio_min: f64,
        #[arg(long, default_value_t = 10.0)]
        ratio_max: f64,
        #[arg(long, default_value_t = 41)]
        steps: usize,
        #[command(flatten)]
        common: CommonFlags,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

#[derive(Args)]
struct CommonFlags {
    /// Override the file's priors with η₁/η₀ (ignored by sweep).
    #[arg(long)]
    ratio: Option<f64>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Relative tolerance for accepting matrices as Hermitian.
    #[arg(long)]
    tol_hermitian: Option<f64>,
    /// Relative eigenvalue floor for positivity checks.
    #[arg(long)]
    tol_psd: Option<f64>,
    /// Relative cutoff for numerical ranks and pseudo-inverses.
    #[arg(long)]
    tol_rank: Option<f64>,
    /// Absolute tolerance for unitarity checks.
    #[arg(long)]
    tol_unitary: Option<f64>,
    /// Absolute tolerance for scalar comparisons.
    #[arg(long)]
    tol_equality: Option<f64>,
}

impl CommonFlags {
    fn to_opts(&self) -> anyhow::Result<CommonOpts> {
        let mut cfg = NumericConfig::default();
        if let Some(v) = self.tol_hermitian {
            cfg.tol_hermitian = v;
        }
        if let Some(v) = self.tol_psd {
            cfg.tol_psd = v;
        }
        if let Some(v) = self.tol_rank {
            cfg.tol_rank = v;
        }
        if let Some(v) = self.tol_unitary {
            cfg.tol_unitary = v;
        }
        if let Some(v) = self.tol_equality {
            cfg.tol_equality = v;
        }
        cfg.validate()?;
        Ok(CommonOpts {
            ratio: self.ratio,
            format: match self.format {
                FormatArg::Text => usd_cli::Format::Text,
                FormatArg::Machine => usd_cli::Format::Machine,
            },
            cfg,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = (|| -> anyhow::Result<usd_cli::Outcome> {
        match &cli.command {
            Command::Analyze { file, common } => {
                run_analyze(&ProblemFile::load(file)?, &common.to_opts()?)
            }
            Command::Oracle {
                file,
                restarts,
                seed,
                common,
            } => run_oracle(&ProblemFile::load(file)?, *restarts, *seed, &common.to_opts()?),
            Command::Simulate {
                file,
                shots,
                seed,
                common,
            } => run_simulate(&ProblemFile::load(file)?, *shots, *seed, &common.to_opts()?),
            Command::Sweep {
                file,
                ratio_min,
                ratio_max,
                steps,
                common,
            } => run_sweep(
                &ProblemFile::load(file)?,
                *ratio_min,
                *ratio_max,
                *steps,
                &common.to_opts()?,
            ),
        }
    })();
    match outcome {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
