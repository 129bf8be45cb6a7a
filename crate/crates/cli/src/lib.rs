//! Command-line front end for two-state unambiguous discrimination: parse
//! problem files, compose the reduction, bounds, saturation, POVM, oracle
//! and simulation layers, and emit human- or machine-readable reports.

pub mod problem;
pub mod report;
pub mod run;

pub use problem::{GeneratorSpec, ProblemFile};
pub use report::{Report, SweepRow};
pub use run::{
    run_analyze, run_oracle, run_simulate, run_sweep, sweep_rows, CommonOpts, Format, Outcome,
};
