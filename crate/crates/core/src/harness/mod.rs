//! Experiment runner: config files, brute-force oracles, Monte Carlo studies
//! and CSV output.

mod config;
mod grid;
mod montecarlo;
mod planio;
mod sweep;

pub use config::{
    ConstraintsSection, ExperimentConfig, ExperimentKind, ExperimentSection, Measurements,
    ScenarioSection, TargetSection,
};
pub use grid::{grid_det, run_grid, write_grid_csv, GridResult};
pub use montecarlo::{
    monte_carlo, run_montecarlo, write_montecarlo_csv, MonteCarloRow, MonteCarloSettings,
};
pub use planio::{read_plan_csv, run_eval, run_plan, write_plan_csv, EvalReport, PlanReport};
pub use sweep::{distance_sweep, run_sweep, write_sweep_csv, SweepMode, SweepResult, SweepRow};

use thiserror::Error;

use crate::estimator::EstimatorError;
use crate::fim::FimError;
use crate::model::ModelError;
use crate::synthesis::SynthesisError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("{source_name}: {message}")]
    Parse {
        source_name: String,
        message: String,
    },
    #[error("plan file line {line}: {message}")]
    PlanFile { line: usize, message: String },
    #[error("invalid experiment parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: String },
    #[error("grid oracle needs exactly 3 UAVs, scenario has {0}")]
    UnsupportedShape(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Fim(#[from] FimError),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error("cannot write output: {0}")]
    Write(String),
}

impl HarnessError {
    /// 2 for unreadable or malformed input, 1 for well-formed input that is
    /// invalid, infeasible or unsupported.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Read { .. }
            | HarnessError::Parse { .. }
            | HarnessError::PlanFile { .. } => 2,
            _ => 1,
        }
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Write(e.to_string())
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Write(e.to_string())
    }
}
