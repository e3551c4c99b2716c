//! Fitness and precision of workflow nets with respect to event logs.

mod alignment;
mod precision;
mod replay;

use serde::Serialize;
use thiserror::Error;

use crate::log::EventLog;
use crate::petri::WfNet;

pub use alignment::{
    align, alignment_fitness, perfectly_fits, trace_fitness, Alignment, FitnessResult, Move, TraceFitness,
};
pub use precision::{aligned_log, etc_precision, PrecisionResult};
pub use replay::{replay_trace, token_replay_fitness, ReplayCounts};

/// Default number of search states per query.
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("state budget exceeded")]
pub struct BudgetExceeded;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ConformanceError {
    #[error("the log is empty; fitness and precision are undefined")]
    EmptyLog,
    #[error("the final marking is unreachable")]
    NoFinalRun,
    #[error("state budget exceeded")]
    BudgetExceeded,
    #[error("internal error: {0}")]
    Internal(String),
}

/// `{"fitness": …, "precision": …, "traces": […]}`
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConformanceReport {
    pub fitness: f64,
    pub precision: f64,
    pub token_replay_fitness: f64,
    pub partial: bool,
    pub traces: Vec<TraceFitness>,
}

pub fn conformance_report(w: &WfNet, log: &EventLog, budget: usize) -> Result<ConformanceReport, ConformanceError> {
    let fit = alignment_fitness(w, log, budget)?;
    let prec = etc_precision(w, log, budget)?;
    Ok(ConformanceReport {
        fitness: fit.fitness,
        precision: prec.precision,
        token_replay_fitness: token_replay_fitness(w, log, budget),
        partial: fit.partial,
        traces: fit.traces,
    })
}
