//! Hierarchical discovery: lifting low-level logs to sub-process names,
//! acyclic high-level discovery, loop detection and folding, and the
//! driver that assembles an HWF-net.

mod acyclic;
mod driver;
mod loops;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::discovery::DiscoveryError;
use crate::log::{remove_stuttering, Activity, EventLog, Trace};
use crate::partition::{LoopIncompatibility, Partition, PartitionViolation};

pub use acyclic::{discover_highlevel, discover_highlevel_acyclic, HighLevelDiscovery, HighLevelStrategy};
pub use driver::{
    discover_hwf, discover_hwf_refining, HwfDiscovery, IterationRecord, LoopPlacement, LoopRecord, RefinedDiscovery,
};
pub use loops::{find_inner_loop_alphabet, fold_loop, iteration_pieces, loop_candidates};

/// Default cap on clones per trace.
pub const DEFAULT_CLONE_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub clone_cap: usize,
    /// Search states per fitness check.
    pub budget: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { clone_cap: DEFAULT_CLONE_CAP, budget: crate::conformance::DEFAULT_BUDGET }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AbstractionError {
    #[error("{0}")]
    Partition(#[from] PartitionViolation),
    #[error("{0}")]
    LoopIncompatible(#[from] LoopIncompatibility),
    #[error("activity {0:?} belongs to no sub-process")]
    Unassigned(Activity),
    #[error("trace {trace} has more than {cap} clones")]
    CloneCap { trace: Trace, cap: usize },
    #[error("discovery failed: {0}")]
    Discovery(#[from] DiscoveryError),
}

/// Replaces every activity by its sub-process name and removes stuttering.
pub fn lift_log(log: &EventLog, partition: &Partition) -> Result<EventLog, AbstractionError> {
    let lookup = partition.lookup();
    let mut out = EventLog::new();
    for (trace, n) in log.iter() {
        let mut lifted = Trace::empty();
        for a in trace.iter() {
            let g = lookup.get(a).ok_or_else(|| AbstractionError::Unassigned(a.clone()))?;
            lifted.push(g.clone());
        }
        out.add(remove_stuttering(&lifted), n);
    }
    Ok(out)
}

/// All ways of keeping exactly one occurrence of every activity of `sigma`,
/// each followed by stutter removal, without duplicates.
///
/// Fails when the number of combinations exceeds `cap`.
pub fn clone_traces(sigma: &Trace, cap: usize) -> Result<BTreeSet<Trace>, AbstractionError> {
    let mut positions: std::collections::BTreeMap<&Activity, Vec<usize>> = Default::default();
    for (k, a) in sigma.iter().enumerate() {
        positions.entry(a).or_default().push(k);
    }
    let choices: Vec<&Vec<usize>> = positions.values().filter(|p| p.len() > 1).collect();
    let total = choices.iter().try_fold(1usize, |acc, p| acc.checked_mul(p.len()).filter(|n| *n <= cap));
    if total.is_none() {
        return Err(AbstractionError::CloneCap { trace: sigma.clone(), cap });
    }
    let mut out = BTreeSet::new();
    let mut digit = vec![0usize; choices.len()];
    loop {
        let mut keep = vec![true; sigma.len()];
        for (c, &d) in choices.iter().zip(&digit) {
            for (k, &pos) in c.iter().enumerate() {
                keep[pos] = k == d;
            }
        }
        let clone: Trace = sigma.iter().zip(&keep).filter(|(_, k)| **k).map(|(a, _)| a.clone()).collect();
        out.insert(remove_stuttering(&clone));
        // Mixed-radix increment.
        let mut i = 0;
        while i < digit.len() {
            digit[i] += 1;
            if digit[i] < choices[i].len() {
                break;
            }
            digit[i] = 0;
            i += 1;
        }
        if i == digit.len() {
            break;
        }
    }
    Ok(out)
}

/// Every trace replaced by its clones; each clone inherits the trace's
/// multiplicity.
pub fn clone_log(log: &EventLog, cap: usize) -> Result<EventLog, AbstractionError> {
    let mut out = EventLog::new();
    for (trace, n) in log.iter() {
        for c in clone_traces(trace, cap)? {
            out.add(c, n);
        }
    }
    Ok(out)
}
