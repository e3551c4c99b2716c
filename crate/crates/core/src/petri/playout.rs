//! Random play-out of workflow nets into event logs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::log::{EventLog, Trace};

use super::WfNet;

/// Attempts per emitted trace before giving up.
pub const RETRY_CAP: usize = 1000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlayoutError {
    #[error("number of traces must be at least 1")]
    NoTraces,
    #[error(
        "no run reached the final marking within {max_len} events after {attempts} attempts; try a larger max_len"
    )]
    RetriesExhausted { max_len: usize, attempts: usize },
}

/// Samples `n_traces` complete runs of `w`.
///
/// Each step fires a transition chosen uniformly among the enabled ones.
/// A run that deadlocks, exceeds `max_len` visible events, or takes too many
/// silent steps is discarded and resampled, so every emitted trace ends in
/// `[f]`. The output depends only on the net and `seed`.
pub fn playout(w: &WfNet, n_traces: usize, max_len: usize, seed: u64) -> Result<EventLog, PlayoutError> {
    if n_traces == 0 {
        return Err(PlayoutError::NoTraces);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_steps = 16 * (max_len + 1) + w.net().transition_count();
    let mut log = EventLog::new();
    for _ in 0..n_traces {
        let trace = (0..RETRY_CAP)
            .find_map(|_| sample_run(w, max_len, max_steps, &mut rng))
            .ok_or(PlayoutError::RetriesExhausted { max_len, attempts: RETRY_CAP })?;
        log.push(trace);
    }
    Ok(log)
}

fn sample_run(w: &WfNet, max_len: usize, max_steps: usize, rng: &mut ChaCha8Rng) -> Option<Trace> {
    let net = w.net();
    let mut m = w.initial_marking();
    let mut trace = Trace::empty();
    for _ in 0..max_steps {
        if w.is_final(&m) {
            return Some(trace);
        }
        let enabled = net.enabled(&m);
        if enabled.is_empty() {
            return None;
        }
        let t = enabled[rng.random_range(0..enabled.len())];
        if let Some(a) = &net.transition(t).label {
            if trace.len() == max_len {
                return None;
            }
            trace.push(a.clone());
        }
        m = net.fire_unchecked(&m, t);
    }
    w.is_final(&m).then_some(trace)
}
