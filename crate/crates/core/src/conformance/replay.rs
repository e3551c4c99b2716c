use std::collections::{HashSet, VecDeque};

use crate::log::{EventLog, Trace};
use crate::petri::{Marking, PetriNet, TransitionId, WfNet};

use super::alignment::perfectly_fits;

/// States explored when searching for silent firings that enable a
/// transition.
const SILENT_SEARCH: usize = 10_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReplayCounts {
    pub produced: u64,
    pub consumed: u64,
    pub missing: u64,
    pub remaining: u64,
}

impl ReplayCounts {
    pub fn fitness(&self) -> f64 {
        let part = |num: u64, den: u64| if den == 0 { 1.0 } else { 1.0 - num as f64 / den as f64 };
        0.5 * part(self.missing, self.consumed) + 0.5 * part(self.remaining, self.produced)
    }
}

/// Shortest sequence of silent firings from `m` to a marking satisfying
/// `goal`.
fn silent_path(net: &PetriNet, m: &Marking, goal: impl Fn(&Marking) -> bool) -> Option<Vec<TransitionId>> {
    if goal(m) {
        return Some(Vec::new());
    }
    let mut seen: HashSet<Marking> = HashSet::from([m.clone()]);
    let mut queue: VecDeque<(Marking, Vec<TransitionId>)> = VecDeque::from([(m.clone(), Vec::new())]);
    while let Some((cur, path)) = queue.pop_front() {
        if seen.len() > SILENT_SEARCH {
            return None;
        }
        for t in net.enabled(&cur) {
            if !net.transition(t).is_silent() {
                continue;
            }
            let next = net.fire_unchecked(&cur, t);
            if seen.insert(next.clone()) {
                let mut p = path.clone();
                p.push(t);
                if goal(&next) {
                    return Some(p);
                }
                queue.push_back((next, p));
            }
        }
    }
    None
}

fn fire_counting(net: &PetriNet, m: &mut Marking, t: TransitionId, c: &mut ReplayCounts) {
    let tr = net.transition(t);
    for (p, w) in &tr.input {
        let have = m.0[p.0];
        if have < *w {
            c.missing += u64::from(w - have);
            m.0[p.0] = *w;
        }
        m.0[p.0] -= w;
        c.consumed += u64::from(*w);
    }
    for (p, w) in &tr.output {
        m.0[p.0] += w;
        c.produced += u64::from(*w);
    }
}

/// Token-based replay of one trace. Labels are resolved greedily: an
/// enabled transition if there is one, else one reachable through silent
/// firings, else the first transition with that label, forcing missing
/// tokens. Events whose label the net does not have count as one missing
/// and one consumed token.
pub fn replay_trace(w: &WfNet, sigma: &Trace) -> ReplayCounts {
    let net = w.net();
    let mut m = w.initial_marking();
    let mut c = ReplayCounts { produced: 1, ..Default::default() };
    for a in sigma.iter() {
        let candidates: Vec<TransitionId> =
            net.transitions().filter(|(_, t)| t.label.as_ref() == Some(a)).map(|(id, _)| id).collect();
        if candidates.is_empty() {
            c.missing += 1;
            c.consumed += 1;
            continue;
        }
        let t = match candidates.iter().find(|t| net.is_enabled(&m, **t)) {
            Some(t) => *t,
            None => match silent_path(net, &m, |x| candidates.iter().any(|t| net.is_enabled(x, *t))) {
                Some(path) => {
                    for s in path {
                        fire_counting(net, &mut m, s, &mut c);
                    }
                    *candidates.iter().find(|t| net.is_enabled(&m, **t)).expect("enabled after silent path")
                }
                None => candidates[0],
            },
        };
        fire_counting(net, &mut m, t, &mut c);
    }
    if let Some(path) = silent_path(net, &m, |x| w.is_final(x)) {
        for s in path {
            fire_counting(net, &mut m, s, &mut c);
        }
    }
    let sink = w.sink();
    c.consumed += 1;
    if m.0[sink.0] == 0 {
        c.missing += 1;
    } else {
        m.0[sink.0] -= 1;
    }
    c.remaining = m.total();
    c
}

/// Multiplicity-weighted mean of per-trace replay fitness. Traces that fit
/// perfectly score exactly 1.
pub fn token_replay_fitness(w: &WfNet, log: &EventLog, budget: usize) -> f64 {
    let (mut sum, mut weight) = (0.0, 0u64);
    for (trace, n) in log.iter() {
        let f = if perfectly_fits(w, trace, budget) == Ok(true) { 1.0 } else { replay_trace(w, trace).fitness() };
        sum += f * n as f64;
        weight += n;
    }
    if weight == 0 {
        1.0
    } else {
        sum / weight as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::petri::build;

    #[test]
    fn fitting_trace_has_no_missing_or_remaining() {
        let w = build::compensation_request();
        let t =
            Trace::from_names(["register request", "check ticket", "examine casually", "decide", "pay compensation"]);
        let c = replay_trace(&w, &t);
        assert_eq!((c.missing, c.remaining), (0, 0));
        assert_eq!(c.fitness(), 1.0);
    }

    #[test]
    fn skipped_event_costs_tokens() {
        let w = build::seq(&["a", "b", "c"]);
        let c = replay_trace(&w, &Trace::from_names(["a", "c"]));
        assert_eq!(c.missing, 1);
        assert_eq!(c.remaining, 1);
        let f = c.fitness();
        assert!(f < 1.0 && f > 0.0);
        let log = [Trace::from_names(["a", "c"])].into_iter().collect();
        assert_eq!(token_replay_fitness(&w, &log, 1000), f);
    }

    #[test]
    fn silent_steps_are_taken() {
        let w = build::parallel(&["a", "b"]);
        let log = [Trace::from_names(["b", "a"])].into_iter().collect();
        assert_eq!(token_replay_fitness(&w, &log, 1000), 1.0);
        let c = replay_trace(&w, &Trace::from_names(["b", "a"]));
        assert_eq!((c.missing, c.remaining), (0, 0));
    }
}
