//! Detection and folding of repetitive behavior.
//!
//! A repeat window is a segment `σ[i..=j]` between two consecutive
//! occurrences of the same activity. The alphabets of all repeat windows,
//! merged while two of them partially overlap, form a laminar family of
//! repetitive components; the innermost ones are the minimal sets.

use std::collections::{BTreeMap, BTreeSet};

use crate::log::{Activity, ActivitySet, EventLog, Trace};

/// The laminar family of repetitive components of `log`.
pub fn loop_candidates(log: &EventLog) -> BTreeSet<ActivitySet> {
    let mut family: BTreeSet<ActivitySet> = BTreeSet::new();
    for (trace, _) in log.iter() {
        let mut last: BTreeMap<&Activity, usize> = BTreeMap::new();
        for (j, a) in trace.iter().enumerate() {
            if let Some(&i) = last.get(a) {
                family.insert(trace[i..=j].iter().cloned().collect());
            }
            last.insert(a, j);
        }
    }
    loop {
        let sets: Vec<&ActivitySet> = family.iter().collect();
        let overlapping = sets.iter().enumerate().find_map(|(k, x)| {
            sets[k + 1..]
                .iter()
                .find(|y| !x.is_disjoint(y) && !x.is_subset(y) && !y.is_subset(x))
                .map(|y| ((*x).clone(), (*y).clone()))
        });
        let Some((x, y)) = overlapping else { break };
        family.remove(&x);
        family.remove(&y);
        family.insert(x.union(&y).cloned().collect());
    }
    family
}

/// The alphabet of an innermost repetitive component: minimal by
/// inclusion, ties broken by the smallest set in lexicographic order.
/// `None` exactly when no trace repeats an activity.
pub fn find_inner_loop_alphabet(log: &EventLog) -> Option<ActivitySet> {
    let family = loop_candidates(log);
    family.iter().find(|b| !family.iter().any(|c| c != *b && c.is_subset(b))).cloned()
}

/// Replaces every activity of `body` by `beta` and collapses runs of
/// `beta`, so each maximal segment of body activities becomes one `beta`.
/// Other repetitions are left alone.
pub fn fold_loop(log: &EventLog, body: &ActivitySet, beta: &Activity) -> EventLog {
    log.map_traces(|t| {
        let mut out = Trace::empty();
        for a in t.iter() {
            let a = if body.contains(a) { beta } else { a };
            if !(a == beta && out.last() == Some(beta)) {
                out.push(a.clone());
            }
        }
        out
    })
}

/// The iterations of the loop with alphabet `body`: each maximal segment of
/// body activities is cut greedily into pieces without repeated
/// activities, a new piece starting whenever the next activity already
/// occurs in the current one.
pub fn iteration_pieces(log: &EventLog, body: &ActivitySet) -> EventLog {
    let mut out = EventLog::new();
    for (trace, n) in log.iter() {
        let mut piece: Vec<Activity> = Vec::new();
        for a in trace.iter() {
            if (!body.contains(a) || piece.contains(a)) && !piece.is_empty() {
                out.add(Trace::new(std::mem::take(&mut piece)), n);
            }
            if body.contains(a) {
                piece.push(a.clone());
            }
        }
        if !piece.is_empty() {
            out.add(Trace::new(piece), n);
        }
    }
    out
}
