//! Base inductive miner: recursive cut detection on the directly-follows
//! graph, with no noise filtering, so every trace of the input log is in the
//! language of the result.
//!
//! Order of attempts: empty traces, single-activity base cases, then the
//! exclusive-choice, sequence, parallel and loop cuts; when none applies the
//! log is split at end→start adjacencies into a silent-redo loop, and as a
//! last resort a flower loop over the alphabet is returned.

use std::collections::{BTreeMap, BTreeSet};

use crate::log::{project, Activity, ActivitySet, EventLog, Trace};

use super::dfg::{build_dfg, Dfg};
use super::tree::ProcessTree;

/// Discovers a process tree whose language contains every trace of `log`.
/// An empty log yields `tau`.
pub fn inductive_discover(log: &EventLog) -> ProcessTree {
    mine(log).simplified()
}

fn mine(log: &EventLog) -> ProcessTree {
    let empties = log.multiplicity(&Trace::empty());
    if empties > 0 {
        let rest: EventLog = log.iter().filter(|(t, _)| !t.is_empty()).map(|(t, n)| (t.clone(), n)).collect();
        if rest.is_empty() {
            return ProcessTree::Tau;
        }
        return ProcessTree::Xor(vec![ProcessTree::Tau, mine(&rest)]);
    }
    let alphabet = log.alphabet();
    if alphabet.len() == 1 {
        let a = alphabet.into_iter().next().unwrap();
        if log.iter().all(|(t, _)| t.len() == 1) {
            return ProcessTree::Activity(a);
        }
        return ProcessTree::Loop(vec![ProcessTree::Activity(a), ProcessTree::Tau]);
    }
    let dfg = build_dfg(log);
    if let Some(groups) = xor_cut(&dfg) {
        return ProcessTree::Xor(groups.iter().map(|g| mine(&filter_traces(log, g))).collect());
    }
    if let Some(groups) = sequence_cut(&dfg) {
        return ProcessTree::Seq(groups.iter().map(|g| mine(&project_onto(log, g))).collect());
    }
    if let Some(groups) = parallel_cut(&dfg) {
        return ProcessTree::Par(groups.iter().map(|g| mine(&project_onto(log, g))).collect());
    }
    if let Some((body, redo)) = loop_cut(&dfg) {
        let (body_log, redo_logs) = split_loop(log, &body, &redo);
        let mut children = vec![mine(&body_log)];
        children.extend(redo_logs.iter().map(mine));
        return ProcessTree::Loop(children);
    }
    if let Some(pieces) = split_at_restarts(log, &dfg) {
        return ProcessTree::Loop(vec![mine(&pieces), ProcessTree::Tau]);
    }
    flower(&alphabet)
}

/// `loop(tau, a1, …, an)`: any sequence over the alphabet.
pub fn flower(alphabet: &ActivitySet) -> ProcessTree {
    let mut children = vec![ProcessTree::Tau];
    children.extend(alphabet.iter().cloned().map(ProcessTree::Activity));
    ProcessTree::Loop(children)
}

fn filter_traces(log: &EventLog, group: &ActivitySet) -> EventLog {
    log.iter().filter(|(t, _)| t.first().is_some_and(|a| group.contains(a))).map(|(t, n)| (t.clone(), n)).collect()
}

fn project_onto(log: &EventLog, group: &ActivitySet) -> EventLog {
    log.iter().map(|(t, n)| (project(t, group), n)).collect()
}

/// Union-find over indices.
struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi] = lo;
        }
    }

    /// Groups of members, ordered by their smallest member.
    fn groups(&mut self) -> Vec<Vec<usize>> {
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..self.0.len() {
            let r = self.find(x);
            by_root.entry(r).or_default().push(x);
        }
        let mut out: Vec<Vec<usize>> = by_root.into_values().collect();
        out.sort_by_key(|g| g[0]);
        out
    }
}

fn to_sets(nodes: &[&Activity], groups: Vec<Vec<usize>>) -> Vec<ActivitySet> {
    groups.into_iter().map(|g| g.into_iter().map(|k| nodes[k].clone()).collect()).collect()
}

fn xor_cut(dfg: &Dfg) -> Option<Vec<ActivitySet>> {
    let nodes: Vec<&Activity> = dfg.nodes.iter().collect();
    let index: BTreeMap<&Activity, usize> = nodes.iter().enumerate().map(|(k, a)| (*a, k)).collect();
    let mut dsu = Dsu::new(nodes.len());
    for (a, b) in dfg.edges.keys() {
        dsu.union(index[a], index[b]);
    }
    let groups = dsu.groups();
    (groups.len() > 1).then(|| to_sets(&nodes, groups))
}

fn sequence_cut(dfg: &Dfg) -> Option<Vec<ActivitySet>> {
    let reach = dfg.reachability();
    let nodes: Vec<&Activity> = dfg.nodes.iter().collect();
    let r = |a: usize, b: usize| reach[nodes[a]].contains(nodes[b]);
    let n = nodes.len();
    let mut dsu = Dsu::new(n);
    // Strongly connected components, then pairwise unreachable nodes.
    for a in 0..n {
        for b in a + 1..n {
            if (r(a, b) && r(b, a)) || (!r(a, b) && !r(b, a)) {
                dsu.union(a, b);
            }
        }
    }
    let mut groups = dsu.groups();
    if groups.len() < 2 {
        return None;
    }
    // Order groups so that earlier groups reach later ones; reject the cut
    // unless every cross-group pair is ordered one way only.
    let precedes = |g: &Vec<usize>, h: &Vec<usize>| g.iter().all(|&a| h.iter().all(|&b| r(a, b) && !r(b, a)));
    let mut ordered: Vec<Vec<usize>> = Vec::new();
    while !groups.is_empty() {
        let k = (0..groups.len()).find(|&k| (0..groups.len()).all(|j| j == k || precedes(&groups[k], &groups[j])))?;
        ordered.push(groups.remove(k));
    }
    Some(to_sets(&nodes, ordered))
}

fn parallel_cut(dfg: &Dfg) -> Option<Vec<ActivitySet>> {
    let nodes: Vec<&Activity> = dfg.nodes.iter().collect();
    let n = nodes.len();
    let mut dsu = Dsu::new(n);
    for a in 0..n {
        for b in a + 1..n {
            if !(dfg.has_edge(nodes[a], nodes[b]) && dfg.has_edge(nodes[b], nodes[a])) {
                dsu.union(a, b);
            }
        }
    }
    let groups = dsu.groups();
    if groups.len() < 2 {
        return None;
    }
    let complete = |g: &Vec<usize>| {
        g.iter().any(|&k| dfg.start.contains_key(nodes[k])) && g.iter().any(|&k| dfg.end.contains_key(nodes[k]))
    };
    // Groups without both a start and an end activity join the first
    // complete group.
    let (mut good, bad): (Vec<Vec<usize>>, Vec<Vec<usize>>) = groups.into_iter().partition(complete);
    if good.is_empty() {
        return None;
    }
    for g in bad {
        good[0].extend(g);
    }
    if good.len() < 2 {
        return None;
    }
    for g in &mut good {
        g.sort();
    }
    good.sort_by_key(|g| g[0]);
    Some(to_sets(&nodes, good))
}

fn loop_cut(dfg: &Dfg) -> Option<(ActivitySet, Vec<ActivitySet>)> {
    let mut body: ActivitySet = dfg.start.keys().chain(dfg.end.keys()).cloned().collect();
    let rest: Vec<&Activity> = dfg.nodes.iter().filter(|a| !body.contains(*a)).collect();
    if rest.is_empty() {
        return None;
    }
    let index: BTreeMap<&Activity, usize> = rest.iter().enumerate().map(|(k, a)| (*a, k)).collect();
    let mut dsu = Dsu::new(rest.len());
    for (a, b) in dfg.edges.keys() {
        if let (Some(&x), Some(&y)) = (index.get(a), index.get(b)) {
            dsu.union(x, y);
        }
    }
    let starts: BTreeSet<&Activity> = dfg.start.keys().collect();
    let ends: BTreeSet<&Activity> = dfg.end.keys().collect();
    let mut redo = Vec::new();
    for group in to_sets(&rest, dsu.groups()) {
        let mut ok = true;
        for (a, b) in dfg.edges.keys() {
            if body.contains(a) && group.contains(b) {
                // Entering the redo part: only from end activities, and
                // from all of them.
                ok &= ends.contains(a) && ends.iter().all(|e| dfg.has_edge(e, b));
            }
            if group.contains(a) && body.contains(b) {
                // Leaving it: only to start activities, and to all of them.
                ok &= starts.contains(b) && starts.iter().all(|s| dfg.has_edge(a, s));
            }
        }
        if ok {
            redo.push(group);
        } else {
            body.extend(group);
        }
    }
    (!redo.is_empty()).then_some((body, redo))
}

/// Splits each trace into maximal body segments and redo segments. Traces
/// start and end in the body, so they read body (redo body)*.
fn split_loop(log: &EventLog, body: &ActivitySet, redo: &[ActivitySet]) -> (EventLog, Vec<EventLog>) {
    let mut body_log = EventLog::new();
    let mut redo_logs = vec![EventLog::new(); redo.len()];
    for (trace, n) in log.iter() {
        let mut segment: Vec<Activity> = Vec::new();
        let mut in_body = true;
        let mut flush = |seg: &mut Vec<Activity>, in_body: bool| {
            if seg.is_empty() {
                return;
            }
            let t = Trace::new(std::mem::take(seg));
            if in_body {
                body_log.add(t, n);
            } else {
                let k = redo.iter().position(|g| g.contains(&t[0])).expect("redo activity");
                redo_logs[k].add(t, n);
            }
        };
        for a in trace.iter() {
            let now_body = body.contains(a);
            if now_body != in_body || (!now_body && !segment.is_empty() && !same_group(redo, &segment[0], a)) {
                flush(&mut segment, in_body);
                in_body = now_body;
            }
            segment.push(a.clone());
        }
        flush(&mut segment, in_body);
    }
    (body_log, redo_logs)
}

fn same_group(groups: &[ActivitySet], a: &Activity, b: &Activity) -> bool {
    groups.iter().any(|g| g.contains(a) && g.contains(b))
}

/// Cuts traces wherever an end activity is directly followed by a start
/// activity. Returns `None` if no trace is cut.
fn split_at_restarts(log: &EventLog, dfg: &Dfg) -> Option<EventLog> {
    let mut out = EventLog::new();
    let mut cut = false;
    for (trace, n) in log.iter() {
        let mut piece: Vec<Activity> = Vec::new();
        for (k, a) in trace.iter().enumerate() {
            if k > 0 && dfg.end.contains_key(&trace[k - 1]) && dfg.start.contains_key(a) {
                out.add(Trace::new(std::mem::take(&mut piece)), n);
                cut = true;
            }
            piece.push(a.clone());
        }
        out.add(Trace::new(piece), n);
    }
    cut.then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log(traces: &[&[&str]]) -> EventLog {
        traces.iter().map(|t| Trace::from_names(t.iter())).collect()
    }

    fn mined(traces: &[&[&str]]) -> String {
        inductive_discover(&log(traces)).to_string()
    }

    #[test]
    fn single_trace_is_a_sequence() {
        assert_eq!(mined(&[&["a", "b"]]), "seq(a, b)");
    }

    #[test]
    fn both_orders_are_parallel() {
        assert_eq!(mined(&[&["a", "b"], &["b", "a"]]), "par(a, b)");
    }

    #[test]
    fn repetition_of_one_activity() {
        assert_eq!(mined(&[&["a"], &["a", "a"]]), "loop(a, tau)");
    }

    #[test]
    fn choice_and_optionality() {
        assert_eq!(mined(&[&["a"], &["b"]]), "xor(a, b)");
        assert_eq!(mined(&[&[], &["a"]]), "xor(tau, a)");
        assert_eq!(mined(&[&[]]), "tau");
    }

    #[test]
    fn loop_cut_with_redo() {
        assert_eq!(mined(&[&["a", "b"], &["a", "b", "c", "a", "b"]]), "loop(seq(a, b), c)");
    }

    #[test]
    fn sequence_with_optional_middle() {
        assert_eq!(mined(&[&["a", "b", "c"], &["a", "c"]]), "seq(a, xor(tau, b), c)");
    }

    #[test]
    fn deterministic() {
        let l = log(&[&["a", "c", "b", "d"], &["a", "b", "c", "d"], &["a", "e", "d"]]);
        assert_eq!(inductive_discover(&l), inductive_discover(&l.clone()));
    }

    #[test]
    fn flower_shape() {
        assert_eq!(flower(&crate::log::activity_set(["a", "b"])).to_string(), "loop(tau, a, b)");
    }
}
