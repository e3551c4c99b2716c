use std::collections::{BTreeMap, BTreeSet};

use crate::log::{Activity, ActivitySet, EventLog};

/// Directly-follows graph of a log, with multiplicity-weighted counts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dfg {
    pub nodes: ActivitySet,
    pub edges: BTreeMap<(Activity, Activity), u64>,
    pub start: BTreeMap<Activity, u64>,
    pub end: BTreeMap<Activity, u64>,
    pub empty_traces: u64,
}

impl Dfg {
    pub fn has_edge(&self, a: &Activity, b: &Activity) -> bool {
        self.edges.contains_key(&(a.clone(), b.clone()))
    }

    pub fn successors(&self) -> BTreeMap<&Activity, BTreeSet<&Activity>> {
        let mut out: BTreeMap<&Activity, BTreeSet<&Activity>> =
            self.nodes.iter().map(|a| (a, BTreeSet::new())).collect();
        for (a, b) in self.edges.keys() {
            out.get_mut(a).expect("edge endpoints are nodes").insert(b);
        }
        out
    }

    /// Nodes reachable from each node by a path of length ≥ 1.
    pub fn reachability(&self) -> BTreeMap<&Activity, BTreeSet<&Activity>> {
        let succ = self.successors();
        let mut out = BTreeMap::new();
        for a in &self.nodes {
            let mut seen: BTreeSet<&Activity> = BTreeSet::new();
            let mut stack: Vec<&Activity> = succ[a].iter().copied().collect();
            while let Some(x) = stack.pop() {
                if seen.insert(x) {
                    stack.extend(succ[x].iter().copied());
                }
            }
            out.insert(a, seen);
        }
        out
    }
}

pub fn build_dfg(log: &EventLog) -> Dfg {
    let mut g = Dfg::default();
    for (trace, n) in log.iter() {
        let events = trace.events();
        match (events.first(), events.last()) {
            (Some(first), Some(last)) => {
                *g.start.entry(first.clone()).or_default() += n;
                *g.end.entry(last.clone()).or_default() += n;
            }
            _ => g.empty_traces += n,
        }
        g.nodes.extend(events.iter().cloned());
        for w in events.windows(2) {
            *g.edges.entry((w[0].clone(), w[1].clone())).or_default() += n;
        }
    }
    g
}
