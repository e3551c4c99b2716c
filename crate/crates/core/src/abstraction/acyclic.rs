//! High-level discovery for logs without repetitive behavior.
//!
//! The log is lifted and cloned, then handed to the flat discoverer. The
//! result is checked against the sub-process intervals of every trace: for
//! a group `g` the events of `g` lie between its first and last occurrence,
//! so the net with each `g` split into a start and a completion step must
//! accept the sequence of interval endpoints. When the check fails the
//! discoverer is rerun on the clones completed by all linear extensions of
//! the interval orders, and as a last resort a parallel composition of all
//! groups is returned.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::conformance::perfectly_fits;
use crate::discovery::{tree_to_wfnet, Discoverer, InductiveMiner, ProcessTree};
use crate::hierarchy::substitute_all;
use crate::log::{Activity, EventLog, Trace};
use crate::partition::Partition;
use crate::petri::{build, WfNet};

use super::{clone_log, lift_log, AbstractionError, Options};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HighLevelStrategy {
    /// The discoverer applied to the cloned log.
    Clones,
    /// The discoverer applied to the clones and the linear extensions of
    /// the interval orders.
    LinearExtensions,
    /// Parallel composition of all groups.
    Parallel,
}

#[derive(Clone, Debug)]
pub struct HighLevelDiscovery {
    pub net: WfNet,
    pub lifted: EventLog,
    pub clones: EventLog,
    pub strategy: HighLevelStrategy,
}

/// Groups of a trace with the positions of their first and last events,
/// ordered by first occurrence.
fn intervals(
    sigma: &Trace,
    lookup: &BTreeMap<Activity, Activity>,
) -> Result<Vec<(Activity, usize, usize)>, AbstractionError> {
    let mut out: Vec<(Activity, usize, usize)> = Vec::new();
    for (k, a) in sigma.iter().enumerate() {
        let g = lookup.get(a).ok_or_else(|| AbstractionError::Unassigned(a.clone()))?;
        match out.iter_mut().find(|(h, _, _)| h == g) {
            Some(entry) => entry.2 = k,
            None => out.push((g.clone(), k, k)),
        }
    }
    Ok(out)
}

fn start(g: &Activity) -> String {
    format!("{g}\u{1}+")
}

fn end(g: &Activity) -> String {
    format!("{g}\u{1}-")
}

fn endpoint_sequence(iv: &[(Activity, usize, usize)], len: usize) -> Trace {
    let mut out = Trace::empty();
    for k in 0..len {
        for (g, first, last) in iv {
            if *first == k {
                out.push(Activity::new(start(g)));
            }
            if *last == k {
                out.push(Activity::new(end(g)));
            }
        }
    }
    out
}

/// Whether `net`, with every group split into start and completion, accepts
/// the interval endpoints of every trace of `log`.
fn fits_intervals(
    net: &WfNet,
    log: &EventLog,
    lookup: &BTreeMap<Activity, Activity>,
    opts: &Options,
) -> Result<bool, AbstractionError> {
    let split: BTreeMap<Activity, WfNet> = net
        .alphabet()
        .into_iter()
        .map(|g| {
            let s = build::seq(&[&start(&g), &end(&g)]);
            (g, s)
        })
        .collect();
    let split_net = substitute_all(net, &split);
    for (trace, _) in log.iter() {
        let seq = endpoint_sequence(&intervals(trace, lookup)?, trace.len());
        if perfectly_fits(&split_net, &seq, opts.budget) != Ok(true) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Linear extensions of the interval order of one trace, or `None` when
/// there are more than `cap`.
fn linear_extensions(iv: &[(Activity, usize, usize)], cap: usize) -> Option<Vec<Trace>> {
    fn go(
        iv: &[(Activity, usize, usize)],
        used: &mut Vec<bool>,
        prefix: &mut Vec<Activity>,
        out: &mut Vec<Trace>,
        cap: usize,
    ) -> bool {
        if prefix.len() == iv.len() {
            out.push(Trace::new(prefix.clone()));
            return out.len() <= cap;
        }
        for k in 0..iv.len() {
            if used[k] {
                continue;
            }
            // k is minimal among the unused when no unused h ends before k starts.
            let minimal = (0..iv.len()).all(|h| used[h] || h == k || iv[h].2 >= iv[k].1);
            if !minimal {
                continue;
            }
            used[k] = true;
            prefix.push(iv[k].0.clone());
            let ok = go(iv, used, prefix, out, cap);
            prefix.pop();
            used[k] = false;
            if !ok {
                return false;
            }
        }
        true
    }
    let mut out = Vec::new();
    go(iv, &mut vec![false; iv.len()], &mut Vec::new(), &mut out, cap).then_some(out)
}

fn parallel_fallback(lifted: &EventLog) -> WfNet {
    let groups = lifted.alphabet();
    let children: Vec<ProcessTree> = groups
        .iter()
        .map(|g| {
            let leaf = ProcessTree::Activity(g.clone());
            if lifted.iter().all(|(t, _)| t.contains(g)) {
                leaf
            } else {
                ProcessTree::Xor(vec![leaf, ProcessTree::Tau])
            }
        })
        .collect();
    let tree = match children.len() {
        0 => ProcessTree::Tau,
        _ => ProcessTree::Par(children),
    };
    tree_to_wfnet(&tree.simplified())
}

/// Lifts `log` with `partition`, clones the lifted traces and discovers the
/// high-level net, verifying it against the sub-process intervals.
pub fn discover_highlevel(
    log: &EventLog,
    partition: &Partition,
    discoverer: &dyn Discoverer,
    opts: &Options,
) -> Result<HighLevelDiscovery, AbstractionError> {
    let lookup = partition.lookup();
    let lifted = lift_log(log, partition)?;
    let clones = clone_log(&lifted, opts.clone_cap)?;
    let net = discoverer.discover(&clones)?;
    if fits_intervals(&net, log, &lookup, opts)? {
        return Ok(HighLevelDiscovery { net, lifted, clones, strategy: HighLevelStrategy::Clones });
    }
    let mut extended = clones.clone();
    let mut complete = true;
    for (trace, n) in log.iter() {
        match linear_extensions(&intervals(trace, &lookup)?, opts.clone_cap) {
            Some(exts) => exts.into_iter().for_each(|t| extended.add(t, n)),
            None => {
                complete = false;
                break;
            }
        }
    }
    if complete {
        let net = discoverer.discover(&extended)?;
        if fits_intervals(&net, log, &lookup, opts)? {
            return Ok(HighLevelDiscovery { net, lifted, clones, strategy: HighLevelStrategy::LinearExtensions });
        }
    }
    let net = parallel_fallback(&lifted);
    Ok(HighLevelDiscovery { net, lifted, clones, strategy: HighLevelStrategy::Parallel })
}

/// High-level net of a log without repetitive behavior, using the bundled
/// inductive miner.
pub fn discover_highlevel_acyclic(log: &EventLog, partition: &Partition) -> Result<WfNet, AbstractionError> {
    Ok(discover_highlevel(log, partition, &InductiveMiner, &Options::default())?.net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::petri::runs_upto;

    fn log(traces: &[&[&str]]) -> EventLog {
        traces.iter().map(|t| Trace::from_names(t.iter())).collect()
    }

    fn finals(w: &WfNet, n: usize) -> Vec<String> {
        runs_upto(w, n, 100_000)
            .final_runs()
            .map(|r| r.iter().map(|a| a.as_str()).collect::<Vec<_>>().join(","))
            .collect()
    }

    #[test]
    fn interleaved_groups_become_concurrent() {
        let p = Partition::from_groups([("α", vec!["a"]), ("β", vec!["b1", "b2"]), ("γ", vec!["c1", "c2"])]);
        let l = log(&[&["a", "b1", "c1", "b2", "c2"]]);
        let h = discover_highlevel(&l, &p, &InductiveMiner, &Options::default()).unwrap();
        assert_eq!(h.strategy, HighLevelStrategy::Clones);
        assert_eq!(finals(&h.net, 4), vec!["α,β,γ", "α,γ,β"]);
    }

    #[test]
    fn single_group() {
        let p = Partition::from_groups([("x", vec!["a", "b"])]);
        let w = discover_highlevel_acyclic(&log(&[&["a", "b"], &["b"]]), &p).unwrap();
        assert_eq!(finals(&w, 3), vec!["x"]);
        assert_eq!(w.net().transition_count(), 1);
    }

    #[test]
    fn two_groups_in_sequence() {
        let p = Partition::from_groups([("x", vec!["a"]), ("y", vec!["b", "c"])]);
        let w = discover_highlevel_acyclic(&log(&[&["a", "b", "c"], &["a", "c"]]), &p).unwrap();
        assert_eq!(finals(&w, 3), vec!["x,y"]);
    }

    #[test]
    fn endpoints() {
        let lookup: BTreeMap<Activity, Activity> = [("a", "x"), ("b", "y"), ("c", "x")]
            .into_iter()
            .map(|(a, g)| (Activity::new(a), Activity::new(g)))
            .collect();
        let iv = intervals(&Trace::from_names(["a", "b", "c"]), &lookup).unwrap();
        let names: Vec<String> = endpoint_sequence(&iv, 3).iter().map(|a| a.as_str().replace('\u{1}', "")).collect();
        assert_eq!(names, ["x+", "y+", "y-", "x-"]);
        let exts = linear_extensions(&iv, 10).unwrap();
        assert_eq!(exts.len(), 2);
        assert_eq!(linear_extensions(&iv, 1), None);
    }

    #[test]
    fn nested_interval_needs_concurrency() {
        // y happens strictly inside x, so x cannot precede y atomically.
        let p = Partition::from_groups([("x", vec!["a", "c"]), ("y", vec!["b"])]);
        let l = log(&[&["a", "b", "c"]]);
        let h = discover_highlevel(&l, &p, &InductiveMiner, &Options::default()).unwrap();
        let lookup = p.lookup();
        assert!(fits_intervals(&h.net, &l, &lookup, &Options::default()).unwrap());
    }
}
