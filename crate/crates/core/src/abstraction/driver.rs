//! The full hierarchical discovery loop.
//!
//! Repeatedly: find the alphabet `B` of an innermost repetitive component,
//! discover a body net from the iterations of that component, register it
//! under a fresh name `β`, and fold the log. When no repetition is left the
//! high-level net is discovered from the folded log and every `β` is
//! replaced by a loop around its body.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::discovery::{Discoverer, DiscoveryError};
use crate::hierarchy::{make_loop, substitute_all, HwfNet};
use crate::log::{project_log, Activity, ActivitySet, EventLog};
use crate::partition::{
    check_loop_compatibility, validate_partition, LoopIncompatibility, Partition, RefinementHint, RESERVED_PREFIX,
};
use crate::petri::json::NetDocument;
use crate::petri::WfNet;

use super::acyclic::{discover_highlevel, HighLevelStrategy};
use super::loops::{find_inner_loop_alphabet, fold_loop, iteration_pieces, loop_candidates};
use super::{AbstractionError, Options};

fn net_doc<S: Serializer>(w: &WfNet, s: S) -> Result<S::Ok, S::Error> {
    NetDocument::from_wfnet(w).serialize(s)
}

/// Where a loop name lives after folding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopPlacement {
    /// The body lies within one sub-process; `β` joins that group.
    InGroup(Activity),
    /// The body spans whole sub-processes; `{β}` becomes a group of its own.
    NewGroup,
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopRecord {
    pub name: Activity,
    /// Alphabet of the body at detection time; may contain earlier loop names.
    pub alphabet: ActivitySet,
    /// Original activities behind `alphabet`.
    pub origin: ActivitySet,
    pub placement: LoopPlacement,
    /// Body net with earlier loops already substituted.
    #[serde(serialize_with = "net_doc")]
    pub body: WfNet,
    pub strategy: Option<HighLevelStrategy>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IterationRecord {
    pub loop_name: Activity,
    pub iterations: EventLog,
    pub folded: EventLog,
}

#[derive(Clone, Debug, Serialize)]
pub struct HwfDiscovery {
    #[serde(skip)]
    pub hwf: HwfNet,
    /// Partition of the folded log, loop groups included.
    pub partition: BTreeMap<Activity, ActivitySet>,
    /// Folded log lifted to sub-process names.
    pub lifted: EventLog,
    /// Clones of the lifted log; the high-level net before loop
    /// substitution fits it.
    pub high_clones: EventLog,
    #[serde(serialize_with = "net_doc")]
    pub high_before_loops: WfNet,
    pub strategy: HighLevelStrategy,
    pub loops: Vec<LoopRecord>,
    pub iterations: Vec<IterationRecord>,
}

/// Discovered sub-process nets, with every loop name substituted.
fn discover_group(
    log: &EventLog,
    group: &ActivitySet,
    discoverer: &dyn Discoverer,
    loops: &BTreeMap<Activity, WfNet>,
) -> Result<Option<WfNet>, AbstractionError> {
    let proj: EventLog =
        project_log(log, group).iter().filter(|(t, _)| !t.is_empty()).map(|(t, n)| (t.clone(), n)).collect();
    if proj.is_empty() {
        return Ok(None);
    }
    Ok(Some(substitute_all(&discoverer.discover(&proj)?, loops)))
}

/// The smallest repetitive component that is compatible with `partition`,
/// ties broken lexicographically.
fn select_body(log: &EventLog, partition: &Partition) -> Option<ActivitySet> {
    let mut family: Vec<ActivitySet> = loop_candidates(log).into_iter().collect();
    family.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    family.into_iter().find(|b| check_loop_compatibility(partition, b).is_ok())
}

fn expand(set: &ActivitySet, origin: &BTreeMap<Activity, ActivitySet>) -> ActivitySet {
    set.iter().flat_map(|a| origin.get(a).cloned().unwrap_or_else(|| [a.clone()].into())).collect()
}

/// Discovers an HWF-net from `log` whose sub-processes are the groups of
/// `partition`. Fails when a repetitive component cuts through a group; the
/// error carries refinement hints over the original activities.
pub fn discover_hwf(
    log: &EventLog,
    partition: &Partition,
    discoverer: &dyn Discoverer,
    opts: &Options,
) -> Result<HwfDiscovery, AbstractionError> {
    validate_partition(partition, log)?;
    let mut cur_log = log.clone();
    let mut cur_part = partition.clone();
    let mut origin: BTreeMap<Activity, ActivitySet> = BTreeMap::new();
    let mut loop_nets: BTreeMap<Activity, WfNet> = BTreeMap::new();
    let mut subnets: BTreeMap<Activity, WfNet> = BTreeMap::new();
    let mut loops: Vec<LoopRecord> = Vec::new();
    let mut iterations: Vec<IterationRecord> = Vec::new();

    while let Some(innermost) = find_inner_loop_alphabet(&cur_log) {
        let beta = Activity::new(format!("{RESERVED_PREFIX}{}", loops.len() + 1));
        let restricted = cur_part.restricted_to(&cur_log.alphabet());
        let body_alphabet = select_body(&cur_log, &restricted).unwrap_or(innermost);
        let pieces = iteration_pieces(&cur_log, &body_alphabet);
        let host = restricted.groups().find(|(_, g)| body_alphabet.is_subset(g)).map(|(n, _)| n.clone());
        let (body, placement, strategy) = match host {
            Some(g) => {
                let body = substitute_all(&discoverer.discover(&pieces)?, &loop_nets);
                let group = cur_part.group_mut(&g).expect("host group exists");
                group.retain(|a| !body_alphabet.contains(a));
                group.insert(beta.clone());
                (body, LoopPlacement::InGroup(g), None)
            }
            None => {
                check_loop_compatibility(&restricted, &body_alphabet).map_err(|e| LoopIncompatibility {
                    loop_body: expand(&e.loop_body, &origin),
                    hints: e
                        .hints
                        .iter()
                        .map(|h| RefinementHint {
                            group: h.group.clone(),
                            inside: expand(&h.inside, &origin),
                            outside: expand(&h.outside, &origin),
                        })
                        .collect(),
                })?;
                let mut inside = Partition::new();
                for (name, g) in restricted.groups().filter(|(_, g)| g.is_subset(&body_alphabet)) {
                    inside.insert(name.clone(), g.iter().cloned());
                }
                let high = discover_highlevel(&pieces, &inside, discoverer, opts)?;
                for (name, g) in inside.groups() {
                    if !loop_nets.contains_key(name) {
                        if let Some(net) = discover_group(&pieces, g, discoverer, &loop_nets)? {
                            subnets.insert(name.clone(), net);
                        }
                    }
                    cur_part.remove(name);
                }
                cur_part.insert(beta.clone(), [beta.clone()]);
                (substitute_all(&high.net, &loop_nets), LoopPlacement::NewGroup, Some(high.strategy))
            }
        };
        origin.insert(beta.clone(), expand(&body_alphabet, &origin));
        loop_nets.insert(beta.clone(), make_loop(&body));
        cur_log = fold_loop(&cur_log, &body_alphabet, &beta);
        iterations.push(IterationRecord { loop_name: beta.clone(), iterations: pieces, folded: cur_log.clone() });
        loops.push(LoopRecord {
            name: beta.clone(),
            alphabet: body_alphabet,
            origin: origin[&beta].clone(),
            placement,
            body,
            strategy,
        });
    }

    let high = discover_highlevel(&cur_log, &cur_part, discoverer, opts)?;
    for (name, g) in cur_part.groups() {
        if !loop_nets.contains_key(name) {
            if let Some(net) = discover_group(&cur_log, g, discoverer, &loop_nets)? {
                subnets.insert(name.clone(), net);
            }
        }
    }
    let high_net = substitute_all(&high.net, &loop_nets);
    let hwf = HwfNet::new(high_net, subnets).map_err(|e| DiscoveryError::Failed(e.to_string()))?;
    Ok(HwfDiscovery {
        hwf,
        partition: cur_part.as_map().clone(),
        lifted: high.lifted,
        high_clones: high.clones,
        high_before_loops: high.net,
        strategy: high.strategy,
        loops,
        iterations,
    })
}

/// A discovery together with the partition it finally used.
#[derive(Clone, Debug)]
pub struct RefinedDiscovery {
    pub discovery: HwfDiscovery,
    pub partition: Partition,
    /// Refinements applied, in order.
    pub refinements: Vec<LoopIncompatibility>,
}

/// [`discover_hwf`], splitting groups along the suggested refinements
/// whenever a loop cuts through them. Terminates because every refinement
/// increases the number of groups.
pub fn discover_hwf_refining(
    log: &EventLog,
    partition: &Partition,
    discoverer: &dyn Discoverer,
    opts: &Options,
) -> Result<RefinedDiscovery, AbstractionError> {
    let mut partition = partition.clone();
    let mut refinements = Vec::new();
    loop {
        match discover_hwf(log, &partition, discoverer, opts) {
            Err(AbstractionError::LoopIncompatible(e)) => {
                partition = partition.refine(&e.hints);
                refinements.push(e);
            }
            Ok(discovery) => return Ok(RefinedDiscovery { discovery, partition, refinements }),
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformance::{alignment_fitness, DEFAULT_BUDGET};
    use crate::discovery::InductiveMiner;
    use crate::hierarchy::{flatten, loop_back_edges};
    use crate::log::Trace;
    use crate::petri::runs_upto;

    fn log(traces: &[&[&str]]) -> EventLog {
        traces.iter().map(|t| Trace::from_names(t.iter())).collect()
    }

    fn run(l: &EventLog, p: &Partition) -> HwfDiscovery {
        let d = discover_hwf(l, p, &InductiveMiner, &Options::default()).unwrap();
        let fit = alignment_fitness(&flatten(&d.hwf), l, DEFAULT_BUDGET).unwrap();
        assert_eq!(fit.fitness, 1.0);
        d
    }

    #[test]
    fn acyclic_log() {
        let p = Partition::from_groups([("x", vec!["a", "b"]), ("y", vec!["c"])]);
        let d = run(&log(&[&["a", "b", "c"], &["b", "a", "c"]]), &p);
        assert!(d.loops.is_empty());
        assert_eq!(d.hwf.subnets().len(), 2);
        let finals: Vec<_> = runs_upto(d.hwf.high(), 3, 1000).final_runs().cloned().collect();
        assert_eq!(finals, vec![vec![Activity::new("x"), Activity::new("y")]]);
    }

    #[test]
    fn loop_over_two_groups() {
        let p = Partition::from_groups([("α", vec!["a"]), ("β", vec!["b1", "b2"]), ("γ", vec!["c"])]);
        let l = log(&[&["a", "b1", "b2", "c", "b1", "b2", "c"], &["a", "b1", "b2", "c"]]);
        let d = run(&l, &p);
        assert_eq!(d.loops.len(), 1);
        assert_eq!(d.loops[0].placement, LoopPlacement::NewGroup);
        assert_eq!(loop_back_edges(d.hwf.high()).len(), 1);
        let high_runs = runs_upto(d.hwf.high(), 5, 100_000);
        assert!(high_runs.runs.get(&Trace::from_names(["α", "β", "γ", "β", "γ"]).into_events()) == Some(&true));
    }

    #[test]
    fn loop_inside_group() {
        let p = Partition::from_groups([("x", vec!["a", "b", "c"]), ("y", vec!["d"])]);
        let d = run(&log(&[&["a", "b", "c", "b", "c", "d"], &["a", "b", "c", "d"]]), &p);
        assert_eq!(d.loops[0].placement, LoopPlacement::InGroup(Activity::new("x")));
        assert!(loop_back_edges(d.hwf.high()).is_empty());
        assert_eq!(loop_back_edges(d.hwf.subnet(&Activity::new("x")).unwrap()).len(), 1);
    }

    #[test]
    fn nested_loops() {
        let p = Partition::from_groups([("x", vec!["a", "b"]), ("y", vec!["c"]), ("z", vec!["d"])]);
        let d = run(&log(&[&["a", "b", "b", "c", "a", "b", "c", "d"]]), &p);
        assert_eq!(d.loops.len(), 2);
        assert_eq!(d.loops[1].origin, ActivitySet::from_iter(["a", "b", "c"].map(Activity::new)));
    }

    #[test]
    fn incompatible_loop_is_reported_and_refined() {
        let p = Partition::from_groups([("x", vec!["a", "b"]), ("y", vec!["c"])]);
        let l = log(&[&["a", "b", "c", "b", "c"]]);
        let err = discover_hwf(&l, &p, &InductiveMiner, &Options::default()).unwrap_err();
        let AbstractionError::LoopIncompatible(e) = err else { panic!("expected incompatibility") };
        assert_eq!(e.hints[0].group, Activity::new("x"));
        let r = discover_hwf_refining(&l, &p, &InductiveMiner, &Options::default()).unwrap();
        assert_eq!(r.refinements.len(), 1);
        assert_eq!(r.partition.len(), 3);
        let fit = alignment_fitness(&flatten(&r.discovery.hwf), &l, DEFAULT_BUDGET).unwrap();
        assert_eq!(fit.fitness, 1.0);
    }

    #[test]
    fn invalid_partition() {
        let p = Partition::from_groups([("x", vec!["a"])]);
        assert!(matches!(
            discover_hwf(&log(&[&["a", "b"]]), &p, &InductiveMiner, &Options::default()),
            Err(AbstractionError::Partition(_))
        ));
    }
}
