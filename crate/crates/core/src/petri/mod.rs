//! Labeled Petri nets and workflow nets.
//!
//! A net stores, per transition, its weighted preset and postset. Labels are
//! `Some(activity)` for visible transitions and `None` for silent (τ) ones.
//! Node names are unique within a net and double as identifiers in the
//! serialized formats.

pub mod dot;
pub mod json;
pub mod language;
pub mod playout;
pub mod pnml;
pub mod soundness;

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::log::{Activity, ActivitySet};

pub use language::{runs_upto, Lts, RunSet};
pub use playout::{playout, PlayoutError};
pub use soundness::{check_soundness, reachable_markings, Exploration, Soundness, SoundnessViolation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlaceId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Place {
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub name: String,
    /// `None` is the silent label τ.
    pub label: Option<Activity>,
    pub input: Vec<(PlaceId, u32)>,
    pub output: Vec<(PlaceId, u32)>,
}

impl Transition {
    pub fn is_silent(&self) -> bool {
        self.label.is_none()
    }

    pub fn input_weight(&self, p: PlaceId) -> u32 {
        self.input.iter().find(|(q, _)| *q == p).map_or(0, |(_, w)| *w)
    }

    pub fn output_weight(&self, p: PlaceId) -> u32 {
        self.output.iter().find(|(q, _)| *q == p).map_or(0, |(_, w)| *w)
    }
}

/// A labeled Petri net `(P, T, F, λ)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PetriNet {
    places: Vec<Place>,
    transitions: Vec<Transition>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FireError {
    #[error("transition {0} is not enabled")]
    NotEnabled(String),
}

impl PetriNet {
    pub fn new() -> Self {
        Self::default()
    }

    fn unique_name(&self, base: &str, taken: impl Fn(&str) -> bool) -> String {
        if !taken(base) {
            return base.to_string();
        }
        (2..).map(|k| format!("{base}#{k}")).find(|n| !taken(n)).expect("some suffix is free")
    }

    /// Adds a place. A name already in use gets a `#k` suffix.
    pub fn add_place(&mut self, name: impl AsRef<str>) -> PlaceId {
        let name = self.unique_name(name.as_ref(), |n| self.place_by_name(n).is_some());
        self.places.push(Place { name });
        PlaceId(self.places.len() - 1)
    }

    /// Adds a transition. A name already in use gets a `#k` suffix.
    pub fn add_transition(&mut self, name: impl AsRef<str>, label: Option<Activity>) -> TransitionId {
        let name = self.unique_name(name.as_ref(), |n| self.transition_by_name(n).is_some());
        self.transitions.push(Transition { name, label, input: Vec::new(), output: Vec::new() });
        TransitionId(self.transitions.len() - 1)
    }

    /// Adds `weight` to F(p, t).
    pub fn add_input_arc(&mut self, p: PlaceId, t: TransitionId, weight: u32) {
        add_weight(&mut self.transitions[t.0].input, p, weight);
    }

    /// Adds `weight` to F(t, p).
    pub fn add_output_arc(&mut self, t: TransitionId, p: PlaceId, weight: u32) {
        add_weight(&mut self.transitions[t.0].output, p, weight);
    }

    pub fn place_count(&self) -> usize {
        self.places.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn place(&self, p: PlaceId) -> &Place {
        &self.places[p.0]
    }

    pub fn transition(&self, t: TransitionId) -> &Transition {
        &self.transitions[t.0]
    }

    pub fn set_label(&mut self, t: TransitionId, label: Option<Activity>) {
        self.transitions[t.0].label = label;
    }

    pub fn place_ids(&self) -> impl Iterator<Item = PlaceId> {
        (0..self.places.len()).map(PlaceId)
    }

    pub fn transition_ids(&self) -> impl Iterator<Item = TransitionId> {
        (0..self.transitions.len()).map(TransitionId)
    }

    pub fn transitions(&self) -> impl Iterator<Item = (TransitionId, &Transition)> {
        self.transitions.iter().enumerate().map(|(i, t)| (TransitionId(i), t))
    }

    pub fn places(&self) -> impl Iterator<Item = (PlaceId, &Place)> {
        self.places.iter().enumerate().map(|(i, p)| (PlaceId(i), p))
    }

    pub fn place_by_name(&self, name: &str) -> Option<PlaceId> {
        self.places.iter().position(|p| p.name == name).map(PlaceId)
    }

    pub fn transition_by_name(&self, name: &str) -> Option<TransitionId> {
        self.transitions.iter().position(|t| t.name == name).map(TransitionId)
    }

    /// Transitions with an arc into `p`.
    pub fn place_preset(&self, p: PlaceId) -> Vec<TransitionId> {
        self.transitions().filter(|(_, t)| t.output.iter().any(|(q, _)| *q == p)).map(|(id, _)| id).collect()
    }

    /// Transitions with an arc out of `p`.
    pub fn place_postset(&self, p: PlaceId) -> Vec<TransitionId> {
        self.transitions().filter(|(_, t)| t.input.iter().any(|(q, _)| *q == p)).map(|(id, _)| id).collect()
    }

    /// Visible labels.
    pub fn alphabet(&self) -> ActivitySet {
        self.transitions.iter().filter_map(|t| t.label.clone()).collect()
    }

    pub fn arc_count(&self) -> usize {
        self.transitions.iter().map(|t| t.input.len() + t.output.len()).sum()
    }

    pub fn empty_marking(&self) -> Marking {
        Marking(vec![0; self.places.len()])
    }

    /// Whether `t` is enabled: m(p) ≥ F(p, t) for every p in •t.
    pub fn is_enabled(&self, m: &Marking, t: TransitionId) -> bool {
        self.transitions[t.0].input.iter().all(|(p, w)| m.0[p.0] >= *w)
    }

    /// All transitions enabled at `m`, in id order.
    pub fn enabled(&self, m: &Marking) -> Vec<TransitionId> {
        self.transition_ids().filter(|t| self.is_enabled(m, *t)).collect()
    }

    /// m'(p) = m(p) − F(p, t) + F(t, p).
    pub fn fire(&self, m: &Marking, t: TransitionId) -> Result<Marking, FireError> {
        if !self.is_enabled(m, t) {
            return Err(FireError::NotEnabled(self.transitions[t.0].name.clone()));
        }
        Ok(self.fire_unchecked(m, t))
    }

    /// Firing without the enabledness check. Missing tokens saturate at 0.
    pub fn fire_unchecked(&self, m: &Marking, t: TransitionId) -> Marking {
        let mut next = m.clone();
        let tr = &self.transitions[t.0];
        for (p, w) in &tr.input {
            next.0[p.0] = next.0[p.0].saturating_sub(*w);
        }
        for (p, w) in &tr.output {
            next.0[p.0] += *w;
        }
        next
    }

    /// Copies every node of `other` into `self`, prefixing names.
    /// Returns the id maps for places and transitions.
    pub fn append(&mut self, other: &PetriNet, prefix: &str) -> (Vec<PlaceId>, Vec<TransitionId>) {
        let pmap: Vec<PlaceId> = other.places.iter().map(|p| self.add_place(format!("{prefix}{}", p.name))).collect();
        let tmap: Vec<TransitionId> = other
            .transitions
            .iter()
            .map(|t| self.add_transition(format!("{prefix}{}", t.name), t.label.clone()))
            .collect();
        for (i, t) in other.transitions.iter().enumerate() {
            for (p, w) in &t.input {
                self.add_input_arc(pmap[p.0], tmap[i], *w);
            }
            for (p, w) in &t.output {
                self.add_output_arc(tmap[i], pmap[p.0], *w);
            }
        }
        (pmap, tmap)
    }
}

fn add_weight(arcs: &mut Vec<(PlaceId, u32)>, p: PlaceId, w: u32) {
    if w == 0 {
        return;
    }
    match arcs.iter_mut().find(|(q, _)| *q == p) {
        Some((_, old)) => *old += w,
        None => {
            arcs.push((p, w));
            arcs.sort_by_key(|(q, _)| *q);
        }
    }
}

/// Token counts per place, indexed by [`PlaceId`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking(pub Vec<u32>);

impl Marking {
    pub fn tokens(&self, p: PlaceId) -> u32 {
        self.0[p.0]
    }

    pub fn set(&mut self, p: PlaceId, n: u32) {
        self.0[p.0] = n;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&n| n as u64).sum()
    }

    /// Multiset inclusion: self(p) ≤ other(p) everywhere.
    pub fn is_covered_by(&self, other: &Marking) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Single token on `p` in a net with `places` places.
    pub fn singleton(places: usize, p: PlaceId) -> Self {
        let mut v = vec![0; places];
        v[p.0] = 1;
        Marking(v)
    }
}

impl fmt::Debug for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        let mut first = true;
        for (i, &n) in self.0.iter().enumerate() {
            if n == 0 {
                continue;
            }
            if !first {
                f.write_str(",")?;
            }
            first = false;
            if n == 1 {
                write!(f, "p{i}")?;
            } else {
                write!(f, "{n}·p{i}")?;
            }
        }
        f.write_str("]")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WfNetError {
    #[error("source place {0} has incoming arcs")]
    SourceHasInput(String),
    #[error("sink place {0} has outgoing arcs")]
    SinkHasOutput(String),
    #[error("node {0} is not on a path from source to sink")]
    Disconnected(String),
    #[error("expected exactly one place without incoming arcs, found {0}")]
    NoUniqueSource(usize),
    #[error("expected exactly one place without outgoing arcs, found {0}")]
    NoUniqueSink(usize),
}

/// A workflow net: a labeled net with a source place `i` and a sink place
/// `f` such that every node lies on a path from `i` to `f`. The initial
/// marking is `[i]`, the final marking `[f]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WfNet {
    net: PetriNet,
    source: PlaceId,
    sink: PlaceId,
}

impl WfNet {
    /// Validates the workflow-net conditions.
    pub fn new(net: PetriNet, source: PlaceId, sink: PlaceId) -> Result<Self, WfNetError> {
        check_wf(&net, source, sink)?;
        Ok(WfNet { net, source, sink })
    }

    /// For constructions that preserve the workflow-net conditions.
    pub(crate) fn new_unchecked(net: PetriNet, source: PlaceId, sink: PlaceId) -> Self {
        debug_assert_eq!(check_wf(&net, source, sink), Ok(()));
        WfNet { net, source, sink }
    }

    /// Picks the unique place without input arcs as source and the unique
    /// place without output arcs as sink.
    pub fn from_net(net: PetriNet) -> Result<Self, WfNetError> {
        let sources: Vec<PlaceId> = net.place_ids().filter(|p| net.place_preset(*p).is_empty()).collect();
        let sinks: Vec<PlaceId> = net.place_ids().filter(|p| net.place_postset(*p).is_empty()).collect();
        if sources.len() != 1 {
            return Err(WfNetError::NoUniqueSource(sources.len()));
        }
        if sinks.len() != 1 {
            return Err(WfNetError::NoUniqueSink(sinks.len()));
        }
        WfNet::new(net, sources[0], sinks[0])
    }

    pub fn net(&self) -> &PetriNet {
        &self.net
    }

    pub fn into_net(self) -> PetriNet {
        self.net
    }

    pub fn source(&self) -> PlaceId {
        self.source
    }

    pub fn sink(&self) -> PlaceId {
        self.sink
    }

    pub fn initial_marking(&self) -> Marking {
        Marking::singleton(self.net.place_count(), self.source)
    }

    pub fn final_marking(&self) -> Marking {
        Marking::singleton(self.net.place_count(), self.sink)
    }

    pub fn is_final(&self, m: &Marking) -> bool {
        m.0.iter().enumerate().all(|(i, &n)| if i == self.sink.0 { n == 1 } else { n == 0 })
    }

    pub fn alphabet(&self) -> ActivitySet {
        self.net.alphabet()
    }
}

/// Whether `(net, source, sink)` satisfies the workflow-net conditions.
pub fn is_wf_net(net: &PetriNet, source: PlaceId, sink: PlaceId) -> bool {
    check_wf(net, source, sink).is_ok()
}

fn check_wf(net: &PetriNet, source: PlaceId, sink: PlaceId) -> Result<(), WfNetError> {
    if !net.place_preset(source).is_empty() {
        return Err(WfNetError::SourceHasInput(net.place(source).name.clone()));
    }
    if !net.place_postset(sink).is_empty() {
        return Err(WfNetError::SinkHasOutput(net.place(sink).name.clone()));
    }
    // Node graph: places 0..P, transitions P..P+T.
    let np = net.place_count();
    let n = np + net.transition_count();
    let mut fwd: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut bwd: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, tr) in net.transitions() {
        for (p, _) in &tr.input {
            fwd[p.0].push(np + t.0);
            bwd[np + t.0].push(p.0);
        }
        for (p, _) in &tr.output {
            fwd[np + t.0].push(p.0);
            bwd[p.0].push(np + t.0);
        }
    }
    let from_source = graph_reach(&fwd, source.0);
    let to_sink = graph_reach(&bwd, sink.0);
    for v in 0..n {
        if !(from_source.contains(&v) && to_sink.contains(&v)) {
            let name = if v < np {
                net.place(PlaceId(v)).name.clone()
            } else {
                net.transition(TransitionId(v - np)).name.clone()
            };
            return Err(WfNetError::Disconnected(name));
        }
    }
    Ok(())
}

fn graph_reach(adj: &[Vec<usize>], start: usize) -> HashSet<usize> {
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Visible transitions grouped by label.
pub fn transitions_by_label(net: &PetriNet) -> HashMap<Activity, Vec<TransitionId>> {
    let mut m: HashMap<Activity, Vec<TransitionId>> = HashMap::new();
    for (id, t) in net.transitions() {
        if let Some(l) = &t.label {
            m.entry(l.clone()).or_default().push(id);
        }
    }
    m
}

/// Small constructors used across tests and fixtures.
pub mod build {
    use super::*;

    /// `i → t1 → p1 → t2 → … → f` with the given labels (`None` = τ).
    pub fn sequence(labels: &[Option<&str>]) -> WfNet {
        let mut net = PetriNet::new();
        let source = net.add_place("i");
        let mut prev = source;
        for (k, l) in labels.iter().enumerate() {
            let t = net.add_transition(format!("t{k}"), l.map(Activity::new));
            let next = if k + 1 == labels.len() { net.add_place("f") } else { net.add_place(format!("p{k}")) };
            net.add_input_arc(prev, t, 1);
            net.add_output_arc(t, next, 1);
            prev = next;
        }
        if labels.is_empty() {
            let sink = net.add_place("f");
            let t = net.add_transition("tau", None);
            net.add_input_arc(source, t, 1);
            net.add_output_arc(t, sink, 1);
            prev = sink;
        }
        WfNet::new(net, source, prev).expect("sequence is a workflow net")
    }

    /// Visible labels only: `seq(&["a","b"])` is the net for a;b.
    pub fn seq(labels: &[&str]) -> WfNet {
        let l: Vec<Option<&str>> = labels.iter().map(|s| Some(*s)).collect();
        sequence(&l)
    }

    /// τ-split, one branch per label, τ-join.
    pub fn parallel(labels: &[&str]) -> WfNet {
        let mut net = PetriNet::new();
        let i = net.add_place("i");
        let f = net.add_place("f");
        let split = net.add_transition("split", None);
        let join = net.add_transition("join", None);
        net.add_input_arc(i, split, 1);
        net.add_output_arc(join, f, 1);
        for l in labels {
            let a = net.add_place(format!("in_{l}"));
            let b = net.add_place(format!("out_{l}"));
            let t = net.add_transition(*l, Some(Activity::new(l)));
            net.add_output_arc(split, a, 1);
            net.add_input_arc(a, t, 1);
            net.add_output_arc(t, b, 1);
            net.add_input_arc(b, join, 1);
        }
        WfNet::new(net, i, f).expect("parallel is a workflow net")
    }

    /// The compensation-request workflow net: register, then examine
    /// (thoroughly or casually) in parallel with check ticket, decide, and
    /// either reinitiate (back to examine/check), pay, or reject.
    /// Places `p0` (source) to `p6` (sink).
    pub fn compensation_request() -> WfNet {
        let mut net = PetriNet::new();
        let p: Vec<PlaceId> = (0..7).map(|k| net.add_place(format!("p{k}"))).collect();
        let mut t = |name: &str, ins: &[usize], outs: &[usize]| {
            let id = net.add_transition(name, Some(Activity::new(name)));
            for &i in ins {
                net.add_input_arc(p[i], id, 1);
            }
            for &o in outs {
                net.add_output_arc(id, p[o], 1);
            }
        };
        t("register request", &[0], &[1, 2]);
        t("examine thoroughly", &[1], &[3]);
        t("examine casually", &[1], &[3]);
        t("check ticket", &[2], &[4]);
        t("decide", &[3, 4], &[5]);
        t("reinitiate request", &[5], &[1, 2]);
        t("pay compensation", &[5], &[6]);
        t("reject request", &[5], &[6]);
        WfNet::new(net, p[0], p[6]).expect("compensation net is a workflow net")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_transition() -> (WfNet, TransitionId) {
        let w = build::seq(&["t"]);
        (w, TransitionId(0))
    }

    #[test]
    fn enabled_in_initial_marking_only() {
        let (w, t) = one_transition();
        assert_eq!(w.net().enabled(&w.initial_marking()), vec![t]);
        assert!(w.net().enabled(&w.final_marking()).is_empty());
    }

    #[test]
    fn weighted_arc_needs_enough_tokens() {
        let mut net = PetriNet::new();
        let p = net.add_place("p");
        let t = net.add_transition("t", None);
        net.add_input_arc(p, t, 2);
        let mut m = net.empty_marking();
        m.set(p, 1);
        assert!(!net.is_enabled(&m, t));
        m.set(p, 2);
        assert!(net.is_enabled(&m, t));
    }

    #[test]
    fn fire_moves_token() {
        let (w, t) = one_transition();
        let m = w.net().fire(&w.initial_marking(), t).unwrap();
        assert_eq!(m, w.final_marking());
        assert!(matches!(w.net().fire(&m, t), Err(FireError::NotEnabled(_))));
    }

    #[test]
    fn self_loop_and_fork() {
        let mut net = PetriNet::new();
        let p = net.add_place("p");
        let q = net.add_place("q");
        let r = net.add_place("r");
        let t = net.add_transition("t", None);
        net.add_input_arc(p, t, 1);
        net.add_output_arc(t, p, 1);
        net.add_output_arc(t, q, 1);
        net.add_output_arc(t, r, 1);
        let mut m = net.empty_marking();
        m.set(p, 1);
        let m2 = net.fire(&m, t).unwrap();
        assert_eq!(m2.0, vec![1, 1, 1]);
    }

    #[test]
    fn duplicate_names_get_suffixes() {
        let mut net = PetriNet::new();
        net.add_place("p");
        let q = net.add_place("p");
        assert_eq!(net.place(q).name, "p#2");
    }

    #[test]
    fn workflow_conditions() {
        let mut net = PetriNet::new();
        let i = net.add_place("i");
        let f = net.add_place("f");
        let t = net.add_transition("t", None);
        net.add_input_arc(i, t, 1);
        net.add_output_arc(t, f, 1);
        assert!(WfNet::new(net.clone(), i, f).is_ok());
        assert!(matches!(WfNet::new(net.clone(), f, i), Err(WfNetError::SourceHasInput(_))));

        let mut dangling = net.clone();
        dangling.add_place("lonely");
        assert_eq!(WfNet::new(dangling, i, f), Err(WfNetError::Disconnected("lonely".into())));

        let w = WfNet::from_net(net).unwrap();
        assert_eq!((w.source(), w.sink()), (i, f));
    }

    #[test]
    fn compensation_net_shape() {
        let w = build::compensation_request();
        assert_eq!(w.net().place_count(), 7);
        assert_eq!(w.net().transition_count(), 8);
        assert_eq!(w.net().place(w.source()).name, "p0");
        assert_eq!(w.net().place(w.sink()).name, "p6");
    }
}
