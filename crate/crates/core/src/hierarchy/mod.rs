//! Two-level hierarchical workflow nets.
//!
//! A high-level net whose visible transitions name sub-processes, each
//! refined by a low-level workflow net. [`flatten`] inlines the refinements;
//! [`hwf_runs_upto`] executes the hierarchy directly.

mod io;
mod semantics;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::log::{Activity, ActivitySet};
use crate::petri::{PetriNet, PlaceId, TransitionId, WfNet};

pub use io::{hwf_from_json, hwf_to_dot, hwf_to_json, HwfDocument};
pub use semantics::{hwf_runs_upto, HwfLts, HwfState};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HierarchyError {
    #[error("high-level label {0:?} has no subnet")]
    MissingSubnet(String),
    #[error("activity {activity:?} occurs in the subnets of both {first:?} and {second:?}")]
    SharedActivity { activity: String, first: String, second: String },
}

/// A high-level net together with its sub-process refinements `ℓ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HwfNet {
    high: WfNet,
    subnets: BTreeMap<Activity, WfNet>,
}

impl HwfNet {
    /// Checks that every visible high-level label is refined and that the
    /// subnet alphabets are pairwise disjoint.
    pub fn new(high: WfNet, subnets: BTreeMap<Activity, WfNet>) -> Result<Self, HierarchyError> {
        for a in high.alphabet() {
            if !subnets.contains_key(&a) {
                return Err(HierarchyError::MissingSubnet(a.to_string()));
            }
        }
        let mut owner: BTreeMap<Activity, &Activity> = BTreeMap::new();
        for (name, net) in &subnets {
            for a in net.alphabet() {
                if let Some(first) = owner.insert(a.clone(), name) {
                    return Err(HierarchyError::SharedActivity {
                        activity: a.to_string(),
                        first: first.to_string(),
                        second: name.to_string(),
                    });
                }
            }
        }
        Ok(HwfNet { high, subnets })
    }

    pub fn high(&self) -> &WfNet {
        &self.high
    }

    pub fn subnets(&self) -> &BTreeMap<Activity, WfNet> {
        &self.subnets
    }

    pub fn subnet(&self, name: &Activity) -> Option<&WfNet> {
        self.subnets.get(name)
    }

    pub fn into_parts(self) -> (WfNet, BTreeMap<Activity, WfNet>) {
        (self.high, self.subnets)
    }

    /// Union of the subnet alphabets.
    pub fn low_alphabet(&self) -> ActivitySet {
        self.subnets.values().flat_map(|n| n.alphabet()).collect()
    }
}

/// Replaces every transition `t` for which `refinement` yields a net by a
/// fresh copy of that net. The copy's source is fused with the input places
/// of `t` and its sink with the output places of `t`: arcs at the copy's
/// boundary are redirected to the host places and the boundary places are
/// dropped. Copied nodes are named `{t}/{node}`.
fn refine<'s>(host: &WfNet, refinement: &dyn Fn(&Activity) -> Option<&'s WfNet>) -> WfNet {
    let h = host.net();
    let mut out = PetriNet::new();
    for (_, p) in h.places() {
        out.add_place(&p.name);
    }
    for (_, t) in h.transitions() {
        let Some(sub) = t.label.as_ref().and_then(refinement) else {
            let u = out.add_transition(&t.name, t.label.clone());
            for (p, w) in &t.input {
                out.add_input_arc(*p, u, *w);
            }
            for (p, w) in &t.output {
                out.add_output_arc(u, *p, *w);
            }
            continue;
        };
        let s = sub.net();
        if sub.source() == sub.sink() {
            // Empty refinement: behaves like a silent step.
            let u = out.add_transition(format!("{}/skip", t.name), None);
            for (p, w) in &t.input {
                out.add_input_arc(*p, u, *w);
            }
            for (p, w) in &t.output {
                out.add_output_arc(u, *p, *w);
            }
            continue;
        }
        let mut pmap: Vec<Option<PlaceId>> = vec![None; s.place_count()];
        for (p, place) in s.places() {
            if p != sub.source() && p != sub.sink() {
                pmap[p.0] = Some(out.add_place(format!("{}/{}", t.name, place.name)));
            }
        }
        for (_, u) in s.transitions() {
            let v = out.add_transition(format!("{}/{}", t.name, u.name), u.label.clone());
            for (p, w) in &u.input {
                if *p == sub.source() {
                    for (q, wq) in &t.input {
                        out.add_input_arc(*q, v, w * wq);
                    }
                } else {
                    out.add_input_arc(pmap[p.0].expect("interior place"), v, *w);
                }
            }
            for (p, w) in &u.output {
                if *p == sub.sink() {
                    for (q, wq) in &t.output {
                        out.add_output_arc(v, *q, w * wq);
                    }
                } else {
                    out.add_output_arc(v, pmap[p.0].expect("interior place"), *w);
                }
            }
        }
    }
    WfNet::new_unchecked(out, host.source(), host.sink())
}

/// The flat net `fl(h)`: every refined high-level transition is replaced by
/// a copy of its subnet; silent high-level transitions are kept.
pub fn flatten(h: &HwfNet) -> WfNet {
    refine(&h.high, &|a| h.subnets.get(a))
}

/// Replaces every transition labeled `label` by a fresh copy of `sub`,
/// using the same fusion rule as [`flatten`]. A no-op when no transition
/// carries the label.
pub fn substitute(net: &WfNet, label: &Activity, sub: &WfNet) -> WfNet {
    refine(net, &|a| (a == label).then_some(sub))
}

/// Simultaneous [`substitute`] for several labels.
pub fn substitute_all(net: &WfNet, subs: &BTreeMap<Activity, WfNet>) -> WfNet {
    refine(net, &|a| subs.get(a))
}

/// `Loop(body)`: fresh source and sink around an unchanged copy of `body`,
/// with silent entry (`i′ → i`), exit (`f → f′`) and back (`f → i`)
/// transitions. Its complete runs are concatenations of one or more
/// complete runs of the body.
pub fn make_loop(body: &WfNet) -> WfNet {
    let mut net = PetriNet::new();
    let (pmap, _) = net.append(body.net(), "");
    let i = net.add_place("loop_i");
    let f = net.add_place("loop_f");
    let (bi, bf) = (pmap[body.source().0], pmap[body.sink().0]);
    let enter = net.add_transition("loop_enter", None);
    net.add_input_arc(i, enter, 1);
    net.add_output_arc(enter, bi, 1);
    let exit = net.add_transition("loop_exit", None);
    net.add_input_arc(bf, exit, 1);
    net.add_output_arc(exit, f, 1);
    let back = net.add_transition("loop_back", None);
    net.add_input_arc(bf, back, 1);
    net.add_output_arc(back, bi, 1);
    WfNet::new_unchecked(net, i, f)
}

/// Transitions of `w` that are the back edge of a [`make_loop`] wrapper.
pub fn loop_back_edges(w: &WfNet) -> Vec<TransitionId> {
    w.net()
        .transitions()
        .filter(|(_, t)| t.is_silent() && t.name.rsplit('/').next().is_some_and(|n| n.starts_with("loop_back")))
        .map(|(id, _)| id)
        .collect()
}
