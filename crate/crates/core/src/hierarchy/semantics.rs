//! Direct execution of HWF-nets, without flattening.
//!
//! A configuration is the high-level marking plus the multiset of running
//! sub-process instances. Starting an instance of `t` consumes the input
//! tokens of `t`; the instance then fires low-level transitions, interleaved
//! with everything else; once it reaches its final marking it may complete,
//! producing the output tokens of `t`. Start and completion are silent.

use crate::log::Activity;
use crate::petri::language::observable_language;
use crate::petri::{Lts, Marking, RunSet, TransitionId};

use super::HwfNet;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HwfState {
    pub high: Marking,
    /// Running instances, kept sorted so equal multisets compare equal.
    pub active: Vec<(TransitionId, Marking)>,
}

pub struct HwfLts<'a> {
    pub hwf: &'a HwfNet,
}

impl HwfLts<'_> {
    fn subnet_of(&self, t: TransitionId) -> &crate::petri::WfNet {
        let label = self.hwf.high.net().transition(t).label.as_ref().expect("instances are visible transitions");
        &self.hwf.subnets[label]
    }
}

impl Lts for HwfLts<'_> {
    type State = HwfState;

    fn initial(&self) -> HwfState {
        HwfState { high: self.hwf.high.initial_marking(), active: Vec::new() }
    }

    fn successors(&self, s: &HwfState) -> Vec<(Option<Activity>, HwfState)> {
        let high = self.hwf.high.net();
        let mut out = Vec::new();
        for t in high.enabled(&s.high) {
            let tr = high.transition(t);
            if tr.is_silent() {
                out.push((None, HwfState { high: high.fire_unchecked(&s.high, t), active: s.active.clone() }));
                continue;
            }
            let mut m = s.high.clone();
            for (p, w) in &tr.input {
                m.0[p.0] -= w;
            }
            let mut active = s.active.clone();
            active.push((t, self.subnet_of(t).initial_marking()));
            active.sort();
            out.push((None, HwfState { high: m, active }));
        }
        for (k, (t, m)) in s.active.iter().enumerate() {
            if k > 0 && s.active[k - 1] == s.active[k] {
                continue;
            }
            let sub = self.subnet_of(*t);
            for u in sub.net().enabled(m) {
                let mut active = s.active.clone();
                active[k].1 = sub.net().fire_unchecked(m, u);
                active.sort();
                out.push((sub.net().transition(u).label.clone(), HwfState { high: s.high.clone(), active }));
            }
            if sub.is_final(m) {
                let mut high_m = s.high.clone();
                for (p, w) in &high.transition(*t).output {
                    high_m.0[p.0] += w;
                }
                let mut active = s.active.clone();
                active.remove(k);
                out.push((None, HwfState { high: high_m, active }));
            }
        }
        out
    }

    fn is_final(&self, s: &HwfState) -> bool {
        s.active.is_empty() && self.hwf.high.is_final(&s.high)
    }
}

/// Observable low-level runs of `h` up to `max_len` events, computed by
/// executing the hierarchy.
pub fn hwf_runs_upto(h: &HwfNet, max_len: usize, budget: usize) -> RunSet {
    observable_language(&HwfLts { hwf: h }, max_len, budget)
}
