//! Escaping-edges precision.
//!
//! Every prefix of every (aligned) trace is a state, the complete trace
//! included, weighted by how many traces pass through it. At each state the
//! model allows the visible activities enabled in the silent closure of the
//! markings the prefix can lead to; the activities the log continues with
//! are observed, the rest escape.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::Serialize;

use crate::log::{Activity, EventLog, Trace};
use crate::petri::{Marking, WfNet};

use super::alignment::{align, perfectly_fits};
use super::{BudgetExceeded, ConformanceError};

#[derive(Default)]
struct TrieNode {
    children: BTreeMap<Activity, usize>,
    weight: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PrecisionResult {
    pub precision: f64,
    pub escaping: u64,
    pub allowed: u64,
}

struct Closure<'a> {
    w: &'a WfNet,
    left: usize,
}

impl Closure<'_> {
    fn close(&mut self, seeds: impl IntoIterator<Item = Marking>) -> Result<HashSet<Marking>, BudgetExceeded> {
        let net = self.w.net();
        let mut seen: HashSet<Marking> = HashSet::new();
        let mut queue = VecDeque::new();
        for m in seeds {
            if seen.insert(m.clone()) {
                queue.push_back(m);
            }
        }
        while let Some(m) = queue.pop_front() {
            if self.left == 0 {
                return Err(BudgetExceeded);
            }
            self.left -= 1;
            for t in net.enabled(&m) {
                if net.transition(t).is_silent() {
                    let next = net.fire_unchecked(&m, t);
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
        Ok(seen)
    }

    fn allowed(&self, markings: &HashSet<Marking>) -> BTreeSet<Activity> {
        let net = self.w.net();
        markings.iter().flat_map(|m| net.enabled(m)).filter_map(|t| net.transition(t).label.clone()).collect()
    }

    fn step(&mut self, markings: &HashSet<Marking>, a: &Activity) -> Result<HashSet<Marking>, BudgetExceeded> {
        let net = self.w.net();
        let seeds: Vec<Marking> = markings
            .iter()
            .flat_map(|m| net.enabled(m).into_iter().map(move |t| (m, t)))
            .filter(|(_, t)| net.transition(*t).label.as_ref() == Some(a))
            .map(|(m, t)| net.fire_unchecked(m, t))
            .collect();
        self.close(seeds)
    }
}

/// Replaces each trace that does not fit `w` by the model side of an
/// optimal alignment.
pub fn aligned_log(w: &WfNet, log: &EventLog, budget: usize) -> Result<EventLog, ConformanceError> {
    let mut out = EventLog::new();
    for (trace, n) in log.iter() {
        let t = match perfectly_fits(w, trace, budget) {
            Ok(true) => trace.clone(),
            _ => match align(w, trace, budget) {
                Ok(Some(a)) => a.model_projection(),
                Ok(None) => return Err(ConformanceError::NoFinalRun),
                Err(BudgetExceeded) => return Err(ConformanceError::BudgetExceeded),
            },
        };
        out.add(t, n);
    }
    Ok(out)
}

/// `1 − Σ escaping / Σ allowed` over the prefix states of the aligned log,
/// weighted by multiplicity. A model that allows nothing anywhere scores 1.
pub fn etc_precision(w: &WfNet, log: &EventLog, budget: usize) -> Result<PrecisionResult, ConformanceError> {
    if log.is_empty() {
        return Err(ConformanceError::EmptyLog);
    }
    let aligned = aligned_log(w, log, budget)?;
    let mut trie = vec![TrieNode::default()];
    for (trace, n) in aligned.iter() {
        let mut cur = 0;
        trie[0].weight += n;
        for a in trace.iter() {
            let next = match trie[cur].children.get(a) {
                Some(&k) => k,
                None => {
                    trie.push(TrieNode::default());
                    let k = trie.len() - 1;
                    trie[cur].children.insert(a.clone(), k);
                    k
                }
            };
            trie[next].weight += n;
            cur = next;
        }
    }
    let mut closure = Closure { w, left: budget };
    let start = closure.close([w.initial_marking()]).map_err(|_| ConformanceError::BudgetExceeded)?;
    let (mut escaping, mut allowed_total) = (0u64, 0u64);
    let mut stack: Vec<(usize, HashSet<Marking>, Trace)> = vec![(0, start, Trace::empty())];
    while let Some((node, markings, prefix)) = stack.pop() {
        if markings.is_empty() {
            return Err(ConformanceError::Internal(format!("aligned prefix {prefix} cannot be replayed")));
        }
        let allowed = closure.allowed(&markings);
        let observed: BTreeSet<&Activity> = trie[node].children.keys().collect();
        let weight = trie[node].weight;
        allowed_total += weight * allowed.len() as u64;
        escaping += weight * allowed.iter().filter(|a| !observed.contains(a)).count() as u64;
        for (a, &child) in &trie[node].children {
            let next = closure.step(&markings, a).map_err(|_| ConformanceError::BudgetExceeded)?;
            let mut p = prefix.clone();
            p.push(a.clone());
            stack.push((child, next, p));
        }
    }
    let precision = if allowed_total == 0 { 1.0 } else { 1.0 - escaping as f64 / allowed_total as f64 };
    Ok(PrecisionResult { precision, escaping, allowed: allowed_total })
}
