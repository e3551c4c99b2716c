//! Observable languages of labeled transition systems, truncated by length.
//!
//! A word is recorded when some firing sequence produces it; its flag says
//! whether one of those sequences ends in a final state. Silent steps are
//! free with respect to `max_len`; the budget bounds the number of distinct
//! states visited.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::hash::Hash;

use crate::log::Activity;

use super::{Marking, WfNet};

/// A transition system with visible (`Some`) and silent (`None`) steps.
pub trait Lts {
    type State: Clone + Eq + Hash;

    fn initial(&self) -> Self::State;
    fn successors(&self, s: &Self::State) -> Vec<(Option<Activity>, Self::State)>;
    fn is_final(&self, s: &Self::State) -> bool;
}

/// Observable words up to a length bound, each flagged final or not.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunSet {
    pub runs: BTreeMap<Vec<Activity>, bool>,
    /// The state budget ran out; `runs` is incomplete.
    pub truncated: bool,
}

impl RunSet {
    pub fn contains(&self, word: &[Activity]) -> bool {
        self.runs.contains_key(word)
    }

    /// Whether `word` ends in a final state in some firing sequence.
    pub fn is_final(&self, word: &[Activity]) -> bool {
        self.runs.get(word).copied().unwrap_or(false)
    }

    /// Words that reach a final state.
    pub fn final_runs(&self) -> impl Iterator<Item = &Vec<Activity>> {
        self.runs.iter().filter(|(_, f)| **f).map(|(w, _)| w)
    }
}

type Edges = Vec<(Option<Activity>, usize)>;

/// States interned on first sight, with successor lists and silent
/// closures computed once each. Every interned state counts against the
/// budget.
struct Explorer<'l, L: Lts> {
    lts: &'l L,
    ids: HashMap<L::State, usize>,
    states: Vec<L::State>,
    finals: Vec<bool>,
    succ: Vec<Option<Edges>>,
    closure: Vec<Option<Vec<usize>>>,
    budget: usize,
}

impl<'l, L: Lts> Explorer<'l, L> {
    fn new(lts: &'l L, budget: usize) -> Self {
        Explorer {
            lts,
            ids: HashMap::new(),
            states: Vec::new(),
            finals: Vec::new(),
            succ: Vec::new(),
            closure: Vec::new(),
            budget,
        }
    }

    fn intern(&mut self, s: L::State) -> Option<usize> {
        if let Some(&id) = self.ids.get(&s) {
            return Some(id);
        }
        if self.states.len() >= self.budget {
            return None;
        }
        let id = self.states.len();
        self.finals.push(self.lts.is_final(&s));
        self.ids.insert(s.clone(), id);
        self.states.push(s);
        self.succ.push(None);
        self.closure.push(None);
        Some(id)
    }

    fn successors(&mut self, id: usize) -> Option<&[(Option<Activity>, usize)]> {
        if self.succ[id].is_none() {
            let mut out = Vec::new();
            for (label, next) in self.lts.successors(&self.states[id].clone()) {
                out.push((label, self.intern(next)?));
            }
            self.succ[id] = Some(out);
        }
        self.succ[id].as_deref()
    }

    fn closure_of(&mut self, id: usize) -> Option<&[usize]> {
        if self.closure[id].is_none() {
            let mut seen = HashSet::from([id]);
            let mut queue = VecDeque::from([id]);
            while let Some(j) = queue.pop_front() {
                for &(ref label, k) in self.successors(j)? {
                    if label.is_none() && seen.insert(k) {
                        queue.push_back(k);
                    }
                }
            }
            let mut c: Vec<usize> = seen.into_iter().collect();
            c.sort_unstable();
            self.closure[id] = Some(c);
        }
        self.closure[id].as_deref()
    }

    /// Silent closure of a set of states, sorted.
    fn close(&mut self, seeds: &[usize]) -> Option<Vec<usize>> {
        let mut out = BTreeSet::new();
        for &s in seeds {
            out.extend(self.closure_of(s)?.iter().copied());
        }
        Some(out.into_iter().collect())
    }
}

/// Every observable word of length ≤ `max_len`, by subset construction
/// over silent closures.
pub fn observable_language<L: Lts>(lts: &L, max_len: usize, budget: usize) -> RunSet {
    let mut ex = Explorer::new(lts, budget);
    let mut out = RunSet::default();
    let Some(start) = ex.intern(lts.initial()).and_then(|i| ex.close(&[i])) else {
        out.truncated = true;
        return out;
    };
    out.runs.insert(Vec::new(), start.iter().any(|s| ex.finals[*s]));
    let mut frontier: Vec<(Vec<Activity>, Vec<usize>)> = vec![(Vec::new(), start)];
    for _ in 0..max_len {
        let mut next_frontier = Vec::new();
        for (word, set) in frontier {
            let mut by_label: BTreeMap<Activity, Vec<usize>> = BTreeMap::new();
            for &s in &set {
                let Some(succ) = ex.successors(s) else {
                    out.truncated = true;
                    return out;
                };
                for (label, next) in succ {
                    if let Some(a) = label {
                        by_label.entry(a.clone()).or_default().push(*next);
                    }
                }
            }
            for (a, seeds) in by_label {
                let Some(closed) = ex.close(&seeds) else {
                    out.truncated = true;
                    return out;
                };
                let mut w = word.clone();
                w.push(a);
                out.runs.insert(w.clone(), closed.iter().any(|s| ex.finals[*s]));
                next_frontier.push((w, closed));
            }
        }
        if next_frontier.is_empty() {
            break;
        }
        frontier = next_frontier;
    }
    out
}

/// The firing semantics of a workflow net from `[i]`, final in `[f]`.
pub struct NetLts<'a> {
    pub wf: &'a WfNet,
}

impl Lts for NetLts<'_> {
    type State = Marking;

    fn initial(&self) -> Marking {
        self.wf.initial_marking()
    }

    fn successors(&self, m: &Marking) -> Vec<(Option<Activity>, Marking)> {
        let net = self.wf.net();
        net.enabled(m).into_iter().map(|t| (net.transition(t).label.clone(), net.fire_unchecked(m, t))).collect()
    }

    fn is_final(&self, m: &Marking) -> bool {
        self.wf.is_final(m)
    }
}

/// Observable runs of `w` of length ≤ `max_len`; final words are those that
/// some firing sequence completes in `[f]`.
pub fn runs_upto(w: &WfNet, max_len: usize, budget: usize) -> RunSet {
    observable_language(&NetLts { wf: w }, max_len, budget)
}
