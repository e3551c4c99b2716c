//! Reachability-graph exploration and workflow-net soundness.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use super::{Marking, PetriNet, TransitionId, WfNet};

/// Result of a budgeted state-space exploration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exploration {
    /// Every reachable marking, in breadth-first discovery order.
    Complete(Vec<Marking>),
    /// More than `budget` markings exist; the ones found so far.
    BudgetExceeded(Vec<Marking>),
}

impl Exploration {
    pub fn markings(&self) -> &[Marking] {
        match self {
            Exploration::Complete(m) | Exploration::BudgetExceeded(m) => m,
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self, Exploration::Complete(_))
    }
}

struct Graph {
    markings: Vec<Marking>,
    edges: Vec<Vec<(TransitionId, usize)>>,
}

enum Outcome {
    Complete,
    BudgetExceeded,
    /// A reachable marking strictly covers one of its ancestors.
    Unbounded(Marking),
}

/// Breadth-first reachability graph, stopping once more than `budget`
/// markings are reachable. With `detect_unbounded`, also stops at the
/// first marking that strictly covers a marking on its path from `m0`.
fn build_graph(net: &PetriNet, m0: &Marking, budget: usize, detect_unbounded: bool) -> (Graph, Outcome) {
    let mut index: HashMap<Marking, usize> = HashMap::new();
    let mut g = Graph { markings: vec![m0.clone()], edges: vec![Vec::new()] };
    let mut parent: Vec<Option<usize>> = vec![None];
    index.insert(m0.clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        let m = g.markings[k].clone();
        for t in net.enabled(&m) {
            let next = net.fire_unchecked(&m, t);
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    if detect_unbounded {
                        let mut anc = Some(k);
                        while let Some(a) = anc {
                            if g.markings[a].is_covered_by(&next) {
                                return (g, Outcome::Unbounded(next));
                            }
                            anc = parent[a];
                        }
                    }
                    if g.markings.len() >= budget {
                        return (g, Outcome::BudgetExceeded);
                    }
                    let j = g.markings.len();
                    index.insert(next.clone(), j);
                    g.markings.push(next);
                    g.edges.push(Vec::new());
                    parent.push(Some(k));
                    queue.push_back(j);
                    j
                }
            };
            g.edges[k].push((t, j));
        }
    }
    (g, Outcome::Complete)
}

/// All markings reachable from `m0`, or [`Exploration::BudgetExceeded`]
/// once more than `budget` distinct markings have been found.
pub fn reachable_markings(net: &PetriNet, m0: &Marking, budget: usize) -> Exploration {
    assert!(budget > 0, "state budget must be positive");
    let (g, outcome) = build_graph(net, m0, budget, false);
    if matches!(outcome, Outcome::Complete) {
        Exploration::Complete(g.markings)
    } else {
        Exploration::BudgetExceeded(g.markings)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SoundnessViolation {
    /// Reachable markings from which `[f]` cannot be reached.
    CannotComplete {
        count: usize,
        example: String,
    },
    /// Reachable markings with a token in `f` plus other tokens.
    ImproperCompletion {
        count: usize,
        example: String,
    },
    DeadTransitions {
        transitions: Vec<String>,
    },
    /// A reachable marking strictly covers an earlier marking on its path,
    /// so tokens can pile up without bound.
    Unbounded {
        example: String,
    },
}

impl fmt::Display for SoundnessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SoundnessViolation::CannotComplete { count, example } => {
                write!(f, "{count} reachable markings cannot complete, e.g. {example}")
            }
            SoundnessViolation::ImproperCompletion { count, example } => {
                write!(f, "{count} reachable markings mark the sink with tokens left over, e.g. {example}")
            }
            SoundnessViolation::DeadTransitions { transitions } => {
                write!(f, "dead transitions: {}", transitions.join(", "))
            }
            SoundnessViolation::Unbounded { example } => write!(f, "the net is unbounded, e.g. {example}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Soundness {
    Sound,
    Unsound {
        violations: Vec<SoundnessViolation>,
    },
    /// The state budget ran out before the answer was known.
    Inconclusive {
        explored: usize,
    },
}

impl Soundness {
    pub fn is_sound(&self) -> bool {
        matches!(self, Soundness::Sound)
    }
}

/// Checks the three soundness conditions on the reachability graph from `[i]`:
/// option to complete, proper completion, and no dead transitions.
pub fn check_soundness(w: &WfNet, budget: usize) -> Soundness {
    assert!(budget > 0, "state budget must be positive");
    let net = w.net();
    let (g, outcome) = build_graph(net, &w.initial_marking(), budget, true);
    match outcome {
        Outcome::Complete => {}
        Outcome::BudgetExceeded => return Soundness::Inconclusive { explored: g.markings.len() },
        Outcome::Unbounded(m) => {
            return Soundness::Unsound {
                violations: vec![SoundnessViolation::Unbounded { example: describe(net, &m) }],
            }
        }
    }
    let sink = w.sink();
    let final_marking = w.final_marking();
    let mut violations = Vec::new();

    // Option to complete: backward search from [f].
    let mut can_complete = vec![false; g.markings.len()];
    if let Some(fi) = g.markings.iter().position(|m| *m == final_marking) {
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); g.markings.len()];
        for (k, out) in g.edges.iter().enumerate() {
            for &(_, j) in out {
                rev[j].push(k);
            }
        }
        can_complete[fi] = true;
        let mut queue = VecDeque::from([fi]);
        while let Some(j) = queue.pop_front() {
            for &k in &rev[j] {
                if !can_complete[k] {
                    can_complete[k] = true;
                    queue.push_back(k);
                }
            }
        }
    }
    let stuck: Vec<usize> = (0..g.markings.len()).filter(|&k| !can_complete[k]).collect();
    if let Some(&first) = stuck.first() {
        violations.push(SoundnessViolation::CannotComplete {
            count: stuck.len(),
            example: describe(net, &g.markings[first]),
        });
    }

    let improper: Vec<&Marking> = g.markings.iter().filter(|m| m.tokens(sink) >= 1 && **m != final_marking).collect();
    if let Some(first) = improper.first() {
        violations
            .push(SoundnessViolation::ImproperCompletion { count: improper.len(), example: describe(net, first) });
    }

    let mut fired = vec![false; net.transition_count()];
    for out in &g.edges {
        for (t, _) in out {
            fired[t.0] = true;
        }
    }
    let dead: Vec<String> = net.transitions().filter(|(t, _)| !fired[t.0]).map(|(_, tr)| tr.name.clone()).collect();
    if !dead.is_empty() {
        violations.push(SoundnessViolation::DeadTransitions { transitions: dead });
    }

    if violations.is_empty() {
        Soundness::Sound
    } else {
        Soundness::Unsound { violations }
    }
}

/// `[p1, 2·p3]` using place names.
pub fn describe(net: &PetriNet, m: &Marking) -> String {
    let parts: Vec<String> = net
        .places()
        .filter(|(p, _)| m.tokens(*p) > 0)
        .map(|(p, place)| match m.tokens(p) {
            1 => place.name.clone(),
            n => format!("{n}·{}", place.name),
        })
        .collect();
    format!("[{}]", parts.join(", "))
}
