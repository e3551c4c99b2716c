use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::log::{Activity, EventLog, Trace};
use crate::petri::{Marking, WfNet};

use super::{BudgetExceeded, ConformanceError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Move {
    /// Log and model agree on the activity.
    Sync { activity: Activity, transition: String },
    /// The model fires a transition the log does not show; silent when
    /// `label` is `None`.
    Model { transition: String, label: Option<Activity> },
    /// The log shows an event the model does not perform.
    Log { activity: Activity },
}

impl Move {
    pub fn cost(&self) -> u64 {
        match self {
            Move::Sync { .. } | Move::Model { label: None, .. } => 0,
            Move::Model { .. } | Move::Log { .. } => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Alignment {
    pub moves: Vec<Move>,
    pub cost: u64,
}

impl Alignment {
    /// The visible activities performed by the model.
    pub fn model_projection(&self) -> Trace {
        self.moves
            .iter()
            .filter_map(|m| match m {
                Move::Sync { activity, .. } => Some(activity.clone()),
                Move::Model { label, .. } => label.clone(),
                Move::Log { .. } => None,
            })
            .collect()
    }

    /// The activities of the log side.
    pub fn log_projection(&self) -> Trace {
        self.moves
            .iter()
            .filter_map(|m| match m {
                Move::Sync { activity, .. } | Move::Log { activity } => Some(activity.clone()),
                Move::Model { .. } => None,
            })
            .collect()
    }
}

/// Whether `sigma` is a complete run of `w`: a search over
/// (marking, position) using synchronous and silent moves only.
pub fn perfectly_fits(w: &WfNet, sigma: &Trace, budget: usize) -> Result<bool, BudgetExceeded> {
    let net = w.net();
    let start = (w.initial_marking(), 0usize);
    let mut seen: HashSet<(Marking, usize)> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut expanded = 0usize;
    while let Some((m, pos)) = queue.pop_front() {
        if pos == sigma.len() && w.is_final(&m) {
            return Ok(true);
        }
        expanded += 1;
        if expanded > budget {
            return Err(BudgetExceeded);
        }
        for t in net.enabled(&m) {
            let next_pos = match &net.transition(t).label {
                None => pos,
                Some(a) if pos < sigma.len() && *a == sigma[pos] => pos + 1,
                Some(_) => continue,
            };
            let next = (net.fire_unchecked(&m, t), next_pos);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(false)
}

/// An optimal alignment of `sigma` with a complete run of `w`, or `None`
/// when `[f]` is unreachable.
///
/// Log moves and visible model moves cost 1; synchronous and silent moves
/// are free. The search is a 0-1 breadth-first search over
/// (marking, position); among equal-cost alternatives the first found wins,
/// with moves generated in the order synchronous, model, log.
pub fn align(w: &WfNet, sigma: &Trace, budget: usize) -> Result<Option<Alignment>, BudgetExceeded> {
    struct Node {
        marking: Marking,
        pos: usize,
        dist: u64,
        parent: Option<(usize, Move)>,
        settled: bool,
    }
    let net = w.net();
    let mut nodes = vec![Node { marking: w.initial_marking(), pos: 0, dist: 0, parent: None, settled: false }];
    let mut index: HashMap<(Marking, usize), usize> = HashMap::from([((w.initial_marking(), 0), 0)]);
    let mut deque = VecDeque::from([0usize]);
    let mut expanded = 0usize;
    while let Some(k) = deque.pop_front() {
        if nodes[k].settled {
            continue;
        }
        nodes[k].settled = true;
        let (m, pos, d) = (nodes[k].marking.clone(), nodes[k].pos, nodes[k].dist);
        if pos == sigma.len() && w.is_final(&m) {
            let mut moves = Vec::new();
            let mut cur = k;
            while let Some((p, mv)) = nodes[cur].parent.take() {
                moves.push(mv);
                cur = p;
            }
            moves.reverse();
            return Ok(Some(Alignment { moves, cost: d }));
        }
        expanded += 1;
        if expanded > budget {
            return Err(BudgetExceeded);
        }
        let mut succ: Vec<(Marking, usize, Move)> = Vec::new();
        let enabled = net.enabled(&m);
        if pos < sigma.len() {
            for &t in &enabled {
                let tr = net.transition(t);
                if tr.label.as_ref() == Some(&sigma[pos]) {
                    let mv = Move::Sync { activity: sigma[pos].clone(), transition: tr.name.clone() };
                    succ.push((net.fire_unchecked(&m, t), pos + 1, mv));
                }
            }
        }
        for &t in &enabled {
            let tr = net.transition(t);
            let mv = Move::Model { transition: tr.name.clone(), label: tr.label.clone() };
            succ.push((net.fire_unchecked(&m, t), pos, mv));
        }
        if pos < sigma.len() {
            succ.push((m.clone(), pos + 1, Move::Log { activity: sigma[pos].clone() }));
        }
        for (m2, pos2, mv) in succ {
            let cost = mv.cost();
            let nd = d + cost;
            let key = (m2, pos2);
            let j = match index.get(&key) {
                Some(&j) => {
                    if nodes[j].settled || nodes[j].dist <= nd {
                        continue;
                    }
                    j
                }
                None => {
                    let j = nodes.len();
                    nodes.push(Node {
                        marking: key.0.clone(),
                        pos: pos2,
                        dist: u64::MAX,
                        parent: None,
                        settled: false,
                    });
                    index.insert(key, j);
                    j
                }
            };
            nodes[j].dist = nd;
            nodes[j].parent = Some((k, mv));
            if cost == 0 {
                deque.push_front(j);
            } else {
                deque.push_back(j);
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceFitness {
    pub trace: Trace,
    pub multiplicity: u64,
    /// `None` when the search ran out of budget.
    pub cost: Option<u64>,
    pub fitness: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitnessResult {
    /// Multiplicity-weighted mean over the traces that were aligned.
    pub fitness: f64,
    /// Cost of the cheapest complete model run.
    pub model_cost: u64,
    pub traces: Vec<TraceFitness>,
    /// Some trace exceeded the budget and is missing from `fitness`.
    pub partial: bool,
}

/// `1 − cost / (|σ| + c_min)`, or 1 for a zero denominator.
pub fn trace_fitness(cost: u64, trace_len: usize, model_cost: u64) -> f64 {
    let denom = trace_len as u64 + model_cost;
    if denom == 0 {
        1.0
    } else {
        1.0 - cost as f64 / denom as f64
    }
}

/// Alignment-based fitness of `log` against `w`.
pub fn alignment_fitness(w: &WfNet, log: &EventLog, budget: usize) -> Result<FitnessResult, ConformanceError> {
    if log.is_empty() {
        return Err(ConformanceError::EmptyLog);
    }
    let model_cost = match align(w, &Trace::empty(), budget) {
        Ok(Some(a)) => a.cost,
        Ok(None) => return Err(ConformanceError::NoFinalRun),
        Err(BudgetExceeded) => return Err(ConformanceError::BudgetExceeded),
    };
    let mut traces = Vec::new();
    let (mut sum, mut weight, mut partial) = (0.0, 0u64, false);
    for (trace, n) in log.iter() {
        let cost = match perfectly_fits(w, trace, budget) {
            Ok(true) => Some(0),
            _ => match align(w, trace, budget) {
                Ok(Some(a)) => Some(a.cost),
                Ok(None) => return Err(ConformanceError::NoFinalRun),
                Err(BudgetExceeded) => None,
            },
        };
        let fitness = cost.map(|c| trace_fitness(c, trace.len(), model_cost));
        match fitness {
            Some(f) => {
                sum += f * n as f64;
                weight += n;
            }
            None => partial = true,
        }
        traces.push(TraceFitness { trace: trace.clone(), multiplicity: n, cost, fitness });
    }
    if weight == 0 {
        return Err(ConformanceError::BudgetExceeded);
    }
    Ok(FitnessResult { fitness: sum / weight as f64, model_cost, traces, partial })
}
