//! Brute-force reference implementations, written against the raw arc
//! lists only.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use hwf_core::log::Activity;
use hwf_core::petri::WfNet;

type M = Vec<u32>;

fn fire(w: &WfNet, m: &M, t: usize) -> Option<M> {
    let tr = w.net().transitions().nth(t).expect("transition").1;
    let mut next = m.clone();
    for (p, k) in &tr.input {
        if next[p.0] < *k {
            return None;
        }
        next[p.0] -= k;
    }
    for (p, k) in &tr.output {
        next[p.0] += k;
    }
    Some(next)
}

fn label(w: &WfNet, t: usize) -> Option<Activity> {
    w.net().transitions().nth(t).expect("transition").1.label.clone()
}

fn initial(w: &WfNet) -> M {
    let mut m = vec![0; w.net().place_count()];
    m[w.source().0] = 1;
    m
}

fn final_marking(w: &WfNet) -> M {
    let mut m = vec![0; w.net().place_count()];
    m[w.sink().0] = 1;
    m
}

/// Soundness by depth-first reachability. `None` when more than `cap`
/// markings are reachable without an unboundedness witness.
pub fn sound(w: &WfNet, cap: usize) -> Option<bool> {
    let nt = w.net().transition_count();
    let m0 = initial(w);
    let mut ids: HashMap<M, usize> = HashMap::from([(m0.clone(), 0)]);
    let mut states = vec![m0];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new()];
    let mut fired = vec![false; nt];
    // Depth-first with the current path kept for the covering check.
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
    while let Some(&mut (s, ref mut next_t)) = stack.last_mut() {
        if *next_t == nt {
            stack.pop();
            continue;
        }
        let t = *next_t;
        *next_t += 1;
        let Some(m) = fire(w, &states[s], t) else { continue };
        fired[t] = true;
        let id = match ids.get(&m) {
            Some(&id) => id,
            None => {
                let covers = stack.iter().any(|(a, _)| states[*a].iter().zip(&m).all(|(x, y)| x <= y));
                if covers {
                    return Some(false);
                }
                if states.len() >= cap {
                    return None;
                }
                let id = states.len();
                ids.insert(m.clone(), id);
                states.push(m);
                succ.push(Vec::new());
                stack.push((id, 0));
                id
            }
        };
        succ[s].push(id);
    }
    let fin = final_marking(w);
    let f = w.sink().0;
    if states.iter().any(|m| m[f] > 0 && *m != fin) {
        return Some(false);
    }
    if fired.iter().any(|x| !x) {
        return Some(false);
    }
    // Every state must reach [f].
    let Some(&goal) = ids.get(&fin) else { return Some(false) };
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); states.len()];
    for (s, out) in succ.iter().enumerate() {
        for &j in out {
            pred[j].push(s);
        }
    }
    let mut reach = vec![false; states.len()];
    reach[goal] = true;
    let mut queue = VecDeque::from([goal]);
    while let Some(j) = queue.pop_front() {
        for &s in &pred[j] {
            if !reach[s] {
                reach[s] = true;
                queue.push_back(s);
            }
        }
    }
    Some(reach.iter().all(|x| *x))
}

/// Visible words of complete runs with at most `max_len` events.
pub fn complete_words(w: &WfNet, max_len: usize, cap: usize) -> BTreeSet<Vec<Activity>> {
    let nt = w.net().transition_count();
    let fin = final_marking(w);
    let start = (initial(w), Vec::<Activity>::new());
    let mut seen: HashSet<(M, Vec<Activity>)> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut out = BTreeSet::new();
    while let Some((m, word)) = queue.pop_front() {
        assert!(seen.len() <= cap, "oracle state cap exceeded");
        if m == fin {
            out.insert(word.clone());
        }
        for t in 0..nt {
            let Some(next) = fire(w, &m, t) else { continue };
            let mut wd = word.clone();
            if let Some(a) = label(w, t) {
                if wd.len() == max_len {
                    continue;
                }
                wd.push(a);
            }
            let key = (next, wd);
            if seen.insert(key.clone()) {
                queue.push_back(key);
            }
        }
    }
    out
}

fn lcs(a: &[Activity], b: &[Activity]) -> usize {
    let mut dp = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            dp[i][j] = if a[i - 1] == b[j - 1] { dp[i - 1][j - 1] + 1 } else { dp[i - 1][j].max(dp[i][j - 1]) };
        }
    }
    dp[a.len()][b.len()]
}

/// Minimum alignment cost over all complete runs: log moves plus visible
/// model moves, silent steps free.
pub fn min_alignment_cost(w: &WfNet, sigma: &[Activity]) -> Option<usize> {
    let shortest = complete_words(w, 2 * sigma.len() + 8, 2_000_000).into_iter().map(|x| x.len()).min()?;
    // Any run longer than |σ| + cost bound cannot be optimal.
    let bound = 2 * sigma.len() + shortest;
    complete_words(w, bound, 2_000_000).iter().map(|word| sigma.len() + word.len() - 2 * lcs(sigma, word)).min()
}

/// Length of the shortest complete run's visible word.
pub fn shortest_run(w: &WfNet, limit: usize) -> Option<usize> {
    complete_words(w, limit, 2_000_000).into_iter().map(|x| x.len()).min()
}
