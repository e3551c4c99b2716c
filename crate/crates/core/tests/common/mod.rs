//! Random models for property tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::BTreeMap;

use hwf_core::discovery::{tree_to_wfnet, ProcessTree};
use hwf_core::hierarchy::HwfNet;
use hwf_core::log::Activity;
use hwf_core::partition::Partition;
use hwf_core::petri::{PetriNet, WfNet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random block-structured tree using every leaf exactly once.
pub fn random_tree(rng: &mut impl Rng, leaves: &[Activity], loops: bool) -> ProcessTree {
    if leaves.len() == 1 {
        let leaf = ProcessTree::Activity(leaves[0].clone());
        return match rng.random_range(0..10) {
            0 if loops => ProcessTree::Loop(vec![leaf, ProcessTree::Tau]),
            1 => ProcessTree::Xor(vec![leaf, ProcessTree::Tau]),
            _ => leaf,
        };
    }
    let mut shuffled = leaves.to_vec();
    shuffled.shuffle(rng);
    let parts = rng.random_range(2..=shuffled.len().min(3));
    // Cut points splitting the leaves into `parts` non-empty chunks.
    let mut cuts: Vec<usize> = (1..shuffled.len()).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
    cuts.sort();
    let mut chunks = Vec::new();
    let mut start = 0;
    for c in cuts.into_iter().chain([shuffled.len()]) {
        chunks.push(shuffled[start..c].to_vec());
        start = c;
    }
    let op = rng.random_range(0..if loops { 7 } else { 6 });
    if op == 6 && chunks.len() == 2 {
        return ProcessTree::Loop(vec![random_tree(rng, &chunks[0], loops), random_tree(rng, &chunks[1], loops)]);
    }
    let children: Vec<ProcessTree> = chunks.iter().map(|c| random_tree(rng, c, loops)).collect();
    match op % 3 {
        0 => ProcessTree::Seq(children),
        1 => ProcessTree::Xor(children),
        _ => ProcessTree::Par(children),
    }
}

/// A random sound net over `leaves` with at most `max_transitions`
/// transitions, silent ones included.
pub fn random_net(rng: &mut impl Rng, leaves: &[Activity], loops: bool, max_transitions: usize) -> WfNet {
    loop {
        let w = tree_to_wfnet(&random_tree(rng, leaves, loops).simplified());
        if w.net().transition_count() <= max_transitions {
            return w;
        }
    }
}

pub struct GeneratedHwf {
    pub hwf: HwfNet,
    pub partition: Partition,
}

/// At most four sub-processes with at most six transitions each, over
/// one to three activities per sub-process.
pub fn random_hwf(rng: &mut impl Rng, loops: bool) -> GeneratedHwf {
    let k = rng.random_range(1..=4);
    let names: Vec<Activity> = (1..=k).map(|g| Activity::new(format!("S{g}"))).collect();
    let high = random_net(rng, &names, loops, 6);
    let mut subnets = BTreeMap::new();
    let mut partition = Partition::new();
    for (g, name) in names.iter().enumerate() {
        let m = rng.random_range(1..=3);
        let acts: Vec<Activity> = (1..=m).map(|j| Activity::new(format!("s{}_{j}", g + 1))).collect();
        subnets.insert(name.clone(), random_net(rng, &acts, loops, 6));
        partition.insert(name.clone(), acts);
    }
    GeneratedHwf { hwf: HwfNet::new(high, subnets).expect("generated hierarchy is valid"), partition }
}

/// A random workflow net with at most `max_places` places, not
/// necessarily sound or bounded. Arc weights are mostly 1.
pub fn random_wfnet(rng: &mut impl Rng, max_places: usize) -> WfNet {
    loop {
        let n_places = rng.random_range(2..=max_places);
        let n_trans = rng.random_range(1..=6);
        let mut net = PetriNet::new();
        let places: Vec<_> = (0..n_places).map(|k| net.add_place(format!("p{k}"))).collect();
        let (source, sink) = (places[0], places[n_places - 1]);
        for t in 0..n_trans {
            let label = ["a", "b", "c"][rng.random_range(0..3)];
            let id = net.add_transition(format!("t{t}"), (rng.random_range(0..4) > 0).then(|| Activity::new(label)));
            let weight = |rng: &mut dyn rand::RngCore| if rng.random_range(0..8) == 0 { 2 } else { 1 };
            let n_in = rng.random_range(1..=2);
            let mut ins = places[..n_places - 1].to_vec();
            ins.shuffle(rng);
            for p in ins.into_iter().take(n_in) {
                let w = weight(rng);
                net.add_input_arc(p, id, w);
            }
            let n_out = rng.random_range(1..=2);
            let mut outs = places[1..].to_vec();
            outs.shuffle(rng);
            for p in outs.into_iter().take(n_out) {
                let w = weight(rng);
                net.add_output_arc(id, p, w);
            }
        }
        if let Ok(w) = WfNet::new(net, source, sink) {
            return w;
        }
    }
}

pub mod oracle;
