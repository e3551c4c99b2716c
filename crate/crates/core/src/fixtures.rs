//! Small hierarchical models used by the examples and tests.

use std::collections::BTreeMap;

use crate::discovery::{tree_to_wfnet, ProcessTree};
use crate::hierarchy::HwfNet;
use crate::log::Activity;
use crate::partition::Partition;
use crate::petri::{build, PetriNet, WfNet};

fn tree(text: &str) -> WfNet {
    let t: ProcessTree = text.parse().expect("fixture tree parses");
    tree_to_wfnet(&t)
}

fn hwf(high: WfNet, subnets: &[(&str, &str)]) -> HwfNet {
    let subnets = subnets.iter().map(|(name, t)| (Activity::new(name), tree(t))).collect();
    HwfNet::new(high, subnets).expect("fixture is a valid hierarchy")
}

/// The compensation-request net with each transition refined by a small
/// sub-process (sequences, a parallel block, a choice and a loop).
pub fn compensation_pipeline() -> HwfNet {
    hwf(
        build::compensation_request(),
        &[
            ("register request", "seq(receive_claim, log_claim)"),
            ("examine thoroughly", "seq(open_file, par(interview_customer, inspect_evidence), write_report)"),
            ("examine casually", "seq(scan_file, note_summary)"),
            ("check ticket", "seq(fetch_ticket, loop(verify_ticket, tau), file_check)"),
            ("decide", "seq(review_case, xor(sign_decision, escalate_decision))"),
            ("reinitiate request", "reopen_case"),
            ("pay compensation", "seq(prepare_payment, transfer_money)"),
            ("reject request", "seq(draft_letter, send_letter)"),
        ],
    )
}

/// Seven sub-processes over the activities of [`compensation_pipeline`];
/// both examinations form one group.
pub fn pipeline_partition() -> Partition {
    Partition::from_groups([
        ("intake", vec!["receive_claim", "log_claim"]),
        (
            "examination",
            vec!["open_file", "interview_customer", "inspect_evidence", "write_report", "scan_file", "note_summary"],
        ),
        ("ticket", vec!["fetch_ticket", "verify_ticket", "file_check"]),
        ("decision", vec!["review_case", "sign_decision", "escalate_decision"]),
        ("reopening", vec!["reopen_case"]),
        ("payment", vec!["prepare_payment", "transfer_money"]),
        ("rejection", vec!["draft_letter", "send_letter"]),
    ])
}

/// `t3` followed by `t1` and `t2` in parallel, then `t4`; `α1` and `α2` are
/// two-step sequences, `α3` and `α4` single activities.
pub fn two_refined_transitions() -> HwfNet {
    let mut net = PetriNet::new();
    let i = net.add_place("i");
    let p: Vec<_> = (1..=5).map(|k| net.add_place(format!("p{k}"))).collect();
    let f = net.add_place("f");
    let mut t = |name: &str, label: &str, ins: &[_], outs: &[_]| {
        let id = net.add_transition(name, Some(Activity::new(label)));
        for &x in ins {
            net.add_input_arc(x, id, 1);
        }
        for &x in outs {
            net.add_output_arc(id, x, 1);
        }
    };
    t("t3", "α3", &[i], &[p[0], p[1]]);
    t("t1", "α1", &[p[0]], &[p[2]]);
    t("t2", "α2", &[p[1]], &[p[3]]);
    t("t4", "α4", &[p[2], p[3]], &[p[4]]);
    let done = net.add_transition("t5", None);
    net.add_input_arc(p[4], done, 1);
    net.add_output_arc(done, f, 1);
    let high = WfNet::new(net, i, f).expect("workflow net");
    hwf(high, &[("α1", "seq(e1, e2)"), ("α2", "seq(e5, e6)"), ("α3", "x"), ("α4", "y")])
}

/// `α` then `β` and `γ` concurrently; `β` and `γ` have two steps each.
pub fn concurrent_subprocesses() -> HwfNet {
    hwf(tree("seq(α, par(β, γ))"), &[("α", "a"), ("β", "seq(b1, b2)"), ("γ", "seq(c1, c2)")])
}

/// `α` then a loop whose body is `β` followed by `γ`.
pub fn subprocesses_in_loop() -> HwfNet {
    hwf(tree("seq(α, loop(seq(β, γ), tau))"), &[("α", "a"), ("β", "seq(b1, b2)"), ("γ", "seq(c1, c2)")])
}

/// The sub-process partition matching a hierarchy's subnets.
pub fn partition_of(h: &HwfNet) -> Partition {
    let mut p = Partition::new();
    for (name, net) in h.subnets() {
        p.insert(name.clone(), net.alphabet());
    }
    p
}

/// All bundled hierarchies with their discovery partitions.
pub fn all() -> BTreeMap<&'static str, (HwfNet, Partition)> {
    let mut out = BTreeMap::new();
    out.insert("pipeline", (compensation_pipeline(), pipeline_partition()));
    for (name, h) in [
        ("two-refined", two_refined_transitions()),
        ("concurrent", concurrent_subprocesses()),
        ("loop", subprocesses_in_loop()),
    ] {
        let p = partition_of(&h);
        out.insert(name, (h, p));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::{flatten, hwf_runs_upto};
    use crate::log::EventLog;
    use crate::partition::validate_partition;
    use crate::petri::{check_soundness, runs_upto};

    #[test]
    fn fixtures_are_sound() {
        for (name, (h, p)) in all() {
            let flat = flatten(&h);
            assert!(check_soundness(&flat, 1_000_000).is_sound(), "{name}");
            let log: EventLog = EventLog::new();
            validate_partition(&p, &log).unwrap();
            assert_eq!(p.activities(), h.low_alphabet(), "{name}");
        }
    }

    #[test]
    fn concurrent_run_of_refined_transitions() {
        let h = two_refined_transitions();
        let run: Vec<Activity> = ["x", "e1", "e5", "e2", "e6", "y"].map(Activity::new).to_vec();
        assert_eq!(hwf_runs_upto(&h, 6, 100_000).runs.get(&run), Some(&true));
        assert_eq!(runs_upto(&flatten(&h), 6, 100_000).runs.get(&run), Some(&true));
    }

    #[test]
    fn pipeline_rediscovery() {
        use crate::abstraction::{discover_hwf, Options};
        use crate::conformance::{alignment_fitness, etc_precision, DEFAULT_BUDGET};
        use crate::discovery::InductiveMiner;
        use crate::petri::playout;
        let log = playout(&flatten(&compensation_pipeline()), 200, 1000, 7).unwrap();
        let d = discover_hwf(&log, &pipeline_partition(), &InductiveMiner, &Options::default()).unwrap();
        let flat = flatten(&d.hwf);
        assert_eq!(alignment_fitness(&flat, &log, DEFAULT_BUDGET).unwrap().fitness, 1.0);
        assert_eq!(alignment_fitness(&d.high_before_loops, &d.high_clones, DEFAULT_BUDGET).unwrap().fitness, 1.0);
        let prec = etc_precision(&flat, &log, DEFAULT_BUDGET).unwrap().precision;
        assert!(prec < 1.0);
    }
}
