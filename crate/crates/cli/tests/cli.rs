use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hwf_core::discovery::{flower, tree_to_wfnet};
use hwf_core::log::{activity_set, xes::to_xes_string, Activity, EventLog, Trace};
use hwf_core::petri::json::{wfnet_from_json, wfnet_to_json};
use hwf_core::petri::runs_upto;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn hwfmine(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hwfmine")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_log(dir: &Path, name: &str, traces: &[&[&str]]) -> PathBuf {
    let log: EventLog = traces.iter().map(|t| Trace::from_names(t.iter())).collect();
    let path = dir.join(name);
    fs::write(&path, to_xes_string(&log)).unwrap();
    path
}

fn write_partition(dir: &Path, name: &str, json: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn discover_pipeline() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let dbg = tmp.path().join("dbg");
    let o = hwfmine(&[
        "discover",
        "--log",
        p(&fixture("pipeline.xes")),
        "--partition",
        p(&fixture("pipeline.partition.json")),
        "--out",
        p(&out),
        "--debug-dump",
        p(&dbg),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("Fitness 2  1.0000"), "{stdout}");
    let m = read_json(&out.join("metrics.json"));
    assert_eq!(m["fitness_1"], 1.0);
    assert_eq!(m["fitness_2"], 1.0);
    assert!(m["precision"].as_f64().unwrap() < 1.0);
    assert_eq!(fs::read_dir(out.join("subnets")).unwrap().count(), 7);
    for f in ["hwf.json", "hwf.dot", "high.dot", "flat.pnml", "partition.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert!(dbg.join("discovery.json").exists());
    assert!(dbg.join("iteration_01_folded.xes").exists());
}

#[test]
fn discover_all_fixtures_has_fitness_two_of_one() {
    let tmp = TempDir::new().unwrap();
    for name in ["two-refined", "concurrent", "loop"] {
        let log = tmp.path().join(format!("{name}.xes"));
        let net = fixture(&format!("{name}.hwf.json"));
        assert_eq!(code(&hwfmine(&["playout", "--net", p(&net), "--n", "50", "--seed", "3", "--out", p(&log)])), 0);
        let out = tmp.path().join(name);
        let partition = fixture(&format!("{name}.partition.json"));
        let o = hwfmine(&["discover", "--log", p(&log), "--partition", p(&partition), "--out", p(&out)]);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let m = read_json(&out.join("metrics.json"));
        assert_eq!(m["fitness_1"], 1.0, "{name}");
        assert_eq!(m["fitness_2"], 1.0, "{name}");
    }
}

#[test]
fn discover_input_errors() {
    let tmp = TempDir::new().unwrap();
    let log = write_log(tmp.path(), "l.xes", &[&["a", "b"]]);
    let out = tmp.path().join("out");
    let missing = tmp.path().join("missing.json");
    let o = hwfmine(&["discover", "--log", p(&log), "--partition", p(&missing), "--out", p(&out)]);
    assert_eq!(code(&o), 2);

    let overlapping = write_partition(tmp.path(), "o.json", r#"{"subprocesses": {"x": ["a", "b"], "y": ["b"]}}"#);
    let o = hwfmine(&["discover", "--log", p(&log), "--partition", p(&overlapping), "--out", p(&out)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("share activities"));

    let broken = tmp.path().join("broken.xes");
    fs::write(&broken, "<log><trace><event>").unwrap();
    let good = write_partition(tmp.path(), "g.json", r#"{"subprocesses": {"x": ["a", "b"]}}"#);
    assert_eq!(code(&hwfmine(&["discover", "--log", p(&broken), "--partition", p(&good), "--out", p(&out)])), 2);
}

#[test]
fn loop_cutting_a_group() {
    let tmp = TempDir::new().unwrap();
    let log = write_log(tmp.path(), "l.xes", &[&["a", "b", "c", "b", "c"], &["a", "b", "c"]]);
    let part = write_partition(tmp.path(), "p.json", r#"{"subprocesses": {"x": ["a", "b"], "y": ["c"]}}"#);
    let out = tmp.path().join("out");
    let o = hwfmine(&["discover", "--log", p(&log), "--partition", p(&part), "--out", p(&out)]);
    assert_eq!(code(&o), 3);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("split x"), "{err}");

    let o = hwfmine(&["discover", "--log", p(&log), "--partition", p(&part), "--out", p(&out), "--auto-refine"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = read_json(&out.join("metrics.json"));
    assert_eq!(m["fitness_1"], 1.0);
    assert_eq!(m["refinements"].as_array().unwrap().len(), 1);
}

#[test]
fn discover_and_playout_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let net = fixture("pipeline.hwf.json");
    let (l1, l2) = (tmp.path().join("1.xes"), tmp.path().join("2.xes"));
    for l in [&l1, &l2] {
        assert_eq!(code(&hwfmine(&["playout", "--net", p(&net), "--n", "60", "--seed", "11", "--out", p(l)])), 0);
    }
    assert_eq!(fs::read(&l1).unwrap(), fs::read(&l2).unwrap());
    let part = fixture("pipeline.partition.json");
    let (o1, o2) = (tmp.path().join("o1"), tmp.path().join("o2"));
    for o in [&o1, &o2] {
        assert_eq!(
            code(&hwfmine(&["discover", "--log", p(&l1), "--partition", p(&part), "--out", p(o), "--seed", "5"])),
            0
        );
    }
    let mut files: Vec<PathBuf> = Vec::new();
    let mut stack = vec![o1.clone()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                files.push(path);
            }
        }
    }
    assert!(files.len() >= 10);
    for f in files {
        let twin = o2.join(f.strip_prefix(&o1).unwrap());
        assert_eq!(fs::read(&f).unwrap(), fs::read(&twin).unwrap(), "{}", f.display());
    }
}

#[test]
fn playout_budget() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("l.xes");
    let o = hwfmine(&["playout", "--net", p(&fixture("two-refined.hwf.json")), "--max-len", "5", "--out", p(&out)]);
    assert_eq!(code(&o), 4);
    let o = hwfmine(&["playout", "--net", p(&fixture("two-refined.hwf.json")), "--max-len", "6", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
}

#[test]
fn conformance_reports() {
    let tmp = TempDir::new().unwrap();
    let net = fixture("pipeline.hwf.json");
    let own = tmp.path().join("own.xes");
    assert_eq!(code(&hwfmine(&["playout", "--net", p(&net), "--n", "30", "--out", p(&own)])), 0);
    let o = hwfmine(&["conformance", "--net", p(&net), "--log", p(&own)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["fitness"], 1.0);
    assert!(!report["traces"].as_array().unwrap().is_empty());

    let flower_net = tmp.path().join("flower.json");
    fs::write(&flower_net, wfnet_to_json(&tree_to_wfnet(&flower(&activity_set(["a", "b"]))))).unwrap();
    let structured = write_log(tmp.path(), "s.xes", &[&["a", "b"]]);
    let o = hwfmine(&["conformance", "--net", p(&flower_net), "--log", p(&structured)]);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["fitness"], 1.0);
    let precision = report["precision"].as_f64().unwrap();
    assert!((precision - 1.0 / 3.0).abs() < 1e-12, "{precision}");

    let empty = write_log(tmp.path(), "e.xes", &[]);
    assert_eq!(code(&hwfmine(&["conformance", "--net", p(&flower_net), "--log", p(&empty)])), 2);
    let missing = tmp.path().join("nope.xes");
    assert_eq!(code(&hwfmine(&["conformance", "--net", p(&flower_net), "--log", p(&missing)])), 2);
}

#[test]
fn flatten_fixture_and_errors() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("flat");
    let o = hwfmine(&["flatten", "--hwf", p(&fixture("two-refined.hwf.json")), "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    let flat = wfnet_from_json(&fs::read_to_string(out.join("flat.json")).unwrap()).unwrap();
    let run: Vec<Activity> = ["x", "e1", "e5", "e2", "e6", "y"].map(Activity::new).to_vec();
    assert_eq!(runs_upto(&flat, 6, 100_000).runs.get(&run), Some(&true));
    assert!(out.join("flat.pnml").exists() && out.join("flat.dot").exists());

    // Remove the subnet of one high-level label.
    let mut doc = read_json(&fixture("two-refined.hwf.json"));
    doc["subnets"].as_object_mut().unwrap().remove("α4");
    let dangling = tmp.path().join("dangling.json");
    fs::write(&dangling, doc.to_string()).unwrap();
    let o = hwfmine(&["flatten", "--hwf", p(&dangling), "--out", p(&out)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("α4"));
}

#[test]
fn identity_refinement_flattens_to_high_level() {
    let tmp = TempDir::new().unwrap();
    let high = tree_to_wfnet(&"seq(a, xor(b, c), par(d, e))".parse().unwrap());
    let mut subnets = serde_json::Map::new();
    for a in ["a", "b", "c", "d", "e"] {
        let single = tree_to_wfnet(&a.parse().unwrap());
        subnets.insert(a.into(), serde_json::from_str(&wfnet_to_json(&single)).unwrap());
    }
    let doc = serde_json::json!({"high": serde_json::from_str::<serde_json::Value>(&wfnet_to_json(&high)).unwrap(), "subnets": subnets});
    let path = tmp.path().join("identity.json");
    fs::write(&path, doc.to_string()).unwrap();
    let out = tmp.path().join("flat");
    assert_eq!(code(&hwfmine(&["flatten", "--hwf", p(&path), "--out", p(&out)])), 0);
    let flat = wfnet_from_json(&fs::read_to_string(out.join("flat.json")).unwrap()).unwrap();
    assert_eq!(flat.net().place_count(), high.net().place_count());
    assert_eq!(flat.net().transition_count(), high.net().transition_count());
    assert_eq!(flat.net().arc_count(), high.net().arc_count());
    assert_eq!(runs_upto(&flat, 6, 100_000).runs, runs_upto(&high, 6, 100_000).runs);
}

#[test]
fn export_formats() {
    let tmp = TempDir::new().unwrap();
    let hwf = fixture("concurrent.hwf.json");
    let o = hwfmine(&["export", "--net", p(&hwf), "--format", "dot"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("cluster_high"));
    let pnml = tmp.path().join("flat.pnml");
    assert_eq!(code(&hwfmine(&["export", "--net", p(&hwf), "--format", "pnml", "--out", p(&pnml)])), 0);
    let json = tmp.path().join("flat.json");
    assert_eq!(code(&hwfmine(&["export", "--net", p(&pnml), "--format", "json", "--out", p(&json)])), 0);
    let w = wfnet_from_json(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(w.alphabet(), activity_set(["a", "b1", "b2", "c1", "c2"]));
    assert_eq!(code(&hwfmine(&["export", "--net", p(&tmp.path().join("none.pnml")), "--format", "json"])), 2);
}

#[test]
fn validate_partition_and_net() {
    let tmp = TempDir::new().unwrap();
    let o = hwfmine(&[
        "validate",
        "--log",
        p(&fixture("pipeline.xes")),
        "--partition",
        p(&fixture("pipeline.partition.json")),
        "--net",
        p(&fixture("pipeline.hwf.json")),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("net is sound"));
    let partial = write_partition(tmp.path(), "p.json", r#"{"subprocesses": {"x": ["receive_claim"]}}"#);
    let o = hwfmine(&["validate", "--log", p(&fixture("pipeline.xes")), "--partition", p(&partial)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("in no sub-process"));
}
