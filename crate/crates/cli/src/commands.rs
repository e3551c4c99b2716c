use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use hwf_core::abstraction::{discover_hwf, discover_hwf_refining, AbstractionError, HwfDiscovery, Options};
use hwf_core::conformance::{alignment_fitness, conformance_report, etc_precision, ConformanceError};
use hwf_core::discovery::InductiveMiner;
use hwf_core::hierarchy::{flatten as flatten_hwf, hwf_to_dot, hwf_to_json, HwfNet};
use hwf_core::log::xes::to_xes_string;
use hwf_core::log::EventLog;
use hwf_core::partition::{validate_partition, Partition};
use hwf_core::petri::dot::wfnet_to_dot;
use hwf_core::petri::json::wfnet_to_json;
use hwf_core::petri::pnml::wfnet_to_pnml;
use hwf_core::petri::{check_soundness, playout as sample, PlayoutError, Soundness};

use crate::input::{load_hwf, load_log, load_model, load_partition, write, CliError, CliResult, Model};
use crate::Format;

pub struct DiscoverArgs {
    pub log: PathBuf,
    pub partition: PathBuf,
    pub out: PathBuf,
    pub debug_dump: Option<PathBuf>,
    pub state_budget: usize,
    pub clone_cap: usize,
    pub auto_refine: bool,
}

fn conformance_error(e: ConformanceError) -> CliError {
    match e {
        ConformanceError::EmptyLog => CliError::Input(e.to_string()),
        ConformanceError::BudgetExceeded => CliError::Budget(format!("{e}; raise --state-budget")),
        ConformanceError::NoFinalRun | ConformanceError::Internal(_) => CliError::Failed(e.to_string()),
    }
}

fn abstraction_error(e: AbstractionError) -> CliError {
    match e {
        AbstractionError::Partition(v) => CliError::Partition(format!("invalid partition: {v}")),
        AbstractionError::LoopIncompatible(l) => {
            CliError::Partition(format!("{l}\nrerun with --auto-refine to apply these splits"))
        }
        AbstractionError::Unassigned(_) => CliError::Partition(e.to_string()),
        AbstractionError::CloneCap { .. } => CliError::Budget(format!("{e}; raise --clone-cap")),
        AbstractionError::Discovery(_) => CliError::Failed(e.to_string()),
    }
}

/// Writes to standard output, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().write_all(text.as_bytes());
}

/// File-name-safe form of a sub-process name.
fn file_stem(k: usize, name: &str) -> String {
    let clean: String = name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
    format!("{k:02}_{clean}")
}

fn dump(dir: &Path, d: &HwfDiscovery, refinements: &serde_json::Value) -> CliResult {
    let text = serde_json::to_string_pretty(d).map_err(|e| CliError::Failed(e.to_string()))?;
    write(&dir.join("discovery.json"), &text)?;
    write(&dir.join("lifted.xes"), &to_xes_string(&d.lifted))?;
    write(&dir.join("high_clones.xes"), &to_xes_string(&d.high_clones))?;
    for (k, it) in d.iterations.iter().enumerate() {
        write(&dir.join(format!("iteration_{:02}_pieces.xes", k + 1)), &to_xes_string(&it.iterations))?;
        write(&dir.join(format!("iteration_{:02}_folded.xes", k + 1)), &to_xes_string(&it.folded))?;
    }
    let mut final_partition = Partition::new();
    for (name, group) in &d.partition {
        final_partition.insert(name.clone(), group.iter().cloned());
    }
    write(&dir.join("final_partition.json"), &final_partition.to_json())?;
    let refinements = serde_json::to_string_pretty(refinements).map_err(|e| CliError::Failed(e.to_string()))?;
    write(&dir.join("refinements.json"), &refinements)
}

pub fn discover(args: &DiscoverArgs) -> CliResult {
    let log = load_log(&args.log)?;
    let partition = load_partition(&args.partition)?;
    if log.is_empty() {
        return Err(CliError::Input(format!("{}: the log has no traces", args.log.display())));
    }
    validate_partition(&partition, &log).map_err(|v| CliError::Partition(format!("invalid partition: {v}")))?;
    let opts = Options { clone_cap: args.clone_cap, budget: args.state_budget };
    let (d, used, refinements) = if args.auto_refine {
        let r = discover_hwf_refining(&log, &partition, &InductiveMiner, &opts).map_err(abstraction_error)?;
        (r.discovery, r.partition, r.refinements)
    } else {
        let d = discover_hwf(&log, &partition, &InductiveMiner, &opts).map_err(abstraction_error)?;
        (d, partition, Vec::new())
    };
    let refinements_json = serde_json::to_value(&refinements).expect("refinements serialize");
    if let Some(dir) = &args.debug_dump {
        dump(dir, &d, &refinements_json)?;
    }

    let flat = flatten_hwf(&d.hwf);
    let fitness1 = alignment_fitness(&flat, &log, args.state_budget).map_err(conformance_error)?;
    let fitness2 =
        alignment_fitness(&d.high_before_loops, &d.high_clones, args.state_budget).map_err(conformance_error)?;
    let precision = etc_precision(&flat, &log, args.state_budget).map_err(conformance_error)?;

    let out = &args.out;
    write(&out.join("hwf.json"), &hwf_to_json(&d.hwf))?;
    write(&out.join("hwf.dot"), &hwf_to_dot(&d.hwf, "hwf"))?;
    write(&out.join("high.dot"), &wfnet_to_dot(d.hwf.high(), "high"))?;
    for (k, (name, net)) in d.hwf.subnets().iter().enumerate() {
        write(
            &out.join("subnets").join(format!("{}.dot", file_stem(k + 1, name.as_str()))),
            &wfnet_to_dot(net, name.as_str()),
        )?;
    }
    write(&out.join("flat.pnml"), &wfnet_to_pnml(&flat))?;
    write(&out.join("partition.json"), &used.to_json())?;
    let loops: Vec<_> =
        d.loops.iter().map(|l| json!({"name": l.name, "origin": l.origin, "placement": l.placement})).collect();
    let metrics = json!({
        "fitness_1": fitness1.fitness,
        "fitness_2": fitness2.fitness,
        "precision": precision.precision,
        "high_level_strategy": d.strategy,
        "loops": loops,
        "refinements": refinements_json,
    });
    write(&out.join("metrics.json"), &serde_json::to_string_pretty(&metrics).expect("metrics serialize"))?;

    println!(
        "discovered {} sub-processes from {} traces ({} distinct)",
        d.hwf.subnets().len(),
        log.total_len(),
        log.distinct_len()
    );
    for r in &refinements {
        println!("refined: {r}");
    }
    for l in &d.loops {
        let names: Vec<&str> = l.origin.iter().map(|a| a.as_str()).collect();
        println!("loop {} over {{{}}}", l.name, names.join(", "));
    }
    println!("Fitness 1  {:.4}", fitness1.fitness);
    println!("Fitness 2  {:.4}", fitness2.fitness);
    println!("Precision  {:.4}", precision.precision);
    println!("wrote {}", out.display());
    Ok(())
}

pub fn playout(net: &Path, n: usize, max_len: usize, seed: u64, out: &Path) -> CliResult {
    let w = load_model(net)?.flat();
    let log = sample(&w, n, max_len, seed).map_err(|e| match e {
        PlayoutError::RetriesExhausted { .. } => CliError::Budget(e.to_string()),
        PlayoutError::NoTraces => CliError::Input(e.to_string()),
    })?;
    write(out, &to_xes_string(&log))?;
    println!("wrote {} traces ({} distinct) to {}", log.total_len(), log.distinct_len(), out.display());
    Ok(())
}

pub fn conformance(net: &Path, log: &Path, budget: usize) -> CliResult {
    let w = load_model(net)?.flat();
    let log: EventLog = load_log(log)?;
    let report = conformance_report(&w, &log, budget).map_err(conformance_error)?;
    emit(&format!("{}\n", serde_json::to_string_pretty(&report).expect("report serializes")));
    Ok(())
}

pub fn flatten(hwf: &Path, out: &Path) -> CliResult {
    let h: HwfNet = load_hwf(hwf)?;
    let flat = flatten_hwf(&h);
    write(&out.join("flat.pnml"), &wfnet_to_pnml(&flat))?;
    write(&out.join("flat.json"), &wfnet_to_json(&flat))?;
    write(&out.join("flat.dot"), &wfnet_to_dot(&flat, "flat"))?;
    println!(
        "flat net: {} places, {} transitions; wrote {}",
        flat.net().place_count(),
        flat.net().transition_count(),
        out.display()
    );
    Ok(())
}

pub fn export(net: &Path, format: Format, out: Option<&Path>) -> CliResult {
    let model = load_model(net)?;
    let text = match (&model, format) {
        (Model::Flat(w), Format::Dot) => wfnet_to_dot(w, "net"),
        (Model::Flat(w), Format::Json) => wfnet_to_json(w),
        (Model::Hierarchical(h), Format::Dot) => hwf_to_dot(h, "hwf"),
        (Model::Hierarchical(h), Format::Json) => hwf_to_json(h),
        (m, Format::Pnml) => wfnet_to_pnml(&m.flat()),
    };
    match out {
        Some(path) => write(path, &text),
        None => {
            emit(&text);
            Ok(())
        }
    }
}

pub fn validate(log: Option<&Path>, partition: Option<&Path>, net: Option<&Path>, budget: usize) -> CliResult {
    if log.is_none() && net.is_none() {
        return Err(CliError::Input("nothing to validate: pass --log and --partition, or --net".into()));
    }
    if let (Some(log), Some(partition)) = (log, partition) {
        let l = load_log(log)?;
        let p = load_partition(partition)?;
        validate_partition(&p, &l).map_err(|v| CliError::Partition(format!("invalid partition: {v}")))?;
        println!("partition ok: {} sub-processes cover {} activities", p.len(), l.alphabet().len());
    }
    if let Some(net) = net {
        let w = load_model(net)?.flat();
        match check_soundness(&w, budget) {
            Soundness::Sound => println!("net is sound"),
            Soundness::Unsound { violations } => {
                let lines: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
                return Err(CliError::Failed(format!("net is not sound:\n{}", lines.join("\n"))));
            }
            Soundness::Inconclusive { explored } => {
                return Err(CliError::Budget(format!(
                    "soundness undecided after {explored} markings; raise --state-budget"
                )))
            }
        }
    }
    Ok(())
}
