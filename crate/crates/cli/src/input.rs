use std::fmt;
use std::fs;
use std::path::Path;

use hwf_core::hierarchy::{flatten, hwf_from_json, HwfNet};
use hwf_core::log::xes::parse_xes;
use hwf_core::log::EventLog;
use hwf_core::partition::Partition;
use hwf_core::petri::json::wfnet_from_json;
use hwf_core::petri::pnml::wfnet_from_pnml;
use hwf_core::petri::WfNet;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Partition(String),
    Budget(String),
    Failed(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Input(_) => 2,
            CliError::Partition(_) => 3,
            CliError::Budget(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Partition(m) | CliError::Budget(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, contents: &str) -> CliResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Failed(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
}

pub fn load_log(path: &Path) -> CliResult<EventLog> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_xes(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load_partition(path: &Path) -> CliResult<Partition> {
    Partition::from_json(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load_hwf(path: &Path) -> CliResult<HwfNet> {
    hwf_from_json(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// A model file: PNML, WF-net JSON, or HWF JSON.
pub enum Model {
    Flat(WfNet),
    Hierarchical(HwfNet),
}

impl Model {
    pub fn flat(&self) -> WfNet {
        match self {
            Model::Flat(w) => w.clone(),
            Model::Hierarchical(h) => flatten(h),
        }
    }
}

pub fn load_model(path: &Path) -> CliResult<Model> {
    let text = read(path)?;
    let err = |e: &dyn fmt::Display| CliError::Input(format!("{}: {e}", path.display()));
    if path.extension().is_some_and(|x| x.eq_ignore_ascii_case("pnml")) || text.trim_start().starts_with('<') {
        return wfnet_from_pnml(&text).map(Model::Flat).map_err(|e| err(&e));
    }
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| err(&e))?;
    if value.get("high").is_some() {
        hwf_from_json(&text).map(Model::Hierarchical).map_err(|e| err(&e))
    } else {
        wfnet_from_json(&text).map(Model::Flat).map_err(|e| err(&e))
    }
}
