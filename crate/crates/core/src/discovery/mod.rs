//! Flat process discovery.

mod dfg;
mod inductive;
mod tree;

use thiserror::Error;

use crate::log::EventLog;
use crate::petri::WfNet;

pub use dfg::{build_dfg, Dfg};
pub use inductive::{flower, inductive_discover};
pub use tree::{tree_to_wfnet, ProcessTree, TreeParseError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiscoveryError {
    #[error("cannot discover a model from an empty log")]
    EmptyLog,
    #[error("{0}")]
    Failed(String),
}

/// A flat discovery algorithm. Implementations must return a net that every
/// trace of the input log perfectly fits.
pub trait Discoverer {
    fn discover(&self, log: &EventLog) -> Result<WfNet, DiscoveryError>;
}

/// The bundled discoverer: [`inductive_discover`] followed by
/// [`tree_to_wfnet`].
#[derive(Clone, Copy, Debug, Default)]
pub struct InductiveMiner;

impl Discoverer for InductiveMiner {
    fn discover(&self, log: &EventLog) -> Result<WfNet, DiscoveryError> {
        discover_flat(log)
    }
}

pub fn discover_flat(log: &EventLog) -> Result<WfNet, DiscoveryError> {
    if log.is_empty() {
        return Err(DiscoveryError::EmptyLog);
    }
    Ok(tree_to_wfnet(&inductive_discover(log)))
}
