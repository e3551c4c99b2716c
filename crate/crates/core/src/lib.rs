//! Discovery of hierarchical workflow nets from event logs.

pub mod abstraction;
pub mod conformance;
pub mod discovery;
pub mod fixtures;
pub mod hierarchy;
pub mod log;
pub mod partition;
pub mod petri;
