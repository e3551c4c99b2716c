//! JSON mirror of labeled Petri nets and workflow nets.
//!
//! ```json
//! {"places": [{"id": "i", "tokens": 1}, {"id": "f"}],
//!  "transitions": [{"id": "t0", "label": "a"}, {"id": "t1", "label": null}],
//!  "arcs": [{"source": "i", "target": "t0", "weight": 1}, ...],
//!  "source": "i", "sink": "f"}
//! ```

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::log::Activity;

use super::{Marking, PetriNet, PlaceId, TransitionId, WfNet, WfNetError};

#[derive(Debug, Error)]
pub enum NetFormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed XML at line {line}, column {column}: {message}")]
    Xml { line: usize, column: usize, message: String },
    #[error("duplicate node id {0:?}")]
    DuplicateId(String),
    #[error("arc refers to unknown node {0:?}")]
    UnknownNode(String),
    #[error("arc {from:?} -> {to:?} must connect a place and a transition")]
    BadArc { from: String, to: String },
    #[error("arc {from:?} -> {to:?} has weight 0")]
    ZeroWeight { from: String, to: String },
    #[error("{0}")]
    Invalid(String),
    #[error("not a workflow net: {0}")]
    NotWorkflow(#[from] WfNetError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub tokens: u32,
}

fn is_zero(n: &u32) -> bool {
    *n == 0
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub id: String,
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcDoc {
    pub source: String,
    pub target: String,
    #[serde(default = "one")]
    pub weight: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetDocument {
    pub places: Vec<PlaceDoc>,
    pub transitions: Vec<TransitionDoc>,
    pub arcs: Vec<ArcDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sink: Option<String>,
}

impl NetDocument {
    pub fn from_net(net: &PetriNet, marking: Option<&Marking>) -> Self {
        let places = net
            .places()
            .map(|(p, place)| PlaceDoc { id: place.name.clone(), tokens: marking.map_or(0, |m| m.tokens(p)) })
            .collect();
        let transitions = net
            .transitions()
            .map(|(_, t)| TransitionDoc { id: t.name.clone(), label: t.label.as_ref().map(|a| a.to_string()) })
            .collect();
        let mut arcs = Vec::new();
        for (_, t) in net.transitions() {
            for (p, w) in &t.input {
                arcs.push(ArcDoc { source: net.place(*p).name.clone(), target: t.name.clone(), weight: *w });
            }
            for (p, w) in &t.output {
                arcs.push(ArcDoc { source: t.name.clone(), target: net.place(*p).name.clone(), weight: *w });
            }
        }
        NetDocument { places, transitions, arcs, source: None, sink: None }
    }

    pub fn from_wfnet(w: &WfNet) -> Self {
        let mut doc = NetDocument::from_net(w.net(), Some(&w.initial_marking()));
        doc.source = Some(w.net().place(w.source()).name.clone());
        doc.sink = Some(w.net().place(w.sink()).name.clone());
        doc
    }

    /// The net and its initial marking.
    pub fn to_net(&self) -> Result<(PetriNet, Marking), NetFormatError> {
        let mut net = PetriNet::new();
        let mut places: HashMap<&str, PlaceId> = HashMap::new();
        let mut transitions: HashMap<&str, TransitionId> = HashMap::new();
        for p in &self.places {
            if places.contains_key(p.id.as_str()) {
                return Err(NetFormatError::DuplicateId(p.id.clone()));
            }
            places.insert(&p.id, net.add_place(&p.id));
        }
        for t in &self.transitions {
            if places.contains_key(t.id.as_str()) || transitions.contains_key(t.id.as_str()) {
                return Err(NetFormatError::DuplicateId(t.id.clone()));
            }
            let label = t.label.as_deref().map(Activity::new);
            transitions.insert(&t.id, net.add_transition(&t.id, label));
        }
        for a in &self.arcs {
            if a.weight == 0 {
                return Err(NetFormatError::ZeroWeight { from: a.source.clone(), to: a.target.clone() });
            }
            let bad = || NetFormatError::BadArc { from: a.source.clone(), to: a.target.clone() };
            match (
                places.get(a.source.as_str()),
                transitions.get(a.target.as_str()),
                transitions.get(a.source.as_str()),
                places.get(a.target.as_str()),
            ) {
                (Some(&p), Some(&t), _, _) => net.add_input_arc(p, t, a.weight),
                (_, _, Some(&t), Some(&p)) => net.add_output_arc(t, p, a.weight),
                _ => {
                    for end in [&a.source, &a.target] {
                        if !places.contains_key(end.as_str()) && !transitions.contains_key(end.as_str()) {
                            return Err(NetFormatError::UnknownNode(end.clone()));
                        }
                    }
                    return Err(bad());
                }
            }
        }
        let mut m = net.empty_marking();
        for (k, p) in self.places.iter().enumerate() {
            m.set(PlaceId(k), p.tokens);
        }
        Ok((net, m))
    }

    /// A workflow net; source and sink come from the document or, when
    /// absent, from the unique unconnected-in / unconnected-out places.
    pub fn to_wfnet(&self) -> Result<WfNet, NetFormatError> {
        let (net, _) = self.to_net()?;
        let lookup = |name: &Option<String>| -> Result<Option<PlaceId>, NetFormatError> {
            match name {
                None => Ok(None),
                Some(n) => net.place_by_name(n).map(Some).ok_or_else(|| NetFormatError::UnknownNode(n.clone())),
            }
        };
        match (lookup(&self.source)?, lookup(&self.sink)?) {
            (Some(i), Some(f)) => Ok(WfNet::new(net, i, f)?),
            _ => Ok(WfNet::from_net(net)?),
        }
    }
}

pub fn wfnet_to_json(w: &WfNet) -> String {
    serde_json::to_string_pretty(&NetDocument::from_wfnet(w)).expect("net serializes")
}

pub fn wfnet_from_json(text: &str) -> Result<WfNet, NetFormatError> {
    let doc: NetDocument = serde_json::from_str(text)?;
    doc.to_wfnet()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::petri::build;

    #[test]
    fn round_trip() {
        let w = build::compensation_request();
        let back = wfnet_from_json(&wfnet_to_json(&w)).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn weights_and_silent_labels_survive() {
        let text = r#"{"places": [{"id": "i", "tokens": 1}, {"id": "f"}],
            "transitions": [{"id": "t", "label": null}],
            "arcs": [{"source": "i", "target": "t"}, {"source": "t", "target": "f", "weight": 1}]}"#;
        let w = wfnet_from_json(text).unwrap();
        assert!(w.net().transition(TransitionId(0)).is_silent());
        assert_eq!(w.net().place(w.source()).name, "i");
    }

    #[test]
    fn errors() {
        let dup = r#"{"places": [{"id": "x"}, {"id": "x"}], "transitions": [], "arcs": []}"#;
        assert!(matches!(wfnet_from_json(dup), Err(NetFormatError::DuplicateId(_))));
        let unknown = r#"{"places": [{"id": "i"}], "transitions": [], "arcs": [{"source": "i", "target": "zz"}]}"#;
        assert!(matches!(wfnet_from_json(unknown), Err(NetFormatError::UnknownNode(_))));
        let pp =
            r#"{"places": [{"id": "i"}, {"id": "f"}], "transitions": [], "arcs": [{"source": "i", "target": "f"}]}"#;
        assert!(matches!(wfnet_from_json(pp), Err(NetFormatError::BadArc { .. })));
    }
}
