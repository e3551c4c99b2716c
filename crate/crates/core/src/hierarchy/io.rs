use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::log::Activity;
use crate::petri::dot::{quote, write_body};
use crate::petri::json::{NetDocument, NetFormatError};

use super::HwfNet;

/// `{"high": <net>, "subnets": {"<name>": <net>, ...}}`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HwfDocument {
    pub high: NetDocument,
    pub subnets: BTreeMap<String, NetDocument>,
}

pub fn hwf_to_json(h: &HwfNet) -> String {
    let doc = HwfDocument {
        high: NetDocument::from_wfnet(h.high()),
        subnets: h.subnets().iter().map(|(k, v)| (k.to_string(), NetDocument::from_wfnet(v))).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("net serializes")
}

pub fn hwf_from_json(text: &str) -> Result<HwfNet, NetFormatError> {
    let doc: HwfDocument = serde_json::from_str(text)?;
    let high = doc.high.to_wfnet()?;
    let mut subnets = BTreeMap::new();
    for (name, net) in &doc.subnets {
        subnets.insert(Activity::new(name), net.to_wfnet()?);
    }
    HwfNet::new(high, subnets).map_err(|e| NetFormatError::Invalid(e.to_string()))
}

/// One cluster for the high-level net, whose refined transitions get a
/// double contour, and one cluster per subnet.
pub fn hwf_to_dot(h: &HwfNet, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(name));
    out.push_str("  rankdir=LR;\n  compound=true;\n  node [fontname=\"Helvetica\"];\n");
    out.push_str("  subgraph \"cluster_high\" {\n    label=\"high level\";\n");
    let refined = |a: &str| h.subnets().contains_key(a);
    write_body(&mut out, h.high().net(), Some(&h.high().initial_marking()), "high:", "    ", &refined);
    out.push_str("  }\n");
    for (k, (label, net)) in h.subnets().iter().enumerate() {
        let _ = writeln!(out, "  subgraph \"cluster_{k}\" {{\n    label={};", quote(label.as_str()));
        write_body(&mut out, net.net(), Some(&net.initial_marking()), &format!("{label}:"), "    ", &|_| false);
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::petri::build;

    fn sample() -> HwfNet {
        HwfNet::new(
            build::parallel(&["x", "y"]),
            [(Activity::new("x"), build::seq(&["a"])), (Activity::new("y"), build::seq(&["b", "c"]))].into(),
        )
        .unwrap()
    }

    #[test]
    fn json_round_trip() {
        let h = sample();
        assert_eq!(hwf_from_json(&hwf_to_json(&h)).unwrap(), h);
    }

    #[test]
    fn dangling_label_rejected() {
        let mut doc: serde_json::Value = serde_json::from_str(&hwf_to_json(&sample())).unwrap();
        doc["subnets"].as_object_mut().unwrap().remove("y");
        assert!(matches!(hwf_from_json(&doc.to_string()), Err(NetFormatError::Invalid(_))));
    }

    #[test]
    fn dot_clusters_and_double_contours() {
        let dot = hwf_to_dot(&sample(), "h");
        assert_eq!(dot.matches("peripheries=2").count(), 2);
        assert!(dot.contains("cluster_high"));
        assert!(dot.contains("cluster_1"));
    }
}
