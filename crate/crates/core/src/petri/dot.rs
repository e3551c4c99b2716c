//! Graphviz export: places as circles, transitions as boxes, silent
//! transitions as small filled boxes.

use std::fmt::Write;

use super::{Marking, PetriNet, WfNet};

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Node statements and arcs of `net`, ids prefixed with `prefix`. Transitions
/// for which `emphasize` returns true get a double contour.
pub(crate) fn write_body(
    out: &mut String,
    net: &PetriNet,
    marking: Option<&Marking>,
    prefix: &str,
    indent: &str,
    emphasize: &dyn Fn(&str) -> bool,
) {
    for (p, place) in net.places() {
        let tokens = marking.map_or(0, |m| m.tokens(p));
        let label = match tokens {
            0 => String::new(),
            1 => "●".to_string(),
            n => n.to_string(),
        };
        let _ = writeln!(
            out,
            "{indent}{} [shape=circle, width=0.35, fixedsize=true, label={}, xlabel={}];",
            quote(&format!("{prefix}p:{}", place.name)),
            quote(&label),
            quote(&place.name)
        );
    }
    for (_, t) in net.transitions() {
        let id = quote(&format!("{prefix}t:{}", t.name));
        match &t.label {
            Some(a) => {
                let extra = if emphasize(a.as_str()) { ", peripheries=2" } else { "" };
                let _ = writeln!(out, "{indent}{id} [shape=box, label={}{extra}];", quote(a.as_str()));
            }
            None => {
                let _ = writeln!(
                    out,
                    "{indent}{id} [shape=box, style=filled, fillcolor=black, label=\"\", width=0.15, height=0.4];"
                );
            }
        }
    }
    for (_, t) in net.transitions() {
        let tid = quote(&format!("{prefix}t:{}", t.name));
        for (p, w) in &t.input {
            let pid = quote(&format!("{prefix}p:{}", net.place(*p).name));
            let _ = writeln!(out, "{indent}{pid} -> {tid}{};", weight_attr(*w));
        }
        for (p, w) in &t.output {
            let pid = quote(&format!("{prefix}p:{}", net.place(*p).name));
            let _ = writeln!(out, "{indent}{tid} -> {pid}{};", weight_attr(*w));
        }
    }
}

fn weight_attr(w: u32) -> String {
    if w == 1 {
        String::new()
    } else {
        format!(" [label=\"{w}\"]")
    }
}

pub fn net_to_dot(net: &PetriNet, marking: Option<&Marking>, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(name));
    out.push_str("  rankdir=LR;\n  node [fontname=\"Helvetica\"];\n");
    write_body(&mut out, net, marking, "", "  ", &|_| false);
    out.push_str("}\n");
    out
}

/// DOT for a workflow net, drawn in its initial marking.
pub fn wfnet_to_dot(w: &WfNet, name: &str) -> String {
    net_to_dot(w.net(), Some(&w.initial_marking()), name)
}
