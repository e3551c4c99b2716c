//! Minimal PNML (place/transition nets).
//!
//! Written: places with optional initial marking, transitions whose `<name>`
//! is the label, silent transitions flagged with ProM's
//! `<toolspecific ... activity="$invisible$"/>`, arcs with an optional
//! `<inscription>` weight, and a `<finalmarkings>` block naming the sink.
//! Node ids are the node names.

use std::collections::HashMap;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::json::{ArcDoc, NetDocument, NetFormatError, PlaceDoc, TransitionDoc};
use super::WfNet;

const INVISIBLE: &str = "$invisible$";

pub fn wfnet_to_pnml(w: &WfNet) -> String {
    let net = w.net();
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<pnml>\n");
    s.push_str("  <net id=\"net1\" type=\"http://www.pnml.org/version-2009/grammar/pnmlcoremodel\">\n");
    s.push_str("    <page id=\"page1\">\n");
    for (p, place) in net.places() {
        let id = escape(place.name.as_str());
        s.push_str(&format!("      <place id=\"{id}\">\n        <name><text>{id}</text></name>\n"));
        if p == w.source() {
            s.push_str("        <initialMarking><text>1</text></initialMarking>\n");
        }
        s.push_str("      </place>\n");
    }
    for (_, t) in net.transitions() {
        let id = escape(t.name.as_str());
        s.push_str(&format!("      <transition id=\"{id}\">\n"));
        match &t.label {
            Some(a) => s.push_str(&format!("        <name><text>{}</text></name>\n", escape(a.as_str()))),
            None => {
                s.push_str(&format!("        <name><text>{id}</text></name>\n"));
                s.push_str(&format!(
                    "        <toolspecific tool=\"ProM\" version=\"6.4\" activity=\"{INVISIBLE}\" localNodeID=\"{id}\"/>\n"
                ));
            }
        }
        s.push_str("      </transition>\n");
    }
    let mut k = 0;
    for (_, t) in net.transitions() {
        let arcs = t
            .input
            .iter()
            .map(|(p, wt)| (net.place(*p).name.as_str(), t.name.as_str(), *wt))
            .chain(t.output.iter().map(|(p, wt)| (t.name.as_str(), net.place(*p).name.as_str(), *wt)));
        for (src, dst, wt) in arcs {
            s.push_str(&format!("      <arc id=\"arc{k}\" source=\"{}\" target=\"{}\"", escape(src), escape(dst)));
            if wt == 1 {
                s.push_str("/>\n");
            } else {
                s.push_str(&format!(">\n        <inscription><text>{wt}</text></inscription>\n      </arc>\n"));
            }
            k += 1;
        }
    }
    s.push_str("    </page>\n    <finalmarkings>\n      <marking>\n");
    s.push_str(&format!(
        "        <place idref=\"{}\"><text>1</text></place>\n",
        escape(net.place(w.sink()).name.as_str())
    ));
    s.push_str("      </marking>\n    </finalmarkings>\n  </net>\n</pnml>\n");
    s
}

#[derive(PartialEq)]
enum Scope {
    None,
    Place,
    Transition,
    Arc,
    FinalPlace,
}

#[derive(PartialEq)]
enum TextTarget {
    None,
    Name,
    Marking,
    Inscription,
}

fn line_col(input: &str, offset: usize) -> (usize, usize) {
    let before = &input.as_bytes()[..offset.min(input.len())];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let col = before.iter().rposition(|&b| b == b'\n').map_or(before.len() + 1, |nl| before.len() - nl);
    (line, col)
}

fn attr(e: &BytesStart<'_>, key: &[u8]) -> Result<Option<String>, String> {
    for a in e.attributes() {
        let a = a.map_err(|err| err.to_string())?;
        if a.key.as_ref() == key {
            return a.unescape_value().map(|v| Some(v.into_owned())).map_err(|err| err.to_string());
        }
    }
    Ok(None)
}

/// Parses the PNML subset written by [`wfnet_to_pnml`] (and by most tools
/// that export place/transition nets).
pub fn wfnet_from_pnml(input: &str) -> Result<WfNet, NetFormatError> {
    let mut reader = Reader::from_str(input);
    reader.config_mut().check_end_names = true;
    let xml_err = |pos: u64, message: String| {
        let (line, column) = line_col(input, pos as usize);
        NetFormatError::Xml { line, column, message }
    };

    let mut doc = NetDocument { places: vec![], transitions: vec![], arcs: vec![], source: None, sink: None };
    let mut final_tokens: HashMap<String, u32> = HashMap::new();
    let mut scope = Scope::None;
    let mut text_target = TextTarget::None;
    let mut in_final = false;
    let mut final_ref = String::new();
    let mut silent = false;
    let mut label: Option<String> = None;

    loop {
        let ev = reader.read_event().map_err(|e| xml_err(reader.error_position(), e.to_string()))?;
        let pos = reader.buffer_position();
        match ev {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_empty = matches!(ev, Event::Empty(_));
                let get = |k: &[u8]| attr(e, k).map_err(|m| xml_err(pos, m));
                match e.name().as_ref() {
                    b"finalmarkings" => in_final = !is_empty,
                    b"place" if in_final => {
                        final_ref = get(b"idref")?.unwrap_or_default();
                        scope = Scope::FinalPlace;
                        text_target = TextTarget::Marking;
                    }
                    b"place" => {
                        let id = get(b"id")?.ok_or_else(|| xml_err(pos, "place without id".into()))?;
                        doc.places.push(PlaceDoc { id, tokens: 0 });
                        scope = if is_empty { Scope::None } else { Scope::Place };
                    }
                    b"transition" => {
                        let id = get(b"id")?.ok_or_else(|| xml_err(pos, "transition without id".into()))?;
                        doc.transitions.push(TransitionDoc { id, label: None });
                        silent = false;
                        label = None;
                        scope = Scope::Transition;
                        if is_empty {
                            doc.transitions.last_mut().unwrap().label = None;
                            scope = Scope::None;
                        }
                    }
                    b"arc" => {
                        let source = get(b"source")?.ok_or_else(|| xml_err(pos, "arc without source".into()))?;
                        let target = get(b"target")?.ok_or_else(|| xml_err(pos, "arc without target".into()))?;
                        doc.arcs.push(ArcDoc { source, target, weight: 1 });
                        scope = if is_empty { Scope::None } else { Scope::Arc };
                    }
                    b"name" if scope != Scope::None => text_target = TextTarget::Name,
                    b"initialMarking" if scope == Scope::Place => text_target = TextTarget::Marking,
                    b"inscription" if scope == Scope::Arc => text_target = TextTarget::Inscription,
                    b"toolspecific"
                        if scope == Scope::Transition && get(b"activity")?.as_deref() == Some(INVISIBLE) =>
                    {
                        silent = true;
                    }
                    _ => {}
                }
            }
            Event::Text(t) => {
                let value = t.unescape().map_err(|e| xml_err(pos, e.to_string()))?;
                let value = value.trim();
                if value.is_empty() {
                    continue;
                }
                let number = || {
                    value
                        .parse::<u32>()
                        .map_err(|_| xml_err(pos, format!("expected a non-negative integer, found {value:?}")))
                };
                match (&scope, &text_target) {
                    (Scope::Transition, TextTarget::Name) => label = Some(value.to_string()),
                    (Scope::Place, TextTarget::Marking) => doc.places.last_mut().unwrap().tokens = number()?,
                    (Scope::Arc, TextTarget::Inscription) => doc.arcs.last_mut().unwrap().weight = number()?,
                    (Scope::FinalPlace, TextTarget::Marking) => {
                        final_tokens.insert(final_ref.clone(), number()?);
                    }
                    _ => {}
                }
            }
            Event::End(e) => match e.name().as_ref() {
                b"name" | b"initialMarking" | b"inscription" => text_target = TextTarget::None,
                b"transition" => {
                    let t = doc.transitions.last_mut().unwrap();
                    t.label = if silent { None } else { label.take().or_else(|| Some(t.id.clone())) };
                    scope = Scope::None;
                }
                b"place" | b"arc" => {
                    scope = Scope::None;
                    text_target = TextTarget::None;
                }
                b"finalmarkings" => in_final = false,
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }

    let marked: Vec<&PlaceDoc> = doc.places.iter().filter(|p| p.tokens > 0).collect();
    match marked.as_slice() {
        [] => {}
        [p] if p.tokens == 1 => doc.source = Some(p.id.clone()),
        _ => return Err(NetFormatError::Invalid("initial marking must be a single token on the source".into())),
    }
    let finals: Vec<(&String, &u32)> = final_tokens.iter().filter(|(_, n)| **n > 0).collect();
    match finals.as_slice() {
        [] => {}
        [(p, 1)] => doc.sink = Some((*p).clone()),
        _ => return Err(NetFormatError::Invalid("final marking must be a single token on the sink".into())),
    }
    doc.to_wfnet()
}
