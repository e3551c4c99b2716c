//! Reading and writing the XES subset used by the toolkit.
//!
//! Only `concept:name` (required) and `time:timestamp` (optional) event
//! attributes are read; everything else is skipped. Events of a trace are
//! ordered by timestamp when every event has one, by document order
//! otherwise. The sort is stable, so equal timestamps keep document order.

use std::io::Write;

use chrono::{DateTime, FixedOffset, NaiveDateTime};
use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use thiserror::Error;

use super::{Activity, EventLog, Trace};

const CONCEPT_NAME: &[u8] = b"concept:name";
const TIMESTAMP: &[u8] = b"time:timestamp";

#[derive(Debug, Error)]
pub enum XesError {
    #[error("malformed XML at line {line}, column {column}: {message}")]
    Xml { line: usize, column: usize, message: String },
    #[error("event {event} of trace {trace} has no concept:name")]
    MissingName { trace: String, event: usize },
    #[error("event {event} of trace {trace}: bad timestamp {value:?}")]
    BadTimestamp { trace: String, event: usize, value: String },
    #[error("input is not UTF-8")]
    Encoding,
}

#[derive(Default)]
struct EventBuf {
    name: Option<String>,
    timestamp: Option<DateTime<FixedOffset>>,
}

#[derive(Default)]
struct TraceBuf {
    name: Option<String>,
    events: Vec<EventBuf>,
}

impl TraceBuf {
    fn label(&self, index: usize) -> String {
        match &self.name {
            Some(n) => format!("{n:?}"),
            None => format!("#{index}"),
        }
    }
}

fn line_col(input: &[u8], offset: usize) -> (usize, usize) {
    let offset = offset.min(input.len());
    let before = &input[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let col = match before.iter().rposition(|&b| b == b'\n') {
        Some(nl) => offset - nl,
        None => offset + 1,
    };
    (line, col)
}

fn parse_timestamp(value: &str) -> Option<DateTime<FixedOffset>> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(value) {
        return Some(dt);
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(value, fmt) {
            return Some(naive.and_utc().fixed_offset());
        }
    }
    None
}

/// Reads `key` and `value` attributes of an XES attribute element.
fn key_value(e: &BytesStart<'_>, reader: &Reader<&[u8]>, input: &[u8]) -> Result<(Vec<u8>, Option<String>), XesError> {
    let mut key = Vec::new();
    let mut value = None;
    for attr in e.attributes() {
        let attr = attr.map_err(|err| {
            let (line, column) = line_col(input, reader.buffer_position() as usize);
            XesError::Xml { line, column, message: err.to_string() }
        })?;
        match attr.key.as_ref() {
            b"key" => key = attr.value.to_vec(),
            b"value" => {
                let v = attr.unescape_value().map_err(|err| {
                    let (line, column) = line_col(input, reader.buffer_position() as usize);
                    XesError::Xml { line, column, message: err.to_string() }
                })?;
                value = Some(v.into_owned());
            }
            _ => {}
        }
    }
    Ok((key, value))
}

/// Parses an XES document into an [`EventLog`].
pub fn parse_xes(input: &[u8]) -> Result<EventLog, XesError> {
    let text = std::str::from_utf8(input).map_err(|_| XesError::Encoding)?;
    let mut reader = Reader::from_str(text);
    reader.config_mut().check_end_names = true;

    let mut log = EventLog::new();
    let mut trace: Option<TraceBuf> = None;
    let mut event: Option<EventBuf> = None;
    let mut trace_index = 0usize;
    // Element depth relative to the innermost open trace or event; attributes
    // are only read when they are direct children.
    let mut depth_below: usize = 0;

    loop {
        let ev = reader.read_event().map_err(|err| {
            let (line, column) = line_col(input, reader.error_position() as usize);
            XesError::Xml { line, column, message: err.to_string() }
        })?;
        match ev {
            Event::Start(e) => {
                match e.name().as_ref() {
                    b"trace" if trace.is_none() => {
                        trace_index += 1;
                        trace = Some(TraceBuf::default());
                        depth_below = 0;
                        continue;
                    }
                    b"event" if trace.is_some() && event.is_none() && depth_below == 0 => {
                        event = Some(EventBuf::default());
                        continue;
                    }
                    _ => {}
                }
                if depth_below == 0 {
                    read_attribute(&e, &reader, input, &mut trace, &mut event, trace_index)?;
                }
                if trace.is_some() {
                    depth_below += 1;
                }
            }
            Event::Empty(e) => {
                match e.name().as_ref() {
                    b"trace" if trace.is_none() => {
                        trace_index += 1;
                        log.push(Trace::empty());
                        continue;
                    }
                    b"event" if trace.is_some() && event.is_none() && depth_below == 0 => {
                        let t = trace.as_ref().unwrap();
                        return Err(XesError::MissingName { trace: t.label(trace_index), event: t.events.len() + 1 });
                    }
                    _ => {}
                }
                if depth_below == 0 {
                    read_attribute(&e, &reader, input, &mut trace, &mut event, trace_index)?;
                }
            }
            Event::End(e) => {
                if depth_below > 0 {
                    depth_below -= 1;
                    continue;
                }
                match e.name().as_ref() {
                    b"event" if event.is_some() => {
                        let ev = event.take().unwrap();
                        let t = trace.as_mut().unwrap();
                        if ev.name.is_none() {
                            return Err(XesError::MissingName {
                                trace: t.label(trace_index),
                                event: t.events.len() + 1,
                            });
                        }
                        t.events.push(ev);
                    }
                    b"trace" if trace.is_some() => {
                        let mut t = trace.take().unwrap();
                        if t.events.iter().all(|e| e.timestamp.is_some()) {
                            t.events.sort_by_key(|e| e.timestamp.unwrap());
                        }
                        log.push(t.events.into_iter().map(|e| Activity::from(e.name.unwrap())).collect());
                    }
                    _ => {}
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if trace.is_some() {
        let (line, column) = line_col(input, input.len());
        return Err(XesError::Xml { line, column, message: "unclosed <trace>".into() });
    }
    Ok(log)
}

fn read_attribute(
    e: &BytesStart<'_>,
    reader: &Reader<&[u8]>,
    input: &[u8],
    trace: &mut Option<TraceBuf>,
    event: &mut Option<EventBuf>,
    trace_index: usize,
) -> Result<(), XesError> {
    let tag = e.name();
    let tag = tag.as_ref();
    if tag != b"string" && tag != b"date" {
        return Ok(());
    }
    let (key, value) = key_value(e, reader, input)?;
    match (event.as_mut(), trace.as_mut()) {
        (Some(ev), Some(t)) => {
            if tag == b"string" && key == CONCEPT_NAME {
                ev.name = value;
            } else if tag == b"date" && key == TIMESTAMP {
                let raw = value.unwrap_or_default();
                match parse_timestamp(&raw) {
                    Some(ts) => ev.timestamp = Some(ts),
                    None => {
                        return Err(XesError::BadTimestamp {
                            trace: t.label(trace_index),
                            event: t.events.len() + 1,
                            value: raw,
                        })
                    }
                }
            }
        }
        (None, Some(t)) if tag == b"string" && key == CONCEPT_NAME => {
            t.name = value;
        }
        _ => {}
    }
    Ok(())
}

/// Writes `log` as XES. Each trace is emitted once per multiplicity, in
/// trace order, with case names `case_1`, `case_2`, ...
pub fn write_xes<W: Write>(log: &EventLog, mut out: W) -> std::io::Result<()> {
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(out, r#"<log xes.version="1.0" xes.features="nested-attributes" xmlns="http://www.xes-standard.org/">"#)?;
    writeln!(
        out,
        r#"  <extension name="Concept" prefix="concept" uri="http://www.xes-standard.org/concept.xesext"/>"#
    )?;
    let mut case = 0u64;
    for (trace, n) in log.iter() {
        for _ in 0..n {
            case += 1;
            writeln!(out, "  <trace>")?;
            writeln!(out, r#"    <string key="concept:name" value="case_{case}"/>"#)?;
            for a in trace.iter() {
                writeln!(out, "    <event>")?;
                writeln!(out, r#"      <string key="concept:name" value="{}"/>"#, escape(a.as_str()))?;
                writeln!(out, "    </event>")?;
            }
            writeln!(out, "  </trace>")?;
        }
    }
    writeln!(out, "</log>")
}

/// [`write_xes`] into a string.
pub fn to_xes_string(log: &EventLog) -> String {
    let mut buf = Vec::new();
    write_xes(log, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("XES output is UTF-8")
}
