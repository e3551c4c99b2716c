//! Event logs: activities, traces and multisets of traces.
//!
//! Everything in this module is an immutable value once built. A log only
//! keeps the activity sequence of each case; case identifiers, resources and
//! other payload are dropped on ingestion.

pub mod xes;

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// An activity (event name). Cheap to clone; compared byte-exactly.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Activity(Arc<str>);

impl Activity {
    pub fn new(name: impl AsRef<str>) -> Self {
        Activity(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Activity {
    fn from(s: &str) -> Self {
        Activity::new(s)
    }
}

impl From<String> for Activity {
    fn from(s: String) -> Self {
        Activity(Arc::from(s))
    }
}

impl Borrow<str> for Activity {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Activity {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Set of activities, ordered for deterministic iteration.
pub type ActivitySet = BTreeSet<Activity>;

/// Builds an [`ActivitySet`] from string slices.
pub fn activity_set<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> ActivitySet {
    names.into_iter().map(|s| Activity::new(s)).collect()
}

/// A finite sequence of activities. May be empty.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Trace(Vec<Activity>);

impl Trace {
    pub fn new(events: Vec<Activity>) -> Self {
        Trace(events)
    }

    pub fn empty() -> Self {
        Trace(Vec::new())
    }

    /// `Trace::from_names(["a", "b"])` is `⟨a, b⟩`.
    pub fn from_names<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Self {
        Trace(names.into_iter().map(|s| Activity::new(s)).collect())
    }

    pub fn events(&self) -> &[Activity] {
        &self.0
    }

    pub fn into_events(self) -> Vec<Activity> {
        self.0
    }

    pub fn push(&mut self, a: Activity) {
        self.0.push(a);
    }

    /// Number of occurrences of `a`.
    pub fn count(&self, a: &Activity) -> usize {
        self.0.iter().filter(|e| *e == a).count()
    }

    pub fn alphabet(&self) -> ActivitySet {
        self.0.iter().cloned().collect()
    }

    /// True when some activity occurs more than once.
    pub fn has_repetition(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.0.iter().any(|a| !seen.insert(a))
    }
}

impl Deref for Trace {
    type Target = [Activity];

    fn deref(&self) -> &[Activity] {
        &self.0
    }
}

impl From<Vec<Activity>> for Trace {
    fn from(v: Vec<Activity>) -> Self {
        Trace(v)
    }
}

impl FromIterator<Activity> for Trace {
    fn from_iter<I: IntoIterator<Item = Activity>>(iter: I) -> Self {
        Trace(iter.into_iter().collect())
    }
}

impl fmt::Debug for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟨")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(a.as_str())?;
        }
        f.write_str("⟩")
    }
}

/// A finite multiset of traces.
///
/// Traces are keyed by their full activity sequence, so two cases with the
/// same behaviour share one entry with multiplicity two.
#[derive(Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventLog {
    #[serde(with = "trace_map")]
    traces: BTreeMap<Trace, u64>,
}

mod trace_map {
    use super::Trace;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    #[derive(Serialize, Deserialize)]
    struct Entry {
        trace: Trace,
        multiplicity: u64,
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<Trace, u64>, s: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = m.iter().map(|(t, n)| Entry { trace: t.clone(), multiplicity: *n }).collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Trace, u64>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        let mut m = BTreeMap::new();
        for e in entries.into_iter().filter(|e| e.multiplicity > 0) {
            *m.entry(e.trace).or_insert(0) += e.multiplicity;
        }
        Ok(m)
    }
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `multiplicity` copies of `trace`. Zero is ignored.
    pub fn add(&mut self, trace: Trace, multiplicity: u64) {
        if multiplicity > 0 {
            *self.traces.entry(trace).or_insert(0) += multiplicity;
        }
    }

    pub fn push(&mut self, trace: Trace) {
        self.add(trace, 1);
    }

    /// Distinct traces with their multiplicities, in trace order.
    pub fn iter(&self) -> impl Iterator<Item = (&Trace, u64)> {
        self.traces.iter().map(|(t, n)| (t, *n))
    }

    pub fn multiplicity(&self, trace: &Trace) -> u64 {
        self.traces.get(trace).copied().unwrap_or(0)
    }

    /// Number of distinct traces.
    pub fn distinct_len(&self) -> usize {
        self.traces.len()
    }

    /// Number of cases, counting multiplicity.
    pub fn total_len(&self) -> u64 {
        self.traces.values().sum()
    }

    /// Total number of events, counting multiplicity.
    pub fn event_count(&self) -> u64 {
        self.traces.iter().map(|(t, n)| t.len() as u64 * n).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn alphabet(&self) -> ActivitySet {
        self.traces.keys().flat_map(|t| t.iter().cloned()).collect()
    }

    /// Applies `f` to every trace; coinciding images accumulate multiplicity.
    pub fn map_traces(&self, mut f: impl FnMut(&Trace) -> Trace) -> EventLog {
        let mut out = EventLog::new();
        for (t, n) in self.iter() {
            out.add(f(t), n);
        }
        out
    }
}

impl fmt::Debug for EventLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (t, n)) in self.traces.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}:{n}")?;
        }
        f.write_str("}")
    }
}

impl FromIterator<Trace> for EventLog {
    fn from_iter<I: IntoIterator<Item = Trace>>(iter: I) -> Self {
        let mut log = EventLog::new();
        for t in iter {
            log.push(t);
        }
        log
    }
}

impl FromIterator<(Trace, u64)> for EventLog {
    fn from_iter<I: IntoIterator<Item = (Trace, u64)>>(iter: I) -> Self {
        let mut log = EventLog::new();
        for (t, n) in iter {
            log.add(t, n);
        }
        log
    }
}

/// Deletes every event outside `keep`, preserving order.
pub fn project(sigma: &Trace, keep: &ActivitySet) -> Trace {
    sigma.iter().filter(|a| keep.contains(*a)).cloned().collect()
}

/// Per-trace projection of a log.
pub fn project_log(log: &EventLog, keep: &ActivitySet) -> EventLog {
    log.map_traces(|t| project(t, keep))
}

/// Collapses every maximal run of equal adjacent events into one event.
pub fn remove_stuttering(sigma: &Trace) -> Trace {
    let mut out: Vec<Activity> = Vec::with_capacity(sigma.len());
    for a in sigma.iter() {
        if out.last() != Some(a) {
            out.push(a.clone());
        }
    }
    Trace(out)
}
