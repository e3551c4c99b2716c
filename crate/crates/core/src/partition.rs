//! Activity partitions: the mapping of low-level activities to sub-process
//! names that drives hierarchical discovery.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::log::{Activity, ActivitySet, EventLog};

/// Prefix of generated loop names. User activities and sub-process names
/// must not start with it.
pub const RESERVED_PREFIX: &str = "__loop_";

/// Sub-process name → set of activities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Partition {
    groups: BTreeMap<Activity, ActivitySet>,
}

/// On-disk form: `{"subprocesses": {"<name>": ["act1", ...], ...}}`.
#[derive(Serialize, Deserialize)]
struct PartitionFile {
    subprocesses: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Error)]
pub enum PartitionFileError {
    #[error("invalid partition JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("activity {activity:?} listed twice in sub-process {group:?}")]
    DuplicateEntry { group: String, activity: String },
}

impl Partition {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds (or extends) group `name`.
    pub fn insert(&mut self, name: impl Into<Activity>, activities: impl IntoIterator<Item = Activity>) {
        self.groups.entry(name.into()).or_default().extend(activities);
    }

    pub fn from_groups<N, S>(groups: impl IntoIterator<Item = (N, Vec<S>)>) -> Self
    where
        N: AsRef<str>,
        S: AsRef<str>,
    {
        let mut p = Partition::new();
        for (name, acts) in groups {
            p.insert(Activity::new(name), acts.iter().map(Activity::new));
        }
        p
    }

    pub fn from_json(text: &str) -> Result<Self, PartitionFileError> {
        let file: PartitionFile = serde_json::from_str(text)?;
        let mut p = Partition::new();
        for (name, acts) in file.subprocesses {
            let mut set = ActivitySet::new();
            for a in acts {
                if !set.insert(Activity::from(a.as_str())) {
                    return Err(PartitionFileError::DuplicateEntry { group: name, activity: a });
                }
            }
            p.groups.insert(Activity::from(name), set);
        }
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        let file = PartitionFile {
            subprocesses: self
                .groups
                .iter()
                .map(|(n, s)| (n.to_string(), s.iter().map(|a| a.to_string()).collect()))
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("partition serializes")
    }

    pub fn remove(&mut self, name: &Activity) -> Option<ActivitySet> {
        self.groups.remove(name)
    }

    /// Groups intersected with `alphabet`; groups left empty are dropped.
    pub fn restricted_to(&self, alphabet: &ActivitySet) -> Partition {
        let groups = self
            .groups
            .iter()
            .map(|(k, g)| (k.clone(), g.intersection(alphabet).cloned().collect::<ActivitySet>()))
            .filter(|(_, g)| !g.is_empty())
            .collect();
        Partition { groups }
    }

    pub fn as_map(&self) -> &BTreeMap<Activity, ActivitySet> {
        &self.groups
    }

    pub fn groups(&self) -> impl Iterator<Item = (&Activity, &ActivitySet)> {
        self.groups.iter()
    }

    pub fn group(&self, name: &Activity) -> Option<&ActivitySet> {
        self.groups.get(name)
    }

    pub fn group_mut(&mut self, name: &Activity) -> Option<&mut ActivitySet> {
        self.groups.get_mut(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &Activity> {
        self.groups.keys()
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// The group containing `a`. First match in name order if groups overlap.
    pub fn group_of(&self, a: &Activity) -> Option<&Activity> {
        self.groups.iter().find(|(_, s)| s.contains(a)).map(|(n, _)| n)
    }

    /// Activity → group name lookup table.
    pub fn lookup(&self) -> BTreeMap<Activity, Activity> {
        let mut m = BTreeMap::new();
        for (name, acts) in self.groups.iter().rev() {
            for a in acts {
                m.insert(a.clone(), name.clone());
            }
        }
        m
    }

    /// Union of all groups.
    pub fn activities(&self) -> ActivitySet {
        self.groups.values().flatten().cloned().collect()
    }

    /// Splits each hinted group into its in-loop and out-of-loop parts.
    ///
    /// The in-loop part is named `<group>.in`, the rest `<group>.out`
    /// (with a numeric suffix if that name is taken).
    pub fn refine(&self, hints: &[RefinementHint]) -> Partition {
        let mut out = self.clone();
        for h in hints {
            if out.groups.remove(&h.group).is_none() {
                continue;
            }
            for (suffix, part) in [("in", &h.inside), ("out", &h.outside)] {
                if part.is_empty() {
                    continue;
                }
                let mut name = format!("{}.{suffix}", h.group);
                let mut k = 2;
                while out.groups.contains_key(name.as_str()) || out.activities().contains(name.as_str()) {
                    name = format!("{}.{suffix}{k}", h.group);
                    k += 1;
                }
                out.groups.insert(Activity::from(name), part.clone());
            }
        }
        out
    }
}

/// Two groups sharing an activity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Overlap {
    pub first: Activity,
    pub second: Activity,
    pub shared: ActivitySet,
}

/// Why a partition cannot be used with a log.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PartitionViolation {
    pub overlaps: Vec<Overlap>,
    /// Log activities in no group.
    pub uncovered: ActivitySet,
    /// Sub-process names that are also activity names.
    pub name_collisions: ActivitySet,
    pub empty_groups: ActivitySet,
    /// Names or activities using the reserved loop-name prefix.
    pub reserved: ActivitySet,
}

impl PartitionViolation {
    fn is_empty(&self) -> bool {
        self.overlaps.is_empty()
            && self.uncovered.is_empty()
            && self.name_collisions.is_empty()
            && self.empty_groups.is_empty()
            && self.reserved.is_empty()
    }
}

fn list(set: &ActivitySet) -> String {
    set.iter().map(|a| a.as_str()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for o in &self.overlaps {
            parts.push(format!("sub-processes {} and {} share activities {{{}}}", o.first, o.second, list(&o.shared)));
        }
        if !self.uncovered.is_empty() {
            parts.push(format!("activities in no sub-process: {{{}}}", list(&self.uncovered)));
        }
        if !self.name_collisions.is_empty() {
            parts.push(format!("sub-process names that are also activities: {{{}}}", list(&self.name_collisions)));
        }
        if !self.empty_groups.is_empty() {
            parts.push(format!("empty sub-processes: {{{}}}", list(&self.empty_groups)));
        }
        if !self.reserved.is_empty() {
            parts.push(format!("names using the reserved prefix {RESERVED_PREFIX:?}: {{{}}}", list(&self.reserved)));
        }
        f.write_str(&parts.join("; "))
    }
}

impl std::error::Error for PartitionViolation {}

/// Checks that `partition` is a partition of (a superset of) the log alphabet.
pub fn validate_partition(partition: &Partition, log: &EventLog) -> Result<(), PartitionViolation> {
    let mut v = PartitionViolation::default();
    let groups: Vec<_> = partition.groups().collect();
    for (i, (n1, s1)) in groups.iter().enumerate() {
        if s1.is_empty() {
            v.empty_groups.insert((*n1).clone());
        }
        for (n2, s2) in &groups[i + 1..] {
            let shared: ActivitySet = s1.intersection(s2).cloned().collect();
            if !shared.is_empty() {
                v.overlaps.push(Overlap { first: (*n1).clone(), second: (*n2).clone(), shared });
            }
        }
    }
    let covered = partition.activities();
    let alphabet = log.alphabet();
    v.uncovered = alphabet.difference(&covered).cloned().collect();
    for name in partition.names() {
        if covered.contains(name) || alphabet.contains(name) {
            v.name_collisions.insert(name.clone());
        }
    }
    for a in partition.names().chain(covered.iter()).chain(alphabet.iter()) {
        if a.as_str().starts_with(RESERVED_PREFIX) {
            v.reserved.insert(a.clone());
        }
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

/// Suggested split of a group that is only partly inside a loop body.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefinementHint {
    pub group: Activity,
    pub inside: ActivitySet,
    pub outside: ActivitySet,
}

impl fmt::Display for RefinementHint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "split {} into {{{}}} (inside the loop) and {{{}}} (outside)",
            self.group,
            list(&self.inside),
            list(&self.outside)
        )
    }
}

/// A loop body that cuts through one or more groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopIncompatibility {
    pub loop_body: ActivitySet,
    pub hints: Vec<RefinementHint>,
}

impl fmt::Display for LoopIncompatibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "loop body {{{}}} partially overlaps sub-processes: ", list(&self.loop_body))?;
        let hints: Vec<String> = self.hints.iter().map(|h| h.to_string()).collect();
        f.write_str(&hints.join("; "))
    }
}

impl std::error::Error for LoopIncompatibility {}

/// Every group must be disjoint from, contain, or be contained in `body`.
pub fn check_loop_compatibility(partition: &Partition, body: &ActivitySet) -> Result<(), LoopIncompatibility> {
    let hints: Vec<RefinementHint> = partition
        .groups()
        .filter_map(|(name, group)| {
            let inside: ActivitySet = group.intersection(body).cloned().collect();
            if inside.is_empty() || group.is_subset(body) || body.is_subset(group) {
                return None;
            }
            let outside = group.difference(body).cloned().collect();
            Some(RefinementHint { group: name.clone(), inside, outside })
        })
        .collect();
    if hints.is_empty() {
        Ok(())
    } else {
        Err(LoopIncompatibility { loop_body: body.clone(), hints })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::log::{activity_set, Trace};

    fn log_over(names: &[&str]) -> EventLog {
        [Trace::from_names(names)].into_iter().collect()
    }

    #[test]
    fn valid_partition() {
        let p = Partition::from_groups([("g1", vec!["a", "b"]), ("g2", vec!["c"])]);
        assert!(validate_partition(&p, &log_over(&["a", "b", "c"])).is_ok());
    }

    #[test]
    fn overlap_is_reported_with_both_names() {
        let p = Partition::from_groups([("g1", vec!["a"]), ("g2", vec!["a", "c"])]);
        let v = validate_partition(&p, &log_over(&["a", "c"])).unwrap_err();
        assert_eq!(v.overlaps, vec![Overlap { first: "g1".into(), second: "g2".into(), shared: activity_set(["a"]) }]);
        assert!(v.to_string().contains("g1 and g2"));
    }

    #[test]
    fn uncovered_activity() {
        let p = Partition::from_groups([("g1", vec!["a"])]);
        let v = validate_partition(&p, &log_over(&["a", "b"])).unwrap_err();
        assert_eq!(v.uncovered, activity_set(["b"]));
        assert!(v.overlaps.is_empty());
    }

    #[test]
    fn name_collision_and_reserved_prefix() {
        let p = Partition::from_groups([("a", vec!["a"]), ("__loop_9", vec!["b"])]);
        let v = validate_partition(&p, &log_over(&["a", "b"])).unwrap_err();
        assert_eq!(v.name_collisions, activity_set(["a"]));
        assert_eq!(v.reserved, activity_set(["__loop_9"]));
    }

    #[test]
    fn loop_compatibility_cases() {
        let p = Partition::from_groups([("g1", vec!["a", "b"])]);
        assert!(check_loop_compatibility(&p, &activity_set(["a", "b", "c"])).is_ok());
        assert!(check_loop_compatibility(&p, &activity_set(["a"])).is_ok());
        assert!(check_loop_compatibility(&p, &activity_set(["x", "y"])).is_ok());

        let err = check_loop_compatibility(&p, &activity_set(["b", "c"])).unwrap_err();
        assert_eq!(
            err.hints,
            vec![RefinementHint { group: "g1".into(), inside: activity_set(["b"]), outside: activity_set(["a"]) }]
        );
    }

    #[test]
    fn refinement_applies_hint() {
        let p = Partition::from_groups([("g1", vec!["a", "b"]), ("g2", vec!["c"])]);
        let err = check_loop_compatibility(&p, &activity_set(["b", "c"])).unwrap_err();
        let r = p.refine(&err.hints);
        assert_eq!(r.group(&"g1.in".into()), Some(&activity_set(["b"])));
        assert_eq!(r.group(&"g1.out".into()), Some(&activity_set(["a"])));
        assert!(check_loop_compatibility(&r, &activity_set(["b", "c"])).is_ok());
    }

    #[test]
    fn json_format() {
        let p = Partition::from_json(r#"{"subprocesses": {"s1": ["a", "b"], "s2": ["c"]}}"#).unwrap();
        assert_eq!(p.group(&"s1".into()), Some(&activity_set(["a", "b"])));
        assert_eq!(Partition::from_json(&p.to_json()).unwrap(), p);
        assert!(Partition::from_json(r#"{"subprocesses": {"s1": ["a", "a"]}}"#).is_err());
        assert!(Partition::from_json(r#"{"groups": {}}"#).is_err());
    }
}
