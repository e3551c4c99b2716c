//! Process trees, their text form, and their translation to workflow nets.
//!
//! Text form: `seq(a, xor(b, tau), par(c, d), loop(e, tau))`. Names that
//! contain spaces, commas, parentheses or quotes, or that equal `tau`, are
//! written in double quotes. `loop(x)` parses as `loop(x, tau)`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::log::Activity;
use crate::petri::{PetriNet, PlaceId, WfNet};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProcessTree {
    Activity(Activity),
    Tau,
    Seq(Vec<ProcessTree>),
    Xor(Vec<ProcessTree>),
    Par(Vec<ProcessTree>),
    /// Body first, then one or more redo children; executes
    /// body (redo body)* with one redo child chosen per iteration.
    Loop(Vec<ProcessTree>),
}

impl ProcessTree {
    pub fn leaf(name: &str) -> Self {
        ProcessTree::Activity(Activity::new(name))
    }

    pub fn children(&self) -> &[ProcessTree] {
        match self {
            ProcessTree::Activity(_) | ProcessTree::Tau => &[],
            ProcessTree::Seq(c) | ProcessTree::Xor(c) | ProcessTree::Par(c) | ProcessTree::Loop(c) => c,
        }
    }

    /// Visible leaves in depth-first order.
    pub fn leaves(&self) -> Vec<&Activity> {
        match self {
            ProcessTree::Activity(a) => vec![a],
            _ => self.children().iter().flat_map(|c| c.leaves()).collect(),
        }
    }

    pub fn is_valid(&self) -> bool {
        match self {
            ProcessTree::Activity(_) | ProcessTree::Tau => true,
            ProcessTree::Loop(c) => c.len() >= 2 && c.iter().all(|x| x.is_valid()),
            ProcessTree::Seq(c) | ProcessTree::Xor(c) | ProcessTree::Par(c) => {
                !c.is_empty() && c.iter().all(|x| x.is_valid())
            }
        }
    }

    /// Merges nested operators of the same kind and unwraps singleton
    /// sequence/choice/parallel nodes.
    pub fn simplified(self) -> Self {
        fn merge(children: Vec<ProcessTree>, same: fn(&ProcessTree) -> Option<&Vec<ProcessTree>>) -> Vec<ProcessTree> {
            let mut out = Vec::new();
            for c in children.into_iter().map(ProcessTree::simplified) {
                match same(&c) {
                    Some(inner) => out.extend(inner.iter().cloned()),
                    None => out.push(c),
                }
            }
            out
        }
        let wrap = |c: Vec<ProcessTree>, make: fn(Vec<ProcessTree>) -> ProcessTree| {
            if c.len() == 1 {
                c.into_iter().next().unwrap()
            } else {
                make(c)
            }
        };
        match self {
            ProcessTree::Seq(c) => {
                wrap(merge(c, |t| if let ProcessTree::Seq(x) = t { Some(x) } else { None }), ProcessTree::Seq)
            }
            ProcessTree::Xor(c) => {
                wrap(merge(c, |t| if let ProcessTree::Xor(x) = t { Some(x) } else { None }), ProcessTree::Xor)
            }
            ProcessTree::Par(c) => {
                wrap(merge(c, |t| if let ProcessTree::Par(x) = t { Some(x) } else { None }), ProcessTree::Par)
            }
            ProcessTree::Loop(c) => ProcessTree::Loop(c.into_iter().map(ProcessTree::simplified).collect()),
            leaf => leaf,
        }
    }
}

fn needs_quotes(name: &str) -> bool {
    name.is_empty()
        || name == "tau"
        || name.chars().any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ',' | '"' | '\\'))
}

impl fmt::Display for ProcessTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (op, children) = match self {
            ProcessTree::Tau => return f.write_str("tau"),
            ProcessTree::Activity(a) => {
                let name = a.as_str();
                if !needs_quotes(name) {
                    return f.write_str(name);
                }
                f.write_str("\"")?;
                for c in name.chars() {
                    if matches!(c, '"' | '\\') {
                        f.write_str("\\")?;
                    }
                    write!(f, "{c}")?;
                }
                return f.write_str("\"");
            }
            ProcessTree::Seq(c) => ("seq", c),
            ProcessTree::Xor(c) => ("xor", c),
            ProcessTree::Par(c) => ("par", c),
            ProcessTree::Loop(c) => ("loop", c),
        };
        write!(f, "{op}(")?;
        for (k, c) in children.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("process tree syntax error at offset {offset}: {message}")]
pub struct TreeParseError {
    pub offset: usize,
    pub message: String,
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, TreeParseError> {
        Err(TreeParseError { offset: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn node(&mut self) -> Result<ProcessTree, TreeParseError> {
        self.skip_ws();
        if self.peek() == Some('"') {
            self.pos += 1;
            let mut name = String::new();
            loop {
                match self.peek() {
                    None => return self.err("unterminated quoted name"),
                    Some('"') => {
                        self.pos += 1;
                        break;
                    }
                    Some('\\') => {
                        self.pos += 1;
                        match self.peek() {
                            Some(c) => {
                                name.push(c);
                                self.pos += c.len_utf8();
                            }
                            None => return self.err("dangling escape"),
                        }
                    }
                    Some(c) => {
                        name.push(c);
                        self.pos += c.len_utf8();
                    }
                }
            }
            return Ok(ProcessTree::Activity(Activity::new(name)));
        }
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || matches!(c, '(' | ')' | ',' | '"') {
                break;
            }
            self.pos += c.len_utf8();
        }
        let word = &self.text[start..self.pos];
        if word.is_empty() {
            return self.err("expected a node");
        }
        self.skip_ws();
        if self.peek() != Some('(') {
            return Ok(if word == "tau" { ProcessTree::Tau } else { ProcessTree::Activity(Activity::new(word)) });
        }
        self.pos += 1;
        let mut children = vec![self.node()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                    children.push(self.node()?);
                }
                Some(')') => {
                    self.pos += 1;
                    break;
                }
                _ => return self.err("expected ',' or ')'"),
            }
        }
        match word {
            "seq" => Ok(ProcessTree::Seq(children)),
            "xor" => Ok(ProcessTree::Xor(children)),
            "par" => Ok(ProcessTree::Par(children)),
            "loop" => {
                if children.len() == 1 {
                    children.push(ProcessTree::Tau);
                }
                Ok(ProcessTree::Loop(children))
            }
            other => {
                self.pos = start;
                self.err(format!("unknown operator {other:?}"))
            }
        }
    }
}

impl FromStr for ProcessTree {
    type Err = TreeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { text: s, pos: 0 };
        let tree = p.node()?;
        p.skip_ws();
        if p.pos != s.len() {
            return p.err("trailing input");
        }
        Ok(tree)
    }
}

/// Block-structured translation: sequences chain places, choices share
/// their entry and exit places, parallel blocks use a silent fork and join,
/// loops add a silent entry and exit around `body` with the redo children
/// leading back from the body's exit to its entry. The result is sound.
pub fn tree_to_wfnet(tree: &ProcessTree) -> WfNet {
    let mut b = Builder { net: PetriNet::new(), places: 0 };
    let i = b.net.add_place("i");
    let f = b.net.add_place("f");
    b.build(tree, i, f);
    WfNet::new_unchecked(b.net, i, f)
}

struct Builder {
    net: PetriNet,
    places: usize,
}

impl Builder {
    fn place(&mut self) -> PlaceId {
        self.places += 1;
        self.net.add_place(format!("p{}", self.places))
    }

    fn tau(&mut self, from: &[PlaceId], to: &[PlaceId]) {
        let t = self.net.add_transition("tau", None);
        for p in from {
            self.net.add_input_arc(*p, t, 1);
        }
        for p in to {
            self.net.add_output_arc(t, *p, 1);
        }
    }

    fn build(&mut self, tree: &ProcessTree, from: PlaceId, to: PlaceId) {
        match tree {
            ProcessTree::Activity(a) => {
                let t = self.net.add_transition(a.as_str(), Some(a.clone()));
                self.net.add_input_arc(from, t, 1);
                self.net.add_output_arc(t, to, 1);
            }
            ProcessTree::Tau => self.tau(&[from], &[to]),
            ProcessTree::Seq(children) => {
                let mut cur = from;
                for (k, c) in children.iter().enumerate() {
                    let next = if k + 1 == children.len() { to } else { self.place() };
                    self.build(c, cur, next);
                    cur = next;
                }
            }
            ProcessTree::Xor(children) => {
                for c in children {
                    self.build(c, from, to);
                }
            }
            ProcessTree::Par(children) => {
                let entries: Vec<PlaceId> = children.iter().map(|_| self.place()).collect();
                let exits: Vec<PlaceId> = children.iter().map(|_| self.place()).collect();
                self.tau(&[from], &entries);
                for (k, c) in children.iter().enumerate() {
                    self.build(c, entries[k], exits[k]);
                }
                self.tau(&exits, &[to]);
            }
            ProcessTree::Loop(children) => {
                let (body, redo) = children.split_first().expect("loop has a body");
                let p1 = self.place();
                let p2 = self.place();
                self.tau(&[from], &[p1]);
                self.build(body, p1, p2);
                for r in redo {
                    self.build(r, p2, p1);
                }
                self.tau(&[p2], &[to]);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::petri::{check_soundness, runs_upto};

    fn word(names: &[&str]) -> Vec<Activity> {
        names.iter().map(Activity::new).collect()
    }

    #[test]
    fn text_round_trip() {
        let text = "seq(a, xor(b, tau), par(c, d), loop(e, tau))";
        let t: ProcessTree = text.parse().unwrap();
        assert_eq!(t.to_string(), text);
        assert_eq!("loop(e)".parse::<ProcessTree>().unwrap(), "loop(e, tau)".parse().unwrap());
        let odd = ProcessTree::Seq(vec![
            ProcessTree::leaf("register request"),
            ProcessTree::leaf("tau"),
            ProcessTree::leaf("q\"x"),
        ]);
        assert_eq!(odd.to_string().parse::<ProcessTree>().unwrap(), odd);
    }

    #[test]
    fn parse_errors() {
        assert!("seq(a".parse::<ProcessTree>().is_err());
        assert!("foo(a)".parse::<ProcessTree>().is_err());
        assert!("a b".parse::<ProcessTree>().is_err());
    }

    #[test]
    fn leaf_and_sequence_shapes() {
        let w = tree_to_wfnet(&ProcessTree::leaf("a"));
        assert_eq!((w.net().place_count(), w.net().transition_count()), (2, 1));
        let w = tree_to_wfnet(&"seq(a, b)".parse().unwrap());
        assert_eq!((w.net().place_count(), w.net().transition_count()), (3, 2));
        assert_eq!(runs_upto(&w, 3, 1000).final_runs().cloned().collect::<Vec<_>>(), vec![word(&["a", "b"])]);
    }

    #[test]
    fn parallel_interleavings() {
        let w = tree_to_wfnet(&"par(a, b)".parse().unwrap());
        let finals: Vec<_> = runs_upto(&w, 3, 1000).final_runs().cloned().collect();
        assert_eq!(finals, vec![word(&["a", "b"]), word(&["b", "a"])]);
    }

    #[test]
    fn loop_with_redo() {
        let w = tree_to_wfnet(&"loop(a, b)".parse().unwrap());
        let runs = runs_upto(&w, 5, 10_000);
        assert!(runs.is_final(&word(&["a"])));
        assert!(runs.is_final(&word(&["a", "b", "a"])));
        assert!(!runs.is_final(&word(&["a", "b"])));
    }

    #[test]
    fn translations_are_sound() {
        for text in ["seq(a, xor(b, tau), par(c, d), loop(e, tau))", "loop(tau, a, b)", "xor(tau, loop(par(a, b), c))"]
        {
            let w = tree_to_wfnet(&text.parse().unwrap());
            assert!(check_soundness(&w, 10_000).is_sound(), "{text}");
        }
    }

    #[test]
    fn simplification() {
        let t: ProcessTree = "seq(a, seq(b, c), xor(d))".parse().unwrap();
        assert_eq!(t.simplified().to_string(), "seq(a, b, c, d)");
    }
}
