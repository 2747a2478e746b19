//! Finite labelled transition systems.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::label::Label;

/// Transition target: a state index or the absorbing ERROR sentinel.
/// `State(_)` orders before `Error`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    State(usize),
    Error,
}

impl Target {
    pub fn state(self) -> Option<usize> {
        match self {
            Target::State(s) => Some(s),
            Target::Error => None,
        }
    }
}

/// A finite LTS. State 0 is initial; ERROR is not counted in
/// `num_states()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lts {
    pub name: String,
    /// Sorted, deduplicated.
    pub alphabet: Vec<Label>,
    /// Per state: `(label index, target)` sorted, no duplicates.
    pub transitions: Vec<Vec<(usize, Target)>>,
    /// Successful termination.
    pub end_states: BTreeSet<usize>,
    /// States compiled from `STOP` (or, in a composition, where every part
    /// is in such a state).
    pub stop_states: BTreeSet<usize>,
}

impl Lts {
    /// A single state with no transitions.
    pub fn stop(name: impl Into<String>) -> Lts {
        Lts {
            name: name.into(),
            alphabet: Vec::new(),
            transitions: vec![Vec::new()],
            end_states: BTreeSet::new(),
            stop_states: BTreeSet::from([0]),
        }
    }

    pub fn num_states(&self) -> usize {
        self.transitions.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.iter().map(Vec::len).sum()
    }

    pub fn label(&self, idx: usize) -> &Label {
        &self.alphabet[idx]
    }

    pub fn label_index(&self, label: &Label) -> Option<usize> {
        self.alphabet.binary_search(label).ok()
    }

    pub fn has_error_target(&self) -> bool {
        self.transitions
            .iter()
            .flatten()
            .any(|(_, t)| *t == Target::Error)
    }

    /// Successors of `state` on `label`.
    pub fn successors(&self, state: usize, label: usize) -> impl Iterator<Item = Target> + '_ {
        let ts = &self.transitions[state];
        let start = ts.partition_point(|(l, _)| *l < label);
        ts[start..]
            .iter()
            .take_while(move |(l, _)| *l == label)
            .map(|(_, t)| *t)
    }

    /// Checks the structural invariants; returns a description of the
    /// first one broken.
    pub fn validate(&self) -> Result<(), String> {
        if self.transitions.is_empty() {
            return Err("no states".into());
        }
        if !self.alphabet.windows(2).all(|w| w[0] < w[1]) {
            return Err("alphabet not sorted/deduplicated".into());
        }
        let n = self.num_states();
        for (s, ts) in self.transitions.iter().enumerate() {
            if !ts.windows(2).all(|w| w[0] < w[1]) {
                return Err(format!("transitions of state {s} not sorted/deduplicated"));
            }
            for (l, t) in ts {
                if *l >= self.alphabet.len() {
                    return Err(format!("state {s}: label index {l} out of bounds"));
                }
                if let Target::State(t) = t {
                    if *t >= n {
                        return Err(format!("state {s}: target {t} out of bounds"));
                    }
                }
            }
        }
        if let Some(s) = self.end_states.iter().chain(&self.stop_states).find(|s| **s >= n) {
            return Err(format!("marked state {s} out of bounds"));
        }
        Ok(())
    }

    /// Rebuilds the alphabet through `f`, merging labels that collide and
    /// re-sorting every transition list.
    pub fn map_labels(&self, mut f: impl FnMut(&Label) -> Label) -> Lts {
        let mapped: Vec<Label> = self.alphabet.iter().map(&mut f).collect();
        let mut alphabet = mapped.clone();
        alphabet.sort();
        alphabet.dedup();
        let remap: Vec<usize> = mapped
            .iter()
            .map(|l| alphabet.binary_search(l).unwrap())
            .collect();
        let transitions = self
            .transitions
            .iter()
            .map(|ts| {
                let mut v: Vec<(usize, Target)> = ts.iter().map(|(l, t)| (remap[*l], *t)).collect();
                v.sort();
                v.dedup();
                v
            })
            .collect();
        Lts {
            name: self.name.clone(),
            alphabet,
            transitions,
            end_states: self.end_states.clone(),
            stop_states: self.stop_states.clone(),
        }
    }

    /// Aldebaran format. ERROR, when targeted, is serialized as the extra
    /// last state.
    pub fn to_aut(&self) -> String {
        let n = self.num_states();
        let states = n + usize::from(self.has_error_target());
        let mut out = format!("des (0, {}, {})\n", self.num_transitions(), states);
        for (s, ts) in self.transitions.iter().enumerate() {
            for (l, t) in ts {
                let to = t.state().unwrap_or(n);
                writeln!(out, "({s}, \"{}\", {to})", self.alphabet[*l]).unwrap();
            }
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph \"{}\" {{\n  rankdir=LR;\n  node [shape=circle];\n", self.name);
        for s in 0..self.num_states() {
            let mut attrs = vec![format!("label=\"{s}\"")];
            if s == 0 {
                attrs.push("shape=doublecircle".into());
            }
            if self.end_states.contains(&s) {
                attrs.push("style=bold".into());
            }
            writeln!(out, "  s{s} [{}];", attrs.join(", ")).unwrap();
        }
        if self.has_error_target() {
            out.push_str("  ERROR [label=\"ERROR\", shape=square, color=red];\n");
        }
        for (s, ts) in self.transitions.iter().enumerate() {
            for (l, t) in ts {
                let to = match t {
                    Target::State(t) => format!("s{t}"),
                    Target::Error => "ERROR".into(),
                };
                writeln!(out, "  s{s} -> {to} [label=\"{}\"];", self.alphabet[*l]).unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}
