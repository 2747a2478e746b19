//! Safety, deadlock and progress analysis over a finished LTS.
//!
//! All searches are breadth-first with successors taken in label order,
//! so every reported trace is the shortest one and, among those, the
//! lexicographically smallest.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::compile::expand_pattern;
use crate::compose::Warning;
use crate::label::Label;
use crate::lts::{Lts, Target};
use crate::syntax::{Env, EvalError, Spec};

pub type Trace = Vec<Label>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    Safety,
    Deadlock,
    Progress,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::Safety => "safety",
            ViolationKind::Deadlock => "deadlock",
            ViolationKind::Progress => "progress",
        })
    }
}

/// Note attached to deadlocks where every component sits in `STOP`.
pub const TERMINAL_STOP: &str = "terminal-STOP";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Property or progress name, or `DEADLOCK`.
    pub subject: String,
    pub trace: Trace,
    /// Progress only: a cycle inside the offending terminal set.
    pub cycle: Option<Trace>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Stats {
    pub states: usize,
    pub transitions: usize,
    pub alphabet: usize,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub target: String,
    pub stats: Stats,
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
    pub terminal_sets: usize,
}

impl Report {
    pub fn result(&self) -> Verdict {
        if self.violations.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// A bottom strongly connected component of the reachable graph (ERROR
/// edges ignored) with the labels on its internal transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalSet {
    /// Sorted.
    pub states: Vec<usize>,
    /// Sorted label indices.
    pub labels: Vec<usize>,
}

/// Breadth-first parent tree from state 0.
struct Bfs {
    order: Vec<usize>,
    parent: Vec<Option<(usize, usize)>>,
    seen: Vec<bool>,
}

fn bfs(lts: &Lts) -> Bfs {
    let n = lts.num_states();
    let mut b = Bfs { order: Vec::with_capacity(n), parent: vec![None; n], seen: vec![false; n] };
    let mut queue = VecDeque::from([0]);
    b.seen[0] = true;
    while let Some(s) = queue.pop_front() {
        b.order.push(s);
        for &(l, t) in &lts.transitions[s] {
            if let Target::State(t) = t {
                if !b.seen[t] {
                    b.seen[t] = true;
                    b.parent[t] = Some((s, l));
                    queue.push_back(t);
                }
            }
        }
    }
    b
}

impl Bfs {
    fn trace_to(&self, lts: &Lts, mut s: usize) -> Trace {
        let mut out = Vec::new();
        while let Some((p, l)) = self.parent[s] {
            out.push(lts.alphabet[l].clone());
            s = p;
        }
        out.reverse();
        out
    }
}

/// Shortest trace reaching ERROR.
pub fn check_safety(lts: &Lts) -> Option<Violation> {
    let b = bfs(lts);
    for &s in &b.order {
        if let Some(&(l, _)) = lts.transitions[s].iter().find(|(_, t)| *t == Target::Error) {
            let mut trace = b.trace_to(lts, s);
            trace.push(lts.alphabet[l].clone());
            return Some(Violation {
                kind: ViolationKind::Safety,
                subject: lts.name.clone(),
                trace,
                cycle: None,
                note: None,
            });
        }
    }
    None
}

/// Shortest trace to a reachable state with no transitions that is not an
/// end state.
pub fn check_deadlock(lts: &Lts) -> Option<Violation> {
    let b = bfs(lts);
    let s = *b
        .order
        .iter()
        .find(|&&s| lts.transitions[s].is_empty() && !lts.end_states.contains(&s))?;
    Some(Violation {
        kind: ViolationKind::Deadlock,
        subject: "DEADLOCK".into(),
        trace: b.trace_to(lts, s),
        cycle: None,
        note: lts.stop_states.contains(&s).then(|| TERMINAL_STOP.to_string()),
    })
}

/// Strongly connected components (iterative Tarjan) over the states
/// reachable from 0; ERROR edges are ignored. Returns the component id of
/// each state (`usize::MAX` when unreachable) and the component count.
fn scc(lts: &Lts) -> (Vec<usize>, usize) {
    let n = lts.num_states();
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSET; n];
    let mut stack = Vec::new();
    let mut next_index = 1;
    let mut ncomp = 0;
    // (state, next transition position)
    let mut call: Vec<(usize, usize)> = vec![(0, 0)];
    index[0] = 0;
    low[0] = 0;
    stack.push(0);
    on_stack[0] = true;
    while let Some(&(v, start)) = call.last() {
        let ts = &lts.transitions[v];
        let mut pos = start;
        let mut descended = false;
        while pos < ts.len() {
            let t = ts[pos].1;
            pos += 1;
            let Target::State(w) = t else { continue };
            if index[w] == UNSET {
                index[w] = next_index;
                low[w] = next_index;
                next_index += 1;
                stack.push(w);
                on_stack[w] = true;
                call.last_mut().unwrap().1 = pos;
                call.push((w, 0));
                descended = true;
                break;
            } else if on_stack[w] {
                low[v] = low[v].min(index[w]);
            }
        }
        if descended {
            continue;
        }
        call.pop();
        if let Some(&(parent, _)) = call.last() {
            low[parent] = low[parent].min(low[v]);
        }
        if low[v] == index[v] {
            loop {
                let w = stack.pop().unwrap();
                on_stack[w] = false;
                comp[w] = ncomp;
                if w == v {
                    break;
                }
            }
            ncomp += 1;
        }
    }
    (comp, ncomp)
}

/// Bottom SCCs ordered by their smallest state.
pub fn terminal_sets(lts: &Lts) -> Vec<TerminalSet> {
    let (comp, ncomp) = scc(lts);
    let mut bottom = vec![true; ncomp];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
    let mut labels: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncomp];
    for (s, &c) in comp.iter().enumerate() {
        if c == usize::MAX {
            continue;
        }
        members[c].push(s);
        for &(l, t) in &lts.transitions[s] {
            if let Target::State(t) = t {
                if comp[t] == c {
                    labels[c].insert(l);
                } else {
                    bottom[c] = false;
                }
            }
        }
    }
    let mut out: Vec<TerminalSet> = (0..ncomp)
        .filter(|&c| bottom[c])
        .map(|c| TerminalSet { states: members[c].clone(), labels: labels[c].iter().copied().collect() })
        .collect();
    out.sort_by_key(|t| t.states[0]);
    out
}

/// Shortest cycle from `start` back to itself using only transitions
/// inside `set`. Empty when `start` has no internal transition.
fn cycle_within(lts: &Lts, set: &BTreeSet<usize>, start: usize) -> Trace {
    let n = lts.num_states();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for &(l, t) in &lts.transitions[s] {
            let Target::State(t) = t else { continue };
            if !set.contains(&t) {
                continue;
            }
            if t == start {
                let mut out = vec![lts.alphabet[l].clone()];
                let mut cur = s;
                while cur != start {
                    let (p, pl) = parent[cur].unwrap();
                    out.push(lts.alphabet[pl].clone());
                    cur = p;
                }
                out.reverse();
                return out;
            }
            if !seen[t] {
                seen[t] = true;
                parent[t] = Some((s, l));
                queue.push_back(t);
            }
        }
    }
    Vec::new()
}

/// A progress property with its action set in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Progress {
    pub name: String,
    pub actions: BTreeSet<Label>,
}

pub fn progress_properties(spec: &Spec) -> Result<Vec<Progress>, EvalError> {
    spec.progress_defs
        .iter()
        .map(|p| {
            let mut actions = BTreeSet::new();
            for pat in &p.actions {
                actions.extend(expand_pattern(pat, &Env::new(), spec)?.into_iter().map(|(l, _)| l));
            }
            Ok(Progress { name: p.name.clone(), actions })
        })
        .collect()
}

/// A progress property is violated when some terminal set contains none of
/// its actions. One violation per property, for the offending terminal set
/// reached first.
pub fn check_progress(lts: &Lts, progress: &[Progress]) -> (Vec<Violation>, Vec<Warning>) {
    let sets = terminal_sets(lts);
    let b = bfs(lts);
    let mut set_of = vec![usize::MAX; lts.num_states()];
    for (i, ts) in sets.iter().enumerate() {
        for &s in &ts.states {
            set_of[s] = i;
        }
    }
    let mut violations = Vec::new();
    let mut warnings = Vec::new();
    for p in progress {
        for l in &p.actions {
            if lts.label_index(l).is_none() {
                warnings.push(Warning::UnknownProgressLabel { progress: p.name.clone(), label: l.clone() });
            }
        }
        let wanted: BTreeSet<usize> = p.actions.iter().filter_map(|l| lts.label_index(l)).collect();
        let offends = |i: usize| sets[i].labels.iter().all(|l| !wanted.contains(l));
        let entry = b.order.iter().copied().find(|&s| set_of[s] != usize::MAX && offends(set_of[s]));
        if let Some(s) = entry {
            let members: BTreeSet<usize> = sets[set_of[s]].states.iter().copied().collect();
            violations.push(Violation {
                kind: ViolationKind::Progress,
                subject: p.name.clone(),
                trace: b.trace_to(lts, s),
                cycle: Some(cycle_within(lts, &members, s)),
                note: None,
            });
        }
    }
    (violations, warnings)
}

/// Runs every check on `lts`. `warnings` carries diagnostics from building
/// the target.
pub fn run_all(lts: &Lts, progress: &[Progress], warnings: &[Warning]) -> Report {
    let start = Instant::now();
    let mut violations = Vec::new();
    violations.extend(check_safety(lts));
    violations.extend(check_deadlock(lts));
    let (pv, pw) = check_progress(lts, progress);
    violations.extend(pv);
    let terminal_sets = terminal_sets(lts).len();
    Report {
        target: lts.name.clone(),
        stats: Stats {
            states: lts.num_states(),
            transitions: lts.num_transitions(),
            alphabet: lts.alphabet.len(),
            elapsed_ms: start.elapsed().as_millis() as u64,
        },
        violations,
        warnings: warnings.iter().chain(&pw).map(ToString::to_string).collect(),
        terminal_sets,
    }
}

/// Follows `trace` from state 0, taking the first matching transition at
/// each step. Returns the final position, or `None` if the trace is not
/// executable.
pub fn replay(lts: &Lts, trace: &[Label]) -> Option<Target> {
    let mut cur = Target::State(0);
    for l in trace {
        let s = cur.state()?;
        let li = lts.label_index(l)?;
        cur = lts.successors(s, li).next()?;
    }
    Some(cur)
}
