//! Brute-force oracles shared by the integration tests. None of them reuse
//! the library's construction code; they only read its data types.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::path::PathBuf;

use fspv_core::gaia::LivenessExpr;
use fspv_core::{Label, Lts, Target};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus_file(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(name)).unwrap()
}

pub fn label(s: &str) -> Label {
    s.parse().unwrap()
}

// ---- naive product ----

/// Materializes every tuple of the full product with its transitions,
/// then numbers the part reachable from the initial tuple breadth-first
/// (label order, then target tuple, ERROR last).
pub fn naive_product(name: &str, parts: &[Lts]) -> Lts {
    let alphabet: Vec<Label> = parts
        .iter()
        .flat_map(|p| p.alphabet.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let sizes: Vec<usize> = parts.iter().map(Lts::num_states).collect();
    let mut all: Vec<Vec<usize>> = vec![vec![]];
    for &n in &sizes {
        all = all
            .into_iter()
            .flat_map(|t| (0..n).map(move |s| {
                let mut t = t.clone();
                t.push(s);
                t
            }))
            .collect();
    }
    // tuple -> [(label index, Some(tuple) | None for ERROR)]
    let mut moves: HashMap<Vec<usize>, Vec<(usize, Option<Vec<usize>>)>> = HashMap::new();
    for tuple in &all {
        let mut out = Vec::new();
        for (li, l) in alphabet.iter().enumerate() {
            let owners: Vec<usize> = (0..parts.len()).filter(|&i| parts[i].alphabet.contains(l)).collect();
            let mut combos: Vec<Option<Vec<usize>>> = vec![Some(tuple.clone())];
            for &i in &owners {
                let own_label = parts[i].alphabet.iter().position(|x| x == l).unwrap();
                let targets: Vec<Target> = parts[i].transitions[tuple[i]]
                    .iter()
                    .filter(|(x, _)| *x == own_label)
                    .map(|(_, t)| *t)
                    .collect();
                let mut next = Vec::new();
                for c in &combos {
                    for t in &targets {
                        next.push(match (c, t) {
                            (Some(c), Target::State(s)) => {
                                let mut c = c.clone();
                                c[i] = *s;
                                Some(c)
                            }
                            _ => None,
                        });
                    }
                }
                combos = next;
            }
            out.extend(combos.into_iter().map(|c| (li, c)));
        }
        moves.insert(tuple.clone(), out);
    }

    let init = vec![0; parts.len()];
    let mut index = HashMap::from([(init.clone(), 0usize)]);
    let mut order = vec![init];
    let mut transitions = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut ms = moves[&order[i]].clone();
        // None sorts first in Option; ERROR must come last
        ms.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| match (&a.1, &b.1) {
            (None, None) => std::cmp::Ordering::Equal,
            (None, _) => std::cmp::Ordering::Greater,
            (_, None) => std::cmp::Ordering::Less,
            (Some(x), Some(y)) => x.cmp(y),
        }));
        let mut out = Vec::new();
        for (l, t) in ms {
            let target = match t {
                None => Target::Error,
                Some(t) => {
                    let next = order.len();
                    let k = *index.entry(t.clone()).or_insert(next);
                    if k == next {
                        order.push(t);
                    }
                    Target::State(k)
                }
            };
            out.push((l, target));
        }
        out.sort();
        out.dedup();
        transitions.push(out);
        i += 1;
    }
    let behaving: Vec<usize> = {
        let v: Vec<usize> = (0..parts.len()).filter(|&i| !parts[i].alphabet.is_empty()).collect();
        if v.is_empty() { (0..parts.len()).collect() } else { v }
    };
    let end_states = (0..order.len())
        .filter(|&k| behaving.iter().all(|&j| parts[j].end_states.contains(&order[k][j])))
        .collect();
    let stop_states = (0..order.len())
        .filter(|&k| (0..parts.len()).all(|j| parts[j].stop_states.contains(&order[k][j])))
        .collect();
    Lts { name: name.to_string(), alphabet, transitions, end_states, stop_states }
}

// ---- projection ----

/// Checks that every trace of `composed`, restricted to `part`'s alphabet,
/// is a trace of `part`, by exploring (composed state, set of part states)
/// pairs. Returns a counterexample trace on failure.
pub fn projection_violation(composed: &Lts, part: &Lts) -> Option<Vec<Label>> {
    type Node = (usize, BTreeSet<usize>);
    let start: Node = (0, BTreeSet::from([0]));
    let mut parent: HashMap<Node, Option<(Node, Label)>> = HashMap::from([(start.clone(), None)]);
    let mut queue = VecDeque::from([start]);
    let trace = |parent: &HashMap<Node, Option<(Node, Label)>>, mut n: Node, last: Label| {
        let mut out = vec![last];
        while let Some(Some((p, l))) = parent.get(&n) {
            out.push(l.clone());
            n = p.clone();
        }
        out.reverse();
        out
    };
    while let Some((s, set)) = queue.pop_front() {
        for &(l, t) in &composed.transitions[s] {
            let Target::State(t) = t else { continue };
            let lab = composed.alphabet[l].clone();
            let next_set = match part.alphabet.iter().position(|x| *x == lab) {
                None => set.clone(),
                Some(pl) => {
                    let n: BTreeSet<usize> = set
                        .iter()
                        .flat_map(|&q| part.transitions[q].iter().filter(move |(x, _)| *x == pl))
                        .filter_map(|(_, t)| t.state())
                        .collect();
                    if n.is_empty() {
                        return Some(trace(&parent, (s, set.clone()), lab));
                    }
                    n
                }
            };
            let node = (t, next_set);
            if !parent.contains_key(&node) {
                parent.insert(node.clone(), Some(((s, set.clone()), lab)));
                queue.push_back(node);
            }
        }
    }
    None
}

// ---- shortest paths ----

/// Distances from state 0 by repeated relaxation (no queue discipline).
pub fn distances(lts: &Lts) -> Vec<Option<usize>> {
    let mut d: Vec<Option<usize>> = vec![None; lts.num_states()];
    d[0] = Some(0);
    loop {
        let mut changed = false;
        for s in 0..lts.num_states() {
            let Some(ds) = d[s] else { continue };
            for (_, t) in &lts.transitions[s] {
                if let Target::State(t) = t {
                    if d[*t].is_none_or(|dt| dt > ds + 1) {
                        d[*t] = Some(ds + 1);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return d;
        }
    }
}

/// States reachable from `from` (inclusive), ERROR edges ignored.
pub fn reachable_from(lts: &Lts, from: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([from]);
    let mut stack = vec![from];
    while let Some(s) = stack.pop() {
        for (_, t) in &lts.transitions[s] {
            if let Target::State(t) = t {
                if seen.insert(*t) {
                    stack.push(*t);
                }
            }
        }
    }
    seen
}

// ---- regular-expression oracle ----

/// All words of `e` with at most `max` letters, by set semantics.
pub fn language(e: &LivenessExpr, defs: &BTreeMap<String, LivenessExpr>, max: usize) -> BTreeSet<Vec<String>> {
    use LivenessExpr::*;
    let concat = |a: &BTreeSet<Vec<String>>, b: &BTreeSet<Vec<String>>| {
        let mut out = BTreeSet::new();
        for x in a {
            for y in b {
                if x.len() + y.len() <= max {
                    out.insert(x.iter().chain(y).cloned().collect());
                }
            }
        }
        out
    };
    let star = |a: &BTreeSet<Vec<String>>| {
        let mut acc: BTreeSet<Vec<String>> = BTreeSet::from([vec![]]);
        loop {
            let next: BTreeSet<Vec<String>> = acc.union(&concat(&acc, a)).cloned().collect();
            if next == acc {
                return acc;
            }
            acc = next;
        }
    };
    match e {
        Atom(a) => {
            if max >= 1 {
                BTreeSet::from([vec![a.clone()]])
            } else {
                BTreeSet::new()
            }
        }
        Ref(r) => language(&defs[r], defs, max),
        Seq(v) => v.iter().fold(BTreeSet::from([vec![]]), |acc, x| concat(&acc, &language(x, defs, max))),
        Choice(v) => v.iter().flat_map(|x| language(x, defs, max)).collect(),
        Star(x) => star(&language(x, defs, max)),
        Plus(x) => {
            let l = language(x, defs, max);
            concat(&l, &star(&l))
        }
        Optional(x) => {
            let mut l = language(x, defs, max);
            l.insert(vec![]);
            l
        }
    }
}

/// Label sequences from state 0 to an end state, at most `max` long.
pub fn complete_traces(lts: &Lts, max: usize) -> BTreeSet<Vec<String>> {
    fn go(lts: &Lts, s: usize, path: &mut Vec<String>, max: usize, out: &mut BTreeSet<Vec<String>>) {
        if lts.end_states.contains(&s) {
            out.insert(path.clone());
        }
        if path.len() == max {
            return;
        }
        for &(l, t) in &lts.transitions[s] {
            if let Target::State(t) = t {
                path.push(lts.alphabet[l].to_string());
                go(lts, t, path, max, out);
                path.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(lts, 0, &mut Vec::new(), max, &mut out);
    out
}

// ---- random LTSs ----

/// A small random LTS over labels `l0..l{k}` (offset by `label_base`).
/// When `cyclic`, 0 -> 1 -> ... -> n-1 -> 0 is included, so every state is
/// reachable and the graph is strongly connected. Unreachable states are
/// trimmed otherwise.
pub fn random_lts(
    n: usize,
    labels: &[&str],
    edges: &[(usize, usize, usize)],
    cyclic: bool,
) -> Lts {
    let alphabet_all: Vec<Label> = labels.iter().map(|s| Label::word(*s)).collect();
    let mut raw: Vec<BTreeSet<(Label, usize)>> = vec![BTreeSet::new(); n];
    for &(s, l, t) in edges {
        raw[s % n].insert((alphabet_all[l % labels.len()].clone(), t % n));
    }
    if cyclic {
        for s in 0..n {
            raw[s].insert((alphabet_all[s % labels.len()].clone(), (s + 1) % n));
        }
    }
    // renumber reachable states breadth-first
    let mut index = HashMap::from([(0usize, 0usize)]);
    let mut order = vec![0usize];
    let mut i = 0;
    while i < order.len() {
        for (_, t) in &raw[order[i]] {
            if !index.contains_key(t) {
                index.insert(*t, order.len());
                order.push(*t);
            }
        }
        i += 1;
    }
    let alphabet: Vec<Label> = order
        .iter()
        .flat_map(|s| raw[*s].iter().map(|(l, _)| l.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let transitions = order
        .iter()
        .map(|s| {
            let mut v: Vec<(usize, Target)> = raw[*s]
                .iter()
                .map(|(l, t)| (alphabet.binary_search(l).unwrap(), Target::State(index[t])))
                .collect();
            v.sort();
            v
        })
        .collect();
    Lts {
        name: "R".into(),
        alphabet,
        transitions,
        end_states: BTreeSet::new(),
        stop_states: BTreeSet::new(),
    }
}
