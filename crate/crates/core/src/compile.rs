//! Expansion of FSP-lite process definitions into LTSs.
//!
//! Every point in a process body (a local's root, or the remainder of an
//! action sequence) is a template node. A state is identified by its node
//! together with the values of the variables free in that node; variables
//! the remaining behaviour does not mention are dropped from the key, so
//! `readSign[s:R] -> movetonext -> P` shares one continuation state for all
//! values of `s`.
//!
//! States are numbered breadth-first from the entry; the successors of a
//! state are visited in label order, ties in syntactic order.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::label::{Label, LabelPart};
use crate::lts::{Lts, Target};
use crate::syntax::{
    eval_bool, eval_int, ActionElem, Env, EvalError, Expr, LabelPattern, LabelSeg, ProcExpr, Spec,
};

pub const DEFAULT_STATE_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("state limit of {0} exceeded")]
    StateLimitExceeded(usize),
    #[error("unresolved reference `{0}`")]
    UnresolvedReference(String),
    #[error("no process or composite named `{0}`")]
    UnknownTarget(String),
    #[error("in `{context}`: {source}")]
    Eval { context: String, source: EvalError },
    #[error("index {value} outside the declared range of `{name}`")]
    RangeIndexOutOfBounds { name: String, value: i64 },
    #[error("property is nondeterministic: state {state} has several transitions on `{label}`")]
    NondeterministicProperty { state: usize, label: Label },
    #[error("unguarded recursion through `{0}`")]
    UnguardedRecursion(String),
    #[error("`{0}` starts in ERROR")]
    ErrorEntry(String),
    #[error("`{name}` expects {expected} argument(s), found {found}")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("composite `{0}` refers to itself")]
    CompositeCycle(String),
}

type NodeId = usize;

const STOP: NodeId = 0;
const END: NodeId = 1;
const ERROR: NodeId = 2;

enum Node<'s> {
    Stop,
    End,
    Error,
    Ref {
        def: usize,
        local: usize,
        args: &'s [Expr],
    },
    Choice {
        branches: Vec<TBranch<'s>>,
        /// Guards of `| END` alternatives.
        terminal: Vec<Option<&'s Expr>>,
    },
}

struct TBranch<'s> {
    guard: Option<&'s Expr>,
    action: &'s ActionElem,
    next: NodeId,
}

/// Node graph for every local of every definition in a spec.
struct Template<'s> {
    spec: &'s Spec,
    nodes: Vec<Node<'s>>,
    /// Variables free in each node, sorted.
    free: Vec<Vec<String>>,
    /// Root node per (definition, local).
    roots: Vec<Vec<NodeId>>,
    /// Human-readable owner of each node, for diagnostics.
    owner: Vec<String>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct StateKey {
    node: NodeId,
    values: Vec<Option<i64>>,
}

enum Resolved {
    Error,
    State(StateKey),
}

impl<'s> Template<'s> {
    fn new(spec: &'s Spec) -> Result<Self, CompileError> {
        let mut t = Template {
            spec,
            nodes: vec![Node::Stop, Node::End, Node::Error],
            free: vec![Vec::new(), Vec::new(), Vec::new()],
            roots: Vec::new(),
            owner: vec!["STOP".into(), "END".into(), "ERROR".into()],
        };
        for (d, def) in spec.process_defs.iter().enumerate() {
            let mut roots = Vec::new();
            for local in &def.locals {
                roots.push(t.build(d, &local.name, &local.body)?);
            }
            t.roots.push(roots);
        }
        Ok(t)
    }

    fn push(&mut self, node: Node<'s>, owner: &str) -> NodeId {
        let free = match &node {
            Node::Stop | Node::End | Node::Error => BTreeSet::new(),
            Node::Ref { args, .. } => {
                let mut s = BTreeSet::new();
                args.iter().for_each(|a| a.vars(&mut s));
                s
            }
            Node::Choice { branches, terminal } => {
                let mut s = BTreeSet::new();
                for g in terminal.iter().flatten() {
                    g.vars(&mut s);
                }
                for b in branches {
                    if let Some(g) = b.guard {
                        g.vars(&mut s);
                    }
                    let bound = action_vars(b.action, &mut s);
                    s.extend(self.free[b.next].iter().filter(|v| !bound.contains(*v)).cloned());
                }
                s
            }
        };
        self.nodes.push(node);
        self.free.push(free.into_iter().collect());
        self.owner.push(owner.to_string());
        self.nodes.len() - 1
    }

    fn build(&mut self, def: usize, owner: &str, e: &'s ProcExpr) -> Result<NodeId, CompileError> {
        Ok(match e {
            ProcExpr::Stop => STOP,
            ProcExpr::End => END,
            ProcExpr::Error => ERROR,
            ProcExpr::Reference { name, args } => {
                let (d, l) = self.lookup(def, name)?;
                self.push(Node::Ref { def: d, local: l, args }, owner)
            }
            ProcExpr::Choice(bs) => {
                let mut branches = Vec::new();
                let mut terminal = Vec::new();
                for b in bs {
                    if b.is_terminal() {
                        terminal.push(b.guard.as_ref());
                        continue;
                    }
                    let mut next = self.build(def, owner, &b.continuation)?;
                    for action in b.actions[1..].iter().rev() {
                        let tb = TBranch { guard: None, action, next };
                        next = self.push(Node::Choice { branches: vec![tb], terminal: vec![] }, owner);
                    }
                    branches.push(TBranch { guard: b.guard.as_ref(), action: &b.actions[0], next });
                }
                self.push(Node::Choice { branches, terminal }, owner)
            }
        })
    }

    fn lookup(&self, def: usize, name: &str) -> Result<(usize, usize), CompileError> {
        if let Some((l, _)) = self.spec.process_defs[def].local(name) {
            return Ok((def, l));
        }
        self.spec
            .process_defs
            .iter()
            .position(|d| d.name == name)
            .map(|d| (d, 0))
            .ok_or_else(|| CompileError::UnresolvedReference(name.to_string()))
    }

    fn eval_err(&self, node: NodeId) -> impl Fn(EvalError) -> CompileError + '_ {
        move |source| CompileError::Eval { context: self.owner[node].clone(), source }
    }

    /// Binds a local's parameters, checking each value against its range.
    fn enter(&self, def: usize, local: usize, values: &[i64]) -> Result<(NodeId, Env), CompileError> {
        let ld = &self.spec.process_defs[def].locals[local];
        if ld.params.len() != values.len() {
            return Err(CompileError::ArityMismatch {
                name: ld.name.clone(),
                expected: ld.params.len(),
                found: values.len(),
            });
        }
        let mut env = Env::new();
        for (p, v) in ld.params.iter().zip(values) {
            let (lo, hi) = self
                .spec
                .range_bounds(&p.range)
                .ok_or_else(|| CompileError::UnresolvedReference(format!("{:?}", p.range)))?;
            if *v < lo || *v > hi {
                return Err(CompileError::RangeIndexOutOfBounds { name: ld.name.clone(), value: *v });
            }
            env.insert(p.var.clone(), *v);
        }
        Ok((self.roots[def][local], env))
    }

    /// Follows references until reaching a node that owns a state.
    fn resolve(&self, mut node: NodeId, mut env: Env) -> Result<Resolved, CompileError> {
        let mut hops = 0;
        loop {
            match &self.nodes[node] {
                Node::Ref { def, local, args } => {
                    let values = args
                        .iter()
                        .map(|a| eval_int(a, &env, &self.spec.constants))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(self.eval_err(node))?;
                    (node, env) = self.enter(*def, *local, &values)?;
                    hops += 1;
                    if hops > self.nodes.len() {
                        return Err(CompileError::UnguardedRecursion(self.owner[node].clone()));
                    }
                }
                Node::Error => return Ok(Resolved::Error),
                _ => {
                    let values = self.free[node].iter().map(|v| env.get(v).copied()).collect();
                    return Ok(Resolved::State(StateKey { node, values }));
                }
            }
        }
    }

    fn env_of(&self, key: &StateKey) -> Env {
        self.free[key.node]
            .iter()
            .zip(&key.values)
            .filter_map(|(k, v)| v.map(|v| (k.clone(), v)))
            .collect()
    }

    /// Outgoing transitions of a state (in syntactic order) and whether it
    /// may terminate successfully.
    fn expand(&self, key: &StateKey) -> Result<(Vec<(Label, Resolved)>, bool), CompileError> {
        let env = self.env_of(key);
        let consts = &self.spec.constants;
        let (branches, terminal) = match &self.nodes[key.node] {
            Node::Choice { branches, terminal } => (branches, terminal),
            Node::End => return Ok((Vec::new(), true)),
            _ => return Ok((Vec::new(), false)),
        };
        let mut accepting = false;
        for g in terminal {
            let ok = match g {
                Some(g) => eval_bool(g, &env, consts).map_err(self.eval_err(key.node))?,
                None => true,
            };
            accepting |= ok;
        }
        let mut out = Vec::new();
        for b in branches {
            if let Some(g) = b.guard {
                if !eval_bool(g, &env, consts).map_err(self.eval_err(key.node))? {
                    continue;
                }
            }
            for (label, env2) in self.expand_action(b.action, &env).map_err(self.eval_err(key.node))? {
                out.push((label, self.resolve(b.next, env2)?));
            }
        }
        Ok((out, accepting))
    }

    fn expand_action(&self, action: &ActionElem, env: &Env) -> Result<Vec<(Label, Env)>, EvalError> {
        match action {
            ActionElem::Label(p) => expand_pattern(p, env, self.spec),
            ActionElem::Set(ps) => {
                let mut out = Vec::new();
                for p in ps {
                    for (l, _) in expand_pattern(p, env, self.spec)? {
                        out.push((l, env.clone()));
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Collects free variables of an action into `free` and returns the
/// variables it binds.
fn action_vars(action: &ActionElem, free: &mut BTreeSet<String>) -> BTreeSet<String> {
    let mut bound = BTreeSet::new();
    let patterns: &[LabelPattern] = match action {
        ActionElem::Label(p) => std::slice::from_ref(p),
        ActionElem::Set(ps) => ps,
    };
    for p in patterns {
        for seg in &p.0 {
            match seg {
                LabelSeg::Word(_) => {}
                LabelSeg::Index(e) => {
                    let mut vs = BTreeSet::new();
                    e.vars(&mut vs);
                    free.extend(vs.into_iter().filter(|v| !bound.contains(v)));
                }
                LabelSeg::Bind { var, .. } => {
                    if let (Some(v), ActionElem::Label(_)) = (var, action) {
                        bound.insert(v.clone());
                    }
                }
            }
        }
    }
    bound
}

/// All concrete labels a pattern denotes under `env`, each with the
/// environment extended by the pattern's bindings.
pub fn expand_pattern(p: &LabelPattern, env: &Env, spec: &Spec) -> Result<Vec<(Label, Env)>, EvalError> {
    let mut acc: Vec<(Vec<LabelPart>, Env)> = vec![(Vec::new(), env.clone())];
    for seg in &p.0 {
        match seg {
            LabelSeg::Word(w) => acc.iter_mut().for_each(|(parts, _)| parts.push(LabelPart::Word(w.clone()))),
            LabelSeg::Index(e) => {
                for (parts, env) in acc.iter_mut() {
                    parts.push(LabelPart::Num(eval_int(e, env, &spec.constants)?));
                }
            }
            LabelSeg::Bind { var, range } => {
                let (lo, hi) = spec
                    .range_bounds(range)
                    .ok_or_else(|| EvalError::UnboundVariable(format!("{range:?}")))?;
                let mut next = Vec::new();
                for (parts, env) in acc {
                    for v in lo..=hi {
                        let mut parts = parts.clone();
                        parts.push(LabelPart::Num(v));
                        let mut env = env.clone();
                        if let Some(var) = var {
                            env.insert(var.clone(), v);
                        }
                        next.push((parts, env));
                    }
                }
                acc = next;
            }
        }
    }
    Ok(acc.into_iter().map(|(parts, env)| (Label::new(parts), env)).collect())
}

/// Compiles top-level process `name`; entry parameters default to the
/// lower bound of their ranges.
pub fn compile_process(spec: &Spec, name: &str, limit: usize) -> Result<Lts, CompileError> {
    let def = spec.process(name).ok_or_else(|| CompileError::UnknownTarget(name.to_string()))?;
    let args: Vec<i64> = def
        .entry()
        .params
        .iter()
        .map(|p| spec.range_bounds(&p.range).map(|(lo, _)| lo).unwrap_or(0))
        .collect();
    compile_process_with_args(spec, name, &args, limit)
}

pub fn compile_process_with_args(spec: &Spec, name: &str, args: &[i64], limit: usize) -> Result<Lts, CompileError> {
    let d = spec
        .process_defs
        .iter()
        .position(|p| p.name == name)
        .ok_or_else(|| CompileError::UnknownTarget(name.to_string()))?;
    let t = Template::new(spec)?;
    let (root, env) = t.enter(d, 0, args)?;
    let initial = match t.resolve(root, env)? {
        Resolved::State(k) => k,
        Resolved::Error => return Err(CompileError::ErrorEntry(name.to_string())),
    };

    let mut index: HashMap<StateKey, usize> = HashMap::new();
    let mut keys = vec![initial.clone()];
    index.insert(initial, 0);
    let mut raw: Vec<Vec<(Label, Target)>> = Vec::new();
    let mut end_states = BTreeSet::new();
    let mut stop_states = BTreeSet::new();

    let mut s = 0;
    while s < keys.len() {
        let key = keys[s].clone();
        if key.node == STOP {
            stop_states.insert(s);
        }
        let (mut succ, accepting) = t.expand(&key)?;
        if accepting {
            end_states.insert(s);
        }
        succ.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out = Vec::with_capacity(succ.len());
        for (label, r) in succ {
            let target = match r {
                Resolved::Error => Target::Error,
                Resolved::State(k) => match index.get(&k) {
                    Some(&i) => Target::State(i),
                    None => {
                        if keys.len() >= limit {
                            return Err(CompileError::StateLimitExceeded(limit));
                        }
                        index.insert(k.clone(), keys.len());
                        keys.push(k);
                        Target::State(keys.len() - 1)
                    }
                },
            };
            out.push((label, target));
        }
        raw.push(out);
        s += 1;
    }

    let alphabet: Vec<Label> = raw
        .iter()
        .flatten()
        .map(|(l, _)| l.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let transitions = raw
        .into_iter()
        .map(|ts| {
            let mut v: Vec<(usize, Target)> = ts
                .into_iter()
                .map(|(l, t)| (alphabet.binary_search(&l).unwrap(), t))
                .collect();
            v.sort();
            v.dedup();
            v
        })
        .collect();
    Ok(Lts {
        name: name.to_string(),
        alphabet,
        transitions,
        end_states,
        stop_states,
    })
}

/// Completes a deterministic property automaton: every missing alphabet
/// label on a non-end state leads to ERROR.
pub fn make_property(lts: &Lts) -> Result<Lts, CompileError> {
    let mut out = lts.clone();
    for (s, ts) in out.transitions.iter_mut().enumerate() {
        if let Some(w) = ts.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(CompileError::NondeterministicProperty { state: s, label: lts.alphabet[w[0].0].clone() });
        }
        if lts.end_states.contains(&s) {
            continue;
        }
        let present: BTreeSet<usize> = ts.iter().map(|(l, _)| *l).collect();
        ts.extend((0..lts.alphabet.len()).filter(|l| !present.contains(l)).map(|l| (l, Target::Error)));
        ts.sort();
    }
    Ok(out)
}

pub fn alphabet_of(lts: &Lts) -> &[Label] {
    &lts.alphabet
}
