//! Parallel composition with synchronization on shared labels.

use std::collections::{BTreeSet, HashMap};

use crate::compile::{compile_process_with_args, expand_pattern, make_property, CompileError};
use crate::label::Label;
use crate::lts::{Lts, Target};
use crate::syntax::{eval_int, Env, LabelPattern, Spec};

/// A non-fatal diagnostic collected while building or checking a target.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Warning {
    UnknownOldLabel(Label),
    UnknownProgressLabel { progress: String, label: Label },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::UnknownOldLabel(l) => write!(f, "relabel: `{l}` is not in any component alphabet"),
            Warning::UnknownProgressLabel { progress, label } => {
                write!(f, "progress {progress}: `{label}` is not in the alphabet")
            }
        }
    }
}

/// Prefix labeling: every label `l` becomes `prefix.l`.
pub fn apply_prefix(lts: &Lts, prefix: &Label) -> Lts {
    lts.map_labels(|l| l.prefixed(prefix))
}

/// Renames labels by `(new, old)` pairs, applied simultaneously. A pair
/// also renames labels that have `old` as a leading prefix. Labels that
/// collide after renaming are merged.
pub fn apply_relabel(lts: &Lts, pairs: &[(Label, Label)]) -> (Lts, Vec<Warning>) {
    let warnings = pairs
        .iter()
        .filter(|(_, old)| !lts.alphabet.iter().any(|l| l.starts_with(old)))
        .map(|(_, old)| Warning::UnknownOldLabel(old.clone()))
        .collect();
    let out = lts.map_labels(|l| {
        pairs
            .iter()
            .find_map(|(new, old)| l.replace_prefix(old, new))
            .unwrap_or_else(|| l.clone())
    });
    (out, warnings)
}

/// Parallel composition, explored breadth-first from the tuple of initial
/// states. A label shared by several parts fires only when all of them
/// can take it; other labels interleave. If any moving part enters ERROR
/// the composed target is ERROR.
///
/// Numbering: states are indexed in BFS order; successors are visited by
/// label, then by target tuple (component indices lexicographically, ERROR
/// last).
pub fn compose(name: &str, parts: &[Lts], limit: usize) -> Result<Lts, CompileError> {
    assert!(!parts.is_empty(), "compose needs at least one part");
    if parts.len() == 1 {
        if parts[0].num_states() > limit {
            return Err(CompileError::StateLimitExceeded(limit));
        }
        let mut only = parts[0].clone();
        only.name = name.to_string();
        return Ok(only);
    }

    let alphabet: Vec<Label> = parts
        .iter()
        .flat_map(|p| p.alphabet.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    // participants[l] = (part, part-local label index) for every owner of l
    let participants: Vec<Vec<(usize, usize)>> = alphabet
        .iter()
        .map(|l| {
            parts
                .iter()
                .enumerate()
                .filter_map(|(i, p)| p.label_index(l).map(|j| (i, j)))
                .collect()
        })
        .collect();
    let behaving: Vec<usize> = {
        let v: Vec<usize> = (0..parts.len()).filter(|i| !parts[*i].alphabet.is_empty()).collect();
        if v.is_empty() {
            (0..parts.len()).collect()
        } else {
            v
        }
    };

    let initial = vec![0u32; parts.len()];
    let mut index: HashMap<Vec<u32>, usize> = HashMap::from([(initial.clone(), 0)]);
    let mut tuples = vec![initial];
    let mut transitions: Vec<Vec<(usize, Target)>> = Vec::new();
    let mut end_states = BTreeSet::new();
    let mut stop_states = BTreeSet::new();

    let mut s = 0;
    let mut choices: Vec<Vec<Target>> = Vec::new();
    while s < tuples.len() {
        let tuple = tuples[s].clone();
        if behaving.iter().all(|&i| parts[i].end_states.contains(&(tuple[i] as usize))) {
            end_states.insert(s);
        }
        if (0..parts.len()).all(|i| parts[i].stop_states.contains(&(tuple[i] as usize))) {
            stop_states.insert(s);
        }
        let mut out = Vec::new();
        for (l, owners) in participants.iter().enumerate() {
            choices.clear();
            let mut enabled = true;
            for &(p, pl) in owners {
                let ts: Vec<Target> = parts[p].successors(tuple[p] as usize, pl).collect();
                if ts.is_empty() {
                    enabled = false;
                    break;
                }
                choices.push(ts);
            }
            if !enabled {
                continue;
            }
            // odometer over the participants' successor lists
            let mut pick = vec![0usize; owners.len()];
            'product: loop {
                let mut next = tuple.clone();
                let mut error = false;
                for (k, &(p, _)) in owners.iter().enumerate() {
                    match choices[k][pick[k]] {
                        Target::State(t) => next[p] = t as u32,
                        Target::Error => error = true,
                    }
                }
                let target = if error {
                    Target::Error
                } else if let Some(&i) = index.get(&next) {
                    Target::State(i)
                } else {
                    if tuples.len() >= limit {
                        return Err(CompileError::StateLimitExceeded(limit));
                    }
                    index.insert(next.clone(), tuples.len());
                    tuples.push(next);
                    Target::State(tuples.len() - 1)
                };
                out.push((l, target));
                let mut k = owners.len();
                loop {
                    if k == 0 {
                        break 'product;
                    }
                    k -= 1;
                    pick[k] += 1;
                    if pick[k] < choices[k].len() {
                        break;
                    }
                    pick[k] = 0;
                }
            }
        }
        out.sort();
        out.dedup();
        transitions.push(out);
        s += 1;
    }

    Ok(Lts {
        name: name.to_string(),
        alphabet,
        transitions,
        end_states,
        stop_states,
    })
}

/// Memo of compiled processes keyed by name and entry arguments.
pub type CompiledCache = HashMap<(String, Vec<i64>), Lts>;

fn concrete_labels(p: &LabelPattern, spec: &Spec) -> Result<Vec<Label>, CompileError> {
    Ok(expand_pattern(p, &Env::new(), spec)
        .map_err(|source| CompileError::Eval { context: "label".into(), source })?
        .into_iter()
        .map(|(l, _)| l)
        .collect())
}

/// Builds the LTS of a composite definition. Replicated labelings expand
/// into one prefixed copy per index; relabels are applied to every
/// component before composing. Property processes are completed first.
pub fn build_composite(
    spec: &Spec,
    name: &str,
    cache: &mut CompiledCache,
    limit: usize,
) -> Result<(Lts, Vec<Warning>), CompileError> {
    build_composite_inner(spec, name, cache, limit, &mut Vec::new())
}

fn build_composite_inner(
    spec: &Spec,
    name: &str,
    cache: &mut CompiledCache,
    limit: usize,
    stack: &mut Vec<String>,
) -> Result<(Lts, Vec<Warning>), CompileError> {
    let def = spec.composite(name).ok_or_else(|| CompileError::UnknownTarget(name.to_string()))?;
    if stack.iter().any(|n| n == name) {
        return Err(CompileError::CompositeCycle(name.to_string()));
    }
    stack.push(name.to_string());
    let mut warnings = Vec::new();
    let mut parts = Vec::new();
    for comp in &def.components {
        let base = if spec.composite(&comp.target).is_some() {
            let (l, w) = build_composite_inner(spec, &comp.target, cache, limit, stack)?;
            warnings.extend(w);
            l
        } else {
            let args = comp
                .args
                .iter()
                .map(|a| eval_int(a, &Env::new(), &spec.constants))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|source| CompileError::Eval { context: comp.target.clone(), source })?;
            compiled(spec, &comp.target, &args, cache, limit)?
        };
        match &comp.labeling {
            None => parts.push(base),
            Some(p) => {
                for prefix in concrete_labels(p, spec)? {
                    parts.push(apply_prefix(&base, &prefix));
                }
            }
        }
    }
    stack.pop();

    if !def.relabels.is_empty() {
        let mut pairs = Vec::new();
        for r in &def.relabels {
            let new = concrete_labels(&r.new, spec)?;
            let old = concrete_labels(&r.old, spec)?;
            pairs.extend(new.into_iter().zip(old));
        }
        for (_, old) in &pairs {
            if !parts.iter().any(|p| p.alphabet.iter().any(|l| l.starts_with(old))) {
                warnings.push(Warning::UnknownOldLabel(old.clone()));
            }
        }
        parts = parts.iter().map(|p| apply_relabel(p, &pairs).0).collect();
    }
    Ok((compose(name, &parts, limit)?, warnings))
}

fn compiled(spec: &Spec, name: &str, args: &[i64], cache: &mut CompiledCache, limit: usize) -> Result<Lts, CompileError> {
    let key = (name.to_string(), args.to_vec());
    if let Some(l) = cache.get(&key) {
        return Ok(l.clone());
    }
    let def = spec.process(name).ok_or_else(|| CompileError::UnknownTarget(name.to_string()))?;
    let mut lts = if args.is_empty() && !def.entry().params.is_empty() {
        crate::compile::compile_process(spec, name, limit)?
    } else {
        compile_process_with_args(spec, name, args, limit)?
    };
    if spec.is_property(name) {
        lts = make_property(&lts)?;
    }
    cache.insert(key, lts.clone());
    Ok(lts)
}

/// Compiles a process (completing it if it is a property) or builds a
/// composite.
pub fn build_target(spec: &Spec, name: &str, limit: usize) -> Result<(Lts, Vec<Warning>), CompileError> {
    let mut cache = CompiledCache::new();
    if spec.composite(name).is_some() {
        build_composite(spec, name, &mut cache, limit)
    } else {
        Ok((compiled(spec, name, &[], &mut cache, limit)?, Vec::new()))
    }
}
