mod common;

use std::collections::BTreeSet;

use common::*;
use fspv_core::compile::{compile_process, make_property, CompileError};
use fspv_core::compose::build_target;
use fspv_core::syntax::parse_str;
use fspv_core::{Lts, Target, DEFAULT_STATE_LIMIT};

fn compiled(file: &str, name: &str) -> Lts {
    let spec = parse_str(&corpus_file(file)).unwrap();
    compile_process(&spec, name, DEFAULT_STATE_LIMIT).unwrap()
}

fn labels(lts: &Lts) -> Vec<String> {
    lts.alphabet.iter().map(ToString::to_string).collect()
}

#[test]
fn route_counts() {
    let r = compiled("route.fsp", "ROUTE");
    assert_eq!((r.num_states(), r.num_transitions()), (14, 31));
    let mut expected = vec!["movetonext".to_string(), "movetoprevious".to_string()];
    expected.extend((1..=9).map(|i| format!("readSign.{i}")));
    expected.extend(["readloadSign", "readunloadSign", "waitforloading", "waitforunloading"].map(String::from));
    assert_eq!(labels(&r), expected);
    let mut degrees: Vec<usize> = r.transitions.iter().map(Vec::len).collect();
    degrees.sort();
    assert_eq!(degrees, [vec![2; 11], vec![3; 3]].concat());
}

#[test]
fn carrier_counts() {
    let c = compiled("carrier.fsp", "CARRIER");
    assert_eq!((c.num_states(), c.num_transitions()), (6, 25));
    assert_eq!(c.alphabet.len(), 15);
    assert_eq!(c.transitions[0].len(), 10);
    assert!(c.to_aut().starts_with("des (0, 25, 6)\n"));
}

#[test]
fn route_never_offers_both_waits() {
    let r = compiled("route.fsp", "ROUTE");
    let load = r.label_index(&label("waitforloading")).unwrap();
    let unload = r.label_index(&label("waitforunloading")).unwrap();
    for ts in &r.transitions {
        let ls: BTreeSet<usize> = ts.iter().map(|(l, _)| *l).collect();
        assert!(!(ls.contains(&load) && ls.contains(&unload)));
    }
}

#[test]
fn compilation_is_reproducible_and_reachable() {
    for (file, name) in [("route.fsp", "ROUTE"), ("carrier.fsp", "CARRIER"), ("noloss.fsp", "NOLOSS_Stock")] {
        let a = compiled(file, name);
        let b = compiled(file, name);
        assert_eq!(a, b);
        assert!(a.validate().is_ok());
        assert_eq!(reachable_from(&a, 0).len(), a.num_states(), "{name}");
    }
}

#[test]
fn state_cap_is_an_error() {
    let spec = parse_str(&corpus_file("route.fsp")).unwrap();
    assert_eq!(compile_process(&spec, "ROUTE", 5), Err(CompileError::StateLimitExceeded(5)));
    assert!(compile_process(&spec, "ROUTE", 14).is_ok());
}

#[test]
fn noloss_property_automaton() {
    let p = make_property(&compiled("noloss.fsp", "NOLOSS_Stock")).unwrap();
    assert_eq!(p.num_states(), 4);
    assert_eq!(p.num_transitions(), 16);
    assert_eq!(labels(&p), ["empty.loaded", "full.moveto.1", "full.moveto.2", "full.unloaded"]);
    let errors = p.transitions.iter().flatten().filter(|(_, t)| *t == Target::Error).count();
    assert_eq!(errors, 12);
    for (s, ts) in p.transitions.iter().enumerate() {
        if !p.end_states.contains(&s) {
            assert_eq!(ts.len(), p.alphabet.len());
        }
        let ls: BTreeSet<usize> = ts.iter().map(|(l, _)| *l).collect();
        assert_eq!(ls.len(), ts.len(), "deterministic");
    }
    let dot = p.to_dot();
    assert_eq!(dot.matches("label=\"ERROR\"").count(), 1);
    assert_eq!(p.to_aut().lines().next(), Some("des (0, 16, 5)"));
}

#[test]
fn noloss_replicated() {
    let spec = parse_str(&corpus_file("noloss.fsp")).unwrap();
    let (lts, warnings) = build_target(&spec, "NOLOSS", DEFAULT_STATE_LIMIT).unwrap();
    assert!(warnings.is_empty());
    assert_eq!(lts.num_states(), 16);
    assert_eq!(lts.alphabet.len(), 8);
}

#[test]
fn nondeterministic_property_is_rejected() {
    let spec = parse_str("property P = (a -> b -> P | a -> c -> P).").unwrap();
    let (err, _) = (build_target(&spec, "P", 100).unwrap_err(), ());
    assert!(matches!(err, CompileError::NondeterministicProperty { .. }), "{err:?}");
}
