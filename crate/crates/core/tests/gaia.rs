mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use fspv_core::gaia::{parse_liveness_with, to_fsp, GaiaOptions, RoleLiveness};
use fspv_core::syntax::{format, parse_str};
use fspv_core::{check, Lts, Verdict, DEFAULT_STATE_LIMIT};

const MAX_LEN: usize = 8;

fn role(text: &str) -> RoleLiveness {
    parse_liveness_with(text, GaiaOptions { bang_as_choice: true }).unwrap()
}

/// Translates, prints, re-parses and compiles the role's entry.
fn emitted(r: &RoleLiveness) -> Lts {
    let text = format(&to_fsp(r));
    let spec = parse_str(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    let (lts, report) = check(&spec, None, DEFAULT_STATE_LIMIT).unwrap();
    assert!(lts.validate().is_ok());
    for ts in &lts.transitions {
        let ls: BTreeSet<usize> = ts.iter().map(|(l, _)| *l).collect();
        assert_eq!(ls.len(), ts.len(), "nondeterministic state in\n{text}");
    }
    assert!(
        report.violations.iter().all(|v| v.kind != fspv_core::ViolationKind::Deadlock),
        "accepting states must not deadlock"
    );
    lts
}

fn assert_language(r: &RoleLiveness) {
    let defs: BTreeMap<_, _> = r.definitions.iter().cloned().collect();
    let oracle = language(&r.definitions[0].1, &defs, MAX_LEN);
    let lts = emitted(r);
    assert_eq!(complete_traces(&lts, MAX_LEN), oracle, "role {}", r.role);
}

#[test]
fn move_full_role_language() {
    let text = corpus_file("move_full.gaia");
    let r = role(&text);
    assert_eq!(r.definitions.len(), 3);
    for (name, _) in &r.definitions {
        assert_language(&r.with_entry(name).unwrap());
    }
}

#[test]
fn small_expressions() {
    let wait = emitted(&role("Wait = carrierWait+"));
    assert_eq!(wait.num_states(), 2);
    assert_eq!(wait.end_states, BTreeSet::from([1]));

    let mv = emitted(&role("Move = (readSign. movetoNext)+"));
    assert_eq!(mv.num_states(), 3);
    assert_eq!(mv.end_states, BTreeSet::from([2]));
    assert_eq!(mv.to_aut(), "des (0, 3, 3)\n(0, \"readsign\", 1)\n(1, \"movetonext\", 2)\n(2, \"readsign\", 1)\n");

    let opt = emitted(&role("R = [a]"));
    assert_eq!(opt.end_states, BTreeSet::from([0, 1]));
    assert_eq!(emitted(&role("R = a")).num_states(), 2);
}

#[test]
fn assorted_languages() {
    for text in [
        "R = a.b | a.c",
        "R = (a | b)*.c",
        "R = [a.b]+",
        "R = a*.a",
        "R = (a.[b])*",
        "R = X.X\nX = a | b.c",
        "R = (a*)*",
    ] {
        assert_language(&role(text));
    }
}

#[test]
fn end_states_pass_deadlock_analysis() {
    let spec = parse_str(&format(&to_fsp(&role("R = a.b")))).unwrap();
    let (_, report) = check(&spec, None, DEFAULT_STATE_LIMIT).unwrap();
    assert_eq!(report.result(), Verdict::Pass);
}
