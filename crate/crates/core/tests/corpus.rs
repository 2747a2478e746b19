mod common;

use std::collections::{BTreeSet, HashMap, VecDeque};

use common::*;
use fspv_core::analyze::{replay, terminal_sets, ViolationKind};
use fspv_core::corpus::{golden_compare, load_corpus, SourceKind};
use fspv_core::syntax::{eval_bool, format, parse_str, Env, ProcExpr};
use fspv_core::{check, JsonReport, Target, Verdict, DEFAULT_STATE_LIMIT};

const GATED: [&str; 12] = [
    "baddriver",
    "carrier",
    "carrier_route",
    "carriers6",
    "gooddriver",
    "loader",
    "noloss",
    "progress_stop",
    "route",
    "stock",
    "transport",
    "unloader",
];

#[test]
fn corpus_loads_every_fixture() {
    let fixtures = load_corpus(&corpus_dir()).unwrap();
    let names: Vec<&str> = fixtures.iter().map(|f| f.name.as_str()).collect();
    assert_eq!(names, GATED);
    for f in &fixtures {
        assert_eq!(f.expected.schema_version, "1");
        if f.name != "carriers6" {
            assert!(f.aut_golden.is_some(), "{} lacks an .aut golden", f.name);
        }
    }
    let verbatim: BTreeSet<&str> = fixtures
        .iter()
        .filter(|f| f.source == SourceKind::Verbatim)
        .map(|f| f.name.as_str())
        .collect();
    assert_eq!(verbatim, BTreeSet::from(["carrier", "noloss", "route", "stock"]));
    let route = fixtures.iter().find(|f| f.name == "route").unwrap();
    assert_eq!(route.notes.len(), 2);
}

#[test]
fn format_is_a_fixpoint_on_the_corpus() {
    for f in load_corpus(&corpus_dir()).unwrap() {
        let once = format(&f.spec);
        let reparsed = parse_str(&once).unwrap_or_else(|e| panic!("{}: {e}\n{once}", f.name));
        assert_eq!(reparsed, f.spec, "{}", f.name);
        assert_eq!(format(&reparsed), once, "{}", f.name);
        assert_eq!(parse_str(&f.text).unwrap(), f.spec, "{}: parsing is deterministic", f.name);
    }
}

#[test]
fn reports_and_aut_match_goldens() {
    for f in load_corpus(&corpus_dir()).unwrap() {
        let (lts, report) = check(&f.spec, None, DEFAULT_STATE_LIMIT).unwrap();
        let fresh = JsonReport::from(&report);
        let diffs = golden_compare(&f.expected, &fresh);
        assert!(diffs.is_empty(), "{}: {diffs:?}", f.name);
        if let Some(golden) = &f.aut_golden {
            assert_eq!(&lts.to_aut(), golden, "{}", f.name);
        }
    }
}

#[test]
fn tampered_golden_is_reported() {
    let f = load_corpus(&corpus_dir()).unwrap().into_iter().find(|f| f.name == "route").unwrap();
    let (_, report) = check(&f.spec, None, DEFAULT_STATE_LIMIT).unwrap();
    let mut tampered = f.expected.clone();
    tampered.stats.states = 13;
    let diffs = golden_compare(&tampered, &JsonReport::from(&report));
    assert_eq!(diffs.len(), 1);
    assert!(diffs[0].starts_with("stats.states"), "{diffs:?}");
}

#[test]
fn guards_are_total_over_parameter_ranges() {
    let mut checked = 0;
    for f in load_corpus(&corpus_dir()).unwrap() {
        let spec = &f.spec;
        for def in &spec.process_defs {
            for local in &def.locals {
                let ProcExpr::Choice(branches) = &local.body else { continue };
                let mut envs = vec![Env::new()];
                for p in &local.params {
                    let (lo, hi) = spec.range_bounds(&p.range).unwrap();
                    envs = envs
                        .into_iter()
                        .flat_map(|e| {
                            (lo..=hi).map(move |v| {
                                let mut e = e.clone();
                                e.insert(p.var.clone(), v);
                                e
                            })
                        })
                        .collect();
                }
                for b in branches {
                    let Some(g) = &b.guard else { continue };
                    for env in &envs {
                        eval_bool(g, env, &spec.constants)
                            .unwrap_or_else(|e| panic!("{}: {}: {e}", f.name, local.name));
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn traces_are_shortest_and_replay() {
    for f in load_corpus(&corpus_dir()).unwrap() {
        if f.name == "carriers6" {
            continue;
        }
        let (lts, report) = check(&f.spec, None, DEFAULT_STATE_LIMIT).unwrap();
        let dist = distances(&lts);
        for v in &report.violations {
            let end = replay(&lts, &v.trace).unwrap_or_else(|| panic!("{}: trace does not replay", f.name));
            match v.kind {
                ViolationKind::Safety => {
                    assert_eq!(end, Target::Error);
                    let best = (0..lts.num_states())
                        .filter(|&s| lts.transitions[s].iter().any(|(_, t)| *t == Target::Error))
                        .filter_map(|s| dist[s])
                        .min()
                        .unwrap();
                    assert_eq!(v.trace.len(), best + 1, "{}", f.name);
                }
                ViolationKind::Deadlock => {
                    let s = end.state().unwrap();
                    assert!(lts.transitions[s].is_empty() && !lts.end_states.contains(&s));
                    let best = (0..lts.num_states())
                        .filter(|&s| lts.transitions[s].is_empty() && !lts.end_states.contains(&s))
                        .filter_map(|s| dist[s])
                        .min()
                        .unwrap();
                    assert_eq!(v.trace.len(), best, "{}", f.name);
                }
                ViolationKind::Progress => {
                    let s = end.state().unwrap();
                    let cycle = v.cycle.as_ref().unwrap();
                    let mut cur = Target::State(s);
                    for l in cycle {
                        let li = lts.label_index(l).unwrap();
                        cur = lts.successors(cur.state().unwrap(), li).next().unwrap();
                    }
                    assert_eq!(cur, Target::State(s), "{}: cycle returns to its start", f.name);
                }
            }
        }
    }
}

#[test]
fn terminal_sets_are_closed_disjoint_and_reachable() {
    for f in load_corpus(&corpus_dir()).unwrap() {
        if f.name == "carriers6" {
            continue;
        }
        let (lts, _) = check(&f.spec, None, DEFAULT_STATE_LIMIT).unwrap();
        let sets = terminal_sets(&lts);
        let mut seen = BTreeSet::new();
        for ts in &sets {
            for &s in &ts.states {
                assert!(seen.insert(s), "{}: terminal sets overlap", f.name);
                for (_, t) in &lts.transitions[s] {
                    if let Target::State(t) = t {
                        assert!(ts.states.contains(t), "{}: terminal set not closed", f.name);
                    }
                }
            }
        }
        for s in 0..lts.num_states() {
            let r = reachable_from(&lts, s);
            assert!(r.iter().any(|x| seen.contains(x)), "{}: state {s} reaches no terminal set", f.name);
        }
    }
}

#[test]
fn stock_is_conserved_on_every_path() {
    let spec = parse_str(&corpus_file("stock.fsp")).unwrap();
    let (lts, report) = check(&spec, Some("STOCKSYSTEM"), DEFAULT_STATE_LIMIT).unwrap();
    let dec = lts.label_index(&label("decrementStockA")).unwrap();
    let inc = lts.label_index(&label("incrementStockB")).unwrap();
    // counts are a function of the state: check consistency on every edge
    let mut counts: HashMap<usize, (i64, i64)> = HashMap::from([(0, (0, 0))]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let (d, i) = counts[&s];
        assert!(d - i == 0 || d - i == 1, "state {s}: {d} decrements vs {i} increments");
        for &(l, t) in &lts.transitions[s] {
            let t = t.state().unwrap();
            let next = (d + i64::from(l == dec), i + i64::from(l == inc));
            match counts.get(&t) {
                Some(c) => assert_eq!(*c, next, "path-dependent counts at state {t}"),
                None => {
                    counts.insert(t, next);
                    queue.push_back(t);
                }
            }
        }
    }
    let terminal: Vec<usize> = (0..lts.num_states()).filter(|&s| lts.transitions[s].is_empty()).collect();
    assert_eq!(terminal.len(), 1);
    assert_eq!(counts[&terminal[0]], (2, 2));

    assert_eq!(report.result(), Verdict::Fail);
    assert_eq!(report.violations.len(), 1);
    let t: Vec<String> = report.violations[0].trace.iter().map(ToString::to_string).collect();
    assert_eq!(t.iter().filter(|l| *l == "decrementStockA").count(), 2);
    assert_eq!(t.iter().filter(|l| *l == "incrementStockB").count(), 2);
    assert!(t.contains(&"stockEmptyA".to_string()) && t.contains(&"stockFullB".to_string()));
}

#[test]
fn exploratory_models_parse() {
    for entry in std::fs::read_dir(corpus_dir().join("exploratory")).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let spec = parse_str(&text).unwrap();
        check(&spec, None, DEFAULT_STATE_LIMIT).unwrap();
    }
}

#[test]
fn invalid_fixture_reports_position() {
    let err = parse_str(&corpus_file("invalid/bad_syntax.fsp")).unwrap_err();
    assert_eq!(err.position(), (2, 8));
}
