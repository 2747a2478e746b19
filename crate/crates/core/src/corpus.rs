//! Golden-file fixtures: `NAME.fsp` with `NAME.expect.json` and, optionally,
//! `NAME.aut.golden` beside it.
//!
//! Header comments in the `.fsp` carry metadata:
//!
//! ```text
//! // source: verbatim | adapted | derived
//! // note: free text, may repeat
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::json::{JsonReport, ReportError};
use crate::syntax::{parse_str, ParseError, Spec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    /// Model text taken as published.
    Verbatim,
    /// Published model with small repairs (documented in notes).
    Adapted,
    /// Written for this corpus.
    Derived,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub path: PathBuf,
    pub source: SourceKind,
    pub notes: Vec<String>,
    pub text: String,
    pub spec: Spec,
    pub expected: JsonReport,
    pub aut_golden: Option<String>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Report { path: PathBuf, source: ReportError },
    #[error("{0}: missing or unknown `// source:` header")]
    Source(PathBuf),
}

fn read(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })
}

fn header(text: &str, path: &Path) -> Result<(SourceKind, Vec<String>), CorpusError> {
    let mut source = None;
    let mut notes = Vec::new();
    for line in text.lines() {
        let Some(rest) = line.trim().strip_prefix("//") else { continue };
        let rest = rest.trim();
        if let Some(kind) = rest.strip_prefix("source:") {
            source = match kind.trim() {
                "verbatim" => Some(SourceKind::Verbatim),
                "adapted" => Some(SourceKind::Adapted),
                "derived" => Some(SourceKind::Derived),
                _ => None,
            };
        } else if let Some(note) = rest.strip_prefix("note:") {
            notes.push(note.trim().to_string());
        }
    }
    Ok((source.ok_or_else(|| CorpusError::Source(path.to_path_buf()))?, notes))
}

pub fn load_fixture(path: &Path) -> Result<Fixture, CorpusError> {
    let text = read(path)?;
    let (source, notes) = header(&text, path)?;
    let spec = parse_str(&text).map_err(|source| CorpusError::Parse { path: path.to_path_buf(), source })?;
    let expect_path = path.with_extension("expect.json");
    let expected = JsonReport::from_json(&read(&expect_path)?)
        .map_err(|source| CorpusError::Report { path: expect_path, source })?;
    let aut_path = path.with_extension("aut.golden");
    let aut_golden = if aut_path.exists() { Some(read(&aut_path)?) } else { None };
    Ok(Fixture {
        name: path.file_stem().unwrap_or_default().to_string_lossy().into_owned(),
        path: path.to_path_buf(),
        source,
        notes,
        text,
        spec,
        expected,
        aut_golden,
    })
}

/// Every `*.fsp` directly inside `dir`, by file name.
pub fn load_corpus(dir: &Path) -> Result<Vec<Fixture>, CorpusError> {
    let entries = fs::read_dir(dir).map_err(|source| CorpusError::Io { path: dir.to_path_buf(), source })?;
    let mut paths = Vec::new();
    for e in entries {
        let e = e.map_err(|source| CorpusError::Io { path: dir.to_path_buf(), source })?;
        let p = e.path();
        if p.is_file() && p.extension().is_some_and(|x| x == "fsp") {
            paths.push(p);
        }
    }
    paths.sort();
    paths.iter().map(|p| load_fixture(p)).collect()
}

/// Field-level differences between two reports, ignoring `elapsed_ms`.
/// Empty when they agree.
pub fn golden_compare(expected: &JsonReport, fresh: &JsonReport) -> Vec<String> {
    let mut diffs = Vec::new();
    let mut check = |field: &str, e: String, f: String| {
        if e != f {
            diffs.push(format!("{field}: expected {e}, got {f}"));
        }
    };
    check("schemaVersion", expected.schema_version.clone(), fresh.schema_version.clone());
    check("target", expected.target.clone(), fresh.target.clone());
    check("result", format!("{:?}", expected.result), format!("{:?}", fresh.result));
    check("stats.states", expected.stats.states.to_string(), fresh.stats.states.to_string());
    check("stats.transitions", expected.stats.transitions.to_string(), fresh.stats.transitions.to_string());
    check("stats.alphabet", expected.stats.alphabet.to_string(), fresh.stats.alphabet.to_string());
    check("terminal_sets", expected.terminal_sets.to_string(), fresh.terminal_sets.to_string());
    check("warnings", format!("{:?}", expected.warnings), format!("{:?}", fresh.warnings));
    check("violations.len", expected.violations.len().to_string(), fresh.violations.len().to_string());
    let join = |t: &[crate::label::Label]| t.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    for (i, (e, f)) in expected.violations.iter().zip(&fresh.violations).enumerate() {
        check(&format!("violations[{i}].kind"), e.kind.to_string(), f.kind.to_string());
        check(&format!("violations[{i}].subject"), e.subject.clone(), f.subject.clone());
        check(&format!("violations[{i}].trace"), join(&e.trace), join(&f.trace));
        check(
            &format!("violations[{i}].cycle"),
            e.cycle.as_deref().map_or("null".into(), join),
            f.cycle.as_deref().map_or("null".into(), join),
        );
        check(&format!("violations[{i}].note"), format!("{:?}", e.note), format!("{:?}", f.note));
    }
    diffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyze::Verdict;
    use crate::json::JsonStats;

    fn report(states: usize, elapsed: u64) -> JsonReport {
        JsonReport {
            schema_version: "1".into(),
            target: "T".into(),
            result: Verdict::Pass,
            stats: JsonStats { states, transitions: 1, alphabet: 1, elapsed_ms: elapsed },
            violations: vec![],
            warnings: vec![],
            terminal_sets: 1,
        }
    }

    #[test]
    fn elapsed_is_ignored() {
        assert!(golden_compare(&report(2, 1), &report(2, 900)).is_empty());
    }

    #[test]
    fn state_count_diff_is_named() {
        let d = golden_compare(&report(2, 0), &report(3, 0));
        assert_eq!(d, vec!["stats.states: expected 2, got 3".to_string()]);
    }

    #[test]
    fn header_parsing() {
        let (k, notes) = header("// source: adapted\n// note: dropped a bar\nP = STOP.", Path::new("x")).unwrap();
        assert_eq!(k, SourceKind::Adapted);
        assert_eq!(notes, vec!["dropped a bar"]);
        assert!(header("P = STOP.", Path::new("x")).is_err());
    }
}
