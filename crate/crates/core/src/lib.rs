//! Parsing, compilation, composition and analysis of FSP-lite models,
//! plus translation of Gaia liveness expressions into FSP-lite.

pub mod analyze;
pub mod compile;
pub mod compose;
pub mod corpus;
pub mod gaia;
pub mod json;
pub mod label;
pub mod lts;
pub mod syntax;

use std::time::Instant;

use thiserror::Error;

pub use analyze::{Report, Stats, Trace, Verdict, Violation, ViolationKind};
pub use compile::{CompileError, DEFAULT_STATE_LIMIT};
pub use compose::Warning;
pub use gaia::{GaiaError, GaiaOptions, LivenessExpr, RoleLiveness};
pub use json::{JsonReport, REPORT_SCHEMA};
pub use label::{Label, LabelPart};
pub use lts::{Lts, Target};
pub use syntax::{ParseError, Spec};

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Gaia(#[from] GaiaError),
    #[error("no process or composite to check")]
    NoTarget,
}

/// Resolves `target` (or the default target) and builds its LTS.
pub fn build(spec: &Spec, target: Option<&str>, limit: usize) -> Result<(Lts, Vec<Warning>), Error> {
    let name = match target {
        Some(t) => t,
        None => spec.default_target().ok_or(Error::NoTarget)?,
    };
    Ok(compose::build_target(spec, name, limit)?)
}

/// Builds the target and runs safety, deadlock and progress analysis.
/// `elapsed_ms` covers both phases.
pub fn check(spec: &Spec, target: Option<&str>, limit: usize) -> Result<(Lts, Report), Error> {
    let start = Instant::now();
    let (lts, warnings) = build(spec, target, limit)?;
    let progress = analyze::progress_properties(spec).map_err(|source| CompileError::Eval {
        context: "progress".into(),
        source,
    })?;
    let mut report = analyze::run_all(&lts, &progress, &warnings);
    report.stats.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok((lts, report))
}

/// Parses and checks FSP-lite source text.
pub fn check_source(text: &str, target: Option<&str>, limit: usize) -> Result<(Lts, Report), Error> {
    let spec = syntax::parse_str(text)?;
    check(&spec, target, limit)
}
