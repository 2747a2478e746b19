//! Implementation of the `fspv` command line.

pub mod explore;

use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fspv_core::gaia::{activity_table, parse_liveness_with, to_fsp};
use fspv_core::syntax::{format, parse_str};
use fspv_core::{check, CompileError, Error, GaiaOptions, JsonReport, Lts, Report, DEFAULT_STATE_LIMIT};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fspv", version, about = "FSP-lite model checker")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check safety, deadlock and progress of a target.
    Check(CheckArgs),
    /// Write the target's LTS as DOT and/or Aldebaran `.aut`.
    Export(ExportArgs),
    /// Step through the target's state space interactively.
    Explore(ExploreArgs),
    /// Translate Gaia liveness expressions to FSP-lite.
    Gaia(GaiaArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// FSP-lite source file.
    pub input: PathBuf,
    /// Process or composite to build; defaults to the last composite, else
    /// the first process.
    #[arg(long)]
    pub target: Option<String>,
    /// Maximum number of states to build.
    #[arg(long, env = "FSPV_LIMIT", default_value_t = DEFAULT_STATE_LIMIT)]
    pub limit: usize,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
    /// Also write the LTS as DOT (`-` for standard output).
    #[arg(long, value_name = "PATH")]
    pub dot: Option<PathBuf>,
    /// Also write the LTS as `.aut` (`-` for standard output).
    #[arg(long, value_name = "PATH")]
    pub aut: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Write DOT here (`-` for standard output).
    #[arg(long, value_name = "PATH")]
    pub dot: Option<PathBuf>,
    /// Write `.aut` here (`-` for standard output). The default when no
    /// format is given.
    #[arg(long, value_name = "PATH")]
    pub aut: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Seed for `random N`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GaiaArgs {
    /// `.gaia` file with `Name = expression` definitions.
    pub input: PathBuf,
    /// Output `.fsp` path; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Definition to translate instead of the first one.
    #[arg(long)]
    pub entry: Option<String>,
    /// Read `!` as choice `|`.
    #[arg(long)]
    pub gaia_bang_as_choice: bool,
}

/// Standard streams, injectable for tests.
pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

/// Runs one command and returns the process exit code.
pub fn run(cli: Cli, io: &mut Io<'_>) -> i32 {
    let result = match cli.command {
        Command::Check(a) => cmd_check(&a, io),
        Command::Export(a) => cmd_export(&a, io),
        Command::Explore(a) => cmd_explore(&a, io),
        Command::Gaia(a) => cmd_gaia(&a, io),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(io.stderr, "{}", failure.message);
            failure.code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: String) -> Self {
        Failure { code, message }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::new(EXIT_ERROR, format!("error: {}: {e}", path.display()))
    }

    fn core(path: &Path, e: Error) -> Self {
        let code = match e {
            Error::Compile(CompileError::StateLimitExceeded(_)) => EXIT_LIMIT,
            _ => EXIT_ERROR,
        };
        let message = match &e {
            Error::Parse(p) => format!("{}:{p}", path.display()),
            other => format!("{}: error: {other}", path.display()),
        };
        Failure::new(code, message)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn build(m: &ModelArgs) -> Result<(Lts, Report), Failure> {
    let text = read(&m.input)?;
    let spec = parse_str(&text).map_err(|e| Failure::core(&m.input, e.into()))?;
    check(&spec, m.target.as_deref(), m.limit).map_err(|e| Failure::core(&m.input, e))
}

fn emit(path: &Path, text: &str, io: &mut Io<'_>) -> Result<(), Failure> {
    if path == Path::new("-") {
        io.stdout.write_all(text.as_bytes()).map_err(|e| Failure::io(path, e))
    } else {
        fs::write(path, text).map_err(|e| Failure::io(path, e))
    }
}

fn exports(lts: &Lts, dot: Option<&Path>, aut: Option<&Path>, io: &mut Io<'_>) -> Result<(), Failure> {
    if let Some(p) = dot {
        emit(p, &lts.to_dot(), io)?;
    }
    if let Some(p) = aut {
        emit(p, &lts.to_aut(), io)?;
    }
    Ok(())
}

fn write_human(r: &Report, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "target: {}", r.target)?;
    writeln!(
        out,
        "states: {}  transitions: {}  alphabet: {}  terminal sets: {}  ({} ms)",
        r.stats.states, r.stats.transitions, r.stats.alphabet, r.terminal_sets, r.stats.elapsed_ms
    )?;
    for w in &r.warnings {
        writeln!(out, "warning: {w}")?;
    }
    for v in &r.violations {
        write!(out, "{} violation: {}", v.kind, v.subject)?;
        match &v.note {
            Some(n) => writeln!(out, " ({n})")?,
            None => writeln!(out)?,
        }
        writeln!(out, "  trace:")?;
        for (i, l) in v.trace.iter().enumerate() {
            writeln!(out, "  {:>4} {l}", i + 1)?;
        }
        if let Some(c) = &v.cycle {
            writeln!(out, "  cycle:")?;
            if c.is_empty() {
                writeln!(out, "       (no actions)")?;
            }
            for (i, l) in c.iter().enumerate() {
                writeln!(out, "  {:>4} {l}", i + 1)?;
            }
        }
    }
    match r.violations.len() {
        0 => writeln!(out, "result: PASS"),
        n => writeln!(out, "result: FAIL ({n} violation{})", if n == 1 { "" } else { "s" }),
    }
}

fn cmd_check(a: &CheckArgs, io: &mut Io<'_>) -> Result<i32, Failure> {
    let (lts, report) = build(&a.model)?;
    exports(&lts, a.dot.as_deref(), a.aut.as_deref(), io)?;
    let written = if a.json {
        writeln!(io.stdout, "{}", JsonReport::from(&report).to_json())
    } else {
        write_human(&report, io.stdout)
    };
    match written {
        // reader went away (`| head`); the verdict still stands
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
        other => other.map_err(|e| Failure::io(Path::new("<stdout>"), e))?,
    }
    Ok(if report.violations.is_empty() { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_export(a: &ExportArgs, io: &mut Io<'_>) -> Result<i32, Failure> {
    let (lts, _) = build(&a.model)?;
    let stdout = Path::new("-");
    let aut = match (&a.dot, &a.aut) {
        (None, None) => Some(stdout),
        (_, aut) => aut.as_deref(),
    };
    exports(&lts, a.dot.as_deref(), aut, io)?;
    Ok(EXIT_PASS)
}

fn cmd_explore(a: &ExploreArgs, io: &mut Io<'_>) -> Result<i32, Failure> {
    let (lts, _) = build(&a.model)?;
    explore::session(&lts, a.seed, io.stdin, io.stdout).map_err(|e| Failure::io(Path::new("<stdio>"), e))?;
    Ok(EXIT_PASS)
}

fn cmd_gaia(a: &GaiaArgs, io: &mut Io<'_>) -> Result<i32, Failure> {
    let text = read(&a.input)?;
    let opts = GaiaOptions { bang_as_choice: a.gaia_bang_as_choice };
    let gaia_err = |e: fspv_core::GaiaError| Failure::new(EXIT_ERROR, format!("{}:{e}", a.input.display()));
    let mut role = parse_liveness_with(&text, opts).map_err(gaia_err)?;
    if let Some(entry) = &a.entry {
        role = role
            .with_entry(entry)
            .ok_or_else(|| Failure::new(EXIT_ERROR, format!("{}: no definition `{entry}`", a.input.display())))?;
    }
    let mut fsp = activity_table(&role);
    if a.gaia_bang_as_choice {
        fsp.push_str("// `!` read as choice\n");
    }
    fsp.push_str(&format(&to_fsp(&role)));
    match &a.out {
        Some(p) => fs::write(p, fsp).map_err(|e| Failure::io(p, e))?,
        None => io.stdout.write_all(fsp.as_bytes()).map_err(|e| Failure::io(Path::new("<stdout>"), e))?,
    }
    Ok(EXIT_PASS)
}
