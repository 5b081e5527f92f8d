//! The `lr` command line.
//!
//! Exit codes: 0 success, 1 diagnostics or trace mismatch, 2 runtime
//! error, 3 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::codegen::BackendRegistry;
use crate::corpora::load_workspace;
use crate::diagnostic::Diagnostic;
use crate::pipeline::{execute_scenario, interpret_scenario, ScenarioRun};
use crate::runtime::{diff_traces, serialize_trace, TraceDiff, TraceEvent};
use crate::simworld::{load_scenario, Scenario};
use crate::statechart::{to_statechart, FlatProgram};
use crate::symbols::{collect_stats, LinkedWorkspace};
use crate::wellformed::{all_diagnostics, check_all};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTICS: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "lr",
    version,
    about = "Check, run and compile robot assembly models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse, link and check the models in the given directories.
    Check {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
    },
    /// Print model counts.
    Stats {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
    },
    /// Interpret a process against a scenario.
    Run {
        #[arg(long)]
        model: String,
        #[arg(long)]
        scenario: PathBuf,
        /// Write the trace here instead of standard output.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        max_steps: Option<u64>,
        /// Print the active state path at every step.
        #[arg(long)]
        live: bool,
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
    },
    /// Generate artifacts for a process with a backend.
    Gen {
        #[arg(long)]
        model: String,
        #[arg(long)]
        backend: String,
        #[arg(short = 'o')]
        out: PathBuf,
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
    },
    /// Execute a flat program against a scenario.
    Rts {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Compare two trace files.
    DiffTrace { a: PathBuf, b: PathBuf },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn diags(&mut self, diags: &[Diagnostic]) {
        for d in diags {
            let _ = writeln!(self.err, "{d}");
        }
    }

    fn fail(&mut self, code: i32, msg: impl std::fmt::Display) -> i32 {
        let _ = writeln!(self.err, "lr: {msg}");
        code
    }
}

/// Runs `lr` with `args` (including the program name).
pub fn run<I, T>(
    args: I,
    registry: &BackendRegistry,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut io = Io { out, err };
    match cli.command {
        Command::Check { dirs } => check(&mut io, &dirs),
        Command::Stats { dirs } => stats(&mut io, &dirs),
        Command::Run {
            model,
            scenario,
            trace,
            max_steps,
            live,
            dirs,
        } => run_model(
            &mut io,
            &model,
            &scenario,
            trace.as_deref(),
            max_steps,
            live,
            &dirs,
        ),
        Command::Gen {
            model,
            backend,
            out,
            dirs,
        } => gen(&mut io, registry, &model, &backend, &out, &dirs),
        Command::Rts {
            program,
            scenario,
            trace,
        } => rts(&mut io, &program, &scenario, trace.as_deref()),
        Command::DiffTrace { a, b } => diff(&mut io, &a, &b),
    }
}

/// Loads, links and checks; prints diagnostics. `None` if anything failed.
fn checked(io: &mut Io, dirs: &[PathBuf]) -> Option<LinkedWorkspace> {
    let ws = match load_workspace(dirs) {
        Ok(ws) => ws,
        Err(d) => {
            io.diags(&d);
            return None;
        }
    };
    let diags = all_diagnostics(&check_all(&ws));
    io.diags(&diags);
    if diags.iter().any(Diagnostic::is_error) {
        None
    } else {
        Some(ws)
    }
}

fn check(io: &mut Io, dirs: &[PathBuf]) -> i32 {
    let diags = match load_workspace(dirs) {
        Ok(ws) => all_diagnostics(&check_all(&ws)),
        Err(d) => d,
    };
    io.diags(&diags);
    let errors = diags.iter().filter(|d| d.is_error()).count();
    let _ = writeln!(
        io.out,
        "{errors} error(s), {} warning(s)",
        diags.len() - errors
    );
    if errors == 0 {
        EXIT_OK
    } else {
        EXIT_DIAGNOSTICS
    }
}

fn stats(io: &mut Io, dirs: &[PathBuf]) -> i32 {
    let ws = match load_workspace(dirs) {
        Ok(ws) => ws,
        Err(d) => {
            io.diags(&d);
            return EXIT_DIAGNOSTICS;
        }
    };
    let s = collect_stats(&ws);
    let _ = writeln!(io.out, "{s}");
    for (skill, n) in &s.actions_per_skill {
        let _ = writeln!(io.out, "skill {skill} actions={n}");
    }
    EXIT_OK
}

fn read_scenario(io: &mut Io, path: &Path) -> Option<Scenario> {
    let name = path.display().to_string();
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            io.fail(EXIT_DIAGNOSTICS, format!("{name}: {e}"));
            return None;
        }
    };
    match load_scenario(&text) {
        Ok(s) => Some(s),
        Err(e) => {
            io.diags(&[e.to_diagnostic(&name)]);
            None
        }
    }
}

fn live_path(e: &TraceEvent) -> Option<&str> {
    match e {
        TraceEvent::Transition { to, .. } => Some(to),
        _ => e.path(),
    }
}

/// Writes the trace and reports the outcome of a finished run.
fn finish(io: &mut Io, run: ScenarioRun, trace_out: Option<&Path>, live: bool) -> i32 {
    let trace = run.trace();
    if live {
        for e in &trace.events {
            if let Some(p) = live_path(e) {
                let _ = writeln!(io.out, "step {}: {p}", e.step());
            }
        }
    }
    let text = serialize_trace(trace);
    match trace_out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                return io.fail(EXIT_DIAGNOSTICS, format!("{}: {e}", path.display()));
            }
        }
        None => {
            let _ = io.out.write_all(text.as_bytes());
        }
    }
    match &run.result {
        Ok(t) => {
            if trace_out.is_some() {
                let _ = writeln!(io.out, "outcome: {}", t.final_outcome().unwrap_or(""));
            }
            EXIT_OK
        }
        Err(f) => io.fail(EXIT_RUNTIME, format!("runtime error: {}", f.error)),
    }
}

fn run_model(
    io: &mut Io,
    model: &str,
    scenario: &Path,
    trace_out: Option<&Path>,
    max_steps: Option<u64>,
    live: bool,
    dirs: &[PathBuf],
) -> i32 {
    let Some(ws) = checked(io, dirs) else {
        return EXIT_DIAGNOSTICS;
    };
    let Some(sc) = read_scenario(io, scenario) else {
        return EXIT_DIAGNOSTICS;
    };
    match interpret_scenario(&ws, model, &sc, max_steps) {
        Ok(run) => finish(io, run, trace_out, live),
        Err(e) => {
            io.diags(&[e.to_diagnostic(&scenario.display().to_string())]);
            EXIT_DIAGNOSTICS
        }
    }
}

fn gen(
    io: &mut Io,
    registry: &BackendRegistry,
    model: &str,
    backend: &str,
    out_dir: &Path,
    dirs: &[PathBuf],
) -> i32 {
    let backend = match registry.get(backend) {
        Ok(b) => b,
        Err(e) => {
            let names = registry.list().join(", ");
            return io.fail(EXIT_USAGE, format!("{e} (available: {names})"));
        }
    };
    let Some(ws) = checked(io, dirs) else {
        return EXIT_DIAGNOSTICS;
    };
    let sc = match to_statechart(&ws, model) {
        Ok(sc) => sc,
        Err(e) => return io.fail(EXIT_DIAGNOSTICS, e),
    };
    if let Err(e) = fs::create_dir_all(out_dir) {
        return io.fail(EXIT_DIAGNOSTICS, format!("{}: {e}", out_dir.display()));
    }
    for a in backend.transform(&sc) {
        let path = out_dir.join(&a.filename);
        if let Err(e) = fs::write(&path, a.content) {
            return io.fail(EXIT_DIAGNOSTICS, format!("{}: {e}", path.display()));
        }
        let _ = writeln!(io.out, "{}", path.display());
    }
    EXIT_OK
}

fn rts(io: &mut Io, program: &Path, scenario: &Path, trace_out: Option<&Path>) -> i32 {
    let prog = match fs::read_to_string(program) {
        Ok(t) => FlatProgram::from_json(&t),
        Err(e) => return io.fail(EXIT_DIAGNOSTICS, format!("{}: {e}", program.display())),
    };
    let prog = match prog {
        Ok(p) => p,
        Err(e) => return io.fail(EXIT_DIAGNOSTICS, format!("{}: {e}", program.display())),
    };
    let Some(sc) = read_scenario(io, scenario) else {
        return EXIT_DIAGNOSTICS;
    };
    match execute_scenario(&prog, &sc, None) {
        Ok(run) => finish(io, run, trace_out, false),
        Err(e) => {
            io.diags(&[e.to_diagnostic(&scenario.display().to_string())]);
            EXIT_DIAGNOSTICS
        }
    }
}

fn diff(io: &mut Io, a: &Path, b: &Path) -> i32 {
    let read = |p: &Path| fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()));
    let (ta, tb) = match (read(a), read(b)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return io.fail(EXIT_DIAGNOSTICS, e),
    };
    match diff_traces(&ta, &tb) {
        TraceDiff::Equal => {
            let _ = writeln!(io.out, "equal");
            EXIT_OK
        }
        TraceDiff::DiffersAt(n) => {
            let _ = writeln!(io.out, "differs at line {n}");
            EXIT_DIAGNOSTICS
        }
    }
}
