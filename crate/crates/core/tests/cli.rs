mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use lrkit::cli::{run, EXIT_DIAGNOSTICS, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE};
use lrkit::codegen::{Artifact, Backend, BackendRegistry};
use lrkit::statechart::StatechartIr;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn lr_with(registry: &BackendRegistry, args: &[&str]) -> Out {
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let code = run(
        std::iter::once("lr").chain(args.iter().copied()),
        registry,
        &mut o,
        &mut e,
    );
    Out {
        code,
        stdout: String::from_utf8(o).unwrap(),
        stderr: String::from_utf8(e).unwrap(),
    }
}

fn lr(args: &[&str]) -> Out {
    lr_with(&BackendRegistry::with_defaults(), args)
}

fn corpus(name: &str) -> String {
    common::corpora_dir().join(name).display().to_string()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn stats_cleanup() {
    let o = lr(&["stats", &corpus("cleanup")]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o
        .stdout
        .lines()
        .next()
        .unwrap()
        .contains("tasks=3 skills=6 actions=14"));
}

#[test]
fn check_reports_one_wf04_line() {
    let o = lr(&["check", &corpus("fixtures/wf04")]);
    assert_eq!(o.code, EXIT_DIAGNOSTICS);
    let lines: Vec<&str> = o.stderr.lines().collect();
    assert_eq!(lines.len(), 1, "{}", o.stderr);
    // file:line:col: severity RULE: message
    let (loc, rest) = lines[0].split_once(": ").unwrap();
    let mut parts = loc.rsplitn(3, ':');
    let col: u32 = parts.next().unwrap().parse().unwrap();
    let line: u32 = parts.next().unwrap().parse().unwrap();
    assert!(parts.next().unwrap().ends_with("T.task"));
    assert!(line >= 1 && col >= 1);
    assert!(rest.starts_with("error WF04: "), "{rest}");
}

#[test]
fn check_clean_corpus() {
    let o = lr(&["check", &corpus("screwing")]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stderr.is_empty());
    assert_eq!(o.stdout, "0 error(s), 0 warning(s)\n");
}

#[test]
fn warnings_do_not_fail_check() {
    let o = lr(&["check", &corpus("fixtures/wf09")]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stderr.contains("warning WF09"));
}

#[test]
fn run_gen_rts_diff_are_equal_for_every_scenario() {
    let tmp = tempfile::tempdir().unwrap();
    for case in common::matrix() {
        let dir = corpus(&case.corpus);
        let scn = common::corpora_dir()
            .join(&case.corpus)
            .join(&case.entry.file);
        let a = tmp.path().join("a.jsonl");
        let b = tmp.path().join("b.jsonl");
        let r = lr(&[
            "run",
            "--model",
            &case.process,
            "--scenario",
            p(&scn),
            "--trace",
            p(&a),
            &dir,
        ]);
        let want = if case.entry.error.is_some() {
            EXIT_RUNTIME
        } else {
            EXIT_OK
        };
        assert_eq!(r.code, want, "{}: {}", case.label(), r.stderr);
        let g = lr(&[
            "gen",
            "--model",
            &case.process,
            "--backend",
            "lrf",
            "-o",
            p(tmp.path()),
            &dir,
        ]);
        assert_eq!(g.code, EXIT_OK, "{}", g.stderr);
        let lrf = tmp.path().join(format!("{}.lrf", case.process));
        let r = lr(&[
            "rts",
            "--program",
            p(&lrf),
            "--scenario",
            p(&scn),
            "--trace",
            p(&b),
        ]);
        assert_eq!(r.code, want, "{}: {}", case.label(), r.stderr);
        let d = lr(&["diff-trace", p(&a), p(&b)]);
        assert_eq!(
            (d.code, d.stdout.as_str()),
            (EXIT_OK, "equal\n"),
            "{}",
            case.label()
        );
    }
}

#[test]
fn run_without_trace_file_prints_the_trace() {
    let scn = common::corpora_dir().join("screwing/delta_0_4.scn");
    let o = lr(&[
        "run",
        "--model",
        "AssembleScrew",
        "--scenario",
        p(&scn),
        &corpus("screwing"),
    ]);
    assert_eq!(o.code, EXIT_OK);
    let golden =
        fs::read_to_string(common::corpora_dir().join("screwing/delta_0_4.golden.jsonl")).unwrap();
    assert_eq!(o.stdout, golden);
}

#[test]
fn live_prints_the_path_per_step() {
    let tmp = tempfile::tempdir().unwrap();
    let scn = common::corpora_dir().join("single_chain/chain.scn");
    let t = tmp.path().join("t.jsonl");
    let o = lr(&[
        "run",
        "--model",
        "Chain",
        "--scenario",
        p(&scn),
        "--trace",
        p(&t),
        "--live",
        &corpus("single_chain"),
    ]);
    assert_eq!(o.code, EXIT_OK);
    let live: Vec<&str> = o
        .stdout
        .lines()
        .filter(|l| l.starts_with("step "))
        .collect();
    assert_eq!(live[0], "step 1: Chain");
    assert_eq!(live[3], "step 4: Chain/t/s/a");
    assert!(o.stdout.ends_with("outcome: done\n"));
}

#[test]
fn runtime_error_exit_code_and_partial_trace() {
    let tmp = tempfile::tempdir().unwrap();
    let scn = common::corpora_dir().join("plugging/three_sockets.scn");
    let t = tmp.path().join("t.jsonl");
    let o = lr(&[
        "run",
        "--model",
        "PlugSockets",
        "--scenario",
        p(&scn),
        "--trace",
        p(&t),
        "--max-steps",
        "10",
        &corpus("plugging"),
    ]);
    assert_eq!(o.code, EXIT_RUNTIME);
    assert!(o.stderr.contains("step limit of 10"));
    assert_eq!(fs::read_to_string(&t).unwrap().lines().count(), 10);
}

#[test]
fn diff_trace_reports_first_difference() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    fs::write(&a, "x\ny\nz\n").unwrap();
    fs::write(&b, "x\nq\nz\n").unwrap();
    let o = lr(&["diff-trace", p(&a), p(&a)]);
    assert_eq!((o.code, o.stdout.as_str()), (EXIT_OK, "equal\n"));
    let o = lr(&["diff-trace", p(&a), p(&b)]);
    assert_eq!(
        (o.code, o.stdout.as_str()),
        (EXIT_DIAGNOSTICS, "differs at line 2\n")
    );
}

#[test]
fn usage_errors() {
    assert_eq!(lr(&[]).code, EXIT_USAGE);
    assert_eq!(lr(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(lr(&["run", "--model", "X"]).code, EXIT_USAGE);
    let o = lr(&[
        "gen",
        "--model",
        "Chain",
        "--backend",
        "nope",
        "-o",
        "/tmp/unused",
        &corpus("single_chain"),
    ]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("dot, lrf"));
    assert_eq!(lr(&["--help"]).code, EXIT_OK);
}

#[test]
fn bad_scenario_is_a_diagnostic() {
    let tmp = tempfile::tempdir().unwrap();
    let scn = tmp.path().join("bad.scn");
    fs::write(&scn, r#"{"world":"teleport"}"#).unwrap();
    let o = lr(&[
        "run",
        "--model",
        "Chain",
        "--scenario",
        p(&scn),
        &corpus("single_chain"),
    ]);
    assert_eq!(o.code, EXIT_DIAGNOSTICS);
    assert!(o.stderr.contains("error SCENARIO"), "{}", o.stderr);
}

struct Csv;

impl Backend for Csv {
    fn name(&self) -> &str {
        "csv"
    }

    fn transform(&self, sc: &StatechartIr) -> Vec<Artifact> {
        let content = sc
            .states
            .iter()
            .map(|s| format!("{},{},{}\n", s.id, s.kind.as_str(), s.path))
            .collect();
        vec![Artifact {
            filename: format!("{}.csv", sc.root().path),
            content,
        }]
    }
}

#[test]
fn custom_backend_through_gen() {
    let mut reg = BackendRegistry::with_defaults();
    reg.register(Box::new(Csv)).unwrap();
    assert_eq!(reg.list(), ["csv", "dot", "lrf"]);
    let tmp = tempfile::tempdir().unwrap();
    let o = lr_with(
        &reg,
        &[
            "gen",
            "--model",
            "AssembleScrew",
            "--backend",
            "csv",
            "-o",
            p(tmp.path()),
            &corpus("screwing"),
        ],
    );
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let files: Vec<_> = fs::read_dir(tmp.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let text = fs::read_to_string(tmp.path().join("AssembleScrew.csv")).unwrap();
    assert!(text.starts_with("0,composite,AssembleScrew\n"));
    assert!(text.contains(",atomic,AssembleScrew/job/Screwing/spin\n"));
}

#[test]
fn binary_end_to_end() {
    let out = Command::new(env!("CARGO_BIN_EXE_lr"))
        .args(["stats", &corpus("stacking")])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("processes=1 tasks=1 skills=4 actions=6 interfaces=13\n"));
    let out = Command::new(env!("CARGO_BIN_EXE_lr"))
        .args(["check", &corpus("fixtures/wf10")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_DIAGNOSTICS));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("error WF10"));
}
