mod common;

use std::collections::BTreeMap;
use std::fs;

use common::{matrix, trace_text};
use lrkit::corpora::trace_digest;
use lrkit::pipeline::{execute_scenario, interpret_scenario};
use lrkit::runtime::{
    execute_flat, interpret, ExecutionTrace, RunLimits, RuntimeError, TraceEvent, Value,
};
use lrkit::simworld::{load_scenario, ScrewdriverConfig, ScrewdriverWorld};
use lrkit::statechart::{flatten, to_statechart};
use lrkit::symbols::link_workspace;
use lrkit::syntax::parse_model;

#[test]
fn interpreter_and_rts_agree_on_the_matrix() {
    let cases = matrix();
    assert!(cases.len() >= 6);
    for case in &cases {
        let a = case.interpret();
        let b = case.execute();
        assert_eq!(trace_text(&a), trace_text(&b), "{}", case.label());
        assert_eq!(
            a.as_ref().err().map(|f| &f.error),
            b.as_ref().err().map(|f| &f.error),
            "{}",
            case.label()
        );
    }
}

#[test]
fn manifest_expectations_hold() {
    for case in matrix() {
        let r = case.interpret();
        match (&case.entry.outcome, &case.entry.error, &r) {
            (Some(o), None, Ok(t)) => {
                assert_eq!(t.final_outcome(), Some(o.as_str()), "{}", case.label())
            }
            (None, Some(e), Err(f)) => assert_eq!(f.error.kind(), e, "{}", case.label()),
            _ => panic!(
                "{}: manifest {:?} but run gave {:?}",
                case.label(),
                case.entry,
                r.err()
            ),
        }
        if let Some(d) = &case.entry.trace_digest {
            assert_eq!(
                &trace_digest(&trace_text(&r)),
                d,
                "{}: trace changed",
                case.label()
            );
        }
    }
}

#[test]
fn golden_traces() {
    let mut checked = 0;
    for case in matrix() {
        let Some(g) = &case.entry.golden else {
            continue;
        };
        let want = fs::read_to_string(common::corpora_dir().join(&case.corpus).join(g)).unwrap();
        assert_eq!(trace_text(&case.interpret()), want, "{}", case.label());
        assert_eq!(trace_text(&case.execute()), want, "{}", case.label());
        checked += 1;
    }
    assert_eq!(checked, 2);
}

#[test]
fn runs_are_deterministic() {
    for case in matrix() {
        let first = trace_text(&case.interpret());
        for _ in 0..3 {
            assert_eq!(trace_text(&case.interpret()), first, "{}", case.label());
            assert_eq!(trace_text(&case.execute()), first, "{}", case.label());
        }
    }
}

#[test]
fn checked_corpora_never_hit_unknown_methods_or_unbound_parameters() {
    for case in matrix() {
        if let Err(f) = case.interpret() {
            assert!(
                !matches!(
                    f.error,
                    RuntimeError::UnknownMethod { .. } | RuntimeError::UnboundParameter { .. }
                ),
                "{}: {}",
                case.label(),
                f.error
            );
        }
    }
}

fn screwing_run(file: &str) -> Result<ExecutionTrace, lrkit::runtime::RunFailure> {
    let ws = common::workspace("screwing");
    let text = fs::read_to_string(common::corpora_dir().join("screwing").join(file)).unwrap();
    interpret_scenario(&ws, "AssembleScrew", &load_scenario(&text).unwrap(), None)
        .unwrap()
        .result
}

const SKILL: &str = "AssembleScrew/job/Screwing";

fn calls_below(t: &ExecutionTrace, prefix: &str) -> usize {
    t.events
        .iter()
        .filter(|e| matches!(e, TraceEvent::Call { path, .. } if path.starts_with(prefix)))
        .count()
}

#[test]
fn screwing_loops_three_times() {
    let t = screwing_run("delta_0_4.scn").unwrap();
    let spin = format!("{SKILL}/spin");
    assert_eq!(t.enters_of(&spin), 3);
    assert_eq!(calls_below(&t, &format!("{SKILL}/")), 9);
    let torques: Vec<Value> = t
        .events
        .iter()
        .filter_map(|e| match e {
            TraceEvent::Call {
                path,
                result: Some(Value::Record(r)),
                ..
            } if *path == spin => Some(r["torque"].clone()),
            _ => None,
        })
        .collect();
    assert_eq!(torques, [0.4, 0.8, 1.2000000000000002].map(Value::Double));
    let skill_exit = t.events.iter().find_map(|e| match e {
        TraceEvent::Exit { path, outcome, .. } if path == SKILL => Some(outcome.as_str()),
        _ => None,
    });
    assert_eq!(skill_exit, Some("screwTightened"));
    // node sequence inside the skill
    let seq: Vec<&str> = t
        .events
        .iter()
        .filter_map(|e| match e {
            TraceEvent::Enter { path, .. } => path.strip_prefix(&format!("{SKILL}/")),
            _ => None,
        })
        .collect();
    assert_eq!(
        seq,
        ["spin", "release", "back", "grasp", "spin", "release", "back", "grasp", "spin"]
    );
}

#[test]
fn large_torque_step_spins_once() {
    let t = screwing_run("delta_1_5.scn").unwrap();
    assert_eq!(t.enters_of(&format!("{SKILL}/spin")), 1);
    assert_eq!(t.final_outcome(), Some("done"));
}

#[test]
fn displaced_screw_fails() {
    let t = screwing_run("displaced.scn").unwrap();
    assert_eq!(t.final_outcome(), Some("failed"));
}

#[test]
fn zero_target_violates_entry() {
    let f = screwing_run("zero_target.scn").unwrap_err();
    assert_eq!(
        f.error,
        RuntimeError::EntryViolated {
            path: format!("{SKILL}/spin"),
            rule_index: 0
        }
    );
    assert_eq!(
        f.trace.events.last().unwrap().path(),
        Some("AssembleScrew/job/Screwing/spin")
    );
}

#[test]
fn plugging_repeats_once_per_socket() {
    for (file, n) in [("three_sockets.scn", 3), ("one_socket.scn", 1)] {
        let case = matrix()
            .into_iter()
            .find(|c| c.corpus == "plugging" && c.entry.file == file)
            .unwrap();
        let t = case.interpret().unwrap();
        assert_eq!(t.enters_of("PlugSockets/plug"), n, "{file}");
    }
}

#[test]
fn single_chain_event_counts() {
    let case = matrix()
        .into_iter()
        .find(|c| c.corpus == "single_chain")
        .unwrap();
    let t = case.interpret().unwrap();
    assert_eq!(t.count("enter"), 4);
    assert_eq!(t.count("call"), 1);
    assert_eq!(t.count("outcome"), 1);
    assert_eq!(t.count("exit"), 4);
    assert_eq!(t.count("end"), 1);
    // enters nest outward-in, exits inward-out
    let order: Vec<(&str, &str)> = t
        .events
        .iter()
        .filter(|e| matches!(e.tag(), "enter" | "exit"))
        .map(|e| (e.tag(), e.path().unwrap()))
        .collect();
    assert_eq!(
        order,
        [
            ("enter", "Chain"),
            ("enter", "Chain/t"),
            ("enter", "Chain/t/s"),
            ("enter", "Chain/t/s/a"),
            ("exit", "Chain/t/s/a"),
            ("exit", "Chain/t/s"),
            ("exit", "Chain/t"),
            ("exit", "Chain"),
        ]
    );
}

#[test]
fn step_limit_truncates_both_executors() {
    let case = matrix()
        .into_iter()
        .find(|c| c.entry.file == "three_sockets.scn")
        .unwrap();
    let a = interpret_scenario(&case.ws, &case.process, &case.scenario, Some(50))
        .unwrap()
        .result
        .unwrap_err();
    let b = execute_scenario(&case.program(), &case.scenario, Some(50))
        .unwrap()
        .result
        .unwrap_err();
    assert_eq!(a.error, RuntimeError::StepLimitExceeded { max_steps: 50 });
    assert_eq!(a.trace.events.len(), 50);
    assert_eq!(a, b);
}

/// A one-action process whose action has two satisfiable exit rules.
fn first_match_ws(rules: &str) -> lrkit::symbols::LinkedWorkspace {
    let files = [
        ("Api.dom", "domainmodel Api robotapi { interface Tool { void close(); } }".to_string()),
        (
            "A.action",
            format!("action A {{ parameters {{ Tool t; }} execution {{ t.close() }} exit {{ {rules} }} }}"),
        ),
        (
            "S.skill",
            "skill S { parameters { Tool t; } nodes { a: A; } initial a; transitions { a.x -> end x; a.y -> end y; } }".into(),
        ),
        (
            "T.task",
            "task T { parameters { Tool t; } nodes { s: S; } initial s; transitions { s.x -> end x; s.y -> end y; } }".into(),
        ),
        (
            "P.process",
            "process P { parameters { Tool t; } nodes { k: T; } initial k; transitions { k.x -> end x; k.y -> end y; } }".into(),
        ),
    ];
    link_workspace(
        files
            .iter()
            .map(|(f, t)| parse_model(t, f).unwrap())
            .collect(),
    )
    .unwrap()
}

fn tool_binding() -> BTreeMap<String, Value> {
    BTreeMap::from([(
        "t".to_string(),
        Value::ApiObject {
            interface: "Tool".into(),
            handle: "tool".into(),
        },
    )])
}

#[test]
fn first_satisfied_exit_rule_wins() {
    for (rules, want, idx) in [
        ("true -> x; true -> y;", "x", 0),
        ("true -> y; true -> x;", "y", 0),
        ("false -> x; true -> y;", "y", 1),
    ] {
        let ws = first_match_ws(rules);
        let mut w = ScrewdriverWorld::new(ScrewdriverConfig::default());
        let t = interpret(&ws, "P", &mut w, &tool_binding(), RunLimits::default()).unwrap();
        assert_eq!(t.final_outcome(), Some(want), "{rules}");
        let ri = t.events.iter().find_map(|e| match e {
            TraceEvent::Outcome { rule_index, .. } => Some(*rule_index),
            _ => None,
        });
        assert_eq!(ri, Some(idx));
        let prog = flatten(&to_statechart(&ws, "P").unwrap());
        let mut w = ScrewdriverWorld::new(ScrewdriverConfig::default());
        assert_eq!(
            execute_flat(&prog, &mut w, &tool_binding(), RunLimits::default()).unwrap(),
            t
        );
    }
}

#[test]
fn no_outcome_when_every_rule_fails() {
    let ws = first_match_ws("false -> x; false -> y;");
    let mut w = ScrewdriverWorld::new(ScrewdriverConfig::default());
    let f = interpret(&ws, "P", &mut w, &tool_binding(), RunLimits::default()).unwrap_err();
    assert_eq!(
        f.error,
        RuntimeError::NoOutcome {
            path: "P/k/s/a".into()
        }
    );
}

#[test]
fn missing_and_unknown_top_bindings_are_rejected() {
    let ws = first_match_ws("true -> x;");
    let mut w = ScrewdriverWorld::new(ScrewdriverConfig::default());
    let f = interpret(&ws, "P", &mut w, &BTreeMap::new(), RunLimits::default()).unwrap_err();
    assert!(matches!(f.error, RuntimeError::BadBinding { .. }));
    assert!(f.trace.events.is_empty());
    let mut extra = tool_binding();
    extra.insert("speed".into(), Value::Double(1.0));
    let f = interpret(&ws, "P", &mut w, &extra, RunLimits::default()).unwrap_err();
    assert!(matches!(f.error, RuntimeError::BadBinding { .. }));
}
