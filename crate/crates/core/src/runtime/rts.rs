//! Run-time system for flat programs: a loop over an explicit work item
//! instead of recursion, working from state ids and reparsed expressions.

use std::collections::{BTreeMap, HashMap};

use super::{
    check_top_bindings, eval_expr, Environment, Frame, Recorder, RunLimits, RunResult,
    RuntimeError, TraceEvent, Value,
};
use crate::simworld::World;
use crate::statechart::{FlatExit, FlatProgram, NamedExpr, StateKind};
use crate::syntax::{parse_expression, Expr, TypeRef};

struct Call {
    receiver: String,
    interface: String,
    method: String,
    args: Vec<Expr>,
}

struct State {
    path: String,
    kind: StateKind,
    scope: Option<usize>,
    params: Vec<(TypeRef, String)>,
    call: Option<Call>,
    entry: Vec<Expr>,
    exit_rules: Vec<(Expr, String)>,
    exit_outcome: Option<String>,
}

struct Transition {
    guard: Option<Expr>,
    to: usize,
    bindings: Vec<(String, Expr)>,
}

struct Loaded {
    states: Vec<State>,
    transitions: Vec<Transition>,
    by_source: HashMap<(usize, String), Vec<usize>>,
    initial: HashMap<usize, (usize, Vec<(String, Expr)>)>,
}

fn malformed(message: impl Into<String>) -> RuntimeError {
    RuntimeError::MalformedProgram {
        message: message.into(),
    }
}

fn expr(text: &str) -> Result<Expr, RuntimeError> {
    parse_expression(text).map_err(|d| malformed(format!("`{text}`: {}", d.message)))
}

fn bindings(list: &[NamedExpr]) -> Result<Vec<(String, Expr)>, RuntimeError> {
    list.iter()
        .map(|b| Ok((b.name.clone(), expr(&b.expr)?)))
        .collect()
}

fn load(prog: &FlatProgram) -> Result<Loaded, RuntimeError> {
    prog.validate().map_err(|e| malformed(e.to_string()))?;
    let mut states = Vec::with_capacity(prog.states.len());
    for (i, s) in prog.states.iter().enumerate() {
        let kind = prog
            .state_kind(i)
            .ok_or_else(|| malformed(format!("state {i} has no kind")))?;
        let call = match &s.call {
            Some(c) => Some(Call {
                receiver: c.receiver.clone(),
                interface: c.interface.clone(),
                method: c.method.clone(),
                args: c.args.iter().map(|a| expr(a)).collect::<Result<_, _>>()?,
            }),
            None => None,
        };
        let (exit_rules, exit_outcome) = match &s.exit {
            Some(FlatExit::Rules(rules)) => (
                rules
                    .iter()
                    .map(|r| Ok((expr(&r.cond)?, r.outcome.clone())))
                    .collect::<Result<_, RuntimeError>>()?,
                None,
            ),
            Some(FlatExit::Outcome(o)) => (Vec::new(), Some(o.clone())),
            None => (Vec::new(), None),
        };
        states.push(State {
            path: s.path.clone(),
            kind,
            scope: s.scope_id,
            params: s
                .params
                .iter()
                .map(|p| (TypeRef::parse(&p.ty), p.name.clone()))
                .collect(),
            call,
            entry: s.entry.iter().map(|e| expr(e)).collect::<Result<_, _>>()?,
            exit_rules,
            exit_outcome,
        });
    }
    let mut transitions = Vec::with_capacity(prog.transitions.len());
    let mut by_source: HashMap<(usize, String), Vec<usize>> = HashMap::new();
    for (i, t) in prog.transitions.iter().enumerate() {
        transitions.push(Transition {
            guard: t.guard.as_deref().map(expr).transpose()?,
            to: t.to,
            bindings: bindings(&t.bindings)?,
        });
        by_source
            .entry((t.from, t.outcome.clone()))
            .or_default()
            .push(i);
    }
    let mut initial = HashMap::new();
    for init in &prog.initial {
        initial.insert(init.scope, (init.to, bindings(&init.bindings)?));
    }
    Ok(Loaded {
        states,
        transitions,
        by_source,
        initial,
    })
}

enum Work {
    Enter(usize, BTreeMap<String, Value>),
    Done(usize, String),
}

/// Executes a flat program against `world`.
pub fn execute_flat(
    prog: &FlatProgram,
    world: &mut dyn World,
    top: &BTreeMap<String, Value>,
    limits: RunLimits,
) -> RunResult {
    let mut rec = Recorder::new(limits);
    let loaded = match load(prog) {
        Ok(l) => l,
        Err(e) => return Err(rec.fail(e)),
    };
    let root_params = loaded.states[0].params.iter().map(|(t, n)| (t, n.as_str()));
    let frame = match check_top_bindings(root_params, top) {
        Ok(f) => f,
        Err(e) => return Err(rec.fail(e)),
    };
    let mut env = Environment::new();
    match machine(&loaded, world, &mut rec, &mut env, frame) {
        Ok(()) => Ok(rec.trace),
        Err(e) => Err(rec.fail(e)),
    }
}

fn truth(v: Value, what: &str) -> Result<bool, RuntimeError> {
    if let Value::Bool(b) = v {
        Ok(b)
    } else {
        Err(RuntimeError::TypeError {
            message: format!("{what} evaluated to {}", v.type_name()),
        })
    }
}

fn eval_edge(
    p: &Loaded,
    env: &Environment,
    list: &[(String, Expr)],
    to: usize,
) -> Result<Vec<(String, Value)>, RuntimeError> {
    let target = &p.states[to];
    let mut out = Vec::new();
    for (name, e) in list {
        let Some((ty, _)) = target.params.iter().find(|(_, n)| n == name) else {
            return Err(RuntimeError::TypeError {
                message: format!("`{}` has no parameter `{name}`", target.path),
            });
        };
        out.push((name.clone(), eval_expr(e, env, None)?.coerce_to(ty)));
    }
    Ok(out)
}

fn frame_for(
    p: &Loaded,
    env: &Environment,
    to: usize,
    explicit: Vec<(String, Value)>,
) -> Result<BTreeMap<String, Value>, RuntimeError> {
    let target = &p.states[to];
    let scope_params = target
        .scope
        .map(|s| p.states[s].params.as_slice())
        .unwrap_or_default();
    let mut explicit: BTreeMap<String, Value> = explicit.into_iter().collect();
    let mut frame = BTreeMap::new();
    for (ty, name) in &target.params {
        if let Some(v) = explicit.remove(name) {
            frame.insert(name.clone(), v);
            continue;
        }
        let same = scope_params.iter().any(|(t, n)| n == name && t == ty);
        match env.top().and_then(|f| f.vars.get(name)).filter(|_| same) {
            Some(v) => {
                frame.insert(name.clone(), v.clone());
            }
            None => {
                return Err(RuntimeError::UnboundParameter {
                    path: target.path.clone(),
                    name: name.clone(),
                })
            }
        }
    }
    Ok(frame)
}

fn run_atomic(
    s: &State,
    world: &mut dyn World,
    rec: &mut Recorder,
    env: &Environment,
) -> Result<String, RuntimeError> {
    for (i, e) in s.entry.iter().enumerate() {
        if !truth(eval_expr(e, env, None)?, "entry rule")? {
            return Err(RuntimeError::EntryViolated {
                path: s.path.clone(),
                rule_index: i,
            });
        }
    }
    let call = s
        .call
        .as_ref()
        .ok_or_else(|| malformed(format!("atomic state `{}` has no call", s.path)))?;
    let mut args = Vec::with_capacity(call.args.len());
    for a in &call.args {
        args.push(eval_expr(a, env, None)?);
    }
    let Some(Value::ApiObject { handle, .. }) = env.lookup(&call.receiver) else {
        return Err(RuntimeError::TypeError {
            message: format!("receiver `{}` is not an API object", call.receiver),
        });
    };
    let result = world.dispatch(handle, &call.interface, &call.method, &args)?;
    rec.emit(|step| TraceEvent::Call {
        step,
        path: s.path.clone(),
        interface: call.interface.clone(),
        method: call.method.clone(),
        args,
        result: result.clone(),
    })?;
    let mut idx = 0;
    let outcome = loop {
        let Some((cond, outcome)) = s.exit_rules.get(idx) else {
            return Err(RuntimeError::NoOutcome {
                path: s.path.clone(),
            });
        };
        if truth(eval_expr(cond, env, result.as_ref())?, "exit rule")? {
            break outcome.clone();
        }
        idx += 1;
    };
    rec.emit(|step| TraceEvent::Outcome {
        step,
        path: s.path.clone(),
        outcome: outcome.clone(),
        rule_index: idx,
    })?;
    rec.emit(|step| TraceEvent::Exit {
        step,
        path: s.path.clone(),
        outcome: outcome.clone(),
    })?;
    Ok(outcome)
}

fn machine(
    p: &Loaded,
    world: &mut dyn World,
    rec: &mut Recorder,
    env: &mut Environment,
    root_frame: BTreeMap<String, Value>,
) -> Result<(), RuntimeError> {
    let mut work = Work::Enter(0, root_frame);
    loop {
        work = match work {
            Work::Enter(id, frame) => {
                let s = &p.states[id];
                rec.emit(|step| TraceEvent::Enter {
                    step,
                    path: s.path.clone(),
                })?;
                env.push(Frame::new(s.path.clone(), frame));
                match s.kind {
                    StateKind::Atomic => {
                        let outcome = run_atomic(s, world, rec, env)?;
                        env.pop();
                        Work::Done(id, outcome)
                    }
                    StateKind::Composite => {
                        let (child, list) = p
                            .initial
                            .get(&id)
                            .ok_or_else(|| malformed(format!("`{}` has no initial", s.path)))?;
                        let vals = eval_edge(p, env, list, *child)?;
                        Work::Enter(*child, frame_for(p, env, *child, vals)?)
                    }
                    StateKind::Exit => {
                        return Err(malformed(format!("exit state `{}` entered", s.path)))
                    }
                }
            }
            Work::Done(id, outcome) => {
                let s = &p.states[id];
                let Some(parent) = s.scope else {
                    rec.emit(|step| TraceEvent::End {
                        step,
                        outcome,
                        steps: step,
                    })?;
                    return Ok(());
                };
                let mut chosen = None;
                for &ti in p
                    .by_source
                    .get(&(id, outcome.clone()))
                    .map(Vec::as_slice)
                    .unwrap_or_default()
                {
                    let t = &p.transitions[ti];
                    let open = match &t.guard {
                        None => true,
                        Some(g) => truth(eval_expr(g, env, None)?, "guard")?,
                    };
                    if open {
                        chosen = Some(t);
                        break;
                    }
                }
                let Some(t) = chosen else {
                    return Err(RuntimeError::NoTransition {
                        path: s.path.clone(),
                        outcome,
                    });
                };
                let target = &p.states[t.to];
                if target.kind == StateKind::Exit {
                    let out = target
                        .exit_outcome
                        .clone()
                        .ok_or_else(|| malformed(format!("`{}` has no outcome", target.path)))?;
                    rec.emit(|step| TraceEvent::Transition {
                        step,
                        from: s.path.clone(),
                        to: target.path.clone(),
                        bindings: BTreeMap::new(),
                    })?;
                    let scope = &p.states[parent];
                    rec.emit(|step| TraceEvent::Exit {
                        step,
                        path: scope.path.clone(),
                        outcome: out.clone(),
                    })?;
                    env.pop();
                    Work::Done(parent, out)
                } else {
                    let vals = eval_edge(p, env, &t.bindings, t.to)?;
                    rec.emit(|step| TraceEvent::Transition {
                        step,
                        from: s.path.clone(),
                        to: target.path.clone(),
                        bindings: vals.iter().cloned().collect(),
                    })?;
                    Work::Enter(t.to, frame_for(p, env, t.to, vals)?)
                }
            }
        };
    }
}
