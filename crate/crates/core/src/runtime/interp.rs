//! Recursive interpreter over the linked model tree.

use std::collections::BTreeMap;

use super::{
    check_top_bindings, eval_expr, Environment, Frame, Recorder, RunLimits, RunResult,
    RuntimeError, TraceEvent, Value,
};
use crate::simworld::World;
use crate::statechart::exit_segment;
use crate::symbols::LinkedWorkspace;
use crate::syntax::{ActionAst, Binding, Expr, ModelAst, ModelKind, NetAst, Target};

/// Runs process `root` against `world`, starting from `top` as the
/// process parameters.
pub fn interpret(
    ws: &LinkedWorkspace,
    root: &str,
    world: &mut dyn World,
    top: &BTreeMap<String, Value>,
    limits: RunLimits,
) -> RunResult {
    let rec = Recorder::new(limits);
    let Some(model) = ws.model(ModelKind::Process, root) else {
        return Err(rec.fail(RuntimeError::RootNotFound(root.to_string())));
    };
    let frame =
        match check_top_bindings(model.params().iter().map(|p| (&p.ty, p.name.as_str())), top) {
            Ok(f) => f,
            Err(e) => return Err(rec.fail(e)),
        };
    let mut it = Interp {
        ws,
        world,
        rec,
        env: Environment::new(),
    };
    let run = it
        .run_net(model, root.to_string(), frame)
        .and_then(|outcome| {
            it.rec.emit(|step| TraceEvent::End {
                step,
                outcome,
                steps: step,
            })
        });
    match run {
        Ok(()) => Ok(it.rec.trace),
        Err(e) => Err(it.rec.fail(e)),
    }
}

struct Interp<'w, 'a> {
    ws: &'a LinkedWorkspace,
    world: &'w mut dyn World,
    rec: Recorder,
    env: Environment,
}

fn expect_bool(v: Value, what: &str) -> Result<bool, RuntimeError> {
    match v {
        Value::Bool(b) => Ok(b),
        other => Err(RuntimeError::TypeError {
            message: format!("{what} evaluated to {}", other.type_name()),
        }),
    }
}

impl<'w, 'a> Interp<'w, 'a> {
    fn child(&self, net_model: &ModelAst, node: &str) -> Result<&'a ModelAst, RuntimeError> {
        self.ws
            .node_target(net_model.kind(), net_model.name(), node)
            .ok_or_else(|| RuntimeError::TypeError {
                message: format!("node `{node}` of `{}` does not resolve", net_model.name()),
            })
    }

    /// Evaluates explicit bindings in the current frame, widened to the
    /// target's parameter types.
    fn eval_bindings(
        &self,
        bindings: &[Binding],
        target: &ModelAst,
    ) -> Result<Vec<(String, Value)>, RuntimeError> {
        let mut out = Vec::with_capacity(bindings.len());
        for b in bindings {
            let param = target
                .params()
                .iter()
                .find(|p| p.name == b.param.name)
                .ok_or_else(|| RuntimeError::TypeError {
                    message: format!("`{}` has no parameter `{}`", target.name(), b.param.name),
                })?;
            let v = eval_expr(&b.value, &self.env, None)?.coerce_to(&param.ty);
            out.push((b.param.name.clone(), v));
        }
        Ok(out)
    }

    /// Explicit values first, then same-named same-typed parameters of the
    /// enclosing net.
    fn child_frame(
        &self,
        net_model: &ModelAst,
        target: &ModelAst,
        explicit: &[(String, Value)],
        child_path: &str,
    ) -> Result<BTreeMap<String, Value>, RuntimeError> {
        let mut frame = BTreeMap::new();
        for p in target.params() {
            let v = if let Some((_, v)) = explicit.iter().find(|(n, _)| *n == p.name) {
                v.clone()
            } else {
                let inherited = net_model
                    .params()
                    .iter()
                    .any(|q| q.name == p.name && q.ty == p.ty);
                let here = self.env.top().and_then(|f| f.vars.get(&p.name));
                match (inherited, here) {
                    (true, Some(v)) => v.clone(),
                    _ => {
                        return Err(RuntimeError::UnboundParameter {
                            path: child_path.to_string(),
                            name: p.name.clone(),
                        })
                    }
                }
            };
            frame.insert(p.name.clone(), v);
        }
        Ok(frame)
    }

    fn run_node(
        &mut self,
        model: &'a ModelAst,
        path: String,
        frame: BTreeMap<String, Value>,
    ) -> Result<String, RuntimeError> {
        match model.as_action() {
            Some(a) => self.run_action(a, path, frame),
            None => self.run_net(model, path, frame),
        }
    }

    fn run_net(
        &mut self,
        model: &'a ModelAst,
        path: String,
        frame: BTreeMap<String, Value>,
    ) -> Result<String, RuntimeError> {
        let net: &NetAst = model.as_net().ok_or_else(|| RuntimeError::TypeError {
            message: format!("`{}` is not a net", model.name()),
        })?;
        self.rec.emit(|step| TraceEvent::Enter {
            step,
            path: path.clone(),
        })?;
        self.env.push(Frame::new(path.clone(), frame));

        let mut node = net.initial.node.name.as_str();
        let mut target = self.child(model, node)?;
        let mut explicit = self.eval_bindings(&net.initial.bindings, target)?;
        loop {
            let child_path = format!("{path}/{node}");
            let child_frame = self.child_frame(model, target, &explicit, &child_path)?;
            let outcome = self.run_node(target, child_path.clone(), child_frame)?;

            let mut chosen = None;
            for t in &net.transitions {
                if t.source.name != node || t.outcome.name != outcome {
                    continue;
                }
                let enabled = match &t.guard {
                    Some(g) => expect_bool(eval_expr(g, &self.env, None)?, "guard")?,
                    None => true,
                };
                if enabled {
                    chosen = Some(t);
                    break;
                }
            }
            let Some(t) = chosen else {
                return Err(RuntimeError::NoTransition {
                    path: child_path,
                    outcome,
                });
            };
            match &t.target {
                Target::Node {
                    node: next,
                    bindings,
                } => {
                    let next_model = self.child(model, &next.name)?;
                    let vals = self.eval_bindings(bindings, next_model)?;
                    self.rec.emit(|step| TraceEvent::Transition {
                        step,
                        from: child_path,
                        to: format!("{path}/{}", next.name),
                        bindings: vals.iter().cloned().collect(),
                    })?;
                    node = next.name.as_str();
                    target = next_model;
                    explicit = vals;
                }
                Target::End(end) => {
                    self.rec.emit(|step| TraceEvent::Transition {
                        step,
                        from: child_path,
                        to: format!("{path}/{}", exit_segment(&end.name)),
                        bindings: BTreeMap::new(),
                    })?;
                    self.rec.emit(|step| TraceEvent::Exit {
                        step,
                        path: path.clone(),
                        outcome: end.name.clone(),
                    })?;
                    self.env.pop();
                    return Ok(end.name.clone());
                }
            }
        }
    }

    fn run_action(
        &mut self,
        action: &'a ActionAst,
        path: String,
        frame: BTreeMap<String, Value>,
    ) -> Result<String, RuntimeError> {
        self.rec.emit(|step| TraceEvent::Enter {
            step,
            path: path.clone(),
        })?;
        let params = &action.params;
        self.env.push(Frame::new(path.clone(), frame));

        for (i, rule) in action.entry_rules.iter().enumerate() {
            if !expect_bool(eval_expr(rule, &self.env, None)?, "entry rule")? {
                return Err(RuntimeError::EntryViolated {
                    path,
                    rule_index: i,
                });
            }
        }
        let call = &action.execution;
        let args = call
            .args
            .iter()
            .map(|a: &Expr| eval_expr(a, &self.env, None))
            .collect::<Result<Vec<_>, _>>()?;
        let interface = params
            .iter()
            .find(|p| p.name == call.receiver.name)
            .map(|p| p.ty.name().to_string())
            .ok_or_else(|| RuntimeError::TypeError {
                message: format!("receiver `{}` is not a parameter", call.receiver.name),
            })?;
        let handle = match self.env.lookup(&call.receiver.name) {
            Some(Value::ApiObject { handle, .. }) => handle.clone(),
            _ => {
                return Err(RuntimeError::TypeError {
                    message: format!("receiver `{}` is not an API object", call.receiver.name),
                })
            }
        };
        let result = self
            .world
            .dispatch(&handle, &interface, &call.method.name, &args)?;
        self.rec.emit(|step| TraceEvent::Call {
            step,
            path: path.clone(),
            interface,
            method: call.method.name.clone(),
            args,
            result: result.clone(),
        })?;

        let mut selected = None;
        for (i, rule) in action.exit_rules.iter().enumerate() {
            if expect_bool(
                eval_expr(&rule.condition, &self.env, result.as_ref())?,
                "exit rule",
            )? {
                selected = Some((i, rule.outcome.name.clone()));
                break;
            }
        }
        let Some((rule_index, outcome)) = selected else {
            return Err(RuntimeError::NoOutcome { path });
        };
        self.rec.emit(|step| TraceEvent::Outcome {
            step,
            path: path.clone(),
            outcome: outcome.clone(),
            rule_index,
        })?;
        self.rec.emit(|step| TraceEvent::Exit {
            step,
            path: path.clone(),
            outcome: outcome.clone(),
        })?;
        self.env.pop();
        Ok(outcome)
    }
}
