//! Glue between scenarios, worlds and the two executors.

use std::collections::BTreeMap;

use crate::runtime::ExecutionTrace;
use crate::runtime::{
    execute_flat, interpret, RunFailure, RunLimits, RunResult, RuntimeError, Value,
};
use crate::simworld::{Scenario, ScenarioError, World};
use crate::statechart::FlatProgram;
use crate::symbols::LinkedWorkspace;
use crate::syntax::{ModelKind, TypeRef};

/// The outcome of running one scenario, together with the world afterwards.
pub struct ScenarioRun {
    pub result: RunResult,
    pub world: Box<dyn World>,
}

impl ScenarioRun {
    pub fn trace(&self) -> &ExecutionTrace {
        match &self.result {
            Ok(t) => t,
            Err(f) => &f.trace,
        }
    }
}

fn limits(sc: &Scenario, max_steps: Option<u64>) -> RunLimits {
    max_steps.map(RunLimits::new).unwrap_or(sc.limits)
}

/// Interprets process `process` of `ws` under scenario `sc`. `max_steps`
/// overrides the scenario's own limit.
pub fn interpret_scenario(
    ws: &LinkedWorkspace,
    process: &str,
    sc: &Scenario,
    max_steps: Option<u64>,
) -> Result<ScenarioRun, ScenarioError> {
    let mut world = sc.build_world();
    let limits = limits(sc, max_steps);
    let Some(model) = ws.model(ModelKind::Process, process) else {
        let result = Err(RunFailure {
            error: RuntimeError::RootNotFound(process.to_string()),
            trace: ExecutionTrace::default(),
        });
        return Ok(ScenarioRun { result, world });
    };
    let top = sc.resolve_bindings(
        model.params().iter().map(|p| (&p.ty, p.name.as_str())),
        world.as_ref(),
    )?;
    let result = interpret(ws, process, world.as_mut(), &top, limits);
    Ok(ScenarioRun { result, world })
}

/// Runs a flat program under scenario `sc`.
pub fn execute_scenario(
    prog: &FlatProgram,
    sc: &Scenario,
    max_steps: Option<u64>,
) -> Result<ScenarioRun, ScenarioError> {
    let mut world = sc.build_world();
    let limits = limits(sc, max_steps);
    let params: Vec<(TypeRef, String)> = prog
        .states
        .first()
        .map(|root| {
            root.params
                .iter()
                .map(|p| (TypeRef::parse(&p.ty), p.name.clone()))
                .collect()
        })
        .unwrap_or_default();
    let top: BTreeMap<String, Value> =
        sc.resolve_bindings(params.iter().map(|(t, n)| (t, n.as_str())), world.as_ref())?;
    let result = execute_flat(prog, world.as_mut(), &top, limits);
    Ok(ScenarioRun { result, world })
}
