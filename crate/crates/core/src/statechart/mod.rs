//! Hierarchical statechart IR built from a linked process model.
//!
//! A process becomes the root composite state. Every task and skill node
//! becomes a composite child, every action node an atomic state, and every
//! distinct `end X` of a net an explicit exit state under that net's
//! composite. Each node occurrence gets its own subtree, so two nodes that
//! reference the same skill have independent states and parameter scopes.

mod flat;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::diagnostic::SourcePos;
use crate::symbols::LinkedWorkspace;
use crate::syntax::{Binding, Expr, ModelAst, ModelKind, Param, Target, TypeRef};

pub use flat::{
    flatten, FlatCall, FlatExit, FlatExitRule, FlatInitial, FlatParam, FlatProgram, FlatState,
    FlatTransition, NamedExpr, ProgramError, LRF_VERSION,
};

pub type StateId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateKind {
    Composite,
    Atomic,
    Exit,
}

impl StateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StateKind::Composite => "composite",
            StateKind::Atomic => "atomic",
            StateKind::Exit => "exit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScopeParam {
    pub ty: TypeRef,
    pub name: String,
}

impl From<&Param> for ScopeParam {
    fn from(p: &Param) -> Self {
        ScopeParam {
            ty: p.ty.clone(),
            name: p.name.clone(),
        }
    }
}

/// The robot-API call of an atomic state, with the receiver's interface resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct CallIr {
    pub receiver: String,
    pub interface: String,
    pub method: String,
    pub args: Vec<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExitRuleIr {
    pub condition: Expr,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub id: StateId,
    pub path: String,
    pub kind: StateKind,
    pub parent: Option<StateId>,
    pub children: Vec<StateId>,
    pub params: Vec<ScopeParam>,
    pub call: Option<CallIr>,
    pub entry: Vec<Expr>,
    pub exit: Vec<ExitRuleIr>,
    /// Set on exit states only.
    pub outcome: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BindingIr {
    pub param: String,
    pub value: Expr,
}

impl From<&Binding> for BindingIr {
    fn from(b: &Binding) -> Self {
        BindingIr {
            param: b.param.name.clone(),
            value: b.value.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionIr {
    pub from: StateId,
    pub outcome: String,
    pub guard: Option<Expr>,
    pub to: StateId,
    pub bindings: Vec<BindingIr>,
    /// Position of the net transition this was generated from.
    pub origin: SourcePos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatechartIr {
    pub states: Vec<State>,
    pub transitions: Vec<TransitionIr>,
    pub initial_of: BTreeMap<StateId, (StateId, Vec<BindingIr>)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatechartError {
    #[error("no model named `{0}`")]
    RootNotFound(String),
    #[error("`{name}` is a {kind}, not a process")]
    NotAProcess { name: String, kind: ModelKind },
    #[error("model is not well-formed: {0}")]
    IllFormed(String),
}

/// Path segment used for the exit state of outcome `outcome`.
pub fn exit_segment(outcome: &str) -> String {
    format!("end:{outcome}")
}

impl StatechartIr {
    pub fn root(&self) -> &State {
        &self.states[0]
    }

    pub fn state(&self, id: StateId) -> &State {
        &self.states[id]
    }

    pub fn count(&self, kind: StateKind) -> usize {
        self.states.iter().filter(|s| s.kind == kind).count()
    }

    pub fn by_path(&self, path: &str) -> Option<&State> {
        self.states.iter().find(|s| s.path == path)
    }

    /// Transitions leaving `from` on `outcome`, in declaration order.
    pub fn transitions_from<'a>(
        &'a self,
        from: StateId,
        outcome: &'a str,
    ) -> impl Iterator<Item = &'a TransitionIr> + 'a {
        self.transitions
            .iter()
            .filter(move |t| t.from == from && t.outcome == outcome)
    }
}

/// Builds the IR for process `root`.
pub fn to_statechart(ws: &LinkedWorkspace, root: &str) -> Result<StatechartIr, StatechartError> {
    let Some(model) = ws.model(ModelKind::Process, root) else {
        let other = ModelKind::ALL.into_iter().find_map(|k| ws.model(k, root));
        return Err(match other {
            Some(m) => StatechartError::NotAProcess {
                name: root.to_string(),
                kind: m.kind(),
            },
            None => StatechartError::RootNotFound(root.to_string()),
        });
    };
    let mut b = Builder {
        ws,
        ir: StatechartIr {
            states: Vec::new(),
            transitions: Vec::new(),
            initial_of: BTreeMap::new(),
        },
    };
    b.instantiate(model, root.to_string(), None)?;
    Ok(b.ir)
}

struct Builder<'a> {
    ws: &'a LinkedWorkspace,
    ir: StatechartIr,
}

impl<'a> Builder<'a> {
    fn alloc(&mut self, path: String, kind: StateKind, parent: Option<StateId>) -> StateId {
        let id = self.ir.states.len();
        self.ir.states.push(State {
            id,
            path,
            kind,
            parent,
            children: Vec::new(),
            params: Vec::new(),
            call: None,
            entry: Vec::new(),
            exit: Vec::new(),
            outcome: None,
        });
        if let Some(p) = parent {
            self.ir.states[p].children.push(id);
        }
        id
    }

    fn instantiate(
        &mut self,
        model: &'a ModelAst,
        path: String,
        parent: Option<StateId>,
    ) -> Result<StateId, StatechartError> {
        if let Some(a) = model.as_action() {
            let id = self.alloc(path, StateKind::Atomic, parent);
            let call = &a.execution;
            let receiver = a
                .params
                .iter()
                .find(|p| p.name == call.receiver.name)
                .ok_or_else(|| {
                    StatechartError::IllFormed(format!(
                        "receiver `{}` of `{}` is not a parameter",
                        call.receiver.name,
                        model.name()
                    ))
                })?;
            let st = &mut self.ir.states[id];
            st.params = a.params.iter().map(ScopeParam::from).collect();
            st.call = Some(CallIr {
                receiver: call.receiver.name.clone(),
                interface: receiver.ty.name().to_string(),
                method: call.method.name.clone(),
                args: call.args.clone(),
            });
            st.entry = a.entry_rules.clone();
            st.exit = a
                .exit_rules
                .iter()
                .map(|r| ExitRuleIr {
                    condition: r.condition.clone(),
                    outcome: r.outcome.name.clone(),
                })
                .collect();
            return Ok(id);
        }

        let net = model.as_net().ok_or_else(|| {
            StatechartError::IllFormed(format!("`{}` is not a net", model.name()))
        })?;
        let id = self.alloc(path.clone(), StateKind::Composite, parent);
        self.ir.states[id].params = net.params.iter().map(ScopeParam::from).collect();

        let mut node_ids: BTreeMap<&str, StateId> = BTreeMap::new();
        for node in &net.nodes {
            let target = self
                .ws
                .node_target(model.kind(), model.name(), &node.name.name)
                .ok_or_else(|| {
                    StatechartError::IllFormed(format!(
                        "node `{}` of `{}` does not resolve",
                        node.name.name,
                        model.name()
                    ))
                })?;
            if Some(target.kind()) != model.kind().child_kind() {
                return Err(StatechartError::IllFormed(format!(
                    "node `{}` of {} `{}` references {} `{}`",
                    node.name.name,
                    model.kind(),
                    model.name(),
                    target.kind(),
                    target.name()
                )));
            }
            let child = self.instantiate(target, format!("{path}/{}", node.name.name), Some(id))?;
            node_ids.insert(&node.name.name, child);
        }

        let mut exit_ids: BTreeMap<String, StateId> = BTreeMap::new();
        for outcome in model.outcomes() {
            let eid = self.alloc(
                format!("{path}/{}", exit_segment(outcome)),
                StateKind::Exit,
                Some(id),
            );
            self.ir.states[eid].outcome = Some(outcome.to_string());
            exit_ids.insert(outcome.to_string(), eid);
        }

        let lookup = |name: &str| {
            node_ids.get(name).copied().ok_or_else(|| {
                StatechartError::IllFormed(format!("`{name}` is not a node of `{}`", model.name()))
            })
        };
        for t in &net.transitions {
            let from = lookup(&t.source.name)?;
            let (to, bindings) = match &t.target {
                Target::Node { node, bindings } => (
                    lookup(&node.name)?,
                    bindings.iter().map(BindingIr::from).collect(),
                ),
                Target::End(o) => (exit_ids[&o.name], Vec::new()),
            };
            self.ir.transitions.push(TransitionIr {
                from,
                outcome: t.outcome.name.clone(),
                guard: t.guard.clone(),
                to,
                bindings,
                origin: t.pos.clone(),
            });
        }
        let init = lookup(&net.initial.node.name)?;
        self.ir.initial_of.insert(
            id,
            (
                init,
                net.initial.bindings.iter().map(BindingIr::from).collect(),
            ),
        );
        Ok(id)
    }
}

/// For each composite, the outcomes of its exit states that some path from
/// its initial child can reach, assuming every guard and exit rule can hold.
pub fn reachable_outcomes(sc: &StatechartIr) -> BTreeMap<StateId, BTreeSet<String>> {
    let mut memo = BTreeMap::new();
    for s in &sc.states {
        if s.kind == StateKind::Composite {
            composite_outcomes(sc, s.id, &mut memo);
        }
    }
    memo
}

fn composite_outcomes(
    sc: &StatechartIr,
    id: StateId,
    memo: &mut BTreeMap<StateId, BTreeSet<String>>,
) -> BTreeSet<String> {
    if let Some(r) = memo.get(&id) {
        return r.clone();
    }
    let mut result = BTreeSet::new();
    if let Some((init, _)) = sc.initial_of.get(&id) {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([*init]);
        while let Some(cur) = queue.pop_front() {
            if !seen.insert(cur) {
                continue;
            }
            let st = sc.state(cur);
            let signals: BTreeSet<String> = match st.kind {
                StateKind::Atomic => st.exit.iter().map(|r| r.outcome.clone()).collect(),
                StateKind::Composite => composite_outcomes(sc, cur, memo),
                StateKind::Exit => {
                    result.extend(st.outcome.clone());
                    continue;
                }
            };
            for o in &signals {
                for t in sc.transitions_from(cur, o) {
                    queue.push_back(t.to);
                }
            }
        }
    }
    memo.insert(id, result.clone());
    result
}
