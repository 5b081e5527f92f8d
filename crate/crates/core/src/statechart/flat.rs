//! The flat, id-addressed program form and its `.lrf` JSON encoding.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{BindingIr, StateKind, StatechartIr};
use crate::syntax::{parse_expression, print_expr, TypeRef};

pub const LRF_VERSION: &str = "lrf-1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatProgram {
    pub version: String,
    pub states: Vec<FlatState>,
    pub transitions: Vec<FlatTransition>,
    pub initial: Vec<FlatInitial>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatState {
    pub id: usize,
    pub path: String,
    pub kind: String,
    #[serde(rename = "scopeId")]
    pub scope_id: Option<usize>,
    pub params: Vec<FlatParam>,
    pub call: Option<FlatCall>,
    pub entry: Vec<String>,
    /// Exit rules on atomic states, the outcome name on exit states, null otherwise.
    pub exit: Option<FlatExit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatParam {
    #[serde(rename = "type")]
    pub ty: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatCall {
    pub receiver: String,
    pub interface: String,
    pub method: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FlatExit {
    Rules(Vec<FlatExitRule>),
    Outcome(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatExitRule {
    pub cond: String,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedExpr {
    pub name: String,
    pub expr: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatTransition {
    pub from: usize,
    pub outcome: String,
    pub guard: Option<String>,
    pub to: usize,
    pub bindings: Vec<NamedExpr>,
}

/// Initial child of the composite `scope`, with the bindings of that entry edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatInitial {
    pub scope: usize,
    pub to: usize,
    pub bindings: Vec<NamedExpr>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProgramError {
    #[error("malformed program: {0}")]
    Malformed(String),
}

fn malformed<T>(msg: impl Into<String>) -> Result<T, ProgramError> {
    Err(ProgramError::Malformed(msg.into()))
}

fn named(bindings: &[BindingIr]) -> Vec<NamedExpr> {
    bindings
        .iter()
        .map(|b| NamedExpr {
            name: b.param.clone(),
            expr: print_expr(&b.value),
        })
        .collect()
}

/// Restructures the IR into the flat program form.
pub fn flatten(sc: &StatechartIr) -> FlatProgram {
    let states = sc
        .states
        .iter()
        .map(|s| FlatState {
            id: s.id,
            path: s.path.clone(),
            kind: s.kind.as_str().to_string(),
            scope_id: s.parent,
            params: s
                .params
                .iter()
                .map(|p| FlatParam {
                    ty: p.ty.to_string(),
                    name: p.name.clone(),
                })
                .collect(),
            call: s.call.as_ref().map(|c| FlatCall {
                receiver: c.receiver.clone(),
                interface: c.interface.clone(),
                method: c.method.clone(),
                args: c.args.iter().map(print_expr).collect(),
            }),
            entry: s.entry.iter().map(print_expr).collect(),
            exit: match s.kind {
                StateKind::Atomic => Some(FlatExit::Rules(
                    s.exit
                        .iter()
                        .map(|r| FlatExitRule {
                            cond: print_expr(&r.condition),
                            outcome: r.outcome.clone(),
                        })
                        .collect(),
                )),
                StateKind::Exit => s.outcome.clone().map(FlatExit::Outcome),
                StateKind::Composite => None,
            },
        })
        .collect();
    let transitions = sc
        .transitions
        .iter()
        .map(|t| FlatTransition {
            from: t.from,
            outcome: t.outcome.clone(),
            guard: t.guard.as_ref().map(print_expr),
            to: t.to,
            bindings: named(&t.bindings),
        })
        .collect();
    let initial = sc
        .initial_of
        .iter()
        .map(|(scope, (to, b))| FlatInitial {
            scope: *scope,
            to: *to,
            bindings: named(b),
        })
        .collect();
    FlatProgram {
        version: LRF_VERSION.to_string(),
        states,
        transitions,
        initial,
    }
}

impl FlatProgram {
    /// The `.lrf` text: pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("flat program serializes");
        s.push('\n');
        s
    }

    /// Parses and validates `.lrf` text.
    pub fn from_json(text: &str) -> Result<FlatProgram, ProgramError> {
        let prog: FlatProgram =
            serde_json::from_str(text).map_err(|e| ProgramError::Malformed(e.to_string()))?;
        prog.validate()?;
        Ok(prog)
    }

    pub fn state_kind(&self, id: usize) -> Option<StateKind> {
        match self.states.get(id)?.kind.as_str() {
            "composite" => Some(StateKind::Composite),
            "atomic" => Some(StateKind::Atomic),
            "exit" => Some(StateKind::Exit),
            _ => None,
        }
    }

    /// Structural checks beyond the JSON schema: dense ids, a single root,
    /// consistent scopes, parseable expressions.
    pub fn validate(&self) -> Result<(), ProgramError> {
        if self.version != LRF_VERSION {
            return malformed(format!("unsupported version `{}`", self.version));
        }
        if self.states.is_empty() {
            return malformed("no states");
        }
        let n = self.states.len();
        for (i, s) in self.states.iter().enumerate() {
            if s.id != i {
                return malformed(format!("state at index {i} has id {}", s.id));
            }
            let Some(kind) = self.state_kind(i) else {
                return malformed(format!("state {i} has unknown kind `{}`", s.kind));
            };
            match (i, s.scope_id) {
                (0, None) => {}
                (0, Some(_)) => return malformed("state 0 must be the root"),
                (_, None) => return malformed(format!("state {i} has no scope")),
                (_, Some(p)) if p >= i || self.state_kind(p) != Some(StateKind::Composite) => {
                    return malformed(format!("state {i} has invalid scope {p}"))
                }
                _ => {}
            }
            if i == 0 && kind != StateKind::Composite {
                return malformed("root must be a composite state");
            }
            for p in &s.params {
                if p.name.is_empty() || p.ty.is_empty() {
                    return malformed(format!("state {i} has an empty parameter"));
                }
                let _ = TypeRef::parse(&p.ty);
            }
            for e in &s.entry {
                check_expr(e)?;
            }
            match (kind, &s.call, &s.exit) {
                (StateKind::Atomic, Some(c), Some(FlatExit::Rules(rules))) => {
                    for a in &c.args {
                        check_expr(a)?;
                    }
                    for r in rules {
                        check_expr(&r.cond)?;
                    }
                    if !s.params.iter().any(|p| p.name == c.receiver) {
                        return malformed(format!("state {i} calls an unknown receiver"));
                    }
                }
                (StateKind::Exit, None, Some(FlatExit::Outcome(_))) if s.entry.is_empty() => {}
                (StateKind::Composite, None, None) if s.entry.is_empty() => {}
                _ => return malformed(format!("state {i} does not match its kind")),
            }
        }
        for t in &self.transitions {
            if t.from >= n || t.to >= n {
                return malformed("transition endpoint out of range");
            }
            if self.states[t.from].scope_id != self.states[t.to].scope_id {
                return malformed(format!("transition {}->{} crosses scopes", t.from, t.to));
            }
            if self.state_kind(t.from) == Some(StateKind::Exit) {
                return malformed("transition leaves an exit state");
            }
            if let Some(g) = &t.guard {
                check_expr(g)?;
            }
            for b in &t.bindings {
                check_expr(&b.expr)?;
            }
        }
        let mut scopes = BTreeSet::new();
        for init in &self.initial {
            if init.scope >= n || init.to >= n {
                return malformed("initial entry out of range");
            }
            if self.states[init.to].scope_id != Some(init.scope)
                || self.state_kind(init.to) == Some(StateKind::Exit)
            {
                return malformed(format!("initial child of {} is invalid", init.scope));
            }
            if !scopes.insert(init.scope) {
                return malformed(format!("composite {} has two initial entries", init.scope));
            }
            for b in &init.bindings {
                check_expr(&b.expr)?;
            }
        }
        for (i, _) in self.states.iter().enumerate() {
            if self.state_kind(i) == Some(StateKind::Composite) && !scopes.contains(&i) {
                return malformed(format!("composite {i} has no initial entry"));
            }
        }
        Ok(())
    }
}

fn check_expr(text: &str) -> Result<(), ProgramError> {
    parse_expression(text)
        .map(|_| ())
        .map_err(|d| ProgramError::Malformed(format!("bad expression `{text}`: {}", d.message)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statechart::tests::chain_ws;
    use crate::statechart::to_statechart;

    #[test]
    fn single_chain_flat() {
        let prog = flatten(&to_statechart(&chain_ws(), "P").unwrap());
        assert_eq!(prog.states.len(), 7);
        // follow the initial entries from the root down to a leaf
        let mut depth = 1;
        let mut cur = 0;
        while let Some(i) = prog.initial.iter().find(|i| i.scope == cur) {
            cur = i.to;
            depth += 1;
        }
        assert_eq!(depth, 4);
        assert_eq!(prog.state_kind(cur), Some(StateKind::Atomic));
    }

    #[test]
    fn json_round_trip_and_key_order() {
        let prog = flatten(&to_statechart(&chain_ws(), "P").unwrap());
        let text = prog.to_json();
        assert_eq!(FlatProgram::from_json(&text).unwrap(), prog);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let top: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        // serde_json's map is sorted here; order in the text is checked below
        assert_eq!(top.len(), 4);
        let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
        assert!(pos("version") < pos("states"));
        assert!(pos("states") < pos("transitions"));
        let first = &text[text.find('{').unwrap() + 1..];
        let state = &first[first.find('{').unwrap()..];
        let keys = [
            "id", "path", "kind", "scopeId", "params", "call", "entry", "exit",
        ];
        let offsets: Vec<usize> = keys
            .iter()
            .map(|k| state.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(offsets.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn truncated_is_malformed() {
        let text = flatten(&to_statechart(&chain_ws(), "P").unwrap()).to_json();
        let cut = &text[..text.len() / 2];
        assert!(matches!(
            FlatProgram::from_json(cut),
            Err(ProgramError::Malformed(_))
        ));
    }

    #[test]
    fn structural_damage_is_malformed() {
        let prog = flatten(&to_statechart(&chain_ws(), "P").unwrap());
        let mut bad = prog.clone();
        bad.transitions[0].to = 0;
        assert!(bad.validate().is_err());
        let mut bad = prog.clone();
        bad.initial.pop();
        assert!(bad.validate().is_err());
        let mut bad = prog;
        bad.states[3].exit = Some(FlatExit::Rules(vec![FlatExitRule {
            cond: "1 +".into(),
            outcome: "x".into(),
        }]));
        assert!(bad.validate().is_err());
    }
}
