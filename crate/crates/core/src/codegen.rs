//! Backends that turn a statechart into text artifacts.
//!
//! Two ship with the crate: `lrf`, the flat program read by the run-time
//! system, and `dot`, a Graphviz rendering. Other targets plug in through
//! [`Backend`] and [`BackendRegistry::register`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::statechart::{flatten, StateId, StateKind, StatechartIr};
use crate::syntax::print_expr;

/// One generated file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub filename: String,
    pub content: String,
}

pub trait Backend {
    fn name(&self) -> &str;
    /// Must be deterministic: equal input, byte-equal output.
    fn transform(&self, sc: &StatechartIr) -> Vec<Artifact>;
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodegenError {
    #[error("a backend named `{0}` is already registered")]
    DuplicateBackend(String),
    #[error("no backend named `{0}`")]
    UnknownBackend(String),
}

/// Name of the root process, used as the base name of artifacts.
pub fn process_name(sc: &StatechartIr) -> &str {
    &sc.root().path
}

pub fn emit_lrf(sc: &StatechartIr) -> String {
    flatten(sc).to_json()
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

fn short_name(path: &str) -> &str {
    path.rsplit('/').next().unwrap_or(path)
}

/// Graphviz digraph. Composites are clusters entered through a point node
/// carrying their id; atomics are boxes and exits double circles.
pub fn emit_dot(sc: &StatechartIr) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(process_name(sc)));
    out.push_str("  compound=true;\n  node [fontsize=10];\n");
    emit_state(sc, sc.root().id, 1, &mut out);
    for (comp, (child, _)) in &sc.initial_of {
        let _ = write!(
            out,
            "  s{comp} -> s{child} [style=dashed, label=\"initial\""
        );
        if sc.state(*child).kind == StateKind::Composite {
            let _ = write!(out, ", lhead=cluster_{child}");
        }
        out.push_str("];\n");
    }
    for t in &sc.transitions {
        let label = match &t.guard {
            Some(g) => format!("{}/{}", t.outcome, print_expr(g)),
            None => t.outcome.clone(),
        };
        let _ = write!(out, "  s{} -> s{} [label={}", t.from, t.to, quote(&label));
        if sc.state(t.from).kind == StateKind::Composite {
            let _ = write!(out, ", ltail=cluster_{}", t.from);
        }
        if sc.state(t.to).kind == StateKind::Composite {
            let _ = write!(out, ", lhead=cluster_{}", t.to);
        }
        out.push_str("];\n");
    }
    out.push_str("}\n");
    out
}

fn emit_state(sc: &StatechartIr, id: StateId, depth: usize, out: &mut String) {
    let s = sc.state(id);
    let pad = "  ".repeat(depth);
    match s.kind {
        StateKind::Composite => {
            let _ = writeln!(out, "{pad}subgraph cluster_{id} {{");
            let _ = writeln!(out, "{pad}  label={};", quote(short_name(&s.path)));
            let _ = writeln!(out, "{pad}  s{id} [shape=point, label=\"\"];");
            for &c in &s.children {
                emit_state(sc, c, depth + 1, out);
            }
            let _ = writeln!(out, "{pad}}}");
        }
        StateKind::Atomic => {
            let label = match &s.call {
                Some(c) => format!("{}\\n{}.{}", short_name(&s.path), c.receiver, c.method),
                None => short_name(&s.path).to_string(),
            };
            // label already carries a DOT escape, so only quotes are escaped
            let _ = writeln!(
                out,
                "{pad}s{id} [shape=box, label=\"{}\"];",
                label.replace('"', "\\\"")
            );
        }
        StateKind::Exit => {
            let outcome = s.outcome.as_deref().unwrap_or("");
            let _ = writeln!(
                out,
                "{pad}s{id} [shape=doublecircle, label={}];",
                quote(outcome)
            );
        }
    }
}

struct LrfBackend;

impl Backend for LrfBackend {
    fn name(&self) -> &str {
        "lrf"
    }

    fn transform(&self, sc: &StatechartIr) -> Vec<Artifact> {
        vec![Artifact {
            filename: format!("{}.lrf", process_name(sc)),
            content: emit_lrf(sc),
        }]
    }
}

struct DotBackend;

impl Backend for DotBackend {
    fn name(&self) -> &str {
        "dot"
    }

    fn transform(&self, sc: &StatechartIr) -> Vec<Artifact> {
        vec![Artifact {
            filename: format!("{}.dot", process_name(sc)),
            content: emit_dot(sc),
        }]
    }
}

pub struct BackendRegistry {
    backends: BTreeMap<String, Box<dyn Backend>>,
}

impl BackendRegistry {
    /// A registry holding only the built-in `lrf` backend.
    pub fn new() -> BackendRegistry {
        let mut r = BackendRegistry {
            backends: BTreeMap::new(),
        };
        r.register(Box::new(LrfBackend)).expect("empty registry");
        r
    }

    /// `lrf` plus `dot`.
    pub fn with_defaults() -> BackendRegistry {
        let mut r = BackendRegistry::new();
        r.register(Box::new(DotBackend))
            .expect("dot is not built in");
        r
    }

    pub fn register(&mut self, backend: Box<dyn Backend>) -> Result<(), CodegenError> {
        let name = backend.name().to_string();
        if self.backends.contains_key(&name) {
            return Err(CodegenError::DuplicateBackend(name));
        }
        self.backends.insert(name, backend);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&dyn Backend, CodegenError> {
        self.backends
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| CodegenError::UnknownBackend(name.to_string()))
    }

    /// Registered names in sorted order.
    pub fn list(&self) -> Vec<&str> {
        self.backends.keys().map(String::as_str).collect()
    }

    pub fn generate(&self, name: &str, sc: &StatechartIr) -> Result<Vec<Artifact>, CodegenError> {
        Ok(self.get(name)?.transform(sc))
    }
}

impl Default for BackendRegistry {
    fn default() -> Self {
        BackendRegistry::with_defaults()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statechart::tests::chain_ws;
    use crate::statechart::to_statechart;

    fn chain() -> StatechartIr {
        to_statechart(&chain_ws(), "P").unwrap()
    }

    #[test]
    fn chain_dot_counts() {
        let dot = emit_dot(&chain());
        assert_eq!(dot.matches("subgraph cluster_").count(), 3);
        assert_eq!(dot.matches("shape=box").count(), 1);
        assert_eq!(dot.matches("shape=doublecircle").count(), 3);
        assert!(dot.starts_with("digraph \"P\" {\n"));
    }

    #[test]
    fn lrf_is_flatten_json() {
        let sc = chain();
        assert_eq!(emit_lrf(&sc), flatten(&sc).to_json());
    }

    #[test]
    fn registry() {
        let mut r = BackendRegistry::new();
        assert_eq!(r.list(), ["lrf"]);
        r.register(Box::new(DotBackend)).unwrap();
        assert_eq!(r.list(), ["dot", "lrf"]);
        assert_eq!(
            r.register(Box::new(LrfBackend)).unwrap_err(),
            CodegenError::DuplicateBackend("lrf".into())
        );
        assert!(matches!(r.get("csv"), Err(CodegenError::UnknownBackend(_))));
        let out = r.generate("dot", &chain()).unwrap();
        assert_eq!(out[0].filename, "P.dot");
    }

    #[test]
    fn guard_label_is_escaped() {
        assert_eq!(quote(r#"a "b" \c"#), r#""a \"b\" \\c""#);
    }
}
