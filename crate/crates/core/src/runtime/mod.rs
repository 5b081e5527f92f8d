//! Deterministic execution of models: a recursive interpreter over the
//! linked AST and an iterative run-time system over flat programs. Both
//! emit the same trace for the same inputs.

mod eval;
mod interp;
mod rts;
mod trace;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::{PrimType, TypeRef};

pub use eval::{eval_expr, Environment, Frame};
pub use interp::interpret;
pub use rts::execute_flat;
pub use trace::{diff_traces, serialize_trace, ExecutionTrace, TraceDiff, TraceEvent};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Double(f64),
    Int(i64),
    Bool(bool),
    Str(String),
    Opaque(String),
    Record(BTreeMap<String, Value>),
    ApiObject { interface: String, handle: String },
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Double(_) => "Double",
            Value::Int(_) => "Int",
            Value::Bool(_) => "Bool",
            Value::Str(_) => "String",
            Value::Opaque(_) => "opaque",
            Value::Record(_) => "record",
            Value::ApiObject { .. } => "interface",
        }
    }

    pub fn record<I, K>(fields: I) -> Value
    where
        I: IntoIterator<Item = (K, Value)>,
        K: Into<String>,
    {
        Value::Record(fields.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    /// Whether this value may be stored in a slot of type `ty`. Named types
    /// accept any object, opaque or record value; their precise identity is
    /// settled statically.
    pub fn fits(&self, ty: &TypeRef) -> bool {
        match (ty, self) {
            (TypeRef::Prim(PrimType::Double), Value::Double(_))
            | (TypeRef::Prim(PrimType::Int), Value::Int(_))
            | (TypeRef::Prim(PrimType::Bool), Value::Bool(_))
            | (TypeRef::Prim(PrimType::String), Value::Str(_)) => true,
            (TypeRef::Named(n), Value::ApiObject { interface, .. }) => n == interface,
            (TypeRef::Named(_), Value::Opaque(_) | Value::Record(_)) => true,
            _ => false,
        }
    }

    /// Int widened to Double when the slot is Double; everything else unchanged.
    pub fn coerce_to(self, ty: &TypeRef) -> Value {
        match (ty, self) {
            (TypeRef::Prim(PrimType::Double), Value::Int(i)) => Value::Double(i as f64),
            (_, v) => v,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&trace::value_to_string(self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunLimits {
    pub max_steps: u64,
}

impl RunLimits {
    pub const DEFAULT_MAX_STEPS: u64 = 10_000;

    pub fn new(max_steps: u64) -> RunLimits {
        RunLimits {
            max_steps: max_steps.max(1),
        }
    }
}

impl Default for RunLimits {
    fn default() -> Self {
        RunLimits::new(Self::DEFAULT_MAX_STEPS)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuntimeError {
    #[error("entry rule {rule_index} of `{path}` does not hold")]
    EntryViolated { path: String, rule_index: usize },
    #[error("no exit rule of `{path}` is satisfied")]
    NoOutcome { path: String },
    #[error("no enabled transition for outcome `{outcome}` of `{path}`")]
    NoTransition { path: String, outcome: String },
    #[error("step limit of {max_steps} exceeded")]
    StepLimitExceeded { max_steps: u64 },
    #[error("world fault: {message}")]
    WorldFault { message: String },
    #[error("world has no method `{interface}.{method}`")]
    UnknownMethod { interface: String, method: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("arithmetic overflow")]
    ArithmeticOverflow,
    #[error("parameter `{name}` of `{path}` is unbound")]
    UnboundParameter { path: String, name: String },
    #[error("bad top-level binding `{name}`: {message}")]
    BadBinding { name: String, message: String },
    #[error("type error: {message}")]
    TypeError { message: String },
    #[error("result has no field `{field}`")]
    MissingField { field: String },
    #[error("no process named `{0}`")]
    RootNotFound(String),
    #[error("malformed program: {message}")]
    MalformedProgram { message: String },
}

impl RuntimeError {
    /// Variant name, as used in corpus manifests.
    pub fn kind(&self) -> &'static str {
        match self {
            RuntimeError::EntryViolated { .. } => "EntryViolated",
            RuntimeError::NoOutcome { .. } => "NoOutcome",
            RuntimeError::NoTransition { .. } => "NoTransition",
            RuntimeError::StepLimitExceeded { .. } => "StepLimitExceeded",
            RuntimeError::WorldFault { .. } => "WorldFault",
            RuntimeError::UnknownMethod { .. } => "UnknownMethod",
            RuntimeError::DivisionByZero => "DivisionByZero",
            RuntimeError::ArithmeticOverflow => "ArithmeticOverflow",
            RuntimeError::UnboundParameter { .. } => "UnboundParameter",
            RuntimeError::BadBinding { .. } => "BadBinding",
            RuntimeError::TypeError { .. } => "TypeError",
            RuntimeError::MissingField { .. } => "MissingField",
            RuntimeError::RootNotFound(_) => "RootNotFound",
            RuntimeError::MalformedProgram { .. } => "MalformedProgram",
        }
    }
}

/// A failed run: the error plus every event emitted before it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub error: RuntimeError,
    pub trace: ExecutionTrace,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (after {} events)",
            self.error,
            self.trace.events.len()
        )
    }
}

impl std::error::Error for RunFailure {}

pub type RunResult = Result<ExecutionTrace, RunFailure>;

/// Checks that `bindings` covers exactly the root parameters with fitting values.
fn check_top_bindings<'a>(
    params: impl Iterator<Item = (&'a TypeRef, &'a str)> + Clone,
    bindings: &BTreeMap<String, Value>,
) -> Result<BTreeMap<String, Value>, RuntimeError> {
    for name in bindings.keys() {
        if !params.clone().any(|(_, n)| n == name) {
            return Err(RuntimeError::BadBinding {
                name: name.clone(),
                message: "not a parameter of the root process".into(),
            });
        }
    }
    let mut frame = BTreeMap::new();
    for (ty, name) in params {
        let Some(v) = bindings.get(name) else {
            return Err(RuntimeError::BadBinding {
                name: name.to_string(),
                message: "missing".into(),
            });
        };
        let v = v.clone().coerce_to(ty);
        if !v.fits(ty) {
            return Err(RuntimeError::BadBinding {
                name: name.to_string(),
                message: format!("expected `{ty}`, got {}", v.type_name()),
            });
        }
        frame.insert(name.to_string(), v);
    }
    Ok(frame)
}

/// Emits events with consecutive step numbers up to the limit.
struct Recorder {
    trace: ExecutionTrace,
    limits: RunLimits,
}

impl Recorder {
    fn new(limits: RunLimits) -> Recorder {
        Recorder {
            trace: ExecutionTrace::default(),
            limits,
        }
    }

    fn next_step(&self) -> u64 {
        self.trace.events.len() as u64 + 1
    }

    fn emit(&mut self, make: impl FnOnce(u64) -> TraceEvent) -> Result<(), RuntimeError> {
        let step = self.next_step();
        if step > self.limits.max_steps {
            return Err(RuntimeError::StepLimitExceeded {
                max_steps: self.limits.max_steps,
            });
        }
        self.trace.events.push(make(step));
        Ok(())
    }

    fn fail(self, error: RuntimeError) -> RunFailure {
        RunFailure {
            error,
            trace: self.trace,
        }
    }
}
