use std::collections::BTreeMap;

use serde::Serialize;

use super::Value;

#[derive(Debug, Clone, PartialEq)]
pub enum TraceEvent {
    Enter {
        step: u64,
        path: String,
    },
    Call {
        step: u64,
        path: String,
        interface: String,
        method: String,
        args: Vec<Value>,
        result: Option<Value>,
    },
    Outcome {
        step: u64,
        path: String,
        outcome: String,
        rule_index: usize,
    },
    Transition {
        step: u64,
        from: String,
        to: String,
        bindings: BTreeMap<String, Value>,
    },
    Exit {
        step: u64,
        path: String,
        outcome: String,
    },
    End {
        step: u64,
        outcome: String,
        steps: u64,
    },
}

impl TraceEvent {
    pub fn step(&self) -> u64 {
        match self {
            TraceEvent::Enter { step, .. }
            | TraceEvent::Call { step, .. }
            | TraceEvent::Outcome { step, .. }
            | TraceEvent::Transition { step, .. }
            | TraceEvent::Exit { step, .. }
            | TraceEvent::End { step, .. } => *step,
        }
    }

    /// The `event` tag used in the serialized form.
    pub fn tag(&self) -> &'static str {
        match self {
            TraceEvent::Enter { .. } => "enter",
            TraceEvent::Call { .. } => "call",
            TraceEvent::Outcome { .. } => "outcome",
            TraceEvent::Transition { .. } => "transition",
            TraceEvent::Exit { .. } => "exit",
            TraceEvent::End { .. } => "end",
        }
    }

    pub fn path(&self) -> Option<&str> {
        match self {
            TraceEvent::Enter { path, .. }
            | TraceEvent::Call { path, .. }
            | TraceEvent::Outcome { path, .. }
            | TraceEvent::Exit { path, .. } => Some(path),
            TraceEvent::Transition { .. } | TraceEvent::End { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExecutionTrace {
    pub events: Vec<TraceEvent>,
}

impl ExecutionTrace {
    /// Outcome of the final `end` event, if the run completed.
    pub fn final_outcome(&self) -> Option<&str> {
        match self.events.last() {
            Some(TraceEvent::End { outcome, .. }) => Some(outcome),
            _ => None,
        }
    }

    pub fn count(&self, tag: &str) -> usize {
        self.events.iter().filter(|e| e.tag() == tag).count()
    }

    pub fn enters_of(&self, path: &str) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, TraceEvent::Enter { path: p, .. } if p == path))
            .count()
    }
}

pub(crate) fn value_to_string(v: &Value) -> String {
    serde_json::to_string(&V(v)).expect("value serializes")
}

struct V<'a>(&'a Value);

impl Serialize for V<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Value::ApiObject { interface, handle } => {
                use serde::ser::SerializeMap;
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("interface", interface)?;
                m.serialize_entry("handle", handle)?;
                m.end()
            }
            Value::Record(fields) => {
                use serde::ser::SerializeMap;
                let inner: BTreeMap<&str, V> =
                    fields.iter().map(|(k, v)| (k.as_str(), V(v))).collect();
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("record", &inner)?;
                m.end()
            }
            Value::Double(d) => s.serialize_f64(*d),
            Value::Int(i) => s.serialize_i64(*i),
            Value::Bool(b) => s.serialize_bool(*b),
            Value::Str(x) => s.serialize_str(x),
            Value::Opaque(h) => {
                use serde::ser::SerializeMap;
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("opaque", h)?;
                m.end()
            }
        }
    }
}

/// One trace line; field order is the serialized key order.
#[derive(Serialize, Default)]
#[serde(rename_all = "camelCase")]
struct Line<'a> {
    step: u64,
    event: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    interface: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    args: Option<Vec<V<'a>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<V<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    outcome: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rule_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    from: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    to: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bindings: Option<BTreeMap<&'a str, V<'a>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<u64>,
}

fn line(e: &TraceEvent) -> Line<'_> {
    let mut l = Line {
        step: e.step(),
        event: e.tag(),
        path: e.path(),
        ..Line::default()
    };
    match e {
        TraceEvent::Enter { .. } => {}
        TraceEvent::Call {
            interface,
            method,
            args,
            result,
            ..
        } => {
            l.interface = Some(interface);
            l.method = Some(method);
            l.args = Some(args.iter().map(V).collect());
            l.result = result.as_ref().map(V);
        }
        TraceEvent::Outcome {
            outcome,
            rule_index,
            ..
        } => {
            l.outcome = Some(outcome);
            l.rule_index = Some(*rule_index);
        }
        TraceEvent::Transition {
            from, to, bindings, ..
        } => {
            l.from = Some(from);
            l.to = Some(to);
            l.bindings = Some(bindings.iter().map(|(k, v)| (k.as_str(), V(v))).collect());
        }
        TraceEvent::Exit { outcome, .. } => l.outcome = Some(outcome),
        TraceEvent::End { outcome, steps, .. } => {
            l.outcome = Some(outcome);
            l.steps = Some(*steps);
        }
    }
    l
}

/// JSON Lines, one event per line, each line newline-terminated.
pub fn serialize_trace(t: &ExecutionTrace) -> String {
    let mut out = String::new();
    for e in &t.events {
        out.push_str(&serde_json::to_string(&line(e)).expect("trace line serializes"));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceDiff {
    Equal,
    /// 1-based step of the first line that differs or is missing on one side.
    DiffersAt(usize),
}

/// Compares two serialized traces line by line.
pub fn diff_traces(a: &str, b: &str) -> TraceDiff {
    let mut la = a.lines();
    let mut lb = b.lines();
    let mut step = 1;
    loop {
        match (la.next(), lb.next()) {
            (None, None) => return TraceDiff::Equal,
            (x, y) if x != y => return TraceDiff::DiffersAt(step),
            _ => step += 1,
        }
    }
}
