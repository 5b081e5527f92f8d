//! Deterministic simulated robot cells and the scenario files that configure them.
//!
//! A world owns a fixed table of named objects (robot interfaces and
//! opaque frames) and answers robot-API calls on them. Evolution depends
//! only on the configuration and the sequence of calls.

mod blocks;
mod cleanup;
mod screwdriver;

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::Value as Json;
use thiserror::Error;

use crate::diagnostic::{Diagnostic, SourcePos};
use crate::runtime::{RunLimits, RuntimeError, Value};
use crate::syntax::{PrimType, TypeRef};

pub use blocks::{BlocksConfig, BlocksWorld};
pub use cleanup::{CleanupBlock, CleanupConfig, CleanupWorld};
pub use screwdriver::{ScrewdriverConfig, ScrewdriverWorld};

/// An entry of a world's object table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldObject {
    pub type_name: String,
    pub is_interface: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorldError {
    #[error("{0}")]
    Fault(String),
    #[error("no method `{interface}.{method}`")]
    UnknownMethod { interface: String, method: String },
}

impl From<WorldError> for RuntimeError {
    fn from(e: WorldError) -> Self {
        match e {
            WorldError::Fault(message) => RuntimeError::WorldFault { message },
            WorldError::UnknownMethod { interface, method } => {
                RuntimeError::UnknownMethod { interface, method }
            }
        }
    }
}

pub trait World {
    fn kind(&self) -> &'static str;

    fn object(&self, handle: &str) -> Option<WorldObject>;

    /// Performs one robot-API call on the object `handle`. `Ok(None)` is a
    /// void return.
    fn dispatch(
        &mut self,
        handle: &str,
        interface: &str,
        method: &str,
        args: &[Value],
    ) -> Result<Option<Value>, WorldError>;

    /// Calls so far, keyed by `Interface.method`.
    fn call_counts(&self) -> &BTreeMap<String, u64>;
}

/// Object table plus call counters shared by the world implementations.
#[derive(Debug, Clone, Default)]
struct Objects {
    table: BTreeMap<String, WorldObject>,
    counts: BTreeMap<String, u64>,
}

impl Objects {
    fn new(interfaces: &[(&str, &str)], opaque: &[(&str, &str)]) -> Objects {
        let mut table = BTreeMap::new();
        for (h, t) in interfaces {
            table.insert(
                h.to_string(),
                WorldObject {
                    type_name: t.to_string(),
                    is_interface: true,
                },
            );
        }
        for (h, t) in opaque {
            table.insert(
                h.to_string(),
                WorldObject {
                    type_name: t.to_string(),
                    is_interface: false,
                },
            );
        }
        Objects {
            table,
            counts: BTreeMap::new(),
        }
    }

    /// Checks the receiver and counts the call.
    fn enter(&mut self, handle: &str, interface: &str, method: &str) -> Result<(), WorldError> {
        match self.table.get(handle) {
            Some(o) if o.is_interface && o.type_name == interface => {}
            Some(o) => {
                return Err(WorldError::Fault(format!(
                    "object `{handle}` is a {}, not a {interface}",
                    o.type_name
                )))
            }
            None => return Err(WorldError::Fault(format!("no object `{handle}`"))),
        }
        *self
            .counts
            .entry(format!("{interface}.{method}"))
            .or_default() += 1;
        Ok(())
    }

    fn frame(&self, v: &Value) -> Result<String, WorldError> {
        match v {
            Value::Opaque(h) if self.table.get(h).is_some_and(|o| o.type_name == "Frame") => {
                Ok(h.clone())
            }
            other => Err(WorldError::Fault(format!("`{other}` is not a known frame"))),
        }
    }
}

fn unknown(interface: &str, method: &str) -> WorldError {
    WorldError::UnknownMethod {
        interface: interface.to_string(),
        method: method.to_string(),
    }
}

fn arity(args: &[Value], n: usize, what: &str) -> Result<(), WorldError> {
    if args.len() == n {
        Ok(())
    } else {
        Err(WorldError::Fault(format!(
            "{what} expects {n} arguments, got {}",
            args.len()
        )))
    }
}

fn number(v: &Value) -> Result<f64, WorldError> {
    match v {
        Value::Double(d) => Ok(*d),
        Value::Int(i) => Ok(*i as f64),
        other => Err(WorldError::Fault(format!(
            "expected a number, got `{other}`"
        ))),
    }
}

fn string(v: &Value) -> Result<&str, WorldError> {
    match v {
        Value::Str(s) => Ok(s),
        other => Err(WorldError::Fault(format!(
            "expected a string, got `{other}`"
        ))),
    }
}

fn motion(torque: f64, displaced: bool, contact: bool) -> Value {
    Value::record([
        ("torque", Value::Double(torque)),
        ("displaced", Value::Bool(displaced)),
        ("contact", Value::Bool(contact)),
    ])
}

fn reading(value: f64, ok: bool) -> Value {
    Value::record([("value", Value::Double(value)), ("ok", Value::Bool(ok))])
}

fn grasp(holding: bool, height: i64, remaining: i64) -> Value {
    Value::record([
        ("holding", Value::Bool(holding)),
        ("height", Value::Int(height)),
        ("remaining", Value::Int(remaining)),
    ])
}

#[derive(Debug, Clone, PartialEq)]
pub enum WorldSpec {
    Screwdriver(ScrewdriverConfig),
    Blocks(BlocksConfig),
    Cleanup(CleanupConfig),
}

impl WorldSpec {
    pub const KINDS: [&'static str; 3] = ["blocks", "cleanup", "screwdriver"];

    pub fn kind(&self) -> &'static str {
        match self {
            WorldSpec::Screwdriver(_) => "screwdriver",
            WorldSpec::Blocks(_) => "blocks",
            WorldSpec::Cleanup(_) => "cleanup",
        }
    }

    pub fn build(&self) -> Box<dyn World> {
        match self {
            WorldSpec::Screwdriver(c) => Box::new(ScrewdriverWorld::new(c.clone())),
            WorldSpec::Blocks(c) => Box::new(BlocksWorld::new(c.clone())),
            WorldSpec::Cleanup(c) => Box::new(CleanupWorld::new(c.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub world: WorldSpec,
    /// Raw binding values: numbers, booleans, strings, or `"@handle"` references.
    pub bindings: BTreeMap<String, Json>,
    pub limits: RunLimits,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    ScenarioParse(String),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("unknown config key `{key}` for world `{world}`")]
    UnknownConfigKey { world: String, key: String },
    #[error("binding `{name}`: {message}")]
    Binding { name: String, message: String },
}

impl ScenarioError {
    pub fn to_diagnostic(&self, file: &str) -> Diagnostic {
        Diagnostic::error("SCENARIO", SourcePos::new(file, 1, 1), self.to_string())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    world: String,
    #[serde(default)]
    config: BTreeMap<String, Json>,
    #[serde(default)]
    bindings: BTreeMap<String, Json>,
    #[serde(default)]
    limits: Option<RawLimits>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLimits {
    #[serde(rename = "maxSteps")]
    max_steps: u64,
}

fn parse_config<T: serde::de::DeserializeOwned>(
    world: &str,
    known: &[&str],
    config: BTreeMap<String, Json>,
) -> Result<T, ScenarioError> {
    if let Some(key) = config.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(ScenarioError::UnknownConfigKey {
            world: world.to_string(),
            key: key.clone(),
        });
    }
    let obj: serde_json::Map<String, Json> = config.into_iter().collect();
    serde_json::from_value(Json::Object(obj))
        .map_err(|e| ScenarioError::ScenarioParse(format!("config: {e}")))
}

/// Parses and validates a `.scn` file.
pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario =
        serde_json::from_str(text).map_err(|e| ScenarioError::ScenarioParse(e.to_string()))?;
    let world = match raw.world.as_str() {
        "screwdriver" => WorldSpec::Screwdriver(parse_config(
            "screwdriver",
            ScrewdriverConfig::KEYS,
            raw.config,
        )?),
        "blocks" => WorldSpec::Blocks(parse_config("blocks", BlocksConfig::KEYS, raw.config)?),
        "cleanup" => WorldSpec::Cleanup(parse_config("cleanup", CleanupConfig::KEYS, raw.config)?),
        other => return Err(ScenarioError::UnknownWorld(other.to_string())),
    };
    let limits = match raw.limits {
        Some(RawLimits { max_steps: 0 }) => {
            return Err(ScenarioError::ScenarioParse(
                "maxSteps must be at least 1".into(),
            ))
        }
        Some(l) => RunLimits::new(l.max_steps),
        None => RunLimits::default(),
    };
    let scenario = Scenario {
        world,
        bindings: raw.bindings,
        limits,
    };
    // every "@handle" must name an object of the configured world
    let probe = scenario.world.build();
    for (name, v) in &scenario.bindings {
        match v {
            Json::String(s) if s.starts_with('@') => {
                if probe.object(&s[1..]).is_none() {
                    return Err(ScenarioError::Binding {
                        name: name.clone(),
                        message: format!("world `{}` has no object `{}`", probe.kind(), &s[1..]),
                    });
                }
            }
            Json::Number(_) | Json::Bool(_) | Json::String(_) => {}
            other => {
                return Err(ScenarioError::Binding {
                    name: name.clone(),
                    message: format!("unsupported value `{other}`"),
                })
            }
        }
    }
    Ok(scenario)
}

impl Scenario {
    pub fn build_world(&self) -> Box<dyn World> {
        self.world.build()
    }

    /// Converts the raw bindings into typed values for the root parameters
    /// `params`. Names that are not parameters, and parameters without a
    /// binding, are passed through to the runtime's own check.
    pub fn resolve_bindings<'a>(
        &self,
        params: impl IntoIterator<Item = (&'a TypeRef, &'a str)>,
        world: &dyn World,
    ) -> Result<BTreeMap<String, Value>, ScenarioError> {
        let types: BTreeMap<&str, &TypeRef> = params.into_iter().map(|(t, n)| (n, t)).collect();
        let mut out = BTreeMap::new();
        for (name, raw) in &self.bindings {
            let err = |message: String| ScenarioError::Binding {
                name: name.clone(),
                message,
            };
            let Some(ty) = types.get(name.as_str()) else {
                return Err(err("not a parameter of the root process".into()));
            };
            let v = match (ty, raw) {
                (TypeRef::Prim(PrimType::Double), Json::Number(n)) => {
                    Value::Double(n.as_f64().ok_or_else(|| err("not a number".into()))?)
                }
                (TypeRef::Prim(PrimType::Int), Json::Number(n)) => Value::Int(
                    n.as_i64()
                        .ok_or_else(|| err(format!("`{n}` is not an Int")))?,
                ),
                (TypeRef::Prim(PrimType::Bool), Json::Bool(b)) => Value::Bool(*b),
                (TypeRef::Prim(PrimType::String), Json::String(s)) => Value::Str(s.clone()),
                (TypeRef::Named(t), Json::String(s)) if s.starts_with('@') => {
                    let handle = &s[1..];
                    match world.object(handle) {
                        Some(o) if &o.type_name == t && o.is_interface => Value::ApiObject {
                            interface: t.clone(),
                            handle: handle.to_string(),
                        },
                        Some(o) if &o.type_name == t => Value::Opaque(handle.to_string()),
                        Some(o) => {
                            return Err(err(format!(
                                "object `{handle}` is a {}, expected {t}",
                                o.type_name
                            )))
                        }
                        None => return Err(err(format!("no object `{handle}`"))),
                    }
                }
                (ty, raw) => return Err(err(format!("`{raw}` does not fit `{ty}`"))),
            };
            out.insert(name.clone(), v);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn screwdriver_scenario() {
        let s = load_scenario(
            r#"{"world":"screwdriver","config":{"torqueDelta":0.4},
                "bindings":{"arm":"@arm","maxTorque":1.0},"limits":{"maxSteps":500}}"#,
        )
        .unwrap();
        assert_eq!(s.world.kind(), "screwdriver");
        assert_eq!(s.limits.max_steps, 500);
        let w = s.build_world();
        let params = [
            (TypeRef::Named("Arm".into()), "arm".to_string()),
            (TypeRef::Prim(PrimType::Double), "maxTorque".to_string()),
        ];
        let b = s
            .resolve_bindings(params.iter().map(|(t, n)| (t, n.as_str())), w.as_ref())
            .unwrap();
        assert_eq!(b["maxTorque"], Value::Double(1.0));
        assert_eq!(
            b["arm"],
            Value::ApiObject {
                interface: "Arm".into(),
                handle: "arm".into()
            }
        );
    }

    #[test]
    fn blocks_with_four() {
        let s = load_scenario(r#"{"world":"blocks","config":{"blocks":4},"bindings":{}}"#).unwrap();
        assert_eq!(s.world, WorldSpec::Blocks(BlocksConfig { blocks: 4 }));
    }

    #[test]
    fn errors() {
        assert_eq!(
            load_scenario(r#"{"world":"teleport"}"#),
            Err(ScenarioError::UnknownWorld("teleport".into()))
        );
        assert_eq!(
            load_scenario(r#"{"world":"blocks","config":{"bloks":4}}"#),
            Err(ScenarioError::UnknownConfigKey {
                world: "blocks".into(),
                key: "bloks".into()
            })
        );
        assert!(matches!(
            load_scenario(r#"{"world":"blocks""#),
            Err(ScenarioError::ScenarioParse(_))
        ));
        assert!(matches!(
            load_scenario(r#"{"world":"blocks","bindings":{"g":"@nothing"}}"#),
            Err(ScenarioError::Binding { .. })
        ));
        assert!(matches!(
            load_scenario(r#"{"world":"blocks","limits":{"maxSteps":0}}"#),
            Err(ScenarioError::ScenarioParse(_))
        ));
    }

    #[test]
    fn binding_type_mismatch() {
        let s = load_scenario(r#"{"world":"blocks","bindings":{"n":1.5,"g":"@arm"}}"#).unwrap();
        let w = s.build_world();
        let int = TypeRef::Prim(PrimType::Int);
        let gripper = TypeRef::Named("Gripper".into());
        let r = s.resolve_bindings([(&int, "n"), (&gripper, "g")], w.as_ref());
        assert!(matches!(r, Err(ScenarioError::Binding { .. })));
    }
}
