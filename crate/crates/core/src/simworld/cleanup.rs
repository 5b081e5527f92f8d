//! A square area with colored blocks, a wheeled base and a container at the start cell.

use std::collections::BTreeMap;

use serde::Deserialize;

use super::{
    arity, grasp, motion, number, reading, string, unknown, Objects, World, WorldError, WorldObject,
};
use crate::runtime::Value;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CleanupBlock {
    pub x: i64,
    pub y: i64,
    pub color: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default)]
pub struct CleanupConfig {
    pub blocks: Vec<CleanupBlock>,
    /// Start cell of the robot; the container sits here.
    pub start: (i64, i64),
    /// Side length of the area; cells outside `0..size` are out of bounds.
    pub size: i64,
}

impl CleanupConfig {
    pub const KEYS: &'static [&'static str] = &["blocks", "start", "size"];
}

impl Default for CleanupConfig {
    fn default() -> Self {
        CleanupConfig {
            blocks: Vec::new(),
            start: (0, 0),
            size: 10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CleanupWorld {
    config: CleanupConfig,
    objects: Objects,
    pos: (i64, i64),
    heading: f64,
    remaining: Vec<CleanupBlock>,
    container: Vec<CleanupBlock>,
    held: Option<CleanupBlock>,
    target: Option<(i64, i64)>,
    log: Vec<String>,
}

impl CleanupWorld {
    pub fn new(config: CleanupConfig) -> CleanupWorld {
        CleanupWorld {
            pos: config.start,
            heading: 0.0,
            remaining: config.blocks.clone(),
            container: Vec::new(),
            held: None,
            target: None,
            log: Vec::new(),
            objects: Objects::new(
                &[
                    ("base", "Base"),
                    ("gripper", "Gripper"),
                    ("distance", "DistanceSensor"),
                    ("color", "ColorSensor"),
                    ("light", "LightSensor"),
                    ("log", "Logger"),
                ],
                &[],
            ),
            config,
        }
    }

    pub fn remaining(&self) -> &[CleanupBlock] {
        &self.remaining
    }

    pub fn container(&self) -> &[CleanupBlock] {
        &self.container
    }

    pub fn held(&self) -> Option<&CleanupBlock> {
        self.held.as_ref()
    }

    pub fn initial_count(&self) -> usize {
        self.config.blocks.len()
    }

    fn distance(&self, b: &CleanupBlock) -> i64 {
        (b.x - self.pos.0).abs() + (b.y - self.pos.1).abs()
    }

    fn here(&self) -> Option<usize> {
        self.remaining.iter().position(|b| (b.x, b.y) == self.pos)
    }

    fn scan_result(&self, found: Option<&CleanupBlock>) -> Value {
        Value::record([
            ("found", Value::Bool(found.is_some())),
            (
                "distance",
                Value::Double(found.map_or(0.0, |b| self.distance(b) as f64)),
            ),
            (
                "color",
                Value::Str(found.map_or(String::new(), |b| b.color.clone())),
            ),
            ("remaining", Value::Int(self.remaining.len() as i64)),
        ])
    }

    fn grip_status(&self) -> Value {
        grasp(
            self.held.is_some(),
            self.container.len() as i64,
            self.remaining.len() as i64,
        )
    }

    fn inside(&self) -> bool {
        let r = 0..self.config.size;
        r.contains(&self.pos.0) && r.contains(&self.pos.1)
    }
}

impl World for CleanupWorld {
    fn kind(&self) -> &'static str {
        "cleanup"
    }

    fn object(&self, handle: &str) -> Option<WorldObject> {
        self.objects.table.get(handle).cloned()
    }

    fn call_counts(&self) -> &BTreeMap<String, u64> {
        &self.objects.counts
    }

    fn dispatch(
        &mut self,
        handle: &str,
        interface: &str,
        method: &str,
        args: &[Value],
    ) -> Result<Option<Value>, WorldError> {
        self.objects.enter(handle, interface, method)?;
        match (interface, method) {
            ("DistanceSensor", "scan") => {
                arity(args, 1, "DistanceSensor.scan")?;
                let color = string(&args[0])?;
                // nearest first, ties broken by configuration order
                let best = self
                    .remaining
                    .iter()
                    .filter(|b| b.color == color)
                    .min_by_key(|b| self.distance(b));
                self.target = best.map(|b| (b.x, b.y));
                Ok(Some(self.scan_result(best)))
            }
            ("ColorSensor", "sense") => {
                arity(args, 0, "ColorSensor.sense")?;
                let b = self.here().map(|i| &self.remaining[i]);
                Ok(Some(self.scan_result(b)))
            }
            ("LightSensor", "measure") => {
                arity(args, 0, "LightSensor.measure")?;
                let inside = self.inside();
                Ok(Some(reading(if inside { 1.0 } else { 0.0 }, inside)))
            }
            ("Base", "turn") => {
                arity(args, 1, "Base.turn")?;
                self.heading = (self.heading + number(&args[0])?).rem_euclid(360.0);
                Ok(Some(motion(0.0, false, true)))
            }
            ("Base", "drive") => {
                arity(args, 1, "Base.drive")?;
                number(&args[0])?;
                let contact = match self.target.take() {
                    Some(p) => {
                        self.pos = p;
                        true
                    }
                    None => false,
                };
                Ok(Some(motion(0.0, false, contact)))
            }
            ("Base", "home") | ("Base", "park") => {
                arity(args, 0, method)?;
                self.pos = self.config.start;
                Ok(Some(motion(0.0, false, true)))
            }
            ("Gripper", "grip") => {
                arity(args, 0, "Gripper.grip")?;
                if self.held.is_some() {
                    return Err(WorldError::Fault(
                        "grip while already holding a block".into(),
                    ));
                }
                if let Some(i) = self.here() {
                    self.held = Some(self.remaining.remove(i));
                }
                Ok(Some(self.grip_status()))
            }
            ("Gripper", "status") => {
                arity(args, 0, "Gripper.status")?;
                Ok(Some(self.grip_status()))
            }
            ("Gripper", "drop") => {
                arity(args, 0, "Gripper.drop")?;
                let Some(b) = self.held.take() else {
                    return Err(WorldError::Fault("drop without holding a block".into()));
                };
                self.container.push(b);
                Ok(None)
            }
            ("Logger", "log") => {
                arity(args, 1, "Logger.log")?;
                self.log.push(string(&args[0])?.to_string());
                Ok(None)
            }
            _ => Err(unknown(interface, method)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(x: i64, y: i64, color: &str) -> CleanupBlock {
        CleanupBlock {
            x,
            y,
            color: color.into(),
        }
    }

    fn field(v: &Option<Value>, name: &str) -> Value {
        match v {
            Some(Value::Record(r)) => r[name].clone(),
            _ => panic!("expected a record"),
        }
    }

    #[test]
    fn empty_world_scan() {
        let mut w = CleanupWorld::new(CleanupConfig::default());
        let r = w
            .dispatch(
                "distance",
                "DistanceSensor",
                "scan",
                &[Value::Str("blue".into())],
            )
            .unwrap();
        assert_eq!(field(&r, "found"), Value::Bool(false));
        assert_eq!(field(&r, "remaining"), Value::Int(0));
    }

    #[test]
    fn collect_nearest_blue() {
        let mut w = CleanupWorld::new(CleanupConfig {
            blocks: vec![block(5, 5, "blue"), block(1, 0, "red"), block(2, 1, "blue")],
            ..CleanupConfig::default()
        });
        let r = w
            .dispatch(
                "distance",
                "DistanceSensor",
                "scan",
                &[Value::Str("blue".into())],
            )
            .unwrap();
        assert_eq!(field(&r, "distance"), Value::Double(3.0));
        w.dispatch("base", "Base", "drive", &[Value::Double(1.0)])
            .unwrap();
        let c = w.dispatch("color", "ColorSensor", "sense", &[]).unwrap();
        assert_eq!(field(&c, "color"), Value::Str("blue".into()));
        w.dispatch("gripper", "Gripper", "grip", &[]).unwrap();
        w.dispatch("base", "Base", "home", &[]).unwrap();
        w.dispatch("gripper", "Gripper", "drop", &[]).unwrap();
        assert_eq!(w.container().len(), 1);
        assert_eq!(w.remaining().len() + w.container().len(), w.initial_count());
        assert!(w.dispatch("gripper", "Gripper", "drop", &[]).is_err());
    }
}
