//! A table of identical blocks, a gripper, and one tower (or rail) to build on.

use std::collections::BTreeMap;

use serde::Deserialize;

use super::{
    arity, grasp, motion, number, reading, string, unknown, Objects, World, WorldError, WorldObject,
};
use crate::runtime::Value;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default)]
pub struct BlocksConfig {
    /// Blocks lying on the table at the start.
    pub blocks: u32,
}

impl BlocksConfig {
    pub const KEYS: &'static [&'static str] = &["blocks"];
}

impl Default for BlocksConfig {
    fn default() -> Self {
        BlocksConfig { blocks: 4 }
    }
}

#[derive(Debug, Clone)]
pub struct BlocksWorld {
    config: BlocksConfig,
    objects: Objects,
    on_table: i64,
    height: i64,
    holding: bool,
    log: Vec<String>,
}

impl BlocksWorld {
    pub fn new(config: BlocksConfig) -> BlocksWorld {
        BlocksWorld {
            on_table: i64::from(config.blocks),
            config,
            objects: Objects::new(
                &[
                    ("arm", "Arm"),
                    ("gripper", "Gripper"),
                    ("linear", "LinearMotion"),
                    ("rotary", "RotationalMotion"),
                    ("force", "ForceSensor"),
                    ("frames", "FrameStore"),
                    ("log", "Logger"),
                ],
                &[
                    ("table", "Frame"),
                    ("tower", "Frame"),
                    ("magazine", "Frame"),
                    ("rail", "Frame"),
                    ("home", "Frame"),
                ],
            ),
            height: 0,
            holding: false,
            log: Vec::new(),
        }
    }

    pub fn height(&self) -> i64 {
        self.height
    }

    pub fn on_table(&self) -> i64 {
        self.on_table
    }

    pub fn holding(&self) -> bool {
        self.holding
    }

    pub fn total(&self) -> i64 {
        i64::from(self.config.blocks)
    }

    fn status(&self) -> Value {
        grasp(self.holding, self.height, self.on_table)
    }
}

impl World for BlocksWorld {
    fn kind(&self) -> &'static str {
        "blocks"
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
            ("Arm", "moveTo") => {
                arity(args, 3, "Arm.moveTo")?;
                self.objects.frame(&args[0])?;
                number(&args[1])?;
                number(&args[2])?;
                Ok(Some(motion(0.0, false, true)))
            }
            ("LinearMotion", "move") | ("RotationalMotion", "turn") => {
                arity(args, 4, method)?;
                self.objects.frame(&args[0])?;
                for a in &args[1..] {
                    number(a)?;
                }
                Ok(Some(motion(0.0, false, true)))
            }
            ("Gripper", "pick") => {
                arity(args, 0, "Gripper.pick")?;
                if self.holding {
                    return Err(WorldError::Fault(
                        "pick while already holding a block".into(),
                    ));
                }
                if self.on_table == 0 {
                    return Err(WorldError::Fault("no block left on the table".into()));
                }
                self.on_table -= 1;
                self.holding = true;
                Ok(Some(self.status()))
            }
            ("Gripper", "place") => {
                arity(args, 0, "Gripper.place")?;
                if !self.holding {
                    return Err(WorldError::Fault("place without holding a block".into()));
                }
                self.holding = false;
                self.height += 1;
                Ok(Some(self.status()))
            }
            ("Gripper", "status") => {
                arity(args, 0, "Gripper.status")?;
                Ok(Some(self.status()))
            }
            ("ForceSensor", "read") => {
                arity(args, 0, "ForceSensor.read")?;
                Ok(Some(reading(self.height as f64, true)))
            }
            ("FrameStore", "lookup") => {
                arity(args, 1, "FrameStore.lookup")?;
                let name = string(&args[0])?.to_string();
                self.objects.frame(&Value::Opaque(name.clone()))?;
                Ok(Some(Value::Opaque(name)))
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
