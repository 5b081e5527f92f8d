//! A screwing cell: an arm that spins a screw held by a two-finger tool.

use std::collections::BTreeMap;

use serde::Deserialize;

use super::{
    arity, motion, number, reading, string, unknown, Objects, World, WorldError, WorldObject,
};
use crate::runtime::Value;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ScrewdriverConfig {
    /// Torque added by each `Arm.rotate` with the tool closed.
    pub torque_delta: f64,
    /// Physical upper bound on accumulated torque.
    pub max_torque: f64,
    /// Torque given back by `Tool.openAndReset`.
    pub back_delta: f64,
    /// Closing a closed tool (or opening an open one) is a fault.
    pub strict_gripper: bool,
    /// 1-based index of the rotate call that reports the screw displaced.
    pub displace_at: Option<u64>,
}

impl ScrewdriverConfig {
    pub const KEYS: &'static [&'static str] = &[
        "torqueDelta",
        "maxTorque",
        "backDelta",
        "strictGripper",
        "displaceAt",
    ];
}

impl Default for ScrewdriverConfig {
    fn default() -> Self {
        ScrewdriverConfig {
            torque_delta: 0.4,
            max_torque: 10.0,
            back_delta: 0.0,
            strict_gripper: false,
            displace_at: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScrewdriverWorld {
    config: ScrewdriverConfig,
    objects: Objects,
    torque: f64,
    closed: bool,
    rotations: u64,
    log: Vec<String>,
}

impl ScrewdriverWorld {
    pub fn new(config: ScrewdriverConfig) -> ScrewdriverWorld {
        ScrewdriverWorld {
            config,
            objects: Objects::new(
                &[
                    ("arm", "Arm"),
                    ("tool", "Tool"),
                    ("torqueSensor", "TorqueSensor"),
                    ("frames", "FrameStore"),
                    ("log", "Logger"),
                ],
                &[
                    ("screwFrame", "Frame"),
                    ("threadFrame", "Frame"),
                    ("home", "Frame"),
                ],
            ),
            torque: 0.0,
            closed: false,
            rotations: 0,
            log: Vec::new(),
        }
    }

    pub fn torque(&self) -> f64 {
        self.torque
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn log_lines(&self) -> &[String] {
        &self.log
    }

    fn set_gripper(&mut self, close: bool) -> Result<(), WorldError> {
        if self.config.strict_gripper && self.closed == close {
            let state = if close { "closed" } else { "open" };
            return Err(WorldError::Fault(format!("tool is already {state}")));
        }
        self.closed = close;
        Ok(())
    }
}

impl World for ScrewdriverWorld {
    fn kind(&self) -> &'static str {
        "screwdriver"
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
            ("Arm", "rotate") => {
                arity(args, 2, "Arm.rotate")?;
                self.objects.frame(&args[0])?;
                number(&args[1])?;
                self.rotations += 1;
                if self.closed {
                    self.torque =
                        (self.torque + self.config.torque_delta).min(self.config.max_torque);
                }
                let displaced = self.config.displace_at == Some(self.rotations);
                Ok(Some(motion(self.torque, displaced, self.closed)))
            }
            ("Arm", "rotateBack") => {
                arity(args, 1, "Arm.rotateBack")?;
                self.objects.frame(&args[0])?;
                Ok(None)
            }
            ("Arm", "moveTo") => {
                arity(args, 3, "Arm.moveTo")?;
                self.objects.frame(&args[0])?;
                number(&args[1])?;
                number(&args[2])?;
                Ok(Some(motion(self.torque, false, true)))
            }
            ("Tool", "close") => {
                arity(args, 0, "Tool.close")?;
                self.set_gripper(true)?;
                Ok(None)
            }
            ("Tool", "open") => {
                arity(args, 0, "Tool.open")?;
                self.set_gripper(false)?;
                Ok(None)
            }
            ("Tool", "openAndReset") => {
                arity(args, 0, "Tool.openAndReset")?;
                self.set_gripper(false)?;
                self.torque = (self.torque - self.config.back_delta).max(0.0);
                Ok(None)
            }
            ("TorqueSensor", "read") => {
                arity(args, 0, "TorqueSensor.read")?;
                Ok(Some(reading(self.torque, true)))
            }
            ("FrameStore", "lookup") => {
                arity(args, 1, "FrameStore.lookup")?;
                let name = string(&args[0])?;
                self.objects.frame(&Value::Opaque(name.to_string()))?;
                Ok(Some(Value::Opaque(name.to_string())))
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
