// Copyright 2026 The qsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Platform configuration: shared instruments, their qubit connections and
//! the instruction set with durations.
//!
//! The JSON schema extends the `resources` block of an OpenQL platform file:
//!
//! ```json
//! {
//!   "cycle_time_ns": 20,
//!   "resources": {
//!     "qubits": { "count": 17 },
//!     "qwgs": { "count": 1, "connection_map": { "0": [2, 3, 4] } }
//!   },
//!   "instructions": { "x": { "duration_ns": 20, "class": "mw" } }
//! }
//! ```
//!
//! `qwgs` default to class `mw` with [`StackingRule::SameGateSameStart`] and
//! `meas_units` to class `readout` with [`StackingRule::SameStartAnyGate`].
//! Any other resource needs an explicit `class` and defaults to
//! [`StackingRule::Exclusive`].

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::circuit::Gate;
use crate::error::{Error, Result};

const S17_JSON: &str = include_str!("../data/s17.json");

/// Class tag for instructions that occupy no instrument.
pub const NO_CLASS: &str = "none";

/// When several gates may share one instrument instance at the same time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StackingRule {
    /// Same opcode and same start cycle (waveform generators).
    SameGateSameStart,
    /// Same start cycle, any opcode (measurement units).
    SameStartAnyGate,
    /// One gate at a time.
    Exclusive,
}

impl StackingRule {
    /// Whether two gates that start in the same cycle may share the instance.
    pub fn allows(self, opcode_a: &str, opcode_b: &str) -> bool {
        match self {
            StackingRule::SameGateSameStart => opcode_a == opcode_b,
            StackingRule::SameStartAnyGate => true,
            StackingRule::Exclusive => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstrumentType {
    pub name: String,
    pub count: usize,
    /// Qubits driven by each instance, indexed by instance id.
    pub connection_map: Vec<BTreeSet<usize>>,
    pub stacking_rule: StackingRule,
    pub opcode_class: String,
    /// Per-instance stacking limit from the config, if any.
    pub max_stacking: Vec<Option<usize>>,
}

impl InstrumentType {
    /// How many gates one instance can host simultaneously.
    pub fn capacity(&self, instance: usize) -> usize {
        if self.stacking_rule == StackingRule::Exclusive {
            return 1;
        }
        self.max_stacking[instance].unwrap_or_else(|| self.connection_map[instance].len().max(1))
    }

    /// Row label used in reports, e.g. `qwg0` for instance 0 of `qwgs`.
    pub fn instance_label(&self, instance: usize) -> String {
        let stem = self.name.strip_suffix('s').unwrap_or(&self.name);
        format!("{stem}{instance}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstructionDef {
    pub opcode: String,
    pub duration_ns: u64,
    pub opcode_class: String,
}

/// One instrument instance: `(type index, instance id)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InstanceRef {
    pub type_index: usize,
    pub instance: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlatformConfig {
    pub qubit_count: usize,
    /// Label of the first qubit; S-17 numbers its qubits from 1.
    pub index_base: usize,
    pub cycle_time_ns: u64,
    pub instrument_types: Vec<InstrumentType>,
    pub instructions: BTreeMap<String, InstructionDef>,
    #[serde(skip)]
    owner: Vec<Vec<Option<usize>>>,
}

impl PlatformConfig {
    /// The bundled Surface-17 configuration.
    pub fn s17() -> Self {
        parse_platform(S17_JSON).expect("bundled s17.json is valid")
    }

    pub fn s17_json() -> &'static str {
        S17_JSON
    }

    /// Exclusive upper bound on qubit labels.
    pub fn qubit_limit(&self) -> usize {
        self.index_base + self.qubit_count
    }

    pub fn index_base(&self) -> usize {
        self.index_base
    }

    pub fn qubits(&self) -> std::ops::Range<usize> {
        self.index_base..self.qubit_limit()
    }

    pub fn instrument_type(&self, name: &str) -> Option<(usize, &InstrumentType)> {
        self.instrument_types.iter().enumerate().find(|(_, t)| t.name == name)
    }

    pub fn opcode_class(&self, opcode: &str) -> &str {
        self.instructions
            .get(opcode)
            .map_or(NO_CLASS, |d| d.opcode_class.as_str())
    }

    /// `ceil(duration_ns / cycle_time_ns)`, and one cycle for unknown opcodes.
    pub fn duration_cycles(&self, opcode: &str) -> u64 {
        self.instructions
            .get(opcode)
            .map_or(1, |d| d.duration_ns.div_ceil(self.cycle_time_ns).max(1))
    }

    /// Every instance iterated type by type, in config order.
    pub fn instances(&self) -> impl Iterator<Item = InstanceRef> + '_ {
        self.instrument_types
            .iter()
            .enumerate()
            .flat_map(|(type_index, t)| (0..t.count).map(move |instance| InstanceRef { type_index, instance }))
    }

    pub fn capacity(&self, r: InstanceRef) -> usize {
        self.instrument_types[r.type_index].capacity(r.instance)
    }

    pub fn rule(&self, r: InstanceRef) -> StackingRule {
        self.instrument_types[r.type_index].stacking_rule
    }

    pub fn instance_label(&self, r: InstanceRef) -> String {
        self.instrument_types[r.type_index].instance_label(r.instance)
    }

    pub fn connected_qubits(&self, r: InstanceRef) -> &BTreeSet<usize> {
        &self.instrument_types[r.type_index].connection_map[r.instance]
    }

    /// Instances whose class matches the gate's opcode class and whose
    /// connection set intersects the gate's operands.
    pub fn instruments_for(&self, gate: &Gate) -> Vec<InstanceRef> {
        let class = self.opcode_class(&gate.opcode);
        if class == NO_CLASS {
            return Vec::new();
        }
        let mut out = Vec::new();
        for (type_index, t) in self.instrument_types.iter().enumerate() {
            if t.opcode_class != class {
                continue;
            }
            for &q in &gate.operands {
                if let Some(instance) = self.owner[type_index].get(q).copied().flatten() {
                    out.push(InstanceRef { type_index, instance });
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Named form of [`Self::instruments_for`].
    pub fn instruments_for_named(&self, gate: &Gate) -> BTreeSet<(String, usize)> {
        self.instruments_for(gate)
            .into_iter()
            .map(|r| (self.instrument_types[r.type_index].name.clone(), r.instance))
            .collect()
    }

    /// Short digest of the configuration, stored in schedule files.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("platform serializes");
        let digest = Sha256::digest(&canonical);
        hex::encode(&digest[..8])
    }

    fn index_owners(&mut self) {
        let limit = self.qubit_limit();
        self.owner = self
            .instrument_types
            .iter()
            .map(|t| {
                let mut owner = vec![None; limit];
                for (instance, qubits) in t.connection_map.iter().enumerate() {
                    for &q in qubits {
                        owner[q] = Some(instance);
                    }
                }
                owner
            })
            .collect();
    }
}

fn platform_err(message: impl Into<String>) -> Error {
    Error::Platform(message.into())
}

fn as_object<'a>(value: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| platform_err(format!("`{what}` must be an object")))
}

fn positive_int(value: &Value, what: &str) -> Result<u64> {
    match value.as_u64() {
        Some(n) if n > 0 => Ok(n),
        _ => Err(platform_err(format!("`{what}` must be a positive integer"))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstruction {
    #[serde(alias = "duration")]
    duration_ns: i64,
    #[serde(default, alias = "type")]
    class: Option<String>,
}

/// Parses and validates a platform configuration.
pub fn parse_platform(json: &str) -> Result<PlatformConfig> {
    let root: Value = serde_json::from_str(json)?;
    let root = as_object(&root, "platform")?;

    let cycle_time_ns = match root.get("cycle_time_ns") {
        Some(v) => positive_int(v, "cycle_time_ns")?,
        None => 20,
    };
    let resources = as_object(
        root.get("resources")
            .ok_or_else(|| platform_err("missing `resources` section"))?,
        "resources",
    )?;
    let qubits = as_object(
        resources
            .get("qubits")
            .ok_or_else(|| platform_err("missing `resources.qubits`"))?,
        "resources.qubits",
    )?;
    let qubit_count = positive_int(
        qubits
            .get("count")
            .ok_or_else(|| platform_err("missing `qubits.count`"))?,
        "qubits.count",
    )? as usize;
    let explicit_base = match qubits.get("index_base") {
        Some(v) => match v.as_u64() {
            Some(b @ (0 | 1)) => Some(b as usize),
            _ => return Err(platform_err("`qubits.index_base` must be 0 or 1")),
        },
        None => None,
    };

    let mut instrument_types = Vec::new();
    for (name, fields) in resources {
        if name == "qubits" {
            continue;
        }
        let fields = as_object(fields, name)?;
        let Some(map) = fields.get("connection_map") else {
            log::debug!("skipping resource `{name}` without a connection_map");
            continue;
        };
        instrument_types.push(parse_instrument(name, fields, as_object(map, "connection_map")?)?);
    }

    let all_mapped = instrument_types
        .iter()
        .flat_map(|t| t.connection_map.iter().flatten().copied());
    let index_base = explicit_base.unwrap_or_else(|| {
        // Labels 1..=count with no qubit 0 mean the map is numbered from one.
        let (mut has_zero, mut max) = (false, 0);
        for q in all_mapped {
            has_zero |= q == 0;
            max = max.max(q);
        }
        usize::from(!has_zero && max == qubit_count)
    });
    let limit = index_base + qubit_count;
    for t in &instrument_types {
        for (instance, qubits) in t.connection_map.iter().enumerate() {
            if let Some(&q) = qubits.iter().find(|&&q| q < index_base || q >= limit) {
                return Err(platform_err(format!(
                    "{}[{instance}] connects qubit {q}, outside {index_base}..{limit}",
                    t.name
                )));
            }
        }
    }

    let mut instructions = BTreeMap::new();
    if let Some(section) = root.get("instructions") {
        for (op, raw) in as_object(section, "instructions")? {
            let raw: RawInstruction =
                serde_json::from_value(raw.clone()).map_err(|e| platform_err(format!("instruction `{op}`: {e}")))?;
            if raw.duration_ns <= 0 {
                return Err(platform_err(format!(
                    "instruction `{op}` has non-positive duration {}",
                    raw.duration_ns
                )));
            }
            let opcode = op.to_ascii_lowercase();
            instructions.insert(
                opcode.clone(),
                InstructionDef {
                    opcode,
                    duration_ns: raw.duration_ns as u64,
                    opcode_class: raw.class.unwrap_or_else(|| NO_CLASS.to_string()),
                },
            );
        }
    }

    let mut config = PlatformConfig {
        qubit_count,
        index_base,
        cycle_time_ns,
        instrument_types,
        instructions,
        owner: Vec::new(),
    };
    config.index_owners();
    Ok(config)
}

fn parse_instrument(name: &str, fields: &Map<String, Value>, map: &Map<String, Value>) -> Result<InstrumentType> {
    let count = positive_int(
        fields
            .get("count")
            .ok_or_else(|| platform_err(format!("`{name}` is missing `count`")))?,
        &format!("{name}.count"),
    )? as usize;
    if map.len() != count {
        return Err(platform_err(format!(
            "`{name}` declares count {count} but has {} connection_map entries",
            map.len()
        )));
    }
    let mut connection_map = vec![BTreeSet::new(); count];
    let mut filled = vec![false; count];
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for (key, qubits) in map {
        let instance = key
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&i| i < count)
            .ok_or_else(|| platform_err(format!("`{name}` has connection_map key `{key}` outside 0..{count}")))?;
        filled[instance] = true;
        let qubits = qubits
            .as_array()
            .ok_or_else(|| platform_err(format!("`{name}.connection_map.{key}` must be a list")))?;
        for q in qubits {
            let q = q
                .as_u64()
                .ok_or_else(|| platform_err(format!("`{name}.connection_map.{key}` holds a non-integer")))?
                as usize;
            if let Some(prev) = owner.insert(q, instance) {
                if prev != instance {
                    return Err(platform_err(format!(
                        "`{name}` instances {prev} and {instance} both connect qubit {q}"
                    )));
                }
            }
            connection_map[instance].insert(q);
        }
    }
    debug_assert!(filled.iter().all(|&f| f));

    let (default_class, default_rule) = match name {
        "qwgs" => (Some("mw"), StackingRule::SameGateSameStart),
        "meas_units" => (Some("readout"), StackingRule::SameStartAnyGate),
        _ => (None, StackingRule::Exclusive),
    };
    let opcode_class = match fields.get("class") {
        Some(v) => v
            .as_str()
            .ok_or_else(|| platform_err(format!("`{name}.class` must be a string")))?
            .to_string(),
        None => default_class
            .ok_or_else(|| platform_err(format!("`{name}` needs a `class`")))?
            .to_string(),
    };
    let stacking_rule = match fields.get("stacking") {
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| platform_err(format!("`{name}.stacking`: {e}")))?,
        None => default_rule,
    };

    let mut max_stacking = vec![None; count];
    if let Some(overrides) = fields.get("max_stacking") {
        for (key, n) in as_object(overrides, "max_stacking")? {
            let instance = key
                .parse::<usize>()
                .ok()
                .filter(|&i| i < count)
                .ok_or_else(|| platform_err(format!("`{name}.max_stacking` key `{key}` is not an instance")))?;
            let n = positive_int(n, &format!("{name}.max_stacking.{key}"))? as usize;
            if n > connection_map[instance].len() {
                return Err(platform_err(format!(
                    "`{name}.max_stacking.{key}` = {n} exceeds the {} connected qubits",
                    connection_map[instance].len()
                )));
            }
            max_stacking[instance] = Some(n);
        }
    }

    Ok(InstrumentType {
        name: name.to_string(),
        count,
        connection_map,
        stacking_rule,
        opcode_class,
        max_stacking,
    })
}
