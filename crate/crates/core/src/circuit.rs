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

//! Untimed circuits and the gate dependency graph.
//!
//! Two input formats are accepted by [`parse_circuit`]:
//!
//! ```text
//! # running example
//! qubits 5
//! x q2
//! y q3
//! cnot q0,q1
//! ```
//!
//! and the JSON form `{"qubits": 5, "gates": [{"op": "x", "qubits": [2]}]}`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::platform::PlatformConfig;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub id: usize,
    pub opcode: String,
    pub operands: Vec<usize>,
    pub duration_cycles: u64,
}

impl Gate {
    pub fn new(id: usize, opcode: impl Into<String>, operands: Vec<usize>) -> Self {
        Gate {
            id,
            opcode: opcode.into(),
            operands,
            duration_cycles: 1,
        }
    }

    /// Short label such as `x:q2` or `cnot:q0,q1`.
    pub fn label(&self) -> String {
        let qubits: Vec<String> = self.operands.iter().map(|q| format!("q{q}")).collect();
        format!("{}:{}", self.opcode, qubits.join(","))
    }
}

/// An ordered list of gates over `qubit_count` qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    qubit_count: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    /// Builds a circuit from `(opcode, operands)` pairs, assigning dense ids.
    pub fn from_ops<I, S>(qubit_count: usize, ops: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<usize>)>,
        S: Into<String>,
    {
        let gates = ops
            .into_iter()
            .enumerate()
            .map(|(id, (op, qubits))| Gate::new(id, op, qubits))
            .collect();
        Self::new(qubit_count, gates)
    }

    pub fn new(qubit_count: usize, gates: Vec<Gate>) -> Result<Self> {
        if qubit_count == 0 {
            return Err(Error::InvalidGate {
                gate: 0,
                message: "circuit must declare at least one qubit".into(),
            });
        }
        for (pos, gate) in gates.iter().enumerate() {
            if gate.id != pos {
                return Err(Error::InvalidGate {
                    gate: gate.id,
                    message: format!("id does not match position {pos}"),
                });
            }
            validate_gate(gate, qubit_count)?;
        }
        Ok(Circuit { qubit_count, gates })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, id: usize) -> &Gate {
        &self.gates[id]
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Serializes to the line format accepted by [`parse_circuit`].
    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.qubit_count);
        for gate in &self.gates {
            let qubits: Vec<String> = gate.operands.iter().map(|q| format!("q{q}")).collect();
            let _ = writeln!(out, "{} {}", gate.opcode, qubits.join(","));
        }
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = JsonCircuit {
            qubits: Some(self.qubit_count),
            gates: self
                .gates
                .iter()
                .map(|g| JsonGate {
                    op: g.opcode.clone(),
                    qubits: g.operands.clone(),
                    duration_cycles: (g.duration_cycles != 1).then_some(g.duration_cycles),
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("circuit serializes")
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let doc: JsonCircuit = serde_json::from_value(value)?;
        doc.into_circuit()
    }

    /// Largest operand index plus one, or zero for an empty circuit.
    pub fn used_qubits(&self) -> usize {
        self.gates
            .iter()
            .flat_map(|g| g.operands.iter())
            .map(|&q| q + 1)
            .max()
            .unwrap_or(0)
    }
}

fn validate_gate(gate: &Gate, qubit_count: usize) -> Result<()> {
    if gate.operands.is_empty() {
        return Err(Error::InvalidGate {
            gate: gate.id,
            message: "gate has no operands".into(),
        });
    }
    if gate.duration_cycles == 0 {
        return Err(Error::InvalidGate {
            gate: gate.id,
            message: "duration must be at least one cycle".into(),
        });
    }
    let mut seen = BTreeSet::new();
    for &q in &gate.operands {
        if q >= qubit_count {
            return Err(Error::QubitOutOfRange {
                gate: gate.id,
                qubit: q,
                limit: qubit_count,
            });
        }
        if !seen.insert(q) {
            return Err(Error::InvalidGate {
                gate: gate.id,
                message: format!("duplicate operand q{q}"),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonCircuit {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    qubits: Option<usize>,
    #[serde(default)]
    gates: Vec<JsonGate>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGate {
    op: String,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    duration_cycles: Option<u64>,
}

impl JsonCircuit {
    fn into_circuit(self) -> Result<Circuit> {
        let gates: Vec<Gate> = self
            .gates
            .into_iter()
            .enumerate()
            .map(|(id, g)| Gate {
                id,
                opcode: g.op.to_ascii_lowercase(),
                operands: g.qubits,
                duration_cycles: g.duration_cycles.unwrap_or(1),
            })
            .collect();
        let used = gates
            .iter()
            .flat_map(|g| g.operands.iter())
            .map(|&q| q + 1)
            .max()
            .unwrap_or(0);
        Circuit::new(self.qubits.unwrap_or(used.max(1)), gates)
    }
}

/// Parses a circuit in either the line format or the JSON format.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    if text.trim_start().starts_with('{') {
        let doc: JsonCircuit = serde_json::from_str(text)?;
        return doc.into_circuit();
    }

    let mut declared: Option<(usize, usize)> = None;
    let mut gates = Vec::new();
    let mut gate_lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty());
        let head = tokens.next().expect("non-empty line has a token");
        if head.eq_ignore_ascii_case("qubits") {
            let count = tokens
                .next()
                .and_then(|t| t.parse::<usize>().ok())
                .filter(|&n| n > 0)
                .ok_or_else(|| parse_err(line_no, "expected `qubits <positive count>`"))?;
            if tokens.next().is_some() {
                return Err(parse_err(line_no, "trailing tokens after qubit count"));
            }
            if declared.is_some() {
                return Err(parse_err(line_no, "duplicate `qubits` header"));
            }
            declared = Some((count, line_no));
            continue;
        }
        if !head.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(parse_err(line_no, format!("malformed opcode `{head}`")));
        }
        let mut operands = Vec::new();
        for tok in tokens {
            let index = tok
                .strip_prefix('q')
                .or_else(|| tok.strip_prefix('Q'))
                .and_then(|n| n.parse::<usize>().ok())
                .ok_or_else(|| parse_err(line_no, format!("malformed qubit operand `{tok}`")))?;
            operands.push(index);
        }
        if operands.is_empty() {
            return Err(parse_err(line_no, format!("gate `{head}` has no qubit operands")));
        }
        let gate = Gate::new(gates.len(), head.to_ascii_lowercase(), operands);
        // Duplicate operands are reported against the source line.
        validate_gate(&gate, usize::MAX).map_err(|e| parse_err(line_no, e.to_string()))?;
        gates.push(gate);
        gate_lines.push(line_no);
    }

    let used = gates
        .iter()
        .flat_map(|g| g.operands.iter())
        .map(|&q| q + 1)
        .max()
        .unwrap_or(0);
    let qubit_count = match declared {
        Some((count, _)) => {
            for (gate, &line_no) in gates.iter().zip(&gate_lines) {
                if let Some(&q) = gate.operands.iter().find(|&&q| q >= count) {
                    return Err(parse_err(
                        line_no,
                        format!("qubit q{q} out of declared range 0..{count}"),
                    ));
                }
            }
            count
        }
        None => used.max(1),
    };
    Circuit::new(qubit_count, gates)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// A latency-weighted dependency edge: `dst` may start no earlier than
/// `weight` cycles after `src` starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepEdge {
    pub src: usize,
    pub dst: usize,
    pub weight: u64,
}

/// Dependency DAG over the gates of a lowered circuit.
///
/// Node ids are gate ids; program order is a topological order.
#[derive(Clone, Debug)]
pub struct DepGraph {
    circuit: Circuit,
    edges: Vec<DepEdge>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

impl DepGraph {
    /// Builds last-writer edges for a circuit whose durations are already set.
    pub fn from_lowered(circuit: Circuit) -> Self {
        let n = circuit.len();
        let mut last: Vec<Option<usize>> = vec![None; circuit.qubit_count()];
        let mut edges = Vec::new();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for gate in circuit.gates() {
            let mut sources: Vec<usize> = gate.operands.iter().filter_map(|&q| last[q]).collect();
            sources.sort_unstable();
            sources.dedup();
            for src in sources {
                let idx = edges.len();
                edges.push(DepEdge {
                    src,
                    dst: gate.id,
                    weight: circuit.gate(src).duration_cycles,
                });
                preds[gate.id].push(idx);
                succs[src].push(idx);
            }
            for &q in &gate.operands {
                last[q] = Some(gate.id);
            }
        }
        DepGraph {
            circuit,
            edges,
            preds,
            succs,
        }
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn gate(&self, id: usize) -> &Gate {
        self.circuit.gate(id)
    }

    pub fn len(&self) -> usize {
        self.circuit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circuit.is_empty()
    }

    pub fn edges(&self) -> &[DepEdge] {
        &self.edges
    }

    pub fn preds(&self, gate: usize) -> impl Iterator<Item = &DepEdge> + '_ {
        self.preds[gate].iter().map(move |&e| &self.edges[e])
    }

    pub fn succs(&self, gate: usize) -> impl Iterator<Item = &DepEdge> + '_ {
        self.succs[gate].iter().map(move |&e| &self.edges[e])
    }

    pub fn durations(&self) -> Vec<u64> {
        self.circuit.gates().iter().map(|g| g.duration_cycles).collect()
    }

    /// Longest path from the sources: the dependency-only ASAP start times.
    pub fn longest_path_starts(&self) -> Vec<u64> {
        let mut start = vec![0u64; self.len()];
        for id in 0..self.len() {
            start[id] = self.preds(id).map(|e| start[e.src] + e.weight).max().unwrap_or(0);
        }
        start
    }

    /// Length of the longest path from each gate to a sink, including the
    /// gate's own duration.
    pub fn tail_lengths(&self) -> Vec<u64> {
        let mut tail = vec![0u64; self.len()];
        for id in (0..self.len()).rev() {
            let own = self.gate(id).duration_cycles;
            tail[id] = self
                .succs(id)
                .map(|e| e.weight + tail[e.dst])
                .max()
                .unwrap_or(0)
                .max(own);
        }
        tail
    }
}

/// Lowers `circuit` against `platform` (gate durations) and builds its
/// dependency graph.
pub fn build_depgraph(circuit: &Circuit, platform: &PlatformConfig) -> Result<DepGraph> {
    let limit = platform.qubit_limit();
    let mut gates = circuit.gates().to_vec();
    for gate in &mut gates {
        if let Some(&q) = gate.operands.iter().find(|&&q| q >= limit || q < platform.index_base()) {
            return Err(Error::QubitOutOfRange {
                gate: gate.id,
                qubit: q,
                limit,
            });
        }
        gate.duration_cycles = platform.duration_cycles(&gate.opcode);
    }
    let lowered = Circuit::new(circuit.qubit_count(), gates)?;
    Ok(DepGraph::from_lowered(lowered))
}
