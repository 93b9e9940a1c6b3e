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

//! Timed schedules: the legality checker, latency metrics and reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, DepGraph};
use crate::error::{Error, Result};
use crate::platform::{InstanceRef, PlatformConfig, StackingRule};

/// Start cycle per gate of a lowered circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    circuit: Circuit,
    starts: Vec<u64>,
    latency_cycles: u64,
    cycle_time_ns: u64,
    platform_hash: String,
}

/// One gate's busy interval `[start, end)` on an instrument instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Occupancy {
    pub gate: usize,
    pub start: u64,
    pub end: u64,
}

impl Schedule {
    pub fn new(dg: &DepGraph, starts: Vec<u64>, platform: &PlatformConfig) -> Self {
        assert_eq!(starts.len(), dg.len(), "one start per gate");
        let circuit = dg.circuit().clone();
        let latency_cycles = latency(&circuit, &starts);
        Schedule {
            circuit,
            starts,
            latency_cycles,
            cycle_time_ns: platform.cycle_time_ns,
            platform_hash: platform.hash(),
        }
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn start(&self, gate: usize) -> u64 {
        self.starts[gate]
    }

    pub fn starts(&self) -> &[u64] {
        &self.starts
    }

    pub fn latency_cycles(&self) -> u64 {
        self.latency_cycles
    }

    pub fn latency_ns(&self) -> u64 {
        self.latency_cycles * self.cycle_time_ns
    }

    pub fn cycle_time_ns(&self) -> u64 {
        self.cycle_time_ns
    }

    pub fn platform_hash(&self) -> &str {
        &self.platform_hash
    }

    /// Busy intervals per instrument instance, ordered by start cycle.
    pub fn occupancy(&self, platform: &PlatformConfig) -> BTreeMap<InstanceRef, Vec<Occupancy>> {
        let mut out: BTreeMap<InstanceRef, Vec<Occupancy>> = BTreeMap::new();
        for gate in self.circuit.gates() {
            let start = self.starts[gate.id];
            for r in platform.instruments_for(gate) {
                out.entry(r).or_default().push(Occupancy {
                    gate: gate.id,
                    start,
                    end: start + gate.duration_cycles,
                });
            }
        }
        for list in out.values_mut() {
            list.sort_by_key(|o| (o.start, o.gate));
        }
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = ScheduleJson {
            circuit: self.circuit.to_json_value(),
            platform_hash: self.platform_hash.clone(),
            cycle_time_ns: self.cycle_time_ns,
            starts: self.starts.iter().copied().enumerate().collect(),
            latency_cycles: self.latency_cycles,
            latency_ns: Some(self.latency_ns()),
        };
        serde_json::to_value(doc).expect("schedule serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("schedule serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: ScheduleJson = serde_json::from_str(text)?;
        let circuit = Circuit::from_json_value(doc.circuit)?;
        let n = circuit.len();
        if doc.starts.len() != n || doc.starts.keys().any(|&k| k >= n) {
            return Err(Error::Mismatch(format!(
                "schedule lists {} starts for {n} gates",
                doc.starts.len()
            )));
        }
        let starts: Vec<u64> = doc.starts.into_values().collect();
        let computed = latency(&circuit, &starts);
        if computed != doc.latency_cycles {
            return Err(Error::Mismatch(format!(
                "latency_cycles is {} but starts imply {computed}",
                doc.latency_cycles
            )));
        }
        Ok(Schedule {
            circuit,
            starts,
            latency_cycles: computed,
            cycle_time_ns: doc.cycle_time_ns,
            platform_hash: doc.platform_hash,
        })
    }
}

fn latency(circuit: &Circuit, starts: &[u64]) -> u64 {
    circuit
        .gates()
        .iter()
        .map(|g| starts[g.id] + g.duration_cycles)
        .max()
        .unwrap_or(0)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleJson {
    circuit: serde_json::Value,
    platform_hash: String,
    cycle_time_ns: u64,
    starts: BTreeMap<usize, u64>,
    latency_cycles: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    latency_ns: Option<u64>,
}

/// A broken legality rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    PlatformMismatch {
        expected: String,
        found: String,
    },
    GateCount {
        expected: usize,
        found: usize,
    },
    Dependency {
        src: usize,
        dst: usize,
        required: u64,
        actual: i64,
    },
    /// Two gates active on one instance in the same cycle without forming a
    /// legal stack.
    Overlap {
        instrument: String,
        cycle: u64,
        gates: [usize; 2],
        reason: OverlapReason,
    },
    /// More gates stacked on one instance than it can host.
    OverCapacity {
        instrument: String,
        cycle: u64,
        gates: Vec<usize>,
        capacity: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapReason {
    DifferentStart,
    DifferentGate,
    Exclusive,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::PlatformMismatch { expected, found } => {
                write!(
                    f,
                    "schedule was built for platform {found}, validating against {expected}"
                )
            }
            Violation::GateCount { expected, found } => write!(f, "{found} starts for {expected} gates"),
            Violation::Dependency {
                src,
                dst,
                required,
                actual,
            } => {
                write!(
                    f,
                    "gate {dst} starts {actual} cycles after gate {src}, needs {required}"
                )
            }
            Violation::Overlap {
                instrument,
                cycle,
                gates,
                reason,
            } => write!(
                f,
                "{instrument} cycle {cycle}: gates {} and {} overlap ({reason:?})",
                gates[0], gates[1]
            ),
            Violation::OverCapacity {
                instrument,
                cycle,
                gates,
                capacity,
            } => write!(
                f,
                "{instrument} cycle {cycle}: {} gates stacked, capacity {capacity}",
                gates.len()
            ),
        }
    }
}

/// Resource conflict found on one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Conflict {
    Overlap {
        instance: InstanceRef,
        cycle: u64,
        a: usize,
        b: usize,
        reason: OverlapReason,
    },
    OverCapacity {
        instance: InstanceRef,
        cycle: u64,
        gates: Vec<usize>,
        capacity: usize,
    },
}

/// Sweeps each instance's gates by start cycle. `occupants` lists the gates
/// on every instance; `capacity` gives the stacking limit per instance.
pub(crate) fn resource_conflicts(
    dg: &DepGraph,
    starts: &[u64],
    platform: &PlatformConfig,
    occupants: &BTreeMap<InstanceRef, Vec<usize>>,
    capacity: impl Fn(InstanceRef) -> usize,
) -> Vec<Conflict> {
    let mut out = Vec::new();
    for (&r, gates) in occupants {
        let rule = platform.rule(r);
        let cap = capacity(r);
        let mut items: Vec<usize> = gates.clone();
        items.sort_by_key(|&g| (starts[g], g));
        let mut active: Vec<usize> = Vec::new();
        let mut i = 0;
        while i < items.len() {
            let s = starts[items[i]];
            let mut j = i;
            while j < items.len() && starts[items[j]] == s {
                j += 1;
            }
            active.retain(|&a| starts[a] + dg.gate(a).duration_cycles > s);
            let batch = &items[i..j];
            for &g in batch {
                for &a in &active {
                    out.push(Conflict::Overlap {
                        instance: r,
                        cycle: s,
                        a,
                        b: g,
                        reason: OverlapReason::DifferentStart,
                    });
                }
            }
            for (k, &a) in batch.iter().enumerate() {
                for &b in &batch[k + 1..] {
                    let (oa, ob) = (&dg.gate(a).opcode, &dg.gate(b).opcode);
                    if !rule.allows(oa, ob) {
                        let reason = if rule == StackingRule::Exclusive {
                            OverlapReason::Exclusive
                        } else {
                            OverlapReason::DifferentGate
                        };
                        out.push(Conflict::Overlap {
                            instance: r,
                            cycle: s,
                            a,
                            b,
                            reason,
                        });
                    }
                }
            }
            if rule != StackingRule::Exclusive && batch.len() > cap {
                out.push(Conflict::OverCapacity {
                    instance: r,
                    cycle: s,
                    gates: batch.to_vec(),
                    capacity: cap,
                });
            }
            active.extend_from_slice(batch);
            i = j;
        }
    }
    out
}

pub(crate) fn occupants(dg: &DepGraph, platform: &PlatformConfig) -> BTreeMap<InstanceRef, Vec<usize>> {
    let mut out: BTreeMap<InstanceRef, Vec<usize>> = BTreeMap::new();
    for gate in dg.circuit().gates() {
        for r in platform.instruments_for(gate) {
            out.entry(r).or_default().push(gate.id);
        }
    }
    out
}

/// Checks dependency and instrument-sharing legality. Violations are
/// collected exhaustively; an empty list means the schedule is legal.
pub fn validate(schedule: &Schedule, dg: &DepGraph, platform: &PlatformConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let hash = platform.hash();
    if schedule.platform_hash != hash {
        out.push(Violation::PlatformMismatch {
            expected: hash,
            found: schedule.platform_hash.clone(),
        });
    }
    if schedule.starts.len() != dg.len() {
        out.push(Violation::GateCount {
            expected: dg.len(),
            found: schedule.starts.len(),
        });
        return out;
    }
    validate_starts_into(&schedule.starts, dg, platform, &mut out);
    out
}

/// [`validate`] for a bare start vector.
pub fn validate_starts(starts: &[u64], dg: &DepGraph, platform: &PlatformConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    validate_starts_into(starts, dg, platform, &mut out);
    out
}

fn validate_starts_into(starts: &[u64], dg: &DepGraph, platform: &PlatformConfig, out: &mut Vec<Violation>) {
    for e in dg.edges() {
        let gap = starts[e.dst] as i64 - starts[e.src] as i64;
        if gap < e.weight as i64 {
            out.push(Violation::Dependency {
                src: e.src,
                dst: e.dst,
                required: e.weight,
                actual: gap,
            });
        }
    }
    let occ = occupants(dg, platform);
    for c in resource_conflicts(dg, starts, platform, &occ, |r| platform.capacity(r)) {
        out.push(match c {
            Conflict::Overlap {
                instance,
                cycle,
                a,
                b,
                reason,
            } => Violation::Overlap {
                instrument: platform.instance_label(instance),
                cycle,
                gates: [a, b],
                reason,
            },
            Conflict::OverCapacity {
                instance,
                cycle,
                gates,
                capacity,
            } => Violation::OverCapacity {
                instrument: platform.instance_label(instance),
                cycle,
                gates,
                capacity,
            },
        });
    }
}

/// `latency_baseline / latency`: how much faster a schedule is than the
/// baseline.
pub fn speedup(baseline_latency: u64, latency: u64) -> f64 {
    if latency == 0 {
        return if baseline_latency == 0 { 1.0 } else { f64::INFINITY };
    }
    baseline_latency as f64 / latency as f64
}

pub fn geometric_mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() || values.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
        return None;
    }
    let log_sum: f64 = values.iter().map(|v| v.ln()).sum();
    Some((log_sum / values.len() as f64).exp())
}

/// One algorithm's result on one circuit.
#[derive(Clone, Debug)]
pub struct AlgoRun {
    pub algo: String,
    pub schedule: Schedule,
    /// Left out of reports when `None`, which keeps them reproducible.
    pub wall_time: Option<Duration>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub circuit: String,
    pub algo: String,
    pub latency_cycles: u64,
    pub latency_ns: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
    /// Baseline latency over this latency.
    pub speedup: f64,
    /// This latency over the proven optimum, when one is known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimality_gap: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub baseline: String,
    pub platform_hash: String,
    pub rows: Vec<CompareRow>,
}

/// Latencies and speedups for one circuit scheduled by several algorithms.
/// The baseline is `list` when present, otherwise the first run.
pub fn compute_metrics(circuit: &str, runs: &[AlgoRun]) -> Result<CompareReport> {
    let Some(first) = runs.first() else {
        return Ok(CompareReport::default());
    };
    if let Some(other) = runs
        .iter()
        .find(|r| r.schedule.platform_hash != first.schedule.platform_hash)
    {
        return Err(Error::Mismatch(format!(
            "runs `{}` and `{}` used different platforms",
            first.algo, other.algo
        )));
    }
    if let Some(other) = runs.iter().find(|r| r.schedule.circuit != first.schedule.circuit) {
        return Err(Error::Mismatch(format!(
            "runs `{}` and `{}` scheduled different circuits",
            first.algo, other.algo
        )));
    }
    let baseline = runs.iter().find(|r| r.algo == "list").unwrap_or(first);
    let optimum = runs
        .iter()
        .find(|r| r.algo == "oracle")
        .map(|r| r.schedule.latency_cycles);
    let rows = runs
        .iter()
        .map(|r| CompareRow {
            circuit: circuit.to_string(),
            algo: r.algo.clone(),
            latency_cycles: r.schedule.latency_cycles,
            latency_ns: r.schedule.latency_ns(),
            wall_time_ms: r.wall_time.map(|t| t.as_secs_f64() * 1e3),
            speedup: speedup(baseline.schedule.latency_cycles, r.schedule.latency_cycles),
            optimality_gap: optimum
                .filter(|&o| o > 0)
                .map(|o| r.schedule.latency_cycles as f64 / o as f64),
        })
        .collect();
    Ok(CompareReport {
        baseline: baseline.algo.clone(),
        platform_hash: first.schedule.platform_hash.clone(),
        rows,
    })
}

impl CompareReport {
    /// Appends another circuit's rows. Reports over different platforms or
    /// baselines do not mix.
    pub fn merge(&mut self, other: CompareReport) -> Result<()> {
        if other.rows.is_empty() {
            return Ok(());
        }
        if self.rows.is_empty() {
            *self = other;
            return Ok(());
        }
        if self.platform_hash != other.platform_hash {
            return Err(Error::Mismatch("reports use different platforms".into()));
        }
        if self.baseline != other.baseline {
            return Err(Error::Mismatch("reports use different baselines".into()));
        }
        self.rows.extend(other.rows);
        Ok(())
    }

    pub fn algos(&self) -> Vec<String> {
        let mut seen: Vec<String> = Vec::new();
        for row in &self.rows {
            if !seen.contains(&row.algo) {
                seen.push(row.algo.clone());
            }
        }
        seen
    }

    pub fn geomean_speedup(&self, algo: &str) -> Option<f64> {
        let values: Vec<f64> = self.rows.iter().filter(|r| r.algo == algo).map(|r| r.speedup).collect();
        geometric_mean(&values)
    }

    pub fn geomean_latency(&self, algo: &str) -> Option<f64> {
        let values: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.algo == algo)
            .map(|r| r.latency_cycles as f64)
            .collect();
        geometric_mean(&values)
    }

    /// Aligned table: Benchmark / Algo / Latency / Speedup, then the
    /// geometric-mean speedup per algorithm.
    pub fn to_table(&self) -> String {
        let header = [
            "Benchmark",
            "Algo",
            "Latency",
            "Latency(ns)",
            "Speedup",
            "Gap",
            "Time(ms)",
        ];
        let mut cells: Vec<[String; 7]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.circuit.clone(),
                    r.algo.clone(),
                    r.latency_cycles.to_string(),
                    r.latency_ns.to_string(),
                    format!("{:.2}", r.speedup),
                    r.optimality_gap.map_or_else(|| "-".to_string(), |g| format!("{g:.2}")),
                    r.wall_time_ms.map_or_else(|| "-".to_string(), |t| format!("{t:.2}")),
                ]
            })
            .collect();
        for algo in self.algos() {
            let g = self.geomean_speedup(&algo);
            cells.push([
                "geomean".into(),
                algo,
                "-".into(),
                "-".into(),
                g.map_or_else(|| "-".into(), |g| format!("{g:.2}")),
                "-".into(),
                "-".into(),
            ]);
        }
        let mut widths = header.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, row: &[&str]| {
            let parts: Vec<String> = row
                .iter()
                .zip(widths)
                .enumerate()
                .map(|(i, (c, w))| if i < 2 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            out.push_str(parts.join("  ").trim_end());
            out.push('\n');
        };
        line(&mut out, &header);
        for row in &cells {
            let refs: Vec<&str> = row.iter().map(String::as_str).collect();
            line(&mut out, &refs);
        }
        out
    }
}

/// Fixed-width timeline: one row per instrument instance, then one per
/// qubit, one column per cycle. Stacked gates share a column; a gate
/// lasting several cycles repeats `..` in its later columns.
pub fn render_gantt(schedule: &Schedule, platform: &PlatformConfig) -> String {
    let cycles = schedule.latency_cycles as usize;
    let mut header = String::from("cycle");
    if schedule.circuit.is_empty() {
        header.push('\n');
        return header;
    }

    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    for (r, occ) in schedule.occupancy(platform) {
        let mut cells = vec![String::new(); cycles];
        let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for o in &occ {
            groups.entry(o.start).or_default().push(o.gate);
        }
        for (start, gates) in groups {
            let mut by_op: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for &g in &gates {
                by_op.entry(&schedule.circuit.gate(g).opcode).or_default().push(g);
            }
            let label: Vec<String> = by_op
                .iter()
                .map(|(op, gs)| {
                    let qubits: Vec<String> = gs
                        .iter()
                        .flat_map(|&g| schedule.circuit.gate(g).operands.iter())
                        .map(|q| format!("q{q}"))
                        .collect();
                    format!("{op}:{}", qubits.join(","))
                })
                .collect();
            let span = gates
                .iter()
                .map(|&g| schedule.circuit.gate(g).duration_cycles)
                .max()
                .unwrap_or(1);
            fill(&mut cells, start, span, format!("[{}]", label.join("|")));
        }
        rows.push((platform.instance_label(r), cells));
    }
    let mut qubits: Vec<usize> = schedule
        .circuit
        .gates()
        .iter()
        .flat_map(|g| g.operands.iter().copied())
        .collect();
    qubits.sort_unstable();
    qubits.dedup();
    for q in qubits {
        let mut cells = vec![String::new(); cycles];
        for g in schedule.circuit.gates().iter().filter(|g| g.operands.contains(&q)) {
            fill(&mut cells, schedule.starts[g.id], g.duration_cycles, g.opcode.clone());
        }
        rows.push((format!("q{q}"), cells));
    }

    let width = rows
        .iter()
        .flat_map(|(_, cells)| cells.iter().map(String::len))
        .chain(std::iter::once(cycles.saturating_sub(1).to_string().len()))
        .max()
        .unwrap_or(1);
    let label_width = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0).max(header.len());
    let mut out = format!("{header:<label_width$}");
    for c in 0..cycles {
        let _ = write!(out, " {c:<width$}");
    }
    out = out.trim_end().to_string();
    out.push('\n');
    for (label, cells) in rows {
        let mut line = format!("{label:<label_width$}");
        for cell in cells {
            let _ = write!(line, " {cell:<width$}");
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn fill(cells: &mut [String], start: u64, span: u64, label: String) {
    let start = start as usize;
    for (k, cell) in cells.iter_mut().enumerate().skip(start).take(span as usize) {
        *cell = if k == start { label.clone() } else { "..".to_string() };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_depgraph, parse_circuit};
    use crate::platform::parse_platform;

    fn running() -> (DepGraph, PlatformConfig) {
        let p = PlatformConfig::s17();
        let dg = build_depgraph(&parse_circuit("x q2\ny q3\nx q4\nz q2").unwrap(), &p).unwrap();
        (dg, p)
    }

    #[test]
    fn stacked_schedule_is_legal() {
        let (dg, p) = running();
        let s = Schedule::new(&dg, vec![0, 1, 0, 2], &p);
        assert_eq!(validate(&s, &dg, &p), vec![]);
        assert_eq!(s.latency_cycles(), 3);
        assert_eq!(s.latency_ns(), 60);
    }

    #[test]
    fn different_gates_same_cycle() {
        let (dg, p) = running();
        let s = Schedule::new(&dg, vec![0, 0, 1, 2], &p);
        let v = validate(&s, &dg, &p);
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(matches!(
            v[0],
            Violation::Overlap {
                gates: [0, 1],
                reason: OverlapReason::DifferentGate,
                ..
            }
        ));
    }

    #[test]
    fn misaligned_stack() {
        let p = parse_platform(
            r#"{"resources": {"qubits": {"count": 5}, "qwgs": {"count": 1, "connection_map": {"0": [2, 3, 4]}}},
                "instructions": {"x": {"duration_ns": 40, "class": "mw"}}}"#,
        )
        .unwrap();
        let dg = build_depgraph(&parse_circuit("x q2\nx q4").unwrap(), &p).unwrap();
        let s = Schedule::new(&dg, vec![0, 1], &p);
        let v = validate(&s, &dg, &p);
        assert!(
            matches!(
                v.as_slice(),
                [Violation::Overlap {
                    reason: OverlapReason::DifferentStart,
                    ..
                }]
            ),
            "{v:?}"
        );
        assert!(validate(&Schedule::new(&dg, vec![0, 0], &p), &dg, &p).is_empty());
    }

    #[test]
    fn dependency_violation_and_capacity() {
        let p = parse_platform(
            r#"{"resources": {"qubits": {"count": 3},
                "qwgs": {"count": 1, "connection_map": {"0": [0, 1, 2]}, "max_stacking": {"0": 2}}},
                "instructions": {"x": {"duration_ns": 20, "class": "mw"}}}"#,
        )
        .unwrap();
        let dg = build_depgraph(&parse_circuit("x q0\nx q1\nx q2\nx q0").unwrap(), &p).unwrap();
        let v = validate(&Schedule::new(&dg, vec![0, 0, 0, 0], &p), &dg, &p);
        assert!(v
            .iter()
            .any(|v| matches!(v, Violation::Dependency { src: 0, dst: 3, .. })));
        assert!(v
            .iter()
            .any(|v| matches!(v, Violation::OverCapacity { capacity: 2, .. })));
    }

    #[test]
    fn platform_mismatch_is_reported() {
        let (dg, p) = running();
        let other = parse_platform(r#"{"resources": {"qubits": {"count": 5}}}"#).unwrap();
        let s = Schedule::new(&dg, vec![0, 1, 0, 2], &other);
        assert!(matches!(validate(&s, &dg, &p)[0], Violation::PlatformMismatch { .. }));
    }

    #[test]
    fn json_round_trip() {
        let (dg, p) = running();
        let s = Schedule::new(&dg, vec![0, 1, 0, 2], &p);
        let back = Schedule::from_json_str(&s.to_json_string()).unwrap();
        assert_eq!(back, s);
        let v = s.to_json_value();
        assert_eq!(v["starts"]["3"], 2);
        assert_eq!(v["latency_cycles"], 3);
    }

    #[test]
    fn json_rejects_inconsistent_latency() {
        let (dg, p) = running();
        let mut v = Schedule::new(&dg, vec![0, 1, 0, 2], &p).to_json_value();
        v["latency_cycles"] = 7.into();
        assert!(Schedule::from_json_str(&v.to_string()).is_err());
    }

    #[test]
    fn speedup_values() {
        assert_eq!(format!("{:.2}", speedup(873, 809)), "1.08");
        assert_eq!(speedup(10, 10), 1.0);
        let table = [1.08, 1.09, 1.04, 1.12, 1.04, 1.09, 0.96, 1.01, 1.03, 1.06];
        let g = geometric_mean(&table).unwrap();
        assert!((g - 1.05).abs() < 0.005, "{g}");
        let mean: f64 = table.iter().sum::<f64>() / table.len() as f64;
        assert!((mean - 1.05).abs() < 0.005);
    }

    #[test]
    fn metrics_reject_mixed_platforms() {
        let (dg, p) = running();
        let other = parse_platform(r#"{"resources": {"qubits": {"count": 5}}}"#).unwrap();
        let runs = [
            AlgoRun {
                algo: "qsdc".into(),
                schedule: Schedule::new(&dg, vec![0, 1, 0, 2], &p),
                wall_time: None,
            },
            AlgoRun {
                algo: "list".into(),
                schedule: Schedule::new(&dg, vec![0, 1, 0, 2], &other),
                wall_time: None,
            },
        ];
        assert!(compute_metrics("c", &runs).is_err());
    }

    #[test]
    fn metrics_and_table() {
        let (dg, p) = running();
        let runs = [
            AlgoRun {
                algo: "qsdc".into(),
                schedule: Schedule::new(&dg, vec![0, 1, 0, 2], &p),
                wall_time: None,
            },
            AlgoRun {
                algo: "list".into(),
                schedule: Schedule::new(&dg, vec![0, 1, 2, 3], &p),
                wall_time: None,
            },
        ];
        let report = compute_metrics("running", &runs).unwrap();
        assert_eq!(report.baseline, "list");
        assert!((report.rows[0].speedup - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(report.rows[1].speedup, 1.0);
        let table = report.to_table();
        assert!(table.starts_with("Benchmark"), "{table}");
        assert!(table.contains("running    qsdc"), "{table}");
    }

    #[test]
    fn gantt_rows() {
        let (dg, p) = running();
        let s = Schedule::new(&dg, vec![0, 1, 0, 2], &p);
        let g = render_gantt(&s, &p);
        let qwg0 = g.lines().find(|l| l.starts_with("qwg0")).unwrap();
        let cells: Vec<&str> = qwg0.split_whitespace().skip(1).collect();
        assert_eq!(cells, vec!["[x:q2,q4]", "[y:q3]", "[z:q2]"]);
        assert!(g.lines().any(|l| l.starts_with("q2 ")));
    }

    #[test]
    fn gantt_empty_and_multi_cycle() {
        let p = PlatformConfig::s17();
        let dg = build_depgraph(&parse_circuit("qubits 3").unwrap(), &p).unwrap();
        assert_eq!(render_gantt(&Schedule::new(&dg, vec![], &p), &p), "cycle\n");

        let p = parse_platform(
            r#"{"resources": {"qubits": {"count": 1}, "qwgs": {"count": 1, "connection_map": {"0": [0]}}},
                "instructions": {"x": {"duration_ns": 40, "class": "mw"}}}"#,
        )
        .unwrap();
        let dg = build_depgraph(&parse_circuit("x q0").unwrap(), &p).unwrap();
        let g = render_gantt(&Schedule::new(&dg, vec![0], &p), &p);
        let row: Vec<&str> = g
            .lines()
            .find(|l| l.starts_with("qwg0"))
            .unwrap()
            .split_whitespace()
            .collect();
        assert_eq!(row, vec!["qwg0", "[x:q0]", ".."]);
    }
}
