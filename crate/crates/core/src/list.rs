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

//! Resource-constrained list scheduling, the baseline QSDC is compared
//! against, and the dependency-only ASAP schedule.

use crate::circuit::{build_depgraph, Circuit, DepGraph};
use crate::error::Result;
use crate::platform::{InstanceRef, PlatformConfig};
use crate::schedule::Schedule;
use crate::sdc::ConstraintSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ListOptions {
    /// Let compatible gates share an instrument when they start together.
    pub stacking: bool,
}

impl Default for ListOptions {
    fn default() -> Self {
        ListOptions { stacking: true }
    }
}

/// The group of gates most recently issued on an instance.
#[derive(Clone, Debug, Default)]
struct InstanceState {
    busy_until: u64,
    start: u64,
    opcode: String,
    count: usize,
}

/// Dependency-only ALAP starts against the critical-path horizon.
pub fn alap_priorities(dg: &DepGraph) -> Vec<u64> {
    let tail = dg.tail_lengths();
    let horizon = tail.iter().copied().max().unwrap_or(0);
    tail.iter().map(|t| horizon - t).collect()
}

/// Cycle-by-cycle list scheduling. Ready gates are tried in ALAP order,
/// ties broken by program order; a gate issues when each instance it needs
/// is idle or hosts a compatible group that started this cycle and has room.
pub fn schedule_list_dg(dg: &DepGraph, platform: &PlatformConfig, options: ListOptions) -> Vec<u64> {
    let n = dg.len();
    let priority = alap_priorities(dg);
    let needs: Vec<Vec<InstanceRef>> = dg
        .circuit()
        .gates()
        .iter()
        .map(|g| platform.instruments_for(g))
        .collect();
    let mut state: std::collections::HashMap<InstanceRef, InstanceState> = std::collections::HashMap::new();
    let mut waiting: Vec<usize> = (0..n).map(|g| dg.preds(g).count()).collect();
    let mut earliest = vec![0u64; n];
    let mut start = vec![0u64; n];
    let mut ready: Vec<usize> = (0..n).filter(|&g| waiting[g] == 0).collect();
    let mut done = 0;
    let mut cycle = 0u64;
    while done < n {
        ready.sort_by_key(|&g| (priority[g], g));
        let mut issued = Vec::new();
        for &g in &ready {
            if earliest[g] > cycle {
                continue;
            }
            let gate = dg.gate(g);
            let fits = needs[g].iter().all(|r| match state.get(r) {
                None => true,
                Some(s) if s.busy_until <= cycle => true,
                Some(s) => {
                    options.stacking
                        && s.start == cycle
                        && s.count < platform.capacity(*r)
                        && platform.rule(*r).allows(&s.opcode, &gate.opcode)
                }
            });
            if !fits {
                continue;
            }
            for r in &needs[g] {
                let s = state.entry(*r).or_default();
                let end = cycle + gate.duration_cycles;
                if s.busy_until <= cycle && !(s.start == cycle && s.count > 0) {
                    *s = InstanceState {
                        busy_until: end,
                        start: cycle,
                        opcode: gate.opcode.clone(),
                        count: 1,
                    };
                } else {
                    s.count += 1;
                    s.busy_until = s.busy_until.max(end);
                }
            }
            start[g] = cycle;
            issued.push(g);
        }
        ready.retain(|g| !issued.contains(g));
        for &g in &issued {
            done += 1;
            for e in dg.succs(g) {
                earliest[e.dst] = earliest[e.dst].max(start[g] + e.weight);
                waiting[e.dst] -= 1;
                if waiting[e.dst] == 0 {
                    ready.push(e.dst);
                }
            }
        }
        cycle += 1;
    }
    start
}

pub fn schedule_list(circuit: &Circuit, platform: &PlatformConfig, options: ListOptions) -> Result<Schedule> {
    let dg = build_depgraph(circuit, platform)?;
    let starts = schedule_list_dg(&dg, platform, options);
    Ok(Schedule::new(&dg, starts, platform))
}

/// Dependency-only ASAP schedule. It ignores instruments and is generally
/// not legal on the platform.
pub fn schedule_asap(circuit: &Circuit, platform: &PlatformConfig) -> Result<Schedule> {
    let dg = build_depgraph(circuit, platform)?;
    let mut sys = ConstraintSystem::from_depgraph(&dg);
    let starts = sys.solve_asap()?.into_starts();
    Ok(Schedule::new(&dg, starts, platform))
}
