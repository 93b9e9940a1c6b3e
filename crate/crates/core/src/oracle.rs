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

//! Exact branch-and-bound scheduling for small circuits.
//!
//! For each target makespan `T`, starting from the critical path, a
//! depth-first search assigns start cycles in program order. A gate's
//! window runs from its dependency-ready cycle to `T` minus its tail, and
//! every placement is checked against the gates already placed on the
//! same instruments. After each placement the unplaced gates are bounded:
//! their earliest starts plus tails, and per instrument instance the
//! earliest start plus the least time its remaining gates can occupy it.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use crate::circuit::{build_depgraph, Circuit, DepGraph};
use crate::error::{Error, Result};
use crate::list::{schedule_list_dg, ListOptions};
use crate::platform::{InstanceRef, PlatformConfig, StackingRule};
use crate::schedule::Schedule;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_gates: usize,
    pub max_makespan: u64,
    pub timeout: Duration,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_gates: 12,
            max_makespan: 32,
            timeout: Duration::from_secs(10),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub schedule: Schedule,
    /// Every shorter makespan was refuted.
    pub proven_optimal: bool,
    pub nodes: u64,
}

struct Search<'a> {
    dg: &'a DepGraph,
    needs: Vec<Vec<InstanceRef>>,
    rules: Vec<Vec<(StackingRule, usize)>>,
    /// Per used instance: its rule, capacity and the gates needing it.
    users: Vec<(StackingRule, usize, Vec<usize>)>,
    tail: Vec<u64>,
    est: Vec<u64>,
    start: Vec<u64>,
    deadline: Instant,
    nodes: u64,
    timed_out: bool,
}

impl Search<'_> {
    /// Gates `< g` are placed; tries every legal start for `g`.
    fn place(&mut self, g: usize, horizon: u64) -> bool {
        if g == self.dg.len() {
            return true;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(4096) && Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        if self.timed_out {
            return false;
        }
        let ready = self
            .dg
            .preds(g)
            .map(|e| self.start[e.src] + e.weight)
            .max()
            .unwrap_or(0);
        let Some(latest) = horizon.checked_sub(self.tail[g]) else {
            return false;
        };
        // A gate on no instrument only constrains its successors, so starting
        // it as early as possible dominates every later start.
        let latest = if self.needs[g].is_empty() {
            latest.min(ready)
        } else {
            latest
        };
        for s in ready..=latest {
            if self.legal(g, s) {
                self.start[g] = s;
                if self.bounded(g + 1, horizon) && self.place(g + 1, horizon) {
                    return true;
                }
                if self.timed_out {
                    return false;
                }
            }
        }
        false
    }

    /// Whether gates `>= next` can still finish by `horizon`.
    fn bounded(&mut self, next: usize, horizon: u64) -> bool {
        let n = self.dg.len();
        for u in next..n {
            self.est[u] = self
                .dg
                .preds(u)
                .map(|e| if e.src < next { self.start[e.src] } else { self.est[e.src] } + e.weight)
                .max()
                .unwrap_or(0);
            if self.est[u] + self.tail[u] > horizon {
                return false;
            }
        }
        let mut durs: Vec<(&str, u64)> = Vec::new();
        for (rule, cap, gates) in &self.users {
            durs.clear();
            let (mut first, mut after) = (u64::MAX, u64::MAX);
            for &u in gates.iter().filter(|&&u| u >= next) {
                let gate = self.dg.gate(u);
                durs.push((gate.opcode.as_str(), gate.duration_cycles));
                first = first.min(self.est[u]);
                after = after.min(self.tail[u] - gate.duration_cycles);
            }
            if durs.is_empty() {
                continue;
            }
            let Some(last) = horizon.checked_sub(after) else {
                return false;
            };
            let busy = occupancy(&mut durs, *rule, *cap);
            if first + busy > last
                || busy > last - first - self.blocked(gates, next, (first, last), horizon, *rule, *cap)
            {
                return false;
            }
            if !self.pairs_fit(gates, next, horizon, *rule, *cap) {
                return false;
            }
        }
        true
    }

    /// Every two gates on one instance, one of them unplaced, can either stack
    /// or run back to back inside their start windows.
    fn pairs_fit(&self, gates: &[usize], next: usize, horizon: u64, rule: StackingRule, cap: usize) -> bool {
        let window = |u: usize| {
            if u < next {
                (self.start[u], self.start[u])
            } else {
                (self.est[u], horizon - self.tail[u])
            }
        };
        for (i, &a) in gates.iter().enumerate() {
            for &b in &gates[i + 1..] {
                if b < next {
                    continue;
                }
                let ((la, ha), (lb, hb)) = (window(a), window(b));
                let (da, db) = (self.dg.gate(a).duration_cycles, self.dg.gate(b).duration_cycles);
                let stack = rule != StackingRule::Exclusive
                    && cap > 1
                    && rule.allows(&self.dg.gate(a).opcode, &self.dg.gate(b).opcode)
                    && la.max(lb) <= ha.min(hb);
                if !(stack || lb.max(la + da) <= hb || la.max(lb + db) <= ha) {
                    return false;
                }
            }
        }
        true
    }

    /// Cycles of `window` taken by placed groups on one instance that no
    /// unplaced gate can join.
    fn blocked(
        &self,
        gates: &[usize],
        next: usize,
        window: (u64, u64),
        horizon: u64,
        rule: StackingRule,
        cap: usize,
    ) -> u64 {
        let (from, to) = window;
        let placed: Vec<usize> = gates.iter().copied().filter(|&h| h < next).collect();
        let mut total = 0;
        for (i, &h) in placed.iter().enumerate() {
            let s = self.start[h];
            // Count each group once, at its first member.
            if placed[..i].iter().any(|&o| self.start[o] == s) {
                continue;
            }
            let size = placed.iter().filter(|&&o| self.start[o] == s).count();
            let joinable = rule != StackingRule::Exclusive
                && size < cap
                && gates.iter().any(|&u| {
                    u >= next
                        && self.est[u] <= s
                        && s + self.tail[u] <= horizon
                        && rule.allows(&self.dg.gate(h).opcode, &self.dg.gate(u).opcode)
                });
            if joinable {
                continue;
            }
            let end = placed
                .iter()
                .filter(|&&o| self.start[o] == s)
                .map(|&o| s + self.dg.gate(o).duration_cycles)
                .max()
                .unwrap_or(s);
            total += end.min(to).saturating_sub(s.max(from));
        }
        total
    }

    /// Whether `g` may start at `s` next to the gates placed before it.
    fn legal(&self, g: usize, s: u64) -> bool {
        let gate = self.dg.gate(g);
        let end = s + gate.duration_cycles;
        for (k, r) in self.needs[g].iter().enumerate() {
            let (rule, cap) = self.rules[g][k];
            let mut together = 1;
            for h in 0..g {
                if !self.needs[h].contains(r) {
                    continue;
                }
                let (hs, he) = (self.start[h], self.start[h] + self.dg.gate(h).duration_cycles);
                if hs >= end || s >= he {
                    continue;
                }
                if hs != s || !rule.allows(&self.dg.gate(h).opcode, &gate.opcode) {
                    return false;
                }
                together += 1;
                if together > cap {
                    return false;
                }
            }
        }
        true
    }
}

/// Least time an instance is busy with the given gates. Stack groups never
/// overlap, so with groups of at most `cap` the cheapest packing takes every
/// `cap`-th duration in descending order, per opcode where the rule demands.
fn occupancy(durs: &mut [(&str, u64)], rule: StackingRule, cap: usize) -> u64 {
    let cap = if rule == StackingRule::Exclusive { 1 } else { cap.max(1) };
    if rule == StackingRule::SameGateSameStart {
        durs.sort_unstable_by(|a, b| a.0.cmp(b.0).then(b.1.cmp(&a.1)));
        durs.chunk_by(|a, b| a.0 == b.0)
            .map(|run| run.iter().step_by(cap).map(|d| d.1).sum::<u64>())
            .sum()
    } else {
        durs.sort_unstable_by_key(|d| std::cmp::Reverse(d.1));
        durs.iter().step_by(cap).map(|d| d.1).sum()
    }
}

/// Optimal schedule of a lowered circuit, or `LimitExceeded` when the
/// circuit, the makespan or the time budget is out of bounds.
pub fn schedule_optimal_dg(
    dg: &DepGraph,
    platform: &PlatformConfig,
    limits: &OracleLimits,
    stacking: bool,
) -> Result<OracleResult> {
    if dg.len() > limits.max_gates {
        return Err(Error::LimitExceeded(format!(
            "{} gates exceed the oracle limit of {}",
            dg.len(),
            limits.max_gates
        )));
    }
    let tail = dg.tail_lengths();
    let lower = tail.iter().copied().max().unwrap_or(0);
    if lower > limits.max_makespan {
        return Err(Error::LimitExceeded(format!(
            "critical path of {lower} cycles exceeds the makespan bound {}",
            limits.max_makespan
        )));
    }
    let incumbent = schedule_list_dg(dg, platform, ListOptions { stacking });
    let upper = Schedule::new(dg, incumbent.clone(), platform).latency_cycles();
    let needs: Vec<Vec<InstanceRef>> = dg
        .circuit()
        .gates()
        .iter()
        .map(|g| platform.instruments_for(g))
        .collect();
    let rules: Vec<Vec<(StackingRule, usize)>> = needs
        .iter()
        .map(|rs| {
            rs.iter()
                .map(|&r| {
                    if stacking {
                        (platform.rule(r), platform.capacity(r))
                    } else {
                        (StackingRule::Exclusive, 1)
                    }
                })
                .collect()
        })
        .collect();
    let mut by_instance: BTreeMap<InstanceRef, (StackingRule, usize, Vec<usize>)> = BTreeMap::new();
    for (g, rs) in needs.iter().enumerate() {
        for (k, &r) in rs.iter().enumerate() {
            let (rule, cap) = rules[g][k];
            by_instance.entry(r).or_insert((rule, cap, Vec::new())).2.push(g);
        }
    }
    let mut search = Search {
        dg,
        needs,
        rules,
        users: by_instance.into_values().collect(),
        tail,
        est: vec![0; dg.len()],
        start: vec![0; dg.len()],
        deadline: Instant::now() + limits.timeout,
        nodes: 0,
        timed_out: false,
    };
    for horizon in lower..upper.min(limits.max_makespan + 1) {
        if search.bounded(0, horizon) && search.place(0, horizon) {
            let schedule = Schedule::new(dg, search.start.clone(), platform);
            return Ok(OracleResult {
                schedule,
                proven_optimal: true,
                nodes: search.nodes,
            });
        }
        if search.timed_out {
            return Err(Error::LimitExceeded(format!(
                "oracle timed out after {:?} at makespan {horizon}",
                limits.timeout
            )));
        }
    }
    if upper > limits.max_makespan {
        return Err(Error::LimitExceeded(format!(
            "no schedule within the makespan bound {}",
            limits.max_makespan
        )));
    }
    Ok(OracleResult {
        schedule: Schedule::new(dg, incumbent, platform),
        proven_optimal: true,
        nodes: search.nodes,
    })
}

pub fn schedule_optimal(
    circuit: &Circuit,
    platform: &PlatformConfig,
    limits: &OracleLimits,
    stacking: bool,
) -> Result<OracleResult> {
    let dg = build_depgraph(circuit, platform)?;
    schedule_optimal_dg(&dg, platform, limits, stacking)
}
