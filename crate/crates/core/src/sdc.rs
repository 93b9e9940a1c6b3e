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

//! Systems of difference constraints `s_u - s_v <= c` over one start-cycle
//! variable per gate.
//!
//! Each constraint is an edge `u -> v` of weight `-c` in a longest-path
//! graph (`s_v >= s_u - c`). Every variable is implicitly bounded below by a
//! virtual source fixed at cycle 0, so the least solution is the vector of
//! longest-path distances from that source, and the system is feasible iff
//! the graph has no positive cycle (a negative cycle in the usual
//! shortest-path reading). Solving decomposes the graph into strongly
//! connected components: acyclic parts are relaxed once in topological
//! order, and Bellman-Ford runs only inside non-trivial components.

use std::collections::VecDeque;
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::DepGraph;
use crate::error::{Error, Result};

/// Start-cycle variable of one gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SchedVar(pub usize);

impl fmt::Display for SchedVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// `s_u - s_v <= bound`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiffConstraint {
    pub u: SchedVar,
    pub v: SchedVar,
    pub bound: i64,
}

impl DiffConstraint {
    pub fn new(u: SchedVar, v: SchedVar, bound: i64) -> Self {
        DiffConstraint { u, v, bound }
    }

    /// `b` starts at least `latency` cycles after `a`.
    pub fn after(a: SchedVar, b: SchedVar, latency: i64) -> Self {
        DiffConstraint::new(a, b, -latency)
    }

    pub fn is_satisfied(&self, starts: &[u64]) -> bool {
        starts[self.u.0] as i64 - starts[self.v.0] as i64 <= self.bound
    }
}

impl fmt::Display for DiffConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} - {} <= {}", self.u, self.v, self.bound)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstraintId(pub usize);

/// The system has no solution; `cycle` lists constraints whose bounds sum
/// to a negative number around a cycle.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("infeasible system: negative cycle [{}]", display_cycle(.cycle))]
pub struct InfeasibleSystem {
    pub cycle: Vec<DiffConstraint>,
}

fn display_cycle(cycle: &[DiffConstraint]) -> String {
    cycle.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Integer start cycle per variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    start: Vec<u64>,
}

impl Solution {
    pub fn start_cycle(&self, var: SchedVar) -> u64 {
        self.start[var.0]
    }

    pub fn starts(&self) -> &[u64] {
        &self.start
    }

    pub fn into_starts(self) -> Vec<u64> {
        self.start
    }

    /// `max(start + duration)`, zero when there are no variables.
    pub fn makespan(&self, durations: &[u64]) -> u64 {
        self.start.iter().zip(durations).map(|(s, d)| s + d).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
struct Cache {
    value: Vec<i64>,
    /// Constraint that last raised each variable; `None` means the source.
    reason: Vec<Option<usize>>,
}

#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    durations: Vec<u64>,
    constraints: Vec<Option<DiffConstraint>>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    cache: Option<Cache>,
    queued: Vec<bool>,
}

impl ConstraintSystem {
    /// A system with one variable per entry of `durations` and no constraints.
    pub fn new(durations: Vec<u64>) -> Self {
        let n = durations.len();
        ConstraintSystem {
            durations,
            constraints: Vec::new(),
            out_edges: vec![Vec::new(); n],
            in_edges: vec![Vec::new(); n],
            cache: None,
            queued: vec![false; n],
        }
    }

    /// One variable per gate and one dependency constraint per edge.
    pub fn from_depgraph(dg: &DepGraph) -> Self {
        let mut sys = ConstraintSystem::new(dg.durations());
        for e in dg.edges() {
            sys.add_dependency(SchedVar(e.src), SchedVar(e.dst), e.weight as i64);
        }
        sys
    }

    pub fn var_count(&self) -> usize {
        self.durations.len()
    }

    pub fn durations(&self) -> &[u64] {
        &self.durations
    }

    /// Live constraints in insertion order.
    pub fn constraints(&self) -> impl Iterator<Item = (ConstraintId, &DiffConstraint)> + '_ {
        self.constraints
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.as_ref().map(|c| (ConstraintId(i), c)))
    }

    pub fn constraint(&self, id: ConstraintId) -> Option<&DiffConstraint> {
        self.constraints.get(id.0).and_then(Option::as_ref)
    }

    pub fn len(&self) -> usize {
        self.constraints.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Records `c` without solving. Infeasibility surfaces at the next solve.
    pub fn add_constraint(&mut self, c: DiffConstraint) -> ConstraintId {
        let keep = self
            .cache
            .as_ref()
            .is_some_and(|cache| cache.value[c.u.0] - cache.value[c.v.0] <= c.bound);
        let id = self.push(c);
        if !keep {
            self.cache = None;
        }
        id
    }

    /// `s_a - s_b <= -latency`: `b` starts at least `latency` cycles after `a`.
    pub fn add_dependency(&mut self, a: SchedVar, b: SchedVar, latency: i64) -> ConstraintId {
        self.add_constraint(DiffConstraint::after(a, b, latency))
    }

    /// Exact relative timing: `start(b) - start(a) == latency`.
    pub fn pin_relative(&mut self, a: SchedVar, b: SchedVar, latency: i64) -> (ConstraintId, ConstraintId) {
        let [lo, hi] = pin_pair(a, b, latency);
        (self.add_constraint(lo), self.add_constraint(hi))
    }

    pub fn remove(&mut self, id: ConstraintId) -> Option<DiffConstraint> {
        let c = self.constraints.get_mut(id.0)?.take()?;
        self.out_edges[c.u.0].retain(|&i| i != id.0);
        self.in_edges[c.v.0].retain(|&i| i != id.0);
        self.cache = None;
        Some(c)
    }

    fn push(&mut self, c: DiffConstraint) -> ConstraintId {
        assert_ne!(c.u, c.v, "difference constraint on a single variable");
        assert!(
            c.u.0 < self.var_count() && c.v.0 < self.var_count(),
            "unknown variable in {c}"
        );
        let id = self.constraints.len();
        self.constraints.push(Some(c));
        self.out_edges[c.u.0].push(id);
        self.in_edges[c.v.0].push(id);
        ConstraintId(id)
    }

    fn pop_last(&mut self) {
        let c = self.constraints.pop().flatten().expect("pop of a live constraint");
        let id = self.constraints.len();
        let popped = self.out_edges[c.u.0].pop();
        debug_assert_eq!(popped, Some(id));
        let popped = self.in_edges[c.v.0].pop();
        debug_assert_eq!(popped, Some(id));
    }

    fn live(&self, id: usize) -> &DiffConstraint {
        self.constraints[id]
            .as_ref()
            .expect("adjacency refers to a live constraint")
    }

    /// Least (as-soon-as-possible) non-negative integer solution.
    pub fn solve_asap(&mut self) -> Result<Solution, InfeasibleSystem> {
        if self.cache.is_none() {
            self.cache = Some(self.compute_least()?);
        }
        let cache = self.cache.as_ref().expect("cache just filled");
        Ok(Solution {
            start: cache.value.iter().map(|&v| v as u64).collect(),
        })
    }

    /// ASAP start of one variable, without copying the whole solution.
    pub fn asap_start(&mut self, var: SchedVar) -> Result<u64, InfeasibleSystem> {
        if self.cache.is_none() {
            self.cache = Some(self.compute_least()?);
        }
        Ok(self.cache.as_ref().expect("cache just filled").value[var.0] as u64)
    }

    /// ASAP makespan of the current system.
    pub fn makespan(&mut self) -> Result<u64, InfeasibleSystem> {
        let durations = self.durations.clone();
        Ok(self.solve_asap()?.makespan(&durations))
    }

    /// Greatest solution in which every variable finishes by `horizon`.
    pub fn solve_alap(&mut self, horizon: u64) -> Result<Solution> {
        let makespan = self.makespan()?;
        if horizon < makespan {
            return Err(Error::HorizonTooSmall { horizon, makespan });
        }
        let n = self.var_count();
        let mut value: Vec<i64> = self.durations.iter().map(|&d| horizon as i64 - d as i64).collect();
        let mut comp = vec![usize::MAX; n];
        // Sinks first: tarjan_scc yields components in reverse topological order.
        for (ci, scc) in self.components().iter().enumerate() {
            for &m in scc {
                comp[m] = ci;
            }
            let lower = |value: &mut Vec<i64>, m: usize, internal: bool| {
                let mut changed = false;
                for &cid in &self.out_edges[m] {
                    let c = self.live(cid);
                    if (comp[c.v.0] == ci) != internal {
                        continue;
                    }
                    let cand = value[c.v.0] + c.bound;
                    if cand < value[m] {
                        value[m] = cand;
                        changed = true;
                    }
                }
                changed
            };
            for &m in scc {
                lower(&mut value, m, false);
            }
            if scc.len() > 1 {
                for _ in 0..scc.len() {
                    let mut changed = false;
                    for &m in scc {
                        changed |= lower(&mut value, m, true);
                    }
                    if !changed {
                        break;
                    }
                }
            }
        }
        debug_assert!(value.iter().all(|&v| v >= 0));
        Ok(Solution {
            start: value.into_iter().map(|v| v.max(0) as u64).collect(),
        })
    }

    /// True iff the system stays feasible with `new` added. On success the
    /// constraints are kept and the cached solution is repaired in place; on
    /// failure the system is left unchanged.
    pub fn check_feasible_incremental(&mut self, new: &[DiffConstraint]) -> bool {
        self.try_insert(new).is_some()
    }

    /// [`Self::check_feasible_incremental`] returning the ids of the inserted
    /// constraints.
    pub fn try_insert(&mut self, new: &[DiffConstraint]) -> Option<Vec<ConstraintId>> {
        self.solve_asap().ok()?;
        let mut cache = self.cache.take().expect("solved");
        let mut undo: Vec<(usize, i64, Option<usize>)> = Vec::new();
        let mut ids = Vec::with_capacity(new.len());
        for &c in new {
            let id = self.push(c);
            ids.push(id);
            if !self.propagate(id.0, &mut cache, &mut undo) {
                for (var, value, reason) in undo.into_iter().rev() {
                    cache.value[var] = value;
                    cache.reason[var] = reason;
                }
                for _ in &ids {
                    self.pop_last();
                }
                self.cache = Some(cache);
                return None;
            }
        }
        self.cache = Some(cache);
        Some(ids)
    }

    /// Raises values along out-edges after inserting constraint `id`. Returns
    /// false when the tail of the new edge would have to move, which means
    /// the new edge closed a positive cycle.
    fn propagate(&mut self, id: usize, cache: &mut Cache, undo: &mut Vec<(usize, i64, Option<usize>)>) -> bool {
        let c = *self.live(id);
        let (tail, head) = (c.u.0, c.v.0);
        let cand = cache.value[tail] - c.bound;
        if cand <= cache.value[head] {
            return true;
        }
        undo.push((head, cache.value[head], cache.reason[head]));
        cache.value[head] = cand;
        cache.reason[head] = Some(id);
        let mut queue = VecDeque::from([head]);
        self.queued[head] = true;
        let mut ok = true;
        'outer: while let Some(n) = queue.pop_front() {
            self.queued[n] = false;
            for &cid in &self.out_edges[n] {
                let e = self.constraints[cid].as_ref().expect("live edge");
                let m = e.v.0;
                let cand = cache.value[n] - e.bound;
                if cand > cache.value[m] {
                    if m == tail {
                        ok = false;
                        break 'outer;
                    }
                    undo.push((m, cache.value[m], cache.reason[m]));
                    cache.value[m] = cand;
                    cache.reason[m] = Some(cid);
                    if !self.queued[m] {
                        self.queued[m] = true;
                        queue.push_back(m);
                    }
                }
            }
        }
        for n in queue {
            self.queued[n] = false;
        }
        ok
    }

    /// Follows the constraints that determine `to`'s current ASAP value
    /// backwards and reports whether `from` lies on that chain. When it does,
    /// `start(to) - start(from)` is forced by the system.
    pub fn on_critical_chain(&mut self, from: SchedVar, to: SchedVar) -> bool {
        if self.solve_asap().is_err() {
            return false;
        }
        let cache = self.cache.as_ref().expect("solved");
        let floor = cache.value[from.0];
        let mut cur = to.0;
        let mut steps = 0;
        while let Some(cid) = cache.reason[cur] {
            if cur == from.0 {
                return true;
            }
            cur = self.live(cid).u.0;
            steps += 1;
            if cache.value[cur] < floor || steps > self.var_count() {
                return false;
            }
        }
        cur == from.0
    }

    /// Constraints violated by `starts`.
    pub fn violations(&self, starts: &[u64]) -> Vec<DiffConstraint> {
        self.constraints()
            .map(|(_, c)| *c)
            .filter(|c| !c.is_satisfied(starts))
            .collect()
    }

    /// One `s3 - s1 <= -1` line per live constraint.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (_, c) in self.constraints() {
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }

    /// Strongly connected components in reverse topological order.
    fn components(&self) -> Vec<Vec<usize>> {
        let n = self.var_count();
        let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, self.constraints.len());
        for _ in 0..n {
            g.add_node(());
        }
        for c in self.constraints.iter().flatten() {
            g.add_edge(NodeIndex::new(c.u.0), NodeIndex::new(c.v.0), ());
        }
        tarjan_scc(&g)
            .into_iter()
            .map(|scc| {
                let mut members: Vec<usize> = scc.into_iter().map(NodeIndex::index).collect();
                members.sort_unstable();
                members
            })
            .collect()
    }

    fn compute_least(&self) -> Result<Cache, InfeasibleSystem> {
        let (cache, mut cycles) = self.least_with_cycles(false);
        match cycles.pop() {
            Some(cycle) => Err(InfeasibleSystem { cycle }),
            None => Ok(cache),
        }
    }

    /// Solves the system and returns one positive cycle per infeasible
    /// strongly connected component. Empty when the system is feasible, in
    /// which case the solution is cached.
    pub fn positive_cycles(&mut self) -> Vec<InfeasibleSystem> {
        if self.cache.is_some() {
            return Vec::new();
        }
        let (cache, cycles) = self.least_with_cycles(true);
        if cycles.is_empty() {
            self.cache = Some(cache);
        }
        cycles.into_iter().map(|cycle| InfeasibleSystem { cycle }).collect()
    }

    fn least_with_cycles(&self, all: bool) -> (Cache, Vec<Vec<DiffConstraint>>) {
        let mut cycles = Vec::new();
        let n = self.var_count();
        let mut value = vec![0i64; n];
        let mut reason: Vec<Option<usize>> = vec![None; n];
        let mut comp = vec![usize::MAX; n];
        let components = self.components();
        for (ci, scc) in components.iter().enumerate().rev() {
            for &m in scc {
                comp[m] = ci;
            }
            let raise = |value: &mut Vec<i64>, reason: &mut Vec<Option<usize>>, m: usize, internal: bool| {
                let mut changed = false;
                for &cid in &self.in_edges[m] {
                    let c = self.live(cid);
                    if (comp[c.u.0] == ci) != internal {
                        continue;
                    }
                    let cand = value[c.u.0] - c.bound;
                    if cand > value[m] {
                        value[m] = cand;
                        reason[m] = Some(cid);
                        changed = true;
                    }
                }
                changed
            };
            for &m in scc {
                raise(&mut value, &mut reason, m, false);
            }
            if scc.len() == 1 {
                continue;
            }
            let mut passes = 0;
            'passes: loop {
                let mut last = None;
                for &m in scc {
                    if raise(&mut value, &mut reason, m, true) {
                        last = Some(m);
                    }
                }
                let Some(last) = last else { break };
                passes += 1;
                if passes >= scc.len() {
                    if let Some(cycle) = self.reason_cycle(&reason, &comp, ci, last) {
                        cycles.push(cycle);
                        if all {
                            break 'passes;
                        }
                        return (Cache { value, reason }, cycles);
                    }
                }
            }
        }
        (Cache { value, reason }, cycles)
    }

    /// Cycle in the predecessor graph of component `ci`, if one exists.
    fn reason_cycle(
        &self,
        reason: &[Option<usize>],
        comp: &[usize],
        ci: usize,
        start: usize,
    ) -> Option<Vec<DiffConstraint>> {
        let pred = |m: usize| -> Option<usize> {
            let c = self.live(reason[m]?);
            (comp[c.u.0] == ci).then_some(c.u.0)
        };
        let mut cur = start;
        let mut seen = std::collections::HashSet::new();
        while seen.insert(cur) {
            cur = pred(cur)?;
        }
        // `cur` is on the cycle; walk it once more to collect constraints.
        let mut cycle = Vec::new();
        let entry = cur;
        loop {
            let c = *self.live(reason[cur].expect("cycle member has a reason"));
            cycle.push(c);
            cur = c.u.0;
            if cur == entry {
                break;
            }
        }
        cycle.reverse();
        Some(cycle)
    }
}

/// The two inequalities of an exact timing constraint.
pub fn pin_pair(a: SchedVar, b: SchedVar, latency: i64) -> [DiffConstraint; 2] {
    [DiffConstraint::new(a, b, -latency), DiffConstraint::new(b, a, latency)]
}

impl fmt::Display for ConstraintSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use proptest::prelude::*;

    fn v(i: usize) -> SchedVar {
        SchedVar(i)
    }

    /// Component-wise least solution by enumeration over `0..=max`.
    fn brute_least(n: usize, cs: &[DiffConstraint], max: u64) -> Option<Vec<u64>> {
        let mut best: Option<Vec<u64>> = None;
        let mut cur = vec![0u64; n];
        loop {
            if cs.iter().all(|c| c.is_satisfied(&cur)) {
                best = Some(match best {
                    None => cur.clone(),
                    Some(b) => b.iter().zip(&cur).map(|(a, b)| *a.min(b)).collect(),
                });
            }
            let mut i = 0;
            loop {
                if i == n {
                    return best;
                }
                cur[i] += 1;
                if cur[i] <= max {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn dependency_gap() {
        let mut sys = ConstraintSystem::new(vec![3, 1]);
        sys.add_dependency(v(0), v(1), 3);
        let s = sys.solve_asap().unwrap();
        assert_eq!(s.starts(), &[0, 3]);
    }

    #[test]
    fn opposite_dependencies_are_infeasible() {
        let mut sys = ConstraintSystem::new(vec![1, 1]);
        sys.add_dependency(v(0), v(1), 1);
        sys.add_dependency(v(1), v(0), 1);
        let err = sys.solve_asap().unwrap_err();
        assert_eq!(err.cycle.len(), 2);
        assert_eq!(err.cycle.iter().map(|c| c.bound).sum::<i64>(), -2);
    }

    #[test]
    fn one_cycle_per_component() {
        let mut sys = ConstraintSystem::new(vec![1; 5]);
        sys.add_dependency(v(0), v(1), 1);
        sys.add_dependency(v(1), v(0), 1);
        sys.add_dependency(v(2), v(3), 1);
        sys.add_dependency(v(3), v(2), 0);
        sys.add_dependency(v(3), v(4), 1);
        let cycles = sys.positive_cycles();
        assert_eq!(cycles.len(), 2);
        let removed: Vec<ConstraintId> = sys
            .constraints()
            .filter(|(_, c)| c.v == v(0) || c.v == v(2))
            .map(|(id, _)| id)
            .collect();
        for id in removed {
            sys.remove(id);
        }
        assert!(sys.positive_cycles().is_empty());
        assert_eq!(sys.solve_asap().unwrap().starts(), &[0, 1, 0, 1, 2]);
    }

    #[test]
    fn pin_fixes_distance() {
        let mut sys = ConstraintSystem::new(vec![1, 1]);
        sys.pin_relative(v(0), v(1), 2);
        let s = sys.solve_asap().unwrap();
        assert_eq!(s.starts(), &[0, 2]);
        let mut sys = ConstraintSystem::new(vec![1, 1, 1]);
        sys.add_dependency(v(2), v(0), 4);
        sys.pin_relative(v(0), v(1), 0);
        let s = sys.solve_asap().unwrap();
        assert_eq!(s.start_cycle(v(0)), s.start_cycle(v(1)));
        assert_eq!(s.start_cycle(v(1)), 4);
    }

    #[test]
    fn pin_conflicting_with_dependency() {
        // Two-node graph: edge 0->1 of weight 2 and a pin closing it with -1.
        let mut sys = ConstraintSystem::new(vec![2, 1]);
        sys.add_dependency(v(0), v(1), 2);
        sys.pin_relative(v(0), v(1), 1);
        let err = sys.solve_asap().unwrap_err();
        assert_eq!(err.cycle.iter().map(|c| c.bound).sum::<i64>(), -1);
    }

    #[test]
    fn running_example_asap_and_alap() {
        let dg = DepGraph::from_lowered(parse_circuit("x q2\ny q3\nx q4\nz q2").unwrap());
        let mut sys = ConstraintSystem::from_depgraph(&dg);
        assert_eq!(sys.solve_asap().unwrap().starts(), &[0, 0, 0, 1]);
        assert_eq!(sys.solve_alap(2).unwrap().starts(), &[0, 1, 1, 1]);
        assert!(matches!(sys.solve_alap(1), Err(Error::HorizonTooSmall { .. })));
    }

    #[test]
    fn trivial_systems() {
        let mut sys = ConstraintSystem::new(vec![1]);
        assert_eq!(sys.solve_asap().unwrap().starts(), &[0]);
        assert_eq!(sys.solve_alap(5).unwrap().starts(), &[4]);

        let dg = DepGraph::from_lowered(parse_circuit("x q0\ny q0\nz q0").unwrap());
        let mut sys = ConstraintSystem::from_depgraph(&dg);
        let asap = sys.solve_asap().unwrap();
        assert_eq!(asap.starts(), &[0, 1, 2]);
        assert_eq!(sys.solve_alap(3).unwrap(), asap);
    }

    #[test]
    fn incremental_redundant_and_rollback() {
        let mut sys = ConstraintSystem::new(vec![1, 1, 1]);
        sys.add_dependency(v(0), v(1), 1);
        sys.add_dependency(v(1), v(2), 1);
        let before = sys.solve_asap().unwrap();
        assert!(sys.check_feasible_incremental(&[DiffConstraint::after(v(0), v(2), 1)]));
        assert_eq!(sys.solve_asap().unwrap(), before);

        let len = sys.len();
        let dump = sys.dump();
        assert!(!sys.check_feasible_incremental(&pin_pair(v(0), v(2), 1)));
        assert_eq!(sys.len(), len);
        assert_eq!(sys.dump(), dump);
        assert_eq!(sys.solve_asap().unwrap(), before);
    }

    #[test]
    fn zero_cycle_is_feasible() {
        let mut sys = ConstraintSystem::new(vec![1, 1, 1]);
        sys.pin_relative(v(0), v(1), 0);
        sys.pin_relative(v(1), v(2), 0);
        sys.add_dependency(v(2), v(0), 0);
        assert_eq!(sys.solve_asap().unwrap().starts(), &[0, 0, 0]);
    }

    #[test]
    fn dump_format() {
        let mut sys = ConstraintSystem::new(vec![1, 1, 1, 1]);
        sys.add_dependency(v(3), v(1), 1);
        assert_eq!(sys.dump(), "s3 - s1 <= -1\n");
    }

    #[test]
    fn critical_chain() {
        let mut sys = ConstraintSystem::new(vec![1, 1, 1]);
        sys.add_dependency(v(0), v(1), 1);
        sys.add_dependency(v(1), v(2), 1);
        assert!(sys.on_critical_chain(v(0), v(2)));
        assert!(!sys.on_critical_chain(v(2), v(0)));
    }

    fn arb_constraints(n: usize) -> impl Strategy<Value = Vec<DiffConstraint>> {
        prop::collection::vec((0..n, 0..n, -3i64..3), 0..8).prop_map(|raw| {
            raw.into_iter()
                .filter(|(u, v, _)| u != v)
                .map(|(u, v, b)| DiffConstraint::new(SchedVar(u), SchedVar(v), b))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn asap_matches_enumeration(cs in arb_constraints(4)) {
            let mut sys = ConstraintSystem::new(vec![1; 4]);
            for &c in &cs {
                sys.add_constraint(c);
            }
            // Any least solution of 4 vars with |bounds| < 3 lies within 0..=9.
            let brute = brute_least(4, &cs, 9);
            match sys.solve_asap() {
                Ok(s) => {
                    prop_assert_eq!(Some(s.starts().to_vec()), brute);
                }
                Err(e) => {
                    prop_assert!(brute.is_none());
                    prop_assert!(e.cycle.iter().map(|c| c.bound).sum::<i64>() < 0);
                    for w in e.cycle.windows(2) {
                        prop_assert_eq!(w[0].v, w[1].u);
                    }
                    prop_assert_eq!(e.cycle.last().unwrap().v, e.cycle[0].u);
                }
            }
        }

        #[test]
        fn incremental_matches_full_solve(cs in arb_constraints(5), extra in arb_constraints(5)) {
            let mut inc = ConstraintSystem::new(vec![1; 5]);
            for &c in &cs {
                inc.add_constraint(c);
            }
            prop_assume!(inc.solve_asap().is_ok());
            for &c in &extra {
                let mut full = inc.clone();
                full.add_constraint(c);
                let full_result = full.solve_asap();
                let before = inc.solve_asap().unwrap();
                let ok = inc.check_feasible_incremental(&[c]);
                prop_assert_eq!(ok, full_result.is_ok());
                if ok {
                    prop_assert_eq!(inc.solve_asap().unwrap(), full_result.unwrap());
                } else {
                    prop_assert_eq!(inc.solve_asap().unwrap(), before);
                }
            }
        }

        #[test]
        fn asap_below_alap(cs in arb_constraints(5), slack in 0u64..4) {
            let mut sys = ConstraintSystem::new(vec![1, 2, 1, 3, 1]);
            for &c in &cs {
                sys.add_constraint(c);
            }
            if let Ok(asap) = sys.solve_asap() {
                let horizon = asap.makespan(sys.durations()) + slack;
                let alap = sys.solve_alap(horizon).unwrap();
                prop_assert!(sys.violations(alap.starts()).is_empty());
                for (a, l) in asap.starts().iter().zip(alap.starts()) {
                    prop_assert!(a <= l);
                }
                for (i, (&l, d)) in alap.starts().iter().zip(sys.durations()).enumerate() {
                    prop_assert!(l + d <= horizon);
                    // Raising any ALAP start breaks a constraint or the horizon.
                    let mut bumped = alap.starts().to_vec();
                    bumped[i] += 1;
                    prop_assert!(bumped[i] + d > horizon || !sys.violations(&bumped).is_empty());
                }
            }
        }
    }
}
