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

//! Resource-constrained SDC scheduling with instrument stacking.
//!
//! The pass runs in five steps:
//!
//! 1. dependency constraints from the [`DepGraph`], plus any exact-timing
//!    pins requested by the caller;
//! 2. ASAP and ALAP keys, and a [`LinearOrder`] sorted by ALAP with ASAP and
//!    program order as tie-breakers;
//! 3. per instrument instance, resource constraints inserted along the
//!    linear order ([`add_resource_constraints_instrument`]): a gate whose
//!    opcode is already running on the instance is anchored to that group
//!    with `s_first - s_gate <= 0` while the stack has room, otherwise it is
//!    serialized after the previous gate;
//! 4. [`enforce_stack_alignment`] turns each anchor into an exact pin when
//!    the members can start together, and evicts the member otherwise;
//! 5. [`repair_conflicts`] serializes any pair of gates still sharing an
//!    instance illegally. Each fix points forward in the linear order.
//!
//! The final schedule is the ASAP solution of the extended system.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::circuit::{build_depgraph, Circuit, DepGraph};
use crate::error::{Error, Result};
use crate::platform::{InstanceRef, PlatformConfig, StackingRule};
use crate::schedule::{occupants, resource_conflicts, validate_starts, Conflict, Schedule};
use crate::sdc::{ConstraintId, ConstraintSystem, DiffConstraint, InfeasibleSystem, SchedVar, Solution};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchedulerOptions {
    /// Allow stacking; when off every instance hosts one gate at a time.
    pub qsdc_enabled: bool,
    /// Stacking limit per `(instrument type, instance)`.
    pub stacking_overrides: BTreeMap<(String, usize), usize>,
    /// Cycles added to the ASAP makespan when computing ALAP keys.
    pub horizon_slack: u64,
    /// Exact relative timing `start(b) - start(a) == l` as `(a, b, l)`.
    pub pins: Vec<(usize, usize, i64)>,
}

impl Default for SchedulerOptions {
    fn default() -> Self {
        SchedulerOptions {
            qsdc_enabled: true,
            stacking_overrides: BTreeMap::new(),
            horizon_slack: 0,
            pins: Vec::new(),
        }
    }
}

impl SchedulerOptions {
    pub fn without_stacking() -> Self {
        SchedulerOptions {
            qsdc_enabled: false,
            ..Self::default()
        }
    }

    /// Stacking limit the pass uses for an instance.
    pub fn max_stacking(&self, platform: &PlatformConfig, r: InstanceRef) -> usize {
        if !self.qsdc_enabled || platform.rule(r) == StackingRule::Exclusive {
            return 1;
        }
        let name = &platform.instrument_types[r.type_index].name;
        self.stacking_overrides
            .get(&(name.clone(), r.instance))
            .copied()
            .unwrap_or_else(|| platform.capacity(r))
    }

    pub fn check(&self, platform: &PlatformConfig, gate_count: usize) -> Result<()> {
        for ((name, instance), &n) in &self.stacking_overrides {
            let (_, t) = platform
                .instrument_type(name)
                .ok_or_else(|| Error::Platform(format!("no instrument type `{name}`")))?;
            if *instance >= t.count {
                return Err(Error::Platform(format!("`{name}` has no instance {instance}")));
            }
            let size = t.connection_map[*instance].len();
            if n == 0 || n > size {
                return Err(Error::Platform(format!(
                    "stacking override {n} for {name}:{instance} must lie in 1..={size}"
                )));
            }
        }
        for &(a, b, _) in &self.pins {
            if a >= gate_count || b >= gate_count || a == b {
                return Err(Error::InvalidGate {
                    gate: a.max(b),
                    message: format!("pin between gates {a} and {b} is invalid"),
                });
            }
        }
        Ok(())
    }
}

/// Gate ids sorted by ALAP start, then ASAP start, then program order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearOrder {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl LinearOrder {
    pub fn from_keys(asap: &[u64], alap: &[u64]) -> Self {
        let mut order: Vec<usize> = (0..asap.len()).collect();
        order.sort_by_key(|&g| (alap[g], asap[g], g));
        let mut position = vec![0; order.len()];
        for (pos, &g) in order.iter().enumerate() {
            position[g] = pos;
        }
        LinearOrder { order, position }
    }

    pub fn gates(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, gate: usize) -> usize {
        self.position[gate]
    }
}

/// Solves the dependency system for ASAP and ALAP keys at horizon
/// `makespan + horizon_slack`, and sorts the gates.
pub fn linear_order(sys: &mut ConstraintSystem, horizon_slack: u64) -> Result<LinearOrder> {
    let asap = sys.solve_asap()?;
    let horizon = asap.makespan(sys.durations()) + horizon_slack;
    let alap = sys.solve_alap(horizon)?;
    Ok(LinearOrder::from_keys(asap.starts(), alap.starts()))
}

/// Gates anchored together on one instance. `members[0]` is the gate the
/// others were anchored to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackGroup {
    pub instance: InstanceRef,
    pub opcode: String,
    pub members: Vec<usize>,
    /// Pin constraints of aligned members, keyed by member.
    pins: BTreeMap<usize, (ConstraintId, ConstraintId)>,
}

impl StackGroup {
    pub fn first(&self) -> usize {
        self.members[0]
    }

    pub fn is_pinned(&self, member: usize) -> bool {
        self.pins.contains_key(&member)
    }
}

/// Bookkeeping of the group currently occupying an instance for an opcode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct RunningInstr {
    first: usize,
    last: usize,
    stack_count: usize,
    group: usize,
}

/// Groups and counts produced for one instance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InstrumentConstraints {
    pub groups: Vec<StackGroup>,
    pub anchors: usize,
    pub serializations: usize,
}

/// Inserts resource constraints for the gates occupying one instance,
/// visited in linear order.
///
/// Per gate: if its opcode is running with `stack_count < max_stacking`,
/// anchor it to the group's first gate with bound 0; if the stack is full,
/// serialize it after the group's last gate and start a new group; if its
/// opcode is not running, serialize it after the last gate seen on the
/// instance (when there is one) and start a group.
pub fn add_resource_constraints_instrument(
    instance: InstanceRef,
    gates: &[usize],
    max_stacking: usize,
    dg: &DepGraph,
    sys: &mut ConstraintSystem,
) -> InstrumentConstraints {
    assert!(max_stacking >= 1);
    let mut out = InstrumentConstraints::default();
    let mut running: HashMap<&str, RunningInstr> = HashMap::new();
    let mut last_seen: Option<usize> = None;
    let new_group = |out: &mut InstrumentConstraints, gate: usize| {
        out.groups.push(StackGroup {
            instance,
            opcode: dg.gate(gate).opcode.clone(),
            members: vec![gate],
            pins: BTreeMap::new(),
        });
        out.groups.len() - 1
    };
    for &gate in gates {
        let opcode = dg.gate(gate).opcode.as_str();
        match running.get_mut(opcode) {
            Some(run) if run.stack_count < max_stacking => {
                sys.add_constraint(DiffConstraint::new(SchedVar(run.first), SchedVar(gate), 0));
                out.anchors += 1;
                run.stack_count += 1;
                run.last = gate;
                out.groups[run.group].members.push(gate);
                assert!(run.stack_count <= max_stacking);
            }
            Some(run) => {
                let prev = run.last;
                sys.add_dependency(SchedVar(prev), SchedVar(gate), dg.gate(prev).duration_cycles as i64);
                out.serializations += 1;
                let group = new_group(&mut out, gate);
                *run = RunningInstr {
                    first: gate,
                    last: gate,
                    stack_count: 1,
                    group,
                };
            }
            None => {
                if let Some(prev) = last_seen {
                    sys.add_dependency(SchedVar(prev), SchedVar(gate), dg.gate(prev).duration_cycles as i64);
                    out.serializations += 1;
                }
                let group = new_group(&mut out, gate);
                running.insert(
                    opcode,
                    RunningInstr {
                        first: gate,
                        last: gate,
                        stack_count: 1,
                        group,
                    },
                );
            }
        }
        last_seen = Some(gate);
    }
    out.groups.retain(|g| g.members.len() > 1);
    out
}

/// Resource constraints added for the whole platform.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResourcePlan {
    pub groups: Vec<StackGroup>,
    pub anchors: usize,
    pub serializations: usize,
}

/// Visits every instrument type and instance, collects the gates occupying
/// the instance in linear order and extends `sys` with their resource
/// constraints.
pub fn add_resource_constraints(
    dg: &DepGraph,
    sys: &mut ConstraintSystem,
    platform: &PlatformConfig,
    options: &SchedulerOptions,
    order: &LinearOrder,
) -> Result<ResourcePlan> {
    let occ = occupants(dg, platform);
    let mut plan = ResourcePlan::default();
    for r in platform.instances() {
        let Some(gates) = occ.get(&r) else { continue };
        if gates.len() < 2 {
            continue;
        }
        let mut in_order = gates.clone();
        in_order.sort_by_key(|&g| order.position(g));
        let added = add_resource_constraints_instrument(r, &in_order, options.max_stacking(platform, r), dg, sys);
        log::debug!(
            "{}: {} gates, {} anchors, {} serializations",
            platform.instance_label(r),
            in_order.len(),
            added.anchors,
            added.serializations
        );
        plan.anchors += added.anchors;
        plan.serializations += added.serializations;
        plan.groups.extend(added.groups);
        sys.solve_asap()?;
    }
    Ok(plan)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AlignmentReport {
    pub pinned: usize,
    pub evicted: usize,
}

/// Pins every group member to its group's first gate. A member that cannot
/// start with the group is evicted: it leaves the group and is serialized
/// after the first gate instead.
///
/// Members whose ASAP start differs from their first gate's are evicted up
/// front. The remaining pins are added together, and every positive cycle
/// the solver reports is broken by evicting the latest member whose pin
/// lies on it.
pub fn enforce_stack_alignment(
    sys: &mut ConstraintSystem,
    plan: &mut ResourcePlan,
    dg: &DepGraph,
) -> Result<AlignmentReport> {
    let mut report = AlignmentReport::default();
    sys.solve_asap()?;
    let mut forced = Vec::new();
    for (gi, group) in plan.groups.iter().enumerate() {
        let first = SchedVar(group.first());
        for &m in &group.members[1..] {
            if group.is_pinned(m) {
                continue;
            }
            if sys.asap_start(first)? != sys.asap_start(SchedVar(m))? {
                forced.push((gi, m));
            }
        }
    }
    for (gi, m) in forced {
        let group = &mut plan.groups[gi];
        group.members.retain(|&x| x != m);
        let first = group.first();
        sys.add_constraint(DiffConstraint::after(
            SchedVar(first),
            SchedVar(m),
            dg.gate(first).duration_cycles as i64,
        ));
        report.evicted += 1;
    }
    let mut pin_of: HashMap<(usize, usize), usize> = HashMap::new();
    for (gi, group) in plan.groups.iter_mut().enumerate() {
        let first = group.first();
        for &m in &group.members[1..] {
            if group.pins.contains_key(&m) {
                continue;
            }
            let (a, b) = sys.pin_relative(SchedVar(first), SchedVar(m), 0);
            group.pins.insert(m, (a, b));
            pin_of.insert((m, first), gi);
        }
    }
    loop {
        let cycles = sys.positive_cycles();
        if cycles.is_empty() {
            break;
        }
        for e in cycles {
            let victim = e
                .cycle
                .iter()
                .filter(|c| c.bound == 0)
                .filter_map(|c| pin_of.get(&(c.u.0, c.v.0)).map(|&gi| (c.u.0, c.v.0, gi)))
                .max_by_key(|&(m, _, _)| m);
            let Some((m, first, gi)) = victim else {
                return Err(Error::Infeasible(e));
            };
            pin_of.remove(&(m, first));
            let group = &mut plan.groups[gi];
            let (a, b) = group.pins.remove(&m).expect("pinned member");
            sys.remove(a);
            sys.remove(b);
            group.members.retain(|&x| x != m);
            sys.add_constraint(DiffConstraint::after(
                SchedVar(first),
                SchedVar(m),
                dg.gate(first).duration_cycles as i64,
            ));
            report.evicted += 1;
        }
    }
    report.pinned = pin_of.len();
    plan.groups.retain(|g| g.members.len() > 1);
    Ok(report)
}

fn serialize_after_first(sys: &mut ConstraintSystem, first: usize, member: usize, dg: &DepGraph) -> Result<()> {
    let c = DiffConstraint::after(SchedVar(first), SchedVar(member), dg.gate(first).duration_cycles as i64);
    if sys.try_insert(&[c]).is_some() {
        return Ok(());
    }
    Err(infeasible_with(sys, &[c]))
}

/// Builds the diagnostic for a constraint set that made the system infeasible.
fn infeasible_with(sys: &ConstraintSystem, extra: &[DiffConstraint]) -> Error {
    let mut probe = sys.clone();
    for &c in extra {
        probe.add_constraint(c);
    }
    match probe.solve_asap() {
        Err(e) => Error::Infeasible(e),
        Ok(_) => Error::Infeasible(InfeasibleSystem { cycle: extra.to_vec() }),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RepairReport {
    pub rounds: usize,
    pub serializations: usize,
    pub evictions: usize,
}

/// Removes the remaining instrument conflicts. Each round takes, for every
/// gate `q` in conflict with gates earlier in the linear order, the earlier
/// gate `p` that finishes last, and adds `start(q) >= start(p) + dur(p)`.
///
/// The round's constraints are added together. A constraint that closes a
/// positive cycle is dropped and its direction blocked; a pair blocked both
/// ways evicts `q` from its stack groups.
pub fn repair_conflicts(
    sys: &mut ConstraintSystem,
    plan: &mut ResourcePlan,
    dg: &DepGraph,
    platform: &PlatformConfig,
    options: &SchedulerOptions,
    order: &LinearOrder,
) -> Result<RepairReport> {
    let occ = occupants(dg, platform);
    let mut report = RepairReport::default();
    let mut membership: HashMap<usize, Vec<usize>> = HashMap::new();
    for (gi, g) in plan.groups.iter().enumerate() {
        for &m in &g.members {
            membership.entry(m).or_default().push(gi);
        }
    }
    let mut blocked: HashSet<(usize, usize)> = HashSet::new();
    let after = |p: usize, q: usize| DiffConstraint::after(SchedVar(p), SchedVar(q), dg.gate(p).duration_cycles as i64);
    loop {
        let solution = sys.solve_asap()?;
        let starts = solution.starts();
        let conflicts = resource_conflicts(dg, starts, platform, &occ, |r| options.max_stacking(platform, r));
        if conflicts.is_empty() {
            return Ok(report);
        }
        report.rounds += 1;
        let fixes = pick_fixes(&conflicts, starts, dg, order);
        log::debug!(
            "repair round {}: {} conflicts, {} fixes",
            report.rounds,
            conflicts.len(),
            fixes.len()
        );
        let mut added: HashMap<(usize, usize, i64), (ConstraintId, usize, usize)> = HashMap::new();
        for (p, q) in fixes {
            let (p, q) = match (blocked.contains(&(p, q)), blocked.contains(&(q, p))) {
                (false, _) => (p, q),
                (true, false) => (q, p),
                (true, true) => {
                    report.evictions += evict_everywhere(sys, plan, &mut membership, q, dg)?;
                    blocked.remove(&(p, q));
                    blocked.remove(&(q, p));
                    (p, q)
                }
            };
            let c = after(p, q);
            added.insert((c.u.0, c.v.0, c.bound), (sys.add_constraint(c), p, q));
            report.serializations += 1;
        }
        loop {
            let cycles = sys.positive_cycles();
            if cycles.is_empty() {
                break;
            }
            for e in cycles {
                let culprit = e
                    .cycle
                    .iter()
                    .filter_map(|c| added.get(&(c.u.0, c.v.0, c.bound)).copied())
                    .max_by_key(|&(_, _, q)| order.position(q));
                let Some((id, p, q)) = culprit else {
                    return Err(Error::Infeasible(e));
                };
                sys.remove(id);
                let c = after(p, q);
                added.remove(&(c.u.0, c.v.0, c.bound));
                blocked.insert((p, q));
                report.serializations -= 1;
            }
        }
    }
}

/// Drops `gate`'s pins in every group it belongs to and serializes it after
/// the group's first gate instead.
fn evict_everywhere(
    sys: &mut ConstraintSystem,
    plan: &mut ResourcePlan,
    membership: &mut HashMap<usize, Vec<usize>>,
    gate: usize,
    dg: &DepGraph,
) -> Result<usize> {
    let mut evicted = 0;
    for gi in membership.remove(&gate).unwrap_or_default() {
        let group = &mut plan.groups[gi];
        if group.members.len() < 2 {
            continue;
        }
        if group.first() == gate {
            // Dissolve the group: every other member leaves it.
            let members: Vec<usize> = group.members.drain(1..).collect();
            for m in members {
                if let Some((a, b)) = group.pins.remove(&m) {
                    sys.remove(a);
                    sys.remove(b);
                }
                serialize_after_first(sys, gate, m, dg)?;
                evicted += 1;
            }
        } else if let Some(k) = group.members.iter().position(|&m| m == gate) {
            group.members.remove(k);
            if let Some((a, b)) = group.pins.remove(&gate) {
                sys.remove(a);
                sys.remove(b);
            }
            let first = group.first();
            serialize_after_first(sys, first, gate, dg)?;
            evicted += 1;
        }
    }
    Ok(evicted)
}

/// One `(p, q)` per conflicting gate `q`: the conflicting gate `p` earlier in
/// the linear order whose interval ends last.
fn pick_fixes(conflicts: &[Conflict], starts: &[u64], dg: &DepGraph, order: &LinearOrder) -> Vec<(usize, usize)> {
    let end = |g: usize| starts[g] + dg.gate(g).duration_cycles;
    let mut best: BTreeMap<usize, usize> = BTreeMap::new();
    let mut offer = |p: usize, q: usize| {
        let slot = best.entry(q).or_insert(p);
        if (end(p), std::cmp::Reverse(order.position(p))) > (end(*slot), std::cmp::Reverse(order.position(*slot))) {
            *slot = p;
        }
    };
    for c in conflicts {
        match c {
            Conflict::Overlap { a, b, .. } => {
                let (p, q) = if order.position(*a) < order.position(*b) {
                    (*a, *b)
                } else {
                    (*b, *a)
                };
                offer(p, q);
            }
            Conflict::OverCapacity { gates, capacity, .. } => {
                let mut sorted = gates.clone();
                sorted.sort_by_key(|&g| order.position(g));
                let anchor = sorted[0];
                for &q in &sorted[*capacity..] {
                    offer(anchor, q);
                }
            }
        }
    }
    let mut fixes: Vec<(usize, usize)> = best.into_iter().map(|(q, p)| (p, q)).collect();
    fixes.sort_by_key(|&(_, q)| order.position(q));
    fixes
}

/// Everything the pass produced, for inspection and debug dumps.
#[derive(Clone, Debug)]
pub struct QsdcRun {
    pub schedule: Schedule,
    pub system: ConstraintSystem,
    pub order: LinearOrder,
    pub plan: ResourcePlan,
    pub alignment: AlignmentReport,
    pub repair: RepairReport,
}

/// Schedules a lowered dependency graph.
pub fn schedule_qsdc_dg(dg: &DepGraph, platform: &PlatformConfig, options: &SchedulerOptions) -> Result<QsdcRun> {
    options.check(platform, dg.len())?;
    let mut sys = ConstraintSystem::from_depgraph(dg);
    for &(a, b, l) in &options.pins {
        sys.pin_relative(SchedVar(a), SchedVar(b), l);
    }
    let order = linear_order(&mut sys, options.horizon_slack)?;
    let mut plan = add_resource_constraints(dg, &mut sys, platform, options, &order)?;
    let alignment = enforce_stack_alignment(&mut sys, &mut plan, dg)?;
    let repair = repair_conflicts(&mut sys, &mut plan, dg, platform, options, &order)?;
    let solution: Solution = sys.solve_asap()?;
    debug_assert!(sys.violations(solution.starts()).is_empty());
    let starts = solution.into_starts();
    let violations = validate_starts(&starts, dg, platform);
    assert!(
        violations.is_empty(),
        "qsdc produced an illegal schedule: {violations:?}"
    );
    if repair.rounds > 0 {
        log::info!(
            "conflict repair: {} rounds, {} serializations, {} evictions",
            repair.rounds,
            repair.serializations,
            repair.evictions
        );
    }
    Ok(QsdcRun {
        schedule: Schedule::new(dg, starts, platform),
        system: sys,
        order,
        plan,
        alignment,
        repair,
    })
}

/// Builds the dependency graph and runs the full pass.
pub fn schedule_qsdc(circuit: &Circuit, platform: &PlatformConfig, options: &SchedulerOptions) -> Result<Schedule> {
    let dg = build_depgraph(circuit, platform)?;
    Ok(schedule_qsdc_dg(&dg, platform, options)?.schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;

    fn running() -> (DepGraph, PlatformConfig) {
        let p = PlatformConfig::s17();
        let dg = build_depgraph(&parse_circuit("x q2\ny q3\nx q4\nz q2").unwrap(), &p).unwrap();
        (dg, p)
    }

    #[test]
    fn running_example_order() {
        let (dg, _) = running();
        let mut sys = ConstraintSystem::from_depgraph(&dg);
        let order = linear_order(&mut sys, 0).unwrap();
        assert_eq!(order.gates(), &[0, 1, 2, 3]);
    }

    #[test]
    fn ties_keep_program_order() {
        let dg = DepGraph::from_lowered(parse_circuit("x q1\nx q0").unwrap());
        let mut sys = ConstraintSystem::from_depgraph(&dg);
        assert_eq!(linear_order(&mut sys, 0).unwrap().gates(), &[0, 1]);
        let dg = DepGraph::from_lowered(parse_circuit("qubits 1").unwrap());
        let mut sys = ConstraintSystem::from_depgraph(&dg);
        assert!(linear_order(&mut sys, 0).unwrap().gates().is_empty());
    }

    #[test]
    fn stacking_trace_on_running_example() {
        let (dg, p) = running();
        let (ti, _) = p.instrument_type("qwgs").unwrap();
        let qwg0 = InstanceRef {
            type_index: ti,
            instance: 0,
        };
        let mut sys = ConstraintSystem::from_depgraph(&dg);
        let added = add_resource_constraints_instrument(qwg0, &[0, 1, 2, 3], 6, &dg, &mut sys);
        assert_eq!(added.anchors, 1);
        assert_eq!(added.serializations, 2);
        assert_eq!(added.groups.len(), 1);
        assert_eq!(added.groups[0].members, vec![0, 2]);
        let dump = sys.dump();
        assert!(dump.contains("s0 - s1 <= -1"), "{dump}");
        assert!(dump.contains("s0 - s2 <= 0"), "{dump}");
        assert!(dump.contains("s2 - s3 <= -1"), "{dump}");
        // Anchoring alone leaves y and z both at cycle 1.
        assert_eq!(sys.solve_asap().unwrap().starts(), &[0, 1, 0, 1]);
    }

    #[test]
    fn serial_trace_without_stacking() {
        let (dg, p) = running();
        let (ti, _) = p.instrument_type("qwgs").unwrap();
        let qwg0 = InstanceRef {
            type_index: ti,
            instance: 0,
        };
        let mut sys = ConstraintSystem::from_depgraph(&dg);
        let added = add_resource_constraints_instrument(qwg0, &[0, 1, 2, 3], 1, &dg, &mut sys);
        assert_eq!(added.anchors, 0);
        assert_eq!(added.serializations, 3);
        assert!(added.groups.is_empty());
    }

    #[test]
    fn running_example_latencies() {
        let (dg, p) = running();
        let on = schedule_qsdc_dg(&dg, &p, &SchedulerOptions::default()).unwrap();
        assert_eq!(on.schedule.starts(), &[0, 1, 0, 2]);
        assert_eq!(on.schedule.latency_cycles(), 3);
        assert_eq!(on.alignment.pinned, 1);
        let off = schedule_qsdc_dg(&dg, &p, &SchedulerOptions::without_stacking()).unwrap();
        assert_eq!(off.schedule.latency_cycles(), 4);
    }

    #[test]
    fn measurement_stack() {
        let p = PlatformConfig::s17();
        let dg = build_depgraph(&parse_circuit("measure q14\nmeasure q17").unwrap(), &p).unwrap();
        let run = schedule_qsdc_dg(&dg, &p, &SchedulerOptions::default()).unwrap();
        assert_eq!(run.schedule.starts(), &[0, 0]);
    }

    #[test]
    fn single_gate_adds_nothing() {
        let (dg, p) = running();
        let (ti, _) = p.instrument_type("qwgs").unwrap();
        let mut sys = ConstraintSystem::from_depgraph(&dg);
        let before = sys.len();
        let added = add_resource_constraints_instrument(
            InstanceRef {
                type_index: ti,
                instance: 0,
            },
            &[1],
            6,
            &dg,
            &mut sys,
        );
        assert_eq!(sys.len(), before);
        assert_eq!(added, InstrumentConstraints::default());
    }

    #[test]
    fn unconstrained_gates_leave_system_unchanged() {
        let p = PlatformConfig::s17();
        let dg = build_depgraph(&parse_circuit("cnot q1,q2\ncz q3,q4\nprepz q5").unwrap(), &p).unwrap();
        let mut sys = ConstraintSystem::from_depgraph(&dg);
        let before = sys.dump();
        let order = linear_order(&mut sys, 0).unwrap();
        let plan = add_resource_constraints(&dg, &mut sys, &p, &SchedulerOptions::default(), &order).unwrap();
        assert_eq!(sys.dump(), before);
        assert!(plan.groups.is_empty());
    }

    #[test]
    fn empty_circuit() {
        let p = PlatformConfig::s17();
        let s = schedule_qsdc(&parse_circuit("qubits 3").unwrap(), &p, &SchedulerOptions::default()).unwrap();
        assert_eq!(s.latency_cycles(), 0);
    }

    #[test]
    fn aligned_group_is_pinned() {
        let (dg, p) = running();
        let mut sys = ConstraintSystem::from_depgraph(&dg);
        let order = linear_order(&mut sys, 0).unwrap();
        let mut plan = add_resource_constraints(&dg, &mut sys, &p, &SchedulerOptions::default(), &order).unwrap();
        let report = enforce_stack_alignment(&mut sys, &mut plan, &dg).unwrap();
        assert_eq!(report, AlignmentReport { pinned: 1, evicted: 0 });
        let s = sys.solve_asap().unwrap();
        assert_eq!((s.start_cycle(SchedVar(0)), s.start_cycle(SchedVar(2))), (0, 0));
        // A second pass finds nothing left to do.
        let dump = sys.dump();
        assert_eq!(
            enforce_stack_alignment(&mut sys, &mut plan, &dg).unwrap(),
            AlignmentReport::default()
        );
        assert_eq!(sys.dump(), dump);
    }

    #[test]
    fn member_behind_group_first_is_evicted() {
        // x q4 depends on x q2 through the cz, so it can never start with it.
        let p = PlatformConfig::s17();
        let dg = build_depgraph(&parse_circuit("x q2\ncz q2,q4\nx q4\nx q3").unwrap(), &p).unwrap();
        let run = schedule_qsdc_dg(&dg, &p, &SchedulerOptions::default()).unwrap();
        assert_eq!(run.alignment.evicted, 1, "{:?}", run.alignment);
        assert!(validate_starts(run.schedule.starts(), &dg, &p).is_empty());
        assert_eq!(run.schedule.start(2), 3);
        let best = crate::oracle::schedule_optimal_dg(&dg, &p, &Default::default(), true).unwrap();
        assert_eq!(run.schedule.latency_cycles(), best.schedule.latency_cycles());
    }

    #[test]
    fn late_member_does_not_delay_group() {
        // x q4 waits for two cz gates; the x group keeps cycle 0 and x q4
        // is evicted instead of pulling x q2 along.
        let p = PlatformConfig::s17();
        let dg = build_depgraph(&parse_circuit("cz q1,q4\ncz q3,q4\nx q2\nx q4").unwrap(), &p).unwrap();
        let run = schedule_qsdc_dg(&dg, &p, &SchedulerOptions::default()).unwrap();
        assert_eq!(run.alignment, AlignmentReport { pinned: 0, evicted: 1 });
        assert_eq!(run.schedule.starts(), &[0, 2, 0, 4]);
    }

    #[test]
    fn pins_are_honoured() {
        let (dg, p) = running();
        let options = SchedulerOptions {
            pins: vec![(1, 3, 2)],
            ..SchedulerOptions::default()
        };
        let run = schedule_qsdc_dg(&dg, &p, &options).unwrap();
        assert_eq!(run.schedule.start(3) - run.schedule.start(1), 2);
        let bad = SchedulerOptions {
            pins: vec![(0, 3, 0)],
            ..SchedulerOptions::default()
        };
        assert!(matches!(schedule_qsdc_dg(&dg, &p, &bad), Err(Error::Infeasible(_))));
    }

    #[test]
    fn stacking_override() {
        let (dg, p) = running();
        let mut options = SchedulerOptions::default();
        options.stacking_overrides.insert(("qwgs".into(), 0), 1);
        let run = schedule_qsdc_dg(&dg, &p, &options).unwrap();
        assert_eq!(run.schedule.latency_cycles(), 4);
        options.stacking_overrides.insert(("qwgs".into(), 0), 7);
        assert!(schedule_qsdc_dg(&dg, &p, &options).is_err());
    }
}
