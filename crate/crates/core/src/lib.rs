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

//! Resource-constrained instruction scheduling for quantum control
//! architectures with shared instruments.
//!
//! The crate schedules untimed gate lists onto a platform whose analogue
//! instruments (waveform generators, measurement units) are shared between
//! qubits. Three schedulers are provided:
//!
//! * [`qsdc::schedule_qsdc`]: a system-of-difference-constraints scheduler
//!   that inserts resource constraints along a linear order and lets gates of
//!   the same kind *stack* on a shared instrument.
//! * [`list::schedule_list`]: a cycle-by-cycle list scheduler used as the
//!   baseline.
//! * [`oracle::schedule_optimal`]: an exhaustive branch-and-bound search for
//!   small circuits.
//!
//! Every schedule can be checked with [`schedule::validate`].

pub mod circuit;
pub mod error;
pub mod generate;
pub mod list;
pub mod oracle;
pub mod platform;
pub mod qsdc;
pub mod schedule;
pub mod sdc;

pub use circuit::{build_depgraph, parse_circuit, Circuit, DepEdge, DepGraph, Gate};
pub use error::{Error, Result};
pub use generate::{generate_circuit, GeneratorConfig};
pub use list::{schedule_asap, schedule_list, ListOptions};
pub use oracle::{schedule_optimal, OracleLimits, OracleResult};
pub use platform::{parse_platform, InstanceRef, InstructionDef, InstrumentType, PlatformConfig, StackingRule};
pub use qsdc::{schedule_qsdc, LinearOrder, SchedulerOptions};
pub use schedule::{compute_metrics, render_gantt, validate, validate_starts, CompareReport, Schedule, Violation};
pub use sdc::{ConstraintId, ConstraintSystem, DiffConstraint, InfeasibleSystem, SchedVar, Solution};
