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

//! `qsched`: schedule, compare and validate quantum circuits on a platform
//! with shared control instruments.
//!
//! Exit codes: 0 success, 1 input error, 2 infeasible or over a limit,
//! 3 a schedule failed validation.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "qsched",
    version,
    about = "Resource-constrained scheduler for quantum circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Schedule one circuit and write its schedule.
    Schedule(ScheduleArgs),
    /// Schedule a set of circuits with several algorithms and tabulate them.
    Compare(CompareArgs),
    /// Check a schedule file against a circuit and platform.
    Validate(ValidateArgs),
    /// Write seeded random circuits.
    Generate(GenerateArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Qsdc,
    QsdcOff,
    List,
    ListNostack,
    Asap,
    Oracle,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Qsdc => "qsdc",
            Algo::QsdcOff => "qsdc-off",
            Algo::List => "list",
            Algo::ListNostack => "list-nostack",
            Algo::Asap => "asap",
            Algo::Oracle => "oracle",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Args, Debug, Clone)]
struct SchedulerArgs {
    /// Allow stacking in the QSDC pass.
    #[arg(long, value_enum, default_value = "on")]
    qsdc: Switch,
    /// Disable stacking for every algorithm.
    #[arg(long)]
    no_stacking: bool,
    /// Stacking limit for one instance, as `<type>:<instance>:<n>`.
    #[arg(long, value_name = "TYPE:INSTANCE:N")]
    max_stacking: Vec<String>,
    /// Cycles added to the ASAP makespan for the ALAP keys.
    #[arg(long, default_value_t = 0)]
    horizon_slack: u64,
    /// Exact timing `start(B) - start(A) = L` between gate ids.
    #[arg(long, num_args = 3, value_names = ["A", "B", "L"], allow_negative_numbers = true)]
    pin: Vec<i64>,
    #[arg(long, default_value_t = 12)]
    oracle_max_gates: usize,
    #[arg(long, default_value_t = 32)]
    oracle_max_makespan: u64,
    #[arg(long, default_value_t = 10.0)]
    oracle_timeout_s: f64,
}

#[derive(Args, Debug)]
struct ScheduleArgs {
    /// Platform JSON; the bundled S-17 configuration when omitted.
    #[arg(long)]
    platform: Option<PathBuf>,
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long, value_enum, default_value = "qsdc")]
    algo: Algo,
    #[command(flatten)]
    options: SchedulerArgs,
    /// Write the schedule JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print a timeline of instruments and qubits.
    #[arg(long)]
    gantt: bool,
    /// Print the QSDC constraint system, one constraint per line.
    #[arg(long)]
    dump_constraints: bool,
    /// Print the QSDC linear order.
    #[arg(long)]
    dump_order: bool,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long)]
    platform: Option<PathBuf>,
    /// Directory of circuit files (`.qc`, `.txt`, `.json`).
    #[arg(long, conflicts_with = "gen")]
    circuits: Option<PathBuf>,
    /// Generate this many random circuits instead of reading a directory.
    #[arg(long)]
    gen: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Qubits used by generated circuits; all platform qubits by default.
    #[arg(long)]
    qubits: Option<usize>,
    /// Gates per generated circuit; drawn from 20..=200 by default.
    #[arg(long)]
    gates: Option<usize>,
    /// Opcode mix for generated circuits, as `op:weight,...`.
    #[arg(long)]
    mix: Option<String>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "qsdc,list")]
    algos: Vec<Algo>,
    /// Add the exact oracle where the circuit fits its limits.
    #[arg(long)]
    oracle_small: bool,
    #[command(flatten)]
    options: SchedulerArgs,
    /// Include wall-clock times.
    #[arg(long)]
    timing: bool,
    /// Write the report as JSON here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long)]
    platform: Option<PathBuf>,
    /// Circuit the schedule must belong to; the embedded one when omitted.
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long)]
    schedule: PathBuf,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    platform: Option<PathBuf>,
    #[arg(long)]
    gates: usize,
    /// Qubits to draw from; all platform qubits by default.
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    mix: Option<String>,
    /// Number of circuits; circuit `i` uses seed `seed + i`.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Output file, or directory when `--count` is above 1. Standard output
    /// when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QSCHED_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Schedule(args) => commands::schedule(args),
        Command::Compare(args) => commands::compare(args),
        Command::Validate(args) => commands::validate(args),
        Command::Generate(args) => commands::generate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
