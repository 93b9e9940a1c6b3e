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

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use qsched::generate::parse_mix;
use qsched::list::schedule_list_dg;
use qsched::oracle::schedule_optimal_dg;
use qsched::qsdc::schedule_qsdc_dg;
use qsched::schedule::AlgoRun;
use qsched::*;

use crate::{Algo, CompareArgs, GenerateArgs, ScheduleArgs, SchedulerArgs, Switch, ValidateArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Load { path: PathBuf, source: qsched::Error },
    #[error(transparent)]
    Core(#[from] qsched::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Load { .. } | CliError::Usage(_) => 1,
            CliError::Core(e) => match e {
                Error::Infeasible(_) | Error::HorizonTooSmall { .. } | Error::LimitExceeded(_) => 2,
                Error::Mismatch(_) => 3,
                _ => 1,
            },
            CliError::Invalid(_) => 3,
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_platform(path: Option<&Path>) -> CliResult<PlatformConfig> {
    match path {
        None => Ok(PlatformConfig::s17()),
        Some(path) => parse_platform(&read(path)?).map_err(|source| CliError::Load {
            path: path.to_path_buf(),
            source,
        }),
    }
}

fn load_circuit(path: &Path) -> CliResult<Circuit> {
    parse_circuit(&read(path)?).map_err(|source| CliError::Load {
        path: path.to_path_buf(),
        source,
    })
}

impl SchedulerArgs {
    fn qsdc_options(&self, stacking: bool) -> CliResult<SchedulerOptions> {
        let mut options = SchedulerOptions {
            qsdc_enabled: stacking && self.qsdc == Switch::On && !self.no_stacking,
            horizon_slack: self.horizon_slack,
            ..SchedulerOptions::default()
        };
        for item in &self.max_stacking {
            let parts: Vec<&str> = item.split(':').collect();
            let parsed = match parts.as_slice() {
                [name, instance, n] => instance
                    .parse::<usize>()
                    .ok()
                    .zip(n.parse::<usize>().ok())
                    .map(|(i, n)| (name, i, n)),
                _ => None,
            };
            let Some((name, instance, n)) = parsed else {
                return Err(CliError::Usage(format!(
                    "--max-stacking `{item}` is not TYPE:INSTANCE:N"
                )));
            };
            options.stacking_overrides.insert((name.to_string(), instance), n);
        }
        for pin in self.pin.chunks(3) {
            let [a, b, l] = pin else {
                unreachable!("clap takes three values per --pin")
            };
            if *a < 0 || *b < 0 {
                return Err(CliError::Usage(format!(
                    "--pin gate ids must be non-negative, got {a} {b}"
                )));
            }
            options.pins.push((*a as usize, *b as usize, *l));
        }
        Ok(options)
    }

    fn oracle_limits(&self) -> OracleLimits {
        OracleLimits {
            max_gates: self.oracle_max_gates,
            max_makespan: self.oracle_max_makespan,
            timeout: Duration::from_secs_f64(self.oracle_timeout_s.max(0.0)),
        }
    }
}

/// Runs one algorithm. QSDC also returns its debug dumps when asked.
fn run_algo(
    algo: Algo,
    dg: &DepGraph,
    platform: &PlatformConfig,
    args: &SchedulerArgs,
    dumps: (bool, bool),
) -> CliResult<(Schedule, String)> {
    let stacking = !args.no_stacking;
    let mut dump = String::new();
    let schedule = match algo {
        Algo::Qsdc | Algo::QsdcOff => {
            let run = schedule_qsdc_dg(dg, platform, &args.qsdc_options(algo == Algo::Qsdc)?)?;
            if dumps.1 {
                dump.push_str("# linear order\n");
                for &g in run.order.gates() {
                    dump.push_str(&format!("{} {}\n", g, dg.gate(g).label()));
                }
            }
            if dumps.0 {
                dump.push_str("# constraints\n");
                dump.push_str(&run.system.dump());
            }
            run.schedule
        }
        Algo::List | Algo::ListNostack => {
            let options = ListOptions {
                stacking: stacking && algo == Algo::List,
            };
            Schedule::new(dg, schedule_list_dg(dg, platform, options), platform)
        }
        Algo::Asap => {
            let mut sys = ConstraintSystem::from_depgraph(dg);
            Schedule::new(dg, sys.solve_asap().map_err(Error::from)?.into_starts(), platform)
        }
        Algo::Oracle => schedule_optimal_dg(dg, platform, &args.oracle_limits(), stacking)?.schedule,
    };
    Ok((schedule, dump))
}

fn check(schedule: &Schedule, dg: &DepGraph, platform: &PlatformConfig, what: &str) -> CliResult {
    let violations = qsched::validate(schedule, dg, platform);
    if violations.is_empty() {
        return Ok(());
    }
    for v in &violations {
        eprintln!("violation: {v}");
    }
    Err(CliError::Invalid(format!("{what}: {} violations", violations.len())))
}

fn latency_line(s: &Schedule) -> String {
    format!("latency: {} cycles ({} ns)", s.latency_cycles(), s.latency_ns())
}

pub fn schedule(args: ScheduleArgs) -> CliResult {
    let platform = load_platform(args.platform.as_deref())?;
    let circuit = load_circuit(&args.circuit)?;
    let dg = build_depgraph(&circuit, &platform)?;
    let dumps = (args.dump_constraints, args.dump_order);
    if (dumps.0 || dumps.1) && !matches!(args.algo, Algo::Qsdc | Algo::QsdcOff) {
        return Err(CliError::Usage(
            "--dump-constraints and --dump-order need a qsdc algorithm".into(),
        ));
    }
    let (schedule, dump) = run_algo(args.algo, &dg, &platform, &args.options, dumps)?;
    print!("{dump}");
    if args.algo == Algo::Asap {
        let n = qsched::validate(&schedule, &dg, &platform).len();
        if n > 0 {
            log::warn!("the dependency-only schedule has {n} instrument violations");
        }
    } else {
        check(&schedule, &dg, &platform, args.algo.name())?;
    }
    if let Some(out) = &args.out {
        write(out, &schedule.to_json_string())?;
    }
    if args.gantt {
        print!("{}", render_gantt(&schedule, &platform));
    }
    println!("{}", latency_line(&schedule));
    Ok(())
}

/// Circuit files of a directory, sorted by name.
fn circuit_files(dir: &Path) -> CliResult<Vec<(String, PathBuf)>> {
    let entries = fs::read_dir(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry
            .map_err(|source| CliError::Io {
                path: dir.to_path_buf(),
                source,
            })?
            .path();
        let known = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| ["qc", "txt", "json"].contains(&e));
        if path.is_file() && known {
            let name = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or_default()
                .to_string();
            files.push((name, path));
        }
    }
    files.sort();
    Ok(files)
}

fn generator(platform: &PlatformConfig, qubits: Option<usize>, mix: Option<&str>) -> CliResult<GeneratorConfig> {
    let mut cfg = GeneratorConfig::new(0, qubits.unwrap_or(platform.qubit_count), 0);
    if let Some(mix) = mix {
        cfg.mix = parse_mix(mix)?;
    }
    Ok(cfg)
}

pub fn compare(args: CompareArgs) -> CliResult {
    let platform = load_platform(args.platform.as_deref())?;
    let mut circuits: Vec<(String, Circuit)> = Vec::new();
    match (&args.circuits, args.gen) {
        (Some(dir), _) => {
            for (name, path) in circuit_files(dir)? {
                circuits.push((name, load_circuit(&path)?));
            }
        }
        (None, Some(n)) => {
            let base = generator(&platform, args.qubits, args.mix.as_deref())?;
            for i in 0..n {
                let seed = args.seed.wrapping_add(i as u64);
                // Sizes come from the seed too, so a run is reproducible.
                let gates = args
                    .gates
                    .unwrap_or(20 + (seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 32) as usize % 181);
                let cfg = GeneratorConfig {
                    gates,
                    seed,
                    ..base.clone()
                };
                circuits.push((format!("gen{i:03}"), generate_circuit(&platform, &cfg)?));
            }
        }
        (None, None) => return Err(CliError::Usage("compare needs --circuits DIR or --gen N".into())),
    }
    let mut algos = args.algos.clone();
    algos.dedup();
    if algos.contains(&Algo::Asap) {
        return Err(CliError::Usage(
            "asap ignores instruments and cannot be compared".into(),
        ));
    }
    let reports: Vec<CliResult<CompareReport>> = circuits
        .par_iter()
        .map(|(name, circuit)| compare_one(name, circuit, &platform, &algos, &args))
        .collect();
    let mut report = CompareReport::default();
    for r in reports {
        report.merge(r?)?;
    }
    print!("{}", report.to_table());
    if let Some(path) = &args.json {
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        write(path, &text)?;
    }
    Ok(())
}

fn compare_one(
    name: &str,
    circuit: &Circuit,
    platform: &PlatformConfig,
    algos: &[Algo],
    args: &CompareArgs,
) -> CliResult<CompareReport> {
    let dg = build_depgraph(circuit, platform)?;
    let mut runs = Vec::new();
    let mut wanted: Vec<Algo> = algos.to_vec();
    if args.oracle_small && !wanted.contains(&Algo::Oracle) {
        wanted.push(Algo::Oracle);
    }
    for &algo in &wanted {
        let t = Instant::now();
        let schedule = match run_algo(algo, &dg, platform, &args.options, (false, false)) {
            Ok((s, _)) => s,
            Err(CliError::Core(Error::LimitExceeded(why))) if algo == Algo::Oracle && args.oracle_small => {
                log::info!("{name}: oracle skipped: {why}");
                continue;
            }
            Err(e) => return Err(e),
        };
        let wall_time = args.timing.then(|| t.elapsed());
        check(&schedule, &dg, platform, &format!("{name}/{}", algo.name()))?;
        runs.push(AlgoRun {
            algo: algo.name().to_string(),
            schedule,
            wall_time,
        });
    }
    Ok(compute_metrics(name, &runs)?)
}

pub fn validate(args: ValidateArgs) -> CliResult {
    let platform = load_platform(args.platform.as_deref())?;
    let text = read(&args.schedule)?;
    let schedule = Schedule::from_json_str(&text).map_err(|source| CliError::Load {
        path: args.schedule.clone(),
        source,
    })?;
    if let Some(path) = &args.circuit {
        let circuit = load_circuit(path)?;
        if &circuit != schedule.circuit() {
            return Err(CliError::Invalid(format!(
                "{} schedules a different circuit than {}",
                args.schedule.display(),
                path.display()
            )));
        }
    }
    let dg = build_depgraph(schedule.circuit(), &platform)?;
    check(&schedule, &dg, &platform, &args.schedule.display().to_string())?;
    println!("ok: {}", latency_line(&schedule));
    Ok(())
}

pub fn generate(args: GenerateArgs) -> CliResult {
    let platform = load_platform(args.platform.as_deref())?;
    let base = generator(&platform, args.qubits, args.mix.as_deref())?;
    let circuits: Vec<Circuit> = (0..args.count)
        .map(|i| {
            let cfg = GeneratorConfig {
                gates: args.gates,
                seed: args.seed.wrapping_add(i as u64),
                ..base.clone()
            };
            generate_circuit(&platform, &cfg)
        })
        .collect::<Result<_, _>>()?;
    match (&args.out, args.count) {
        (None, _) => {
            for c in &circuits {
                print!("{}", c.to_text());
            }
        }
        (Some(path), 1) => write(path, &circuits[0].to_text())?,
        (Some(dir), _) => {
            fs::create_dir_all(dir).map_err(|source| CliError::Io {
                path: dir.clone(),
                source,
            })?;
            for (i, c) in circuits.iter().enumerate() {
                write(&dir.join(format!("gen{i:03}.qc")), &c.to_text())?;
            }
        }
    }
    Ok(())
}
