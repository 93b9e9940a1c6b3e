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
use std::path::Path;
use std::process::{Command, Output};

const RUNNING: &str = "x q2\ny q3\nx q4\nz q2\n";

fn qsched(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsched"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn schedule_prints_latency() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = write(dir.path(), "run.qc", RUNNING);
    let out = qsched(&["schedule", "--circuit", &circuit]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("latency: 3 cycles (60 ns)"), "{}", stdout(&out));
    let out = qsched(&["schedule", "--circuit", &circuit, "--qsdc", "off"]);
    assert!(stdout(&out).contains("latency: 4 cycles (80 ns)"));
}

#[test]
fn schedule_round_trips_through_validate() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = write(dir.path(), "run.qc", RUNNING);
    let json = dir.path().join("s.json");
    let json = json.to_str().unwrap();
    assert_eq!(code(&qsched(&["schedule", "--circuit", &circuit, "--out", json])), 0);
    let out = qsched(&["validate", "--schedule", json, "--circuit", &circuit]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let other = write(dir.path(), "other.qc", "x q2\n");
    assert_eq!(code(&qsched(&["validate", "--schedule", json, "--circuit", &other])), 3);
}

#[test]
fn validate_rejects_a_tampered_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = write(dir.path(), "run.qc", RUNNING);
    let json = dir.path().join("s.json");
    let json = json.to_str().unwrap();
    assert_eq!(
        code(&qsched(&[
            "schedule",
            "--circuit",
            &circuit,
            "--algo",
            "asap",
            "--out",
            json
        ])),
        0
    );
    // The dependency-only schedule runs y and z together on one instrument.
    let out = qsched(&["validate", "--schedule", json]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("violation"));
}

#[test]
fn oracle_limit_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = qsched(&["generate", "--gates", "50", "--seed", "1"]);
    let circuit = write(dir.path(), "big.qc", &stdout(&out));
    assert_eq!(
        code(&qsched(&["schedule", "--circuit", &circuit, "--algo", "oracle"])),
        2
    );
}

#[test]
fn infeasible_pin_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = write(dir.path(), "run.qc", RUNNING);
    let out = qsched(&["schedule", "--circuit", &circuit, "--pin", "3", "0", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = write(dir.path(), "run.qc", RUNNING);
    let missing = dir.path().join("missing.json");
    assert_eq!(
        code(&qsched(&[
            "schedule",
            "--circuit",
            &circuit,
            "--platform",
            missing.to_str().unwrap()
        ])),
        1
    );
    let bad = write(dir.path(), "bad.qc", "x qz\n");
    assert_eq!(code(&qsched(&["schedule", "--circuit", &bad])), 1);
    assert_eq!(code(&qsched(&["generate", "--gates", "5", "--qubits", "99"])), 1);
}

#[test]
fn compare_table_on_running_example() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "run.qc", RUNNING);
    let json = dir.path().join("report.json");
    let out = qsched(&[
        "compare",
        "--circuits",
        dir.path().to_str().unwrap(),
        "--algos",
        "qsdc,list,list-nostack",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let table = stdout(&out);
    let latency = |algo: &str| {
        let row = table
            .lines()
            .find(|l| l.split_whitespace().take(2).eq(["run", algo]))
            .unwrap();
        row.split_whitespace().nth(2).unwrap().to_string()
    };
    assert_eq!(latency("qsdc"), "3");
    assert_eq!(latency("list"), "3");
    assert_eq!(latency("list-nostack"), "4");
    assert!(fs::read_to_string(json).unwrap().contains("list-nostack"));
}

#[test]
fn compare_empty_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = qsched(&["compare", "--circuits", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
}

#[test]
fn compare_is_deterministic() {
    let args = ["compare", "--gen", "100", "--seed", "7", "--qubits", "17"];
    let a = qsched(&args);
    let b = qsched(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn generate_is_reproducible() {
    let args = ["generate", "--gates", "200", "--seed", "11"];
    let a = qsched(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, qsched(&args).stdout);
    assert_ne!(a.stdout, qsched(&["generate", "--gates", "200", "--seed", "12"]).stdout);
    let empty = qsched(&["generate", "--gates", "0"]);
    assert_eq!(code(&empty), 0);
}

#[test]
fn generate_files_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let read = |name: &str| {
        let path = dir.path().join(name);
        let args = [
            "generate",
            "--gates",
            "10",
            "--qubits",
            "5",
            "--seed",
            "1",
            "--out",
            path.to_str().unwrap(),
        ];
        assert_eq!(code(&qsched(&args)), 0);
        fs::read(path).unwrap()
    };
    assert_eq!(read("a.qc"), read("b.qc"));
}

#[test]
fn generate_honours_the_mix() {
    let out = qsched(&[
        "generate",
        "--gates",
        "100",
        "--seed",
        "5",
        "--mix",
        "x:0.5,measure:0.5",
    ]);
    let text = stdout(&out);
    let opcodes: std::collections::BTreeSet<&str> = text
        .lines()
        .filter_map(|l| l.split_whitespace().next())
        .filter(|w| !w.starts_with('#') && *w != "qubits")
        .collect();
    assert_eq!(opcodes.into_iter().collect::<Vec<_>>(), ["measure", "x"]);
}

#[test]
fn generate_writes_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("gen");
    let out = qsched(&[
        "generate",
        "--gates",
        "10",
        "--count",
        "3",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_dir(&out_dir).unwrap().count(), 3);
    let out = qsched(&["compare", "--circuits", out_dir.to_str().unwrap(), "--oracle-small"]);
    assert_eq!(code(&out), 0);
}
