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

use thiserror::Error;

use crate::sdc::InfeasibleSystem;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("gate {gate}: qubit {qubit} out of range (limit {limit})")]
    QubitOutOfRange { gate: usize, qubit: usize, limit: usize },

    #[error("invalid gate {gate}: {message}")]
    InvalidGate { gate: usize, message: String },

    #[error("invalid platform: {0}")]
    Platform(String),

    #[error(transparent)]
    Infeasible(#[from] InfeasibleSystem),

    #[error("horizon {horizon} is smaller than the ASAP makespan {makespan}")]
    HorizonTooSmall { horizon: u64, makespan: u64 },

    #[error("limit exceeded: {0}")]
    LimitExceeded(String),

    #[error("schedule mismatch: {0}")]
    Mismatch(String),
}
