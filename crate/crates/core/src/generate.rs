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

//! Seeded random circuits over a platform's qubits.

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::platform::PlatformConfig;

/// Opcodes that take two qubit operands.
pub const TWO_QUBIT_OPCODES: &[&str] = &["cnot", "cz", "cx", "swap", "iswap", "cphase"];

pub fn arity(opcode: &str) -> usize {
    if TWO_QUBIT_OPCODES.contains(&opcode) {
        2
    } else {
        1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub gates: usize,
    /// Number of platform qubits used, starting from the lowest index.
    pub qubits: usize,
    pub seed: u64,
    /// Opcodes with relative weights.
    pub mix: Vec<(String, f64)>,
}

impl GeneratorConfig {
    pub fn new(gates: usize, qubits: usize, seed: u64) -> Self {
        GeneratorConfig {
            gates,
            qubits,
            seed,
            mix: default_mix(),
        }
    }
}

/// A mix dominated by single-qubit rotations and CZ, with occasional
/// measurement and preparation.
pub fn default_mix() -> Vec<(String, f64)> {
    [
        ("x", 0.10),
        ("y", 0.10),
        ("x90", 0.10),
        ("y90", 0.10),
        ("mx90", 0.05),
        ("my90", 0.05),
        ("z", 0.05),
        ("cz", 0.30),
        ("measure", 0.05),
        ("prepz", 0.10),
    ]
    .into_iter()
    .map(|(o, w)| (o.to_string(), w))
    .collect()
}

/// Parses `op:weight,op:weight`.
pub fn parse_mix(text: &str) -> Result<Vec<(String, f64)>> {
    let mut mix = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (op, w) = item
            .split_once([':', '='])
            .ok_or_else(|| Error::Platform(format!("mix entry `{item}` is not `op:weight`")))?;
        let w: f64 = w
            .trim()
            .parse()
            .map_err(|_| Error::Platform(format!("mix weight `{w}` is not a number")))?;
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::Platform(format!("mix weight `{w}` must be non-negative")));
        }
        mix.push((op.trim().to_string(), w));
    }
    Ok(mix)
}

/// Draws `config.gates` gates uniformly over the first `config.qubits`
/// platform qubits; two-qubit opcodes get distinct operands.
pub fn generate_circuit(platform: &PlatformConfig, config: &GeneratorConfig) -> Result<Circuit> {
    if config.qubits == 0 || config.qubits > platform.qubit_count {
        return Err(Error::Platform(format!(
            "cannot generate over {} qubits on a {}-qubit platform",
            config.qubits, platform.qubit_count
        )));
    }
    let base = platform.index_base();
    let limit = base + config.qubits;
    let mut gates = Vec::with_capacity(config.gates);
    if config.gates > 0 {
        let mut mix: Vec<&(String, f64)> = config.mix.iter().collect();
        if config.qubits < 2 {
            mix.retain(|(op, _)| arity(op) == 1);
        }
        let dist =
            WeightedIndex::new(mix.iter().map(|(_, w)| *w)).map_err(|e| Error::Platform(format!("opcode mix: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for id in 0..config.gates {
            let opcode = &mix[dist.sample(&mut rng)].0;
            let operands = rand::seq::index::sample(&mut rng, config.qubits, arity(opcode))
                .into_iter()
                .map(|q| q + base)
                .collect();
            gates.push(Gate::new(id, opcode.clone(), operands));
        }
    }
    Circuit::new(limit, gates)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_text() {
        let p = PlatformConfig::s17();
        let a = generate_circuit(&p, &GeneratorConfig::new(10, 5, 1)).unwrap().to_text();
        let b = generate_circuit(&p, &GeneratorConfig::new(10, 5, 1)).unwrap().to_text();
        assert_eq!(a, b);
        let c = generate_circuit(&p, &GeneratorConfig::new(10, 5, 2)).unwrap().to_text();
        assert_ne!(a, c);
    }

    #[test]
    fn operands_stay_in_range() {
        let p = PlatformConfig::s17();
        let c = generate_circuit(&p, &GeneratorConfig::new(500, 17, 3)).unwrap();
        for g in c.gates() {
            assert!(g.operands.iter().all(|&q| (1..=17).contains(&q)));
            assert_eq!(g.operands.len(), arity(&g.opcode));
        }
        assert!(generate_circuit(&p, &GeneratorConfig::new(5, 18, 3)).is_err());
    }

    #[test]
    fn mix_classes_present() {
        let p = PlatformConfig::s17();
        let mut cfg = GeneratorConfig::new(100, 17, 11);
        cfg.mix = parse_mix("x:0.5,measure:0.5").unwrap();
        let c = generate_circuit(&p, &cfg).unwrap();
        let xs = c.gates().iter().filter(|g| g.opcode == "x").count();
        assert!(xs > 0 && xs < 100, "{xs}");
    }

    #[test]
    fn zero_gates() {
        let p = PlatformConfig::s17();
        let c = generate_circuit(&p, &GeneratorConfig::new(0, 5, 1)).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn bad_mix() {
        assert!(parse_mix("x").is_err());
        assert!(parse_mix("x:-1").is_err());
        let p = PlatformConfig::s17();
        let mut cfg = GeneratorConfig::new(5, 5, 1);
        cfg.mix = vec![("x".into(), 0.0)];
        assert!(generate_circuit(&p, &cfg).is_err());
    }
}
