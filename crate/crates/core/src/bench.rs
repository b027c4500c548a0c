//! Random circuit generation and the transmission benchmark.
//!
//! Gate mix: each layer visits the qubits in random order. A qubit with a
//! free partner left starts a two-qubit gate with probability 0.3
//! (CNOT, CZ or SWAP, uniformly, on the next qubit in the order); otherwise
//! it gets a one-qubit gate drawn uniformly from H, X, Y, Z, S, T, X1, RX,
//! RY, RZ, with rotation angles uniform in `[0, 2π)`. Every qubit is busy in
//! every layer, so the depth equals the number of layers.

use std::f64::consts::TAU;
use std::fmt;
use std::hint::black_box;
use std::io;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bis;
use crate::circuit::{Circuit, GateKind, Instruction};
use crate::text_ir::{emit_originir, emit_qasm2, import_qasm2, parse_originir};

pub const TWO_QUBIT_PROBABILITY: f64 = 0.3;

const ONE_QUBIT: [GateKind; 10] = [
    GateKind::H,
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::S,
    GateKind::T,
    GateKind::X1,
    GateKind::Rx,
    GateKind::Ry,
    GateKind::Rz,
];
const TWO_QUBIT: [GateKind; 3] = [GateKind::Cnot, GateKind::Cz, GateKind::Swap];

/// Layered random circuit with exactly `depth` layers over `num_qubits`
/// qubits; deterministic per seed. No measurements.
pub fn random_circuit(num_qubits: usize, depth: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::with_capacity(num_qubits, 0, num_qubits * depth);
    let mut order: Vec<usize> = (0..num_qubits).collect();
    for _ in 0..depth {
        order.shuffle(&mut rng);
        let mut i = 0;
        while i < num_qubits {
            let q = order[i];
            if i + 1 < num_qubits && rng.random_bool(TWO_QUBIT_PROBABILITY) {
                let kind = TWO_QUBIT[rng.random_range(0..TWO_QUBIT.len())];
                let instr = Instruction::new(kind, &[q, order[i + 1]], &[], None);
                c.push_unchecked(instr.expect("distinct qubits"));
                i += 2;
            } else {
                let kind = ONE_QUBIT[rng.random_range(0..ONE_QUBIT.len())];
                let instr = if kind.is_rotation() {
                    Instruction::new(kind, &[q], &[rng.random_range(0.0..TAU)], None)
                } else {
                    Instruction::new(kind, &[q], &[], None)
                };
                c.push_unchecked(instr.expect("valid one-qubit gate"));
                i += 1;
            }
        }
    }
    c
}

/// Seed of the `index`-th circuit of a batch.
pub fn batch_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub fn random_batch(count: usize, num_qubits: usize, depth: usize, seed: u64) -> Vec<Circuit> {
    (0..count)
        .map(|k| random_circuit(num_qubits, depth, batch_seed(seed, k)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sweep {
    CircuitCount,
    CircuitDepth,
    QubitCount,
}

impl Sweep {
    pub fn name(self) -> &'static str {
        match self {
            Sweep::CircuitCount => "circuit_count",
            Sweep::CircuitDepth => "circuit_depth",
            Sweep::QubitCount => "qubit_count",
        }
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "circuit_count" | "count" => Ok(Sweep::CircuitCount),
            "circuit_depth" | "depth" => Ok(Sweep::CircuitDepth),
            "qubit_count" | "qubits" => Ok(Sweep::QubitCount),
            _ => Err(format!(
                "unknown sweep `{s}` (expected count, depth or qubits)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Format {
    BisCompressed,
    BisUncompressed,
    OriginIr,
    Qasm2,
}

impl Format {
    pub const ALL: [Format; 4] = [
        Format::BisCompressed,
        Format::BisUncompressed,
        Format::OriginIr,
        Format::Qasm2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Format::BisCompressed => "bis_compressed",
            Format::BisUncompressed => "bis_uncompressed",
            Format::OriginIr => "originir",
            Format::Qasm2 => "qasm2",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Format::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown format `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub sweep: Sweep,
    pub sweep_values: Vec<usize>,
    pub fixed_circuit_count: usize,
    pub fixed_depth: usize,
    pub fixed_qubits: usize,
    pub seed: u64,
    pub formats: Vec<Format>,
    pub repetitions: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sweep: Sweep::CircuitCount,
            sweep_values: vec![100, 200, 300, 400, 500],
            fixed_circuit_count: 500,
            fixed_depth: 500,
            fixed_qubits: 72,
            seed: 0,
            formats: Format::ALL.to_vec(),
            repetitions: 5,
        }
    }
}

impl BenchConfig {
    /// `(count, depth, qubits)` at one sweep point.
    pub fn point(&self, value: usize) -> (usize, usize, usize) {
        match self.sweep {
            Sweep::CircuitCount => (value, self.fixed_depth, self.fixed_qubits),
            Sweep::CircuitDepth => (self.fixed_circuit_count, value, self.fixed_qubits),
            Sweep::QubitCount => (self.fixed_circuit_count, self.fixed_depth, value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("sweep values must be non-empty and positive")]
    BadSweep,
    #[error("at least one format is required")]
    NoFormats,
    #[error("fixed parameters must be positive")]
    BadFixed,
    #[error("medians need at least 3 repetitions, got {0}")]
    TooFewRepetitions(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub sweep: Sweep,
    pub value: usize,
    pub format: Format,
    /// Median seconds to serialize the whole batch.
    pub encode_s: f64,
    /// Median seconds to deserialize it back into circuits.
    pub decode_s: f64,
    pub size_bytes: usize,
    pub gate_count: usize,
}

/// Median wall-clock seconds of `f` over `reps` runs. Dropping the result
/// is not timed.
pub fn median_seconds<T>(reps: usize, mut f: impl FnMut() -> T) -> f64 {
    let mut times: Vec<f64> = (0..reps.max(1))
        .map(|_| {
            let start = Instant::now();
            let out = black_box(f());
            let elapsed = start.elapsed();
            drop(out);
            elapsed.as_secs_f64().max(1e-9)
        })
        .collect();
    times.sort_by(f64::total_cmp);
    let mid = times.len() / 2;
    if times.len() % 2 == 1 {
        times[mid]
    } else {
        (times[mid - 1] + times[mid]) / 2.0
    }
}

/// Serialized batch: one BIS stream, or one text document per circuit.
pub enum Encoded {
    Binary(Vec<u8>),
    Text(Vec<String>),
}

impl Encoded {
    pub fn size_bytes(&self) -> usize {
        match self {
            Encoded::Binary(b) => b.len(),
            Encoded::Text(t) => t.iter().map(String::len).sum(),
        }
    }
}

pub fn encode_batch(batch: &[Circuit], format: Format) -> Encoded {
    match format {
        Format::BisCompressed | Format::BisUncompressed => Encoded::Binary(
            bis::encode(batch, format == Format::BisCompressed).expect("generated circuits encode"),
        ),
        Format::OriginIr => Encoded::Text(batch.iter().map(emit_originir).collect()),
        Format::Qasm2 => Encoded::Text(batch.iter().map(emit_qasm2).collect()),
    }
}

pub fn decode_batch(encoded: &Encoded, format: Format) -> Vec<Circuit> {
    match (encoded, format) {
        (Encoded::Binary(b), _) => bis::decode(b).expect("round trip"),
        (Encoded::Text(t), Format::OriginIr) => t
            .iter()
            .map(|s| parse_originir(s).expect("round trip"))
            .collect(),
        (Encoded::Text(t), _) => t
            .iter()
            .map(|s| import_qasm2(s).expect("round trip"))
            .collect(),
    }
}

/// Times encode and decode of a generated batch per sweep value and
/// format, single-threaded. Rows come in sweep order, formats in the
/// configured order.
pub fn run_transmission_bench(config: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    if config.sweep_values.is_empty() || config.sweep_values.contains(&0) {
        return Err(BenchError::BadSweep);
    }
    if config.formats.is_empty() {
        return Err(BenchError::NoFormats);
    }
    if config.fixed_circuit_count == 0 || config.fixed_depth == 0 || config.fixed_qubits == 0 {
        return Err(BenchError::BadFixed);
    }
    if config.repetitions < 3 {
        return Err(BenchError::TooFewRepetitions(config.repetitions));
    }
    let mut rows = Vec::new();
    for &value in &config.sweep_values {
        let (count, depth, qubits) = config.point(value);
        let batch = random_batch(count, qubits, depth, config.seed);
        let gate_count = batch.iter().map(Circuit::size).sum();
        for &format in &config.formats {
            let encode_s = median_seconds(config.repetitions, || encode_batch(&batch, format));
            let encoded = encode_batch(&batch, format);
            let decode_s = median_seconds(config.repetitions, || decode_batch(&encoded, format));
            rows.push(BenchRow {
                sweep: config.sweep,
                value,
                format,
                encode_s,
                decode_s,
                size_bytes: encoded.size_bytes(),
                gate_count,
            });
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: [&str; 7] = [
    "sweep",
    "value",
    "format",
    "encode_s",
    "decode_s",
    "size_bytes",
    "gate_count",
];

pub fn write_csv<W: io::Write>(rows: &[BenchRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.sweep.name().to_string(),
            r.value.to_string(),
            r.format.name().to_string(),
            format!("{:e}", r.encode_s),
            format!("{:e}", r.decode_s),
            r.size_bytes.to_string(),
            r.gate_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_single_layer() {
        let c = random_circuit(1, 1, 9);
        assert_eq!(c.size(), 1);
        assert!(!c.flat_instructions()[0].kind().is_two_qubit());
    }

    #[test]
    fn depth_is_exact_and_deterministic() {
        for (n, d, seed) in [(72, 50, 7), (5, 30, 1), (2, 10, 3)] {
            let c = random_circuit(n, d, seed);
            assert_eq!(c.depth(), d);
            assert_eq!(c, random_circuit(n, d, seed));
        }
        assert_ne!(random_circuit(4, 4, 1), random_circuit(4, 4, 2));
    }

    #[test]
    fn gate_mix_matches_the_documented_split() {
        let c = random_circuit(72, 200, 11);
        let counts = c.gate_counts();
        let slots = 72 * 200;
        let two: usize = TWO_QUBIT
            .iter()
            .map(|k| counts.get(k).copied().unwrap_or(0))
            .sum();
        // Qubit slots covered by two-qubit gates.
        let share = 2.0 * two as f64 / slots as f64;
        let expected = 2.0 * TWO_QUBIT_PROBABILITY / (1.0 + TWO_QUBIT_PROBABILITY);
        assert!((share - expected).abs() < 0.02, "{share} vs {expected}");
        for kind in ONE_QUBIT {
            assert!(counts[&kind] > 0);
        }
        assert!(!counts.contains_key(&GateKind::Measure));
    }

    #[test]
    fn rows_and_csv() {
        let config = BenchConfig {
            sweep: Sweep::QubitCount,
            sweep_values: vec![4, 8],
            fixed_circuit_count: 3,
            fixed_depth: 5,
            repetitions: 3,
            ..Default::default()
        };
        let rows = run_transmission_bench(&config).unwrap();
        assert_eq!(rows.len(), 2 * Format::ALL.len());
        assert!(rows
            .iter()
            .all(|r| r.encode_s > 0.0 && r.decode_s > 0.0 && r.size_bytes > 0));
        assert_eq!(
            rows[0].gate_count,
            random_batch(3, 4, 5, 0)
                .iter()
                .map(Circuit::size)
                .sum::<usize>()
        );
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("sweep,value,format,encode_s,decode_s,size_bytes,gate_count\n"));
        assert_eq!(text.lines().count(), 1 + rows.len());
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("qubit_count,4,bis_compressed,"));
    }

    #[test]
    fn config_errors() {
        let bad = BenchConfig {
            sweep_values: vec![],
            ..Default::default()
        };
        assert_eq!(run_transmission_bench(&bad), Err(BenchError::BadSweep));
        let bad = BenchConfig {
            repetitions: 2,
            ..Default::default()
        };
        assert_eq!(
            run_transmission_bench(&bad),
            Err(BenchError::TooFewRepetitions(2))
        );
        let bad = BenchConfig {
            formats: vec![],
            ..Default::default()
        };
        assert_eq!(run_transmission_bench(&bad), Err(BenchError::NoFormats));
    }

    #[test]
    fn median_of_even_and_odd() {
        let mut n = 0;
        assert!(median_seconds(4, || n += 1) > 0.0);
        assert_eq!(n, 4);
    }
}
