//! Device-aware compilation: preprocessing, Sabre layout and routing,
//! peephole passes and basis translation.

mod basis;
mod layout;
mod passes;
mod sabre;

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, GateKind, Instruction};
use crate::topology::CouplingGraph;

pub use basis::{decompose_to_basis, Basis};
pub use layout::{Layout, NotAPermutation};
pub use passes::{cancel_adjacent_inverses, merge_adjacent_rotations, ZERO_ANGLE_TOLERANCE};
pub use sabre::{sabre_layout, sabre_route, Routed};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TranspileError {
    #[error("circuit uses {circuit} qubits but the device has {device}")]
    TooWide { circuit: usize, device: usize },
    #[error("layout covers {layout} qubits but the device has {device}")]
    LayoutSize { layout: usize, device: usize },
    #[error(
        "measurement on qubit {qubit} must be final: only trailing measurements are supported"
    )]
    MeasureNotFinal { qubit: usize },
    #[error("no rule rewrites {kind} into basis {basis}")]
    NoRule { kind: GateKind, basis: Basis },
    #[error("optimization level must be 0, 1 or 2, got {0}")]
    InvalidLevel(u8),
    #[error("Sabre weights must be non-negative")]
    NegativeWeight,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranspileConfig {
    pub level: u8,
    pub seed: u64,
    pub layout_trials: usize,
    pub extended_set_size: usize,
    pub extended_weight: f64,
    pub decay_delta: f64,
    pub decay_reset_interval: usize,
    pub basis: Basis,
}

impl Default for TranspileConfig {
    fn default() -> Self {
        TranspileConfig {
            level: 0,
            seed: 0,
            layout_trials: 4,
            extended_set_size: 20,
            extended_weight: 0.5,
            decay_delta: 0.001,
            decay_reset_interval: 5,
            basis: Basis::None,
        }
    }
}

impl TranspileConfig {
    pub fn validate(&self) -> Result<(), TranspileError> {
        if self.level > 2 {
            return Err(TranspileError::InvalidLevel(self.level));
        }
        if !(self.extended_weight >= 0.0 && self.decay_delta >= 0.0) {
            return Err(TranspileError::NegativeWeight);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranspileStats {
    pub swaps_inserted: usize,
    pub depth_before: usize,
    pub depth_after: usize,
    pub two_q_count: usize,
    pub two_q_depth: usize,
    /// Wall-clock seconds; the only field that varies between runs.
    pub elapsed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranspileResult {
    pub circuit: Circuit,
    pub initial_layout: Layout,
    pub final_layout: Layout,
    pub stats: TranspileStats,
}

/// A flattened, basis-translated circuit with its measurements split off.
#[derive(Debug, Clone, PartialEq)]
pub struct Preprocessed {
    pub body: Circuit,
    /// `(logical qubit, cbit)` in original order.
    pub measurements: Vec<(usize, usize)>,
}

/// Flattens, moves measurements to a trailing suffix and translates gates
/// outside the configured basis. A gate after a measurement on the same
/// qubit is an error.
pub fn preprocess(
    circuit: &Circuit,
    config: &TranspileConfig,
) -> Result<Preprocessed, TranspileError> {
    let mut body = Circuit::with_capacity(circuit.num_qubits(), 0, circuit.size());
    let mut measured = vec![false; circuit.num_qubits()];
    let mut measurements = Vec::new();
    let mut error = None;
    circuit.visit_flat(|instr| {
        if error.is_some() {
            return;
        }
        match instr.kind() {
            GateKind::Measure => {
                let q = instr.qubits()[0];
                if measured[q] {
                    error = Some(TranspileError::MeasureNotFinal { qubit: q });
                }
                measured[q] = true;
                measurements.push((q, instr.cbit().expect("measure has a cbit")));
            }
            // A barrier after measurement orders nothing that remains.
            GateKind::Barrier if instr.qubits().iter().any(|&q| measured[q]) => {}
            _ => {
                if let Some(&q) = instr.qubits().iter().find(|&&q| measured[q]) {
                    error = Some(TranspileError::MeasureNotFinal { qubit: q });
                }
                body.push_unchecked(instr.clone());
            }
        }
    });
    if let Some(e) = error {
        return Err(e);
    }
    let body = decompose_to_basis(&body, config.basis)?;
    Ok(Preprocessed { body, measurements })
}

/// Greedy layering depth counting only two-qubit gates.
fn two_qubit_depth(circuit: &Circuit) -> usize {
    let mut layers = vec![0usize; circuit.num_qubits()];
    let mut depth = 0;
    circuit.visit_flat(|i| {
        if i.kind().is_two_qubit() {
            let (a, b) = (i.qubits()[0], i.qubits()[1]);
            let layer = 1 + layers[a].max(layers[b]);
            layers[a] = layer;
            layers[b] = layer;
            depth = depth.max(layer);
        }
    });
    depth
}

/// Full pipeline. Level 0 is preprocess, layout, routing and basis
/// translation (which expands routing SWAPs). Level 1 merges rotations
/// before layout and after routing; level 2 also cancels inverse pairs,
/// before SWAP expansion so adjacent routing SWAPs can cancel.
pub fn transpile(
    circuit: &Circuit,
    graph: &CouplingGraph,
    config: &TranspileConfig,
) -> Result<TranspileResult, TranspileError> {
    let started = Instant::now();
    config.validate()?;
    if circuit.num_qubits() > graph.num_physical() {
        return Err(TranspileError::TooWide {
            circuit: circuit.num_qubits(),
            device: graph.num_physical(),
        });
    }
    let depth_before = circuit.depth();
    let Preprocessed {
        mut body,
        measurements,
    } = preprocess(circuit, config)?;
    if config.level >= 1 {
        body = passes::optimize(body, config.level);
    }
    let dag = body.build_dag();
    let initial_layout = sabre_layout(&dag, graph, config)?;
    let routed = sabre_route(&dag, graph, &initial_layout, config)?;
    let mut physical = routed.circuit;
    if config.level >= 1 {
        physical = passes::optimize(physical, config.level);
    }
    let physical = decompose_to_basis(&physical, config.basis)?;

    let mut out = Circuit::with_capacity(
        graph.num_physical(),
        circuit.num_cbits(),
        physical.size() + measurements.len(),
    );
    if let Some(name) = circuit.name() {
        out = out.named(name);
    }
    physical.visit_flat(|i| out.push_unchecked(i.clone()));
    for (q, c) in measurements {
        out.push_unchecked(Instruction::measure(routed.final_layout.physical(q), c));
    }

    let two_q_count = out
        .gate_counts()
        .iter()
        .filter(|(k, _)| k.is_two_qubit())
        .map(|(_, n)| n)
        .sum();
    let stats = TranspileStats {
        swaps_inserted: routed.swaps,
        depth_before,
        depth_after: out.depth(),
        two_q_count,
        two_q_depth: two_qubit_depth(&out),
        elapsed: started.elapsed().as_secs_f64(),
    };
    Ok(TranspileResult {
        circuit: out,
        initial_layout,
        final_layout: routed.final_layout,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::equivalent;
    use crate::topology::{generate_topology, TopologyKind};
    use std::f64::consts::FRAC_PI_2;

    fn circ(n: usize, nc: usize, instrs: impl IntoIterator<Item = Instruction>) -> Circuit {
        Circuit::from_instructions(n, nc, instrs).unwrap()
    }

    fn at_level(level: u8) -> TranspileConfig {
        TranspileConfig {
            level,
            ..Default::default()
        }
    }

    #[test]
    fn preprocess_basis_none_is_flatten() {
        let c = crate::circuit::tests::ghz3();
        let p = preprocess(&c, &TranspileConfig::default()).unwrap();
        assert_eq!(p.body.flat_instructions(), c.flat_instructions());
        assert!(p.measurements.is_empty());
    }

    #[test]
    fn preprocess_translates_h() {
        let c = circ(1, 0, [Instruction::h(0)]);
        let config = TranspileConfig {
            basis: Basis::RzX1Cz,
            ..Default::default()
        };
        assert_eq!(
            preprocess(&c, &config).unwrap().body.flat_instructions(),
            vec![
                Instruction::rz(0, FRAC_PI_2),
                Instruction::x1(0),
                Instruction::rz(0, FRAC_PI_2)
            ]
        );
    }

    #[test]
    fn mid_circuit_measure_rejected() {
        let c = circ(1, 1, [Instruction::measure(0, 0), Instruction::h(0)]);
        assert_eq!(
            preprocess(&c, &TranspileConfig::default()),
            Err(TranspileError::MeasureNotFinal { qubit: 0 })
        );
        // Later gates on other qubits are fine.
        let c = circ(2, 1, [Instruction::measure(0, 0), Instruction::h(1)]);
        let p = preprocess(&c, &TranspileConfig::default()).unwrap();
        assert_eq!(p.measurements, vec![(0, 0)]);
        assert_eq!(p.body.size(), 1);
    }

    #[test]
    fn rz_pair_by_level() {
        let (a, b) = (0.3, 0.4);
        let c = circ(1, 0, [Instruction::rz(0, a), Instruction::rz(0, b)]);
        let g = generate_topology(TopologyKind::Linear, 1, 0, 0.0).unwrap();
        let r0 = transpile(&c, &g, &at_level(0)).unwrap();
        assert_eq!(r0.circuit.flat_instructions(), c.flat_instructions());
        for level in [1, 2] {
            let r = transpile(&c, &g, &at_level(level)).unwrap();
            assert_eq!(
                r.circuit.flat_instructions(),
                vec![Instruction::rz(0, a + b)]
            );
        }
    }

    #[test]
    fn swap_pair_vanishes_at_level_two() {
        let c = circ(2, 0, [Instruction::swap(0, 1), Instruction::swap(0, 1)]);
        let g = generate_topology(TopologyKind::Linear, 2, 0, 0.0).unwrap();
        let r = transpile(&c, &g, &at_level(2)).unwrap();
        assert!(r.circuit.is_empty());
        assert_eq!(transpile(&c, &g, &at_level(0)).unwrap().circuit.size(), 2);
    }

    #[test]
    fn measurements_follow_the_final_layout() {
        let c = circ(
            3,
            3,
            [
                Instruction::cz(0, 1),
                Instruction::cz(1, 2),
                Instruction::cz(0, 2),
                Instruction::measure(0, 0),
                Instruction::measure(1, 1),
                Instruction::measure(2, 2),
            ],
        );
        let g = CouplingGraph::from_edge_list(3, &[(0, 2), (1, 2)]).unwrap();
        let r = transpile(&c, &g, &TranspileConfig::default()).unwrap();
        assert!(r.stats.swaps_inserted >= 1);
        let measures: Vec<_> = r
            .circuit
            .flat_instructions()
            .into_iter()
            .filter(|i| i.kind() == GateKind::Measure)
            .map(|i| (i.qubits()[0], i.cbit().unwrap()))
            .collect();
        let want: Vec<_> = (0..3).map(|l| (r.final_layout.physical(l), l)).collect();
        assert_eq!(measures, want);
    }

    #[test]
    fn routed_ghz_is_equivalent() {
        let c = crate::circuit::tests::ghz3();
        let g = generate_topology(TopologyKind::Linear, 3, 0, 0.0).unwrap();
        for basis in Basis::ALL {
            let config = TranspileConfig {
                basis,
                ..Default::default()
            };
            let r = transpile(&c, &g, &config).unwrap();
            assert!(equivalent(&c, &r.circuit, &r.initial_layout, &r.final_layout, 3, 1).unwrap());
        }
    }

    #[test]
    fn deleting_a_swap_breaks_equivalence() {
        let c = circ(
            3,
            0,
            [
                Instruction::h(0),
                Instruction::cnot(0, 2),
                Instruction::cnot(2, 1),
                Instruction::cz(0, 1),
            ],
        );
        let g = generate_topology(TopologyKind::Linear, 3, 0, 0.0).unwrap();
        let r = transpile(&c, &g, &TranspileConfig::default()).unwrap();
        assert!(equivalent(&c, &r.circuit, &r.initial_layout, &r.final_layout, 3, 2).unwrap());
        let instrs = r.circuit.flat_instructions();
        let Some(pos) = instrs.iter().position(|i| i.kind() == GateKind::Swap) else {
            panic!("expected a routing swap");
        };
        let mut mutated = instrs.clone();
        mutated.remove(pos);
        let mutated = circ(3, 0, mutated);
        assert!(!equivalent(&c, &mutated, &r.initial_layout, &r.final_layout, 3, 2).unwrap());
    }

    #[test]
    fn config_validation() {
        let g = generate_topology(TopologyKind::Linear, 2, 0, 0.0).unwrap();
        let c = Circuit::new(2, 0);
        assert_eq!(
            transpile(&c, &g, &at_level(3)),
            Err(TranspileError::InvalidLevel(3))
        );
        let bad = TranspileConfig {
            extended_weight: -1.0,
            ..Default::default()
        };
        assert_eq!(transpile(&c, &g, &bad), Err(TranspileError::NegativeWeight));
        let wide = Circuit::new(3, 0);
        assert!(matches!(
            transpile(&wide, &g, &at_level(0)),
            Err(TranspileError::TooWide { .. })
        ));
    }
}
