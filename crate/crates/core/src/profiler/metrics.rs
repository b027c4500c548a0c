use std::collections::BTreeSet;

use serde::Serialize;

use crate::circuit::{Circuit, Instruction};

/// Five structural features of a circuit, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsVector {
    /// Interaction-graph density.
    pub communication: f64,
    /// Share of two-qubit gates lying on the critical path.
    pub critical_depth: f64,
    /// Share of gates that are two-qubit.
    pub entanglement_ratio: f64,
    pub parallelism: f64,
    /// Share of qubit-layer cells where the qubit is acted on.
    pub liveness: f64,
}

impl MetricsVector {
    pub fn components(&self) -> [f64; 5] {
        [
            self.communication,
            self.critical_depth,
            self.entanglement_ratio,
            self.parallelism,
            self.liveness,
        ]
    }
}

/// Metrics over the flattened circuit, ignoring MEASURE and BARRIER.
///
/// Undefined ratios are 0: communication and parallelism for one qubit,
/// critical depth and entanglement ratio without two-qubit gates, liveness
/// and parallelism for an empty circuit.
pub fn circuit_metrics(circuit: &Circuit) -> MetricsVector {
    let n = circuit.num_qubits();
    let gates: Vec<Instruction> = circuit
        .flat_instructions()
        .into_iter()
        .filter(|i| i.kind().is_unitary())
        .collect();
    let g = gates.len();
    let e = gates.iter().filter(|i| i.kind().is_two_qubit()).count();

    // Greedy layers plus, per qubit, the best (length, two-qubit count) of
    // a dependency path ending at its latest gate.
    let mut layer = vec![0usize; n];
    let mut path = vec![(0usize, 0usize); n];
    let mut depth = 0;
    let mut active = 0usize;
    let mut critical = (0usize, 0usize);
    let mut pairs = BTreeSet::new();
    for instr in &gates {
        let q = instr.qubits();
        let l = 1 + q.iter().map(|&x| layer[x]).max().unwrap_or(0);
        let best = q.iter().map(|&x| path[x]).max().unwrap_or((0, 0));
        let two = instr.kind().is_two_qubit();
        let here = (best.0 + 1, best.1 + usize::from(two));
        for &x in q {
            layer[x] = l;
            path[x] = here;
        }
        depth = depth.max(l);
        critical = critical.max(here);
        active += q.len();
        if two {
            pairs.insert((q[0].min(q[1]), q[0].max(q[1])));
        }
    }

    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    let communication = if n > 1 {
        ratio(2.0 * pairs.len() as f64, (n * (n - 1)) as f64)
    } else {
        0.0
    };
    let parallelism = if n > 1 && depth > 0 {
        ((g as f64 / depth as f64 - 1.0) / (n as f64 - 1.0)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    MetricsVector {
        communication,
        critical_depth: ratio(critical.1 as f64, e as f64),
        entanglement_ratio: ratio(e as f64, g as f64),
        parallelism,
        liveness: ratio(active as f64, (n * depth) as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::tests::ghz3;

    fn close(a: [f64; 5], b: [f64; 5]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-3)
    }

    #[test]
    fn ghz3_vector() {
        let m = circuit_metrics(&ghz3());
        assert!(
            close(m.components(), [0.667, 1.0, 0.667, 0.0, 0.556]),
            "{m:?}"
        );
    }

    #[test]
    fn degenerate_single_h() {
        let c = Circuit::from_instructions(1, 0, [Instruction::h(0)]).unwrap();
        assert_eq!(circuit_metrics(&c).components(), [0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(circuit_metrics(&Circuit::new(0, 0)).components(), [0.0; 5]);
        assert_eq!(circuit_metrics(&Circuit::new(4, 0)).components(), [0.0; 5]);
    }

    #[test]
    fn full_parallel_layer() {
        let c = Circuit::from_instructions(5, 0, (0..5).map(Instruction::h)).unwrap();
        let m = circuit_metrics(&c);
        assert_eq!(m.parallelism, 1.0);
        assert_eq!(m.liveness, 1.0);
    }

    #[test]
    fn measure_and_barrier_are_ignored() {
        let mut c = ghz3();
        c.append(Instruction::barrier(&[0, 1, 2])).unwrap();
        c.append(Instruction::measure(2, 0)).unwrap();
        assert_eq!(circuit_metrics(&c), circuit_metrics(&ghz3()));
    }

    #[test]
    fn critical_path_prefers_two_qubit_gates_on_ties() {
        // Two length-2 chains: H,H on q0 and CZ,CZ on (1,2).
        let c = Circuit::from_instructions(
            3,
            0,
            [
                Instruction::h(0),
                Instruction::h(0),
                Instruction::cz(1, 2),
                Instruction::cz(1, 2),
            ],
        )
        .unwrap();
        assert_eq!(circuit_metrics(&c).critical_depth, 1.0);
    }
}
