use super::{Circuit, Instruction};

/// Dependency graph over the instructions of a flattened circuit.
///
/// Node `i` is the `i`-th flattened instruction. There is an arc `a -> b`
/// when `a` is the latest instruction before `b` on one of `b`'s wires
/// (qubits, or the classical bit of a MEASURE).
#[derive(Debug, Clone)]
pub struct CircuitDag {
    num_qubits: usize,
    nodes: Vec<Instruction>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

impl CircuitDag {
    pub fn new(circuit: &Circuit) -> Self {
        Self::from_instructions(
            circuit.num_qubits(),
            circuit.num_cbits(),
            circuit.flat_instructions(),
        )
    }

    pub(crate) fn from_instructions(
        num_qubits: usize,
        num_cbits: usize,
        nodes: Vec<Instruction>,
    ) -> Self {
        let mut last: Vec<Option<usize>> = vec![None; num_qubits + num_cbits];
        let mut preds = vec![Vec::new(); nodes.len()];
        let mut succs = vec![Vec::new(); nodes.len()];
        for (idx, instr) in nodes.iter().enumerate() {
            for wire in instr.wires(num_qubits) {
                if let Some(prev) = last[wire] {
                    if !preds[idx].contains(&prev) {
                        preds[idx].push(prev);
                        succs[prev].push(idx);
                    }
                }
                last[wire] = Some(idx);
            }
        }
        CircuitDag {
            num_qubits,
            nodes,
            preds,
            succs,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, idx: usize) -> &Instruction {
        &self.nodes[idx]
    }

    pub fn nodes(&self) -> &[Instruction] {
        &self.nodes
    }

    pub fn predecessors(&self, idx: usize) -> &[usize] {
        &self.preds[idx]
    }

    pub fn successors(&self, idx: usize) -> &[usize] {
        &self.succs[idx]
    }

    /// All arcs `(from, to)` in node order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succs
            .iter()
            .enumerate()
            .flat_map(|(a, bs)| bs.iter().map(move |&b| (a, b)))
    }

    /// Nodes without predecessors.
    pub fn front_layer(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.preds[i].is_empty())
            .collect()
    }

    /// Kahn's algorithm, always taking the lowest ready index.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut remaining: Vec<usize> = self.preds.iter().map(Vec::len).collect();
        let mut ready: std::collections::BTreeSet<usize> = self.front_layer().into_iter().collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(n) = ready.pop_first() {
            order.push(n);
            for &s in &self.succs[n] {
                remaining[s] -= 1;
                if remaining[s] == 0 {
                    ready.insert(s);
                }
            }
        }
        order
    }
}
