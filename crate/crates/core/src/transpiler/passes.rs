use std::f64::consts::TAU;

use crate::circuit::{Circuit, GateKind, Instruction};

/// Angles this close to a multiple of 2π count as zero.
pub const ZERO_ANGLE_TOLERANCE: f64 = 1e-12;

fn is_zero_angle(angle: f64) -> bool {
    let r = angle.rem_euclid(TAU);
    r < ZERO_ANGLE_TOLERANCE || TAU - r < ZERO_ANGLE_TOLERANCE
}

/// Output buffer that knows, per wire, which kept instructions touch it,
/// so "the previous instruction on this wire" survives deletions.
struct WireStacks {
    out: Vec<Option<Instruction>>,
    stacks: Vec<Vec<usize>>,
    num_qubits: usize,
}

impl WireStacks {
    fn new(circuit: &Circuit) -> Self {
        WireStacks {
            out: Vec::with_capacity(circuit.size()),
            stacks: vec![Vec::new(); circuit.num_qubits() + circuit.num_cbits()],
            num_qubits: circuit.num_qubits(),
        }
    }

    /// Index of the last kept instruction on every wire of `instr`, if it
    /// is the same one for all of them.
    fn shared_predecessor(&self, instr: &Instruction) -> Option<usize> {
        let mut wires = instr.wires(self.num_qubits);
        let first = *self.stacks[wires.next()?].last()?;
        wires
            .all(|w| self.stacks[w].last() == Some(&first))
            .then_some(first)
    }

    fn push(&mut self, instr: Instruction) {
        let idx = self.out.len();
        for w in instr.wires(self.num_qubits) {
            self.stacks[w].push(idx);
        }
        self.out.push(Some(instr));
    }

    fn remove(&mut self, idx: usize) {
        let instr = self.out[idx].take().expect("removing a kept instruction");
        for w in instr.wires(self.num_qubits) {
            let popped = self.stacks[w].pop();
            debug_assert_eq!(popped, Some(idx));
        }
    }

    fn finish(self, template: &Circuit) -> Circuit {
        let mut c =
            Circuit::with_capacity(template.num_qubits(), template.num_cbits(), self.out.len());
        if let Some(name) = template.name() {
            c = c.named(name);
        }
        for instr in self.out.into_iter().flatten() {
            c.push_unchecked(instr);
        }
        c
    }
}

/// Merges consecutive same-axis rotations on a qubit into one rotation with
/// the summed angle, dropping rotations that come out as a multiple of 2π.
pub fn merge_adjacent_rotations(circuit: &Circuit) -> Circuit {
    let mut buf = WireStacks::new(circuit);
    circuit.visit_flat(|instr| {
        if !instr.kind().is_rotation() {
            buf.push(instr.clone());
            return;
        }
        let mut angle = instr.params()[0];
        if let Some(prev) = buf.shared_predecessor(instr) {
            let p = buf.out[prev].as_ref().expect("stack entries are kept");
            if p.kind() == instr.kind() {
                angle += p.params()[0];
                buf.remove(prev);
            }
        }
        if !is_zero_angle(angle) {
            buf.push(instr.with_param(0, angle));
        }
    });
    buf.finish(circuit)
}

fn cancels(a: &Instruction, b: &Instruction) -> bool {
    use GateKind::*;
    let same_order = a.qubits() == b.qubits();
    let either_order =
        same_order || (a.qubits()[0] == b.qubits()[1] && a.qubits()[1] == b.qubits()[0]);
    match (a.kind(), b.kind()) {
        (H, H) | (X, X) | (Y, Y) | (Z, Z) => true,
        (S, Sdg) | (Sdg, S) | (T, Tdg) | (Tdg, T) => true,
        (X1, X1) => a.is_dagger() != b.is_dagger(),
        (Cnot, Cnot) => same_order,
        (Cz, Cz) | (Swap, Swap) => either_order,
        _ => false,
    }
}

/// Removes adjacent inverse pairs. Adjacency is per wire: a pair cancels
/// when nothing in between touches any of its qubits.
pub fn cancel_adjacent_inverses(circuit: &Circuit) -> Circuit {
    let mut buf = WireStacks::new(circuit);
    circuit.visit_flat(|instr| {
        if let Some(prev) = buf.shared_predecessor(instr) {
            let p = buf.out[prev].as_ref().expect("stack entries are kept");
            if p.qubits().len() == instr.qubits().len() && cancels(p, instr) {
                buf.remove(prev);
                return;
            }
        }
        buf.push(instr.clone());
    });
    buf.finish(circuit)
}

/// Runs the level's passes until the instruction count stops shrinking.
pub(crate) fn optimize(circuit: Circuit, level: u8) -> Circuit {
    let mut current = circuit;
    loop {
        let before = current.size();
        if level >= 1 {
            current = merge_adjacent_rotations(&current);
        }
        if level >= 2 {
            current = cancel_adjacent_inverses(&current);
        }
        if current.size() == before {
            return current;
        }
    }
}
