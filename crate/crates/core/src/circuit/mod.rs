//! In-memory circuit model shared by every other module.
//!
//! A [`Circuit`] body is an ordered list of [`Element`]s: plain
//! instructions or instances of other circuit definitions. Definitions are
//! shared through `Arc`, so a definition can never (transitively) contain
//! itself. Sub-circuit qubit `i` is the enclosing circuit's qubit `i`.

mod dag;
mod gate;
mod instruction;

use std::collections::BTreeMap;
use std::slice;
use std::sync::Arc;

use thiserror::Error;

pub use dag::CircuitDag;
pub use gate::{GateKind, UnknownGate};
pub(crate) use instruction::Operands;
pub use instruction::{Instruction, Params, Qubits};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("{kind} expects {expected} qubit operand(s), found {found}")]
    Arity {
        kind: GateKind,
        expected: usize,
        found: usize,
    },
    #[error("{kind} expects {expected} parameter(s), found {found}")]
    ParamCount {
        kind: GateKind,
        expected: usize,
        found: usize,
    },
    #[error("{kind} uses qubit {qubit} more than once")]
    DuplicateOperand { kind: GateKind, qubit: usize },
    #[error("qubit index {index} out of range for {count} qubit(s)")]
    QubitOutOfRange { index: usize, count: usize },
    #[error("classical bit index {index} out of range for {count} bit(s)")]
    CbitOutOfRange { index: usize, count: usize },
    #[error("MEASURE requires a classical bit")]
    MissingCbit,
    #[error("{0} does not take a classical bit")]
    UnexpectedCbit(GateKind),
    #[error("angle {0} is not finite")]
    NonFiniteAngle(f64),
    #[error("sub-circuit needs {needed_qubits} qubit(s) and {needed_cbits} bit(s), enclosing circuit has {qubits} and {cbits}")]
    SubcircuitTooWide {
        needed_qubits: usize,
        needed_cbits: usize,
        qubits: usize,
        cbits: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Gate(Instruction),
    Sub(SubcircuitInstance),
}

/// An occurrence of a circuit definition inside another circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcircuitInstance {
    pub definition: Arc<Circuit>,
    pub dagger: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Circuit {
    num_qubits: usize,
    num_cbits: usize,
    body: Vec<Element>,
    name: Option<String>,
    /// Instruction count after flattening.
    flat_size: usize,
}

/// Structural equality: register sizes and body. The label is ignored.
impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.num_qubits == other.num_qubits
            && self.num_cbits == other.num_cbits
            && self.body == other.body
    }
}

impl Circuit {
    pub fn new(num_qubits: usize, num_cbits: usize) -> Self {
        Circuit {
            num_qubits,
            num_cbits,
            body: Vec::new(),
            name: None,
            flat_size: 0,
        }
    }

    pub fn with_capacity(num_qubits: usize, num_cbits: usize, capacity: usize) -> Self {
        Circuit {
            body: Vec::with_capacity(capacity),
            ..Circuit::new(num_qubits, num_cbits)
        }
    }

    /// Builds a flat circuit, validating every instruction.
    pub fn from_instructions(
        num_qubits: usize,
        num_cbits: usize,
        instructions: impl IntoIterator<Item = Instruction>,
    ) -> Result<Self, CircuitError> {
        let mut circuit = Circuit::new(num_qubits, num_cbits);
        for instr in instructions {
            circuit.append(instr)?;
        }
        Ok(circuit)
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_cbits(&self) -> usize {
        self.num_cbits
    }

    pub fn body(&self) -> &[Element] {
        &self.body
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }

    pub fn append(&mut self, instr: Instruction) -> Result<(), CircuitError> {
        self.check(&instr)?;
        self.push_unchecked(instr);
        Ok(())
    }

    /// Appends without range or shape checks; callers guarantee validity.
    pub(crate) fn push_unchecked(&mut self, instr: Instruction) {
        self.flat_size += 1;
        self.body.push(Element::Gate(instr));
    }

    pub fn append_subcircuit(&mut self, definition: Arc<Circuit>) -> Result<(), CircuitError> {
        self.push_sub(definition, false)
    }

    /// Appends the adjoint of `definition`.
    pub fn append_dagger(&mut self, definition: Arc<Circuit>) -> Result<(), CircuitError> {
        self.push_sub(definition, true)
    }

    fn push_sub(&mut self, definition: Arc<Circuit>, dagger: bool) -> Result<(), CircuitError> {
        if definition.num_qubits > self.num_qubits || definition.num_cbits > self.num_cbits {
            return Err(CircuitError::SubcircuitTooWide {
                needed_qubits: definition.num_qubits,
                needed_cbits: definition.num_cbits,
                qubits: self.num_qubits,
                cbits: self.num_cbits,
            });
        }
        self.flat_size += definition.flat_size;
        self.body
            .push(Element::Sub(SubcircuitInstance { definition, dagger }));
        Ok(())
    }

    pub(crate) fn check(&self, instr: &Instruction) -> Result<(), CircuitError> {
        instr.validate()?;
        if let Some(&index) = instr.qubits().iter().find(|&&q| q >= self.num_qubits) {
            return Err(CircuitError::QubitOutOfRange {
                index,
                count: self.num_qubits,
            });
        }
        match instr.cbit() {
            Some(index) if index >= self.num_cbits => Err(CircuitError::CbitOutOfRange {
                index,
                count: self.num_cbits,
            }),
            _ => Ok(()),
        }
    }

    /// True when the body holds only resolved instructions.
    pub fn is_flat(&self) -> bool {
        self.body.iter().all(|e| match e {
            Element::Gate(i) => i.is_resolved(),
            Element::Sub(_) => false,
        })
    }

    /// Calls `f` for every instruction of the fully expanded circuit, in
    /// execution order, with dagger flags resolved.
    pub fn visit_flat<F: FnMut(&Instruction)>(&self, mut f: F) {
        walk(&self.body, false, &mut f);
    }

    /// Expands sub-circuit instances recursively and resolves daggers. A
    /// daggered block reverses its contents and replaces each instruction
    /// with its adjoint.
    pub fn flatten(&self) -> Circuit {
        let mut out = Circuit::with_capacity(self.num_qubits, self.num_cbits, self.body.len());
        out.name = self.name.clone();
        self.visit_flat(|i| out.push_unchecked(i.clone()));
        out
    }

    /// Instructions of the flattened circuit.
    pub fn flat_instructions(&self) -> Vec<Instruction> {
        let mut out = Vec::with_capacity(self.body.len());
        self.visit_flat(|i| out.push(i.clone()));
        out
    }

    /// Adjoint circuit: the same definition wrapped in a dagger block.
    pub fn dagger(self: &Arc<Self>) -> Circuit {
        let mut out = Circuit::new(self.num_qubits, self.num_cbits);
        out.flat_size = self.flat_size;
        out.body.push(Element::Sub(SubcircuitInstance {
            definition: Arc::clone(self),
            dagger: true,
        }));
        out
    }

    /// Greedy layering depth over qubit and classical-bit wires.
    pub fn depth(&self) -> usize {
        let mut layers = vec![0usize; self.num_qubits + self.num_cbits];
        let mut depth = 0;
        self.visit_flat(|instr| {
            let layer = 1 + instr
                .wires(self.num_qubits)
                .map(|w| layers[w])
                .max()
                .unwrap_or(0);
            for w in instr.wires(self.num_qubits) {
                layers[w] = layer;
            }
            depth = depth.max(layer);
        });
        depth
    }

    pub fn gate_counts(&self) -> BTreeMap<GateKind, usize> {
        let mut counts = BTreeMap::new();
        self.visit_flat(|i| *counts.entry(i.kind()).or_insert(0) += 1);
        counts
    }

    /// Number of instructions after flattening.
    pub fn size(&self) -> usize {
        self.flat_size
    }

    pub fn build_dag(&self) -> CircuitDag {
        CircuitDag::new(self)
    }
}

/// [`Circuit::visit_flat`] for a single body element.
pub(crate) fn visit_element<F: FnMut(&Instruction)>(element: &Element, f: &mut F) {
    walk(slice::from_ref(element), false, f);
}

fn walk<F: FnMut(&Instruction)>(body: &[Element], dagger: bool, f: &mut F) {
    let mut visit = |element: &Element| match element {
        Element::Gate(instr) if !dagger && instr.is_resolved() => f(instr),
        Element::Gate(instr) => f(&instr.resolved(dagger)),
        Element::Sub(sub) => walk(&sub.definition.body, dagger ^ sub.dagger, f),
    };
    if dagger {
        body.iter().rev().for_each(&mut visit);
    } else {
        body.iter().for_each(&mut visit);
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn ghz3() -> Circuit {
        Circuit::from_instructions(
            3,
            3,
            [
                Instruction::h(0),
                Instruction::cnot(0, 1),
                Instruction::cnot(1, 2),
            ],
        )
        .unwrap()
    }

    #[test]
    fn new_circuit_is_empty() {
        let c = Circuit::new(3, 3);
        assert_eq!((c.num_qubits(), c.num_cbits(), c.size()), (3, 3, 0));
        assert_eq!(Circuit::new(0, 0).depth(), 0);
        let big = Circuit::new(72, 72);
        assert!(big.is_empty());
    }

    #[test]
    fn append_validates_against_registers() {
        let mut c = Circuit::new(1, 0);
        c.append(Instruction::h(0)).unwrap();
        assert_eq!(c.body().len(), 1);

        let mut c = Circuit::new(2, 0);
        assert!(matches!(
            c.append(Instruction::cnot(0, 0)),
            Err(CircuitError::DuplicateOperand { .. })
        ));
        assert!(matches!(
            c.append(Instruction::h(2)),
            Err(CircuitError::QubitOutOfRange { index: 2, count: 2 })
        ));
        assert!(matches!(
            c.append(Instruction::measure(0, 0)),
            Err(CircuitError::CbitOutOfRange { .. })
        ));

        let mut c = Circuit::new(3, 0);
        c.append(Instruction::rz(2, 0.5)).unwrap();
        match &c.body()[0] {
            Element::Gate(i) => {
                assert_eq!(i.kind(), GateKind::Rz);
                assert_eq!(i.params(), &[0.5]);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn flatten_inlines_subcircuits() {
        let mut cir1 = Circuit::new(1, 0);
        cir1.append(Instruction::h(0)).unwrap();
        let cir1 = Arc::new(cir1);
        let mut cir2 = Circuit::new(2, 0);
        cir2.append_subcircuit(cir1).unwrap();
        cir2.append(Instruction::cnot(0, 1)).unwrap();
        assert!(!cir2.is_flat());
        assert_eq!(cir2.size(), 2);
        assert_eq!(Arc::new(cir2.clone()).dagger().size(), 2);
        let flat = cir2.flatten();
        assert!(flat.is_flat());
        assert_eq!(
            flat.flat_instructions(),
            vec![Instruction::h(0), Instruction::cnot(0, 1)]
        );
        assert_eq!(flat.flatten(), flat);
    }

    #[test]
    fn dagger_block_reverses_and_inverts() {
        let block = Arc::new(
            Circuit::from_instructions(1, 0, [Instruction::rz(0, 0.3), Instruction::h(0)]).unwrap(),
        );
        let flat = block.dagger().flatten();
        assert_eq!(
            flat.flat_instructions(),
            vec![Instruction::h(0), Instruction::rz(0, -0.3)]
        );
    }

    #[test]
    fn nested_daggers_cancel() {
        let inner = Arc::new(
            Circuit::from_instructions(1, 0, [Instruction::s(0), Instruction::x1(0)]).unwrap(),
        );
        let once = Arc::new(inner.dagger());
        let twice = once.dagger().flatten();
        assert_eq!(twice.flat_instructions(), inner.flat_instructions());
        let once_flat = once.flatten().flat_instructions();
        assert_eq!(
            once_flat,
            vec![Instruction::x1(0).dagger(), Instruction::sdg(0)]
        );
    }

    #[test]
    fn subcircuit_wider_than_parent_rejected() {
        let wide = Arc::new(Circuit::new(3, 0));
        let mut c = Circuit::new(2, 0);
        assert!(c.append_subcircuit(wide).is_err());
    }

    #[test]
    fn depth_examples() {
        assert_eq!(ghz3().depth(), 3);
        let parallel =
            Circuit::from_instructions(2, 0, [Instruction::h(0), Instruction::h(1)]).unwrap();
        assert_eq!(parallel.depth(), 1);
        let barrier = Circuit::from_instructions(
            2,
            1,
            [
                Instruction::h(0),
                Instruction::barrier(&[0, 1]),
                Instruction::h(1),
                Instruction::measure(1, 0),
            ],
        )
        .unwrap();
        assert_eq!(barrier.depth(), 4);
    }

    #[test]
    fn gate_count_examples() {
        let counts = ghz3().gate_counts();
        assert_eq!(counts.len(), 2);
        assert_eq!(counts[&GateKind::H], 1);
        assert_eq!(counts[&GateKind::Cnot], 2);
        assert!(Circuit::new(2, 0).gate_counts().is_empty());
    }

    #[test]
    fn equality_ignores_name() {
        assert_eq!(ghz3().named("ghz"), ghz3());
    }
}
