use std::slice;

use smallvec::SmallVec;

use super::{CircuitError, GateKind};

/// Scratch operand lists for parsers.
pub type Qubits = SmallVec<[usize; 2]>;
pub type Params = SmallVec<[f64; 3]>;

/// One gate, measurement or barrier.
///
/// The per-kind constructors (`Instruction::h`, `Instruction::cnot`, ...)
/// do not validate; [`Instruction::new`] and `Circuit::append` do.
#[derive(Debug, Clone)]
pub struct Instruction {
    operands: Operands,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Head {
    kind: GateKind,
    dagger: bool,
}

/// Operand storage; the variant is fixed by the kind. The head sits in
/// every variant so it shares the discriminant's word.
#[derive(Debug, Clone)]
pub(crate) enum Operands {
    One(Head, usize),
    Two(Head, [usize; 2]),
    Angle(Head, usize, f64),
    U3(Head, usize, Box<[f64; 3]>),
    Measure(Head, usize, usize),
    Barrier(Head, Box<[usize]>),
}

macro_rules! with_head {
    ($operands:expr, $h:ident => $body:expr) => {
        match $operands {
            Operands::One($h, ..)
            | Operands::Two($h, ..)
            | Operands::Angle($h, ..)
            | Operands::U3($h, ..)
            | Operands::Measure($h, ..)
            | Operands::Barrier($h, ..) => $body,
        }
    };
}

macro_rules! one_qubit_ctors {
    ($($fn_name:ident => $kind:ident),* $(,)?) => {
        $(
            pub fn $fn_name(qubit: usize) -> Self {
                Self::with_operands(GateKind::$kind, |h| Operands::One(h, qubit))
            }
        )*
    };
}

macro_rules! rotation_ctors {
    ($($fn_name:ident => $kind:ident),* $(,)?) => {
        $(
            pub fn $fn_name(qubit: usize, angle: f64) -> Self {
                Self::with_operands(GateKind::$kind, |h| Operands::Angle(h, qubit, angle))
            }
        )*
    };
}

macro_rules! two_qubit_ctors {
    ($($fn_name:ident => $kind:ident),* $(,)?) => {
        $(
            pub fn $fn_name(a: usize, b: usize) -> Self {
                Self::with_operands(GateKind::$kind, |h| Operands::Two(h, [a, b]))
            }
        )*
    };
}

impl Instruction {
    /// Builds and structurally validates an instruction. `cbit` must be
    /// given for MEASURE and only for MEASURE.
    pub fn new(
        kind: GateKind,
        qubits: &[usize],
        params: &[f64],
        cbit: Option<usize>,
    ) -> Result<Self, CircuitError> {
        let instr = Self::shaped(kind, qubits, params, cbit)?;
        instr.validate()?;
        Ok(instr)
    }

    /// Checks only operand and parameter counts and cbit presence;
    /// [`Instruction::validate`] covers the rest.
    pub(crate) fn shaped(
        kind: GateKind,
        qubits: &[usize],
        params: &[f64],
        cbit: Option<usize>,
    ) -> Result<Self, CircuitError> {
        match kind.arity() {
            Some(n) if qubits.len() != n => {
                return Err(CircuitError::Arity {
                    kind,
                    expected: n,
                    found: qubits.len(),
                })
            }
            None if qubits.is_empty() => {
                return Err(CircuitError::Arity {
                    kind,
                    expected: 1,
                    found: 0,
                })
            }
            _ => {}
        }
        if params.len() != kind.num_params() {
            return Err(CircuitError::ParamCount {
                kind,
                expected: kind.num_params(),
                found: params.len(),
            });
        }
        let h = Head {
            kind,
            dagger: false,
        };
        let operands = match (kind, cbit) {
            (GateKind::Measure, Some(c)) => Operands::Measure(h, qubits[0], c),
            (GateKind::Measure, None) => return Err(CircuitError::MissingCbit),
            (_, Some(_)) => return Err(CircuitError::UnexpectedCbit(kind)),
            (GateKind::Barrier, None) => Operands::Barrier(h, qubits.into()),
            (GateKind::U3, None) => {
                Operands::U3(h, qubits[0], Box::new([params[0], params[1], params[2]]))
            }
            _ if params.len() == 1 => Operands::Angle(h, qubits[0], params[0]),
            _ if qubits.len() == 2 => Operands::Two(h, [qubits[0], qubits[1]]),
            _ => Operands::One(h, qubits[0]),
        };
        Ok(Instruction { operands })
    }

    /// The caller guarantees the variant built by `operands` matches the
    /// shape of `kind`.
    #[inline]
    pub(crate) fn with_operands(kind: GateKind, operands: impl FnOnce(Head) -> Operands) -> Self {
        Instruction {
            operands: operands(Head {
                kind,
                dagger: false,
            }),
        }
    }

    fn head(&self) -> Head {
        with_head!(&self.operands, h => *h)
    }

    fn head_mut(&mut self) -> &mut Head {
        with_head!(&mut self.operands, h => h)
    }

    one_qubit_ctors! {
        id => I, h => H, x => X, y => Y, z => Z, s => S, sdg => Sdg,
        t => T, tdg => Tdg, x1 => X1,
    }

    rotation_ctors! { rx => Rx, ry => Ry, rz => Rz }

    two_qubit_ctors! { cnot => Cnot, cz => Cz, swap => Swap }

    pub fn u3(qubit: usize, theta: f64, phi: f64, lambda: f64) -> Self {
        Self::with_operands(GateKind::U3, |h| {
            Operands::U3(h, qubit, Box::new([theta, phi, lambda]))
        })
    }

    pub fn measure(qubit: usize, cbit: usize) -> Self {
        Self::with_operands(GateKind::Measure, |h| Operands::Measure(h, qubit, cbit))
    }

    pub fn barrier(qubits: &[usize]) -> Self {
        Self::with_operands(GateKind::Barrier, |h| Operands::Barrier(h, qubits.into()))
    }

    /// Marks the instruction as daggered. Resolved when the owning circuit
    /// is flattened.
    pub fn dagger(mut self) -> Self {
        let head = self.head_mut();
        head.dagger = !head.dagger;
        self
    }

    pub fn kind(&self) -> GateKind {
        self.head().kind
    }

    pub fn qubits(&self) -> &[usize] {
        match &self.operands {
            Operands::One(_, q)
            | Operands::Angle(_, q, _)
            | Operands::U3(_, q, _)
            | Operands::Measure(_, q, _) => slice::from_ref(q),
            Operands::Two(_, q) => q,
            Operands::Barrier(_, q) => q,
        }
    }

    pub fn params(&self) -> &[f64] {
        match &self.operands {
            Operands::Angle(_, _, a) => slice::from_ref(a),
            Operands::U3(_, _, p) => &p[..],
            _ => &[],
        }
    }

    pub fn cbit(&self) -> Option<usize> {
        match self.operands {
            Operands::Measure(_, _, c) => Some(c),
            _ => None,
        }
    }

    pub fn is_dagger(&self) -> bool {
        self.head().dagger
    }

    pub(crate) fn operands(&self) -> &Operands {
        &self.operands
    }

    /// Checks operand presence, angle finiteness and operand distinctness.
    pub fn validate(&self) -> Result<(), CircuitError> {
        let kind = self.kind();
        let qubits = self.qubits();
        if qubits.is_empty() {
            return Err(CircuitError::Arity {
                kind,
                expected: 1,
                found: 0,
            });
        }
        if let Some(bad) = self.params().iter().find(|p| !p.is_finite()) {
            return Err(CircuitError::NonFiniteAngle(*bad));
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(CircuitError::DuplicateOperand { kind, qubit: *q });
            }
        }
        Ok(())
    }

    /// The adjoint instruction. Self-inverse kinds are returned unchanged;
    /// X1 toggles its dagger flag. MEASURE and BARRIER are returned as-is.
    pub fn inverse(&self) -> Instruction {
        let mut out = self.clone();
        let head = out.head_mut();
        match head.kind {
            GateKind::S => head.kind = GateKind::Sdg,
            GateKind::Sdg => head.kind = GateKind::S,
            GateKind::T => head.kind = GateKind::Tdg,
            GateKind::Tdg => head.kind = GateKind::T,
            GateKind::X1 => head.dagger = !head.dagger,
            _ => {}
        }
        match &mut out.operands {
            Operands::Angle(_, _, a) => *a = -*a,
            Operands::U3(_, _, p) => **p = [-p[0], -p[2], -p[1]],
            _ => {}
        }
        out
    }

    /// Applies the pending dagger flag (XOR `outer`) so that only X1 may
    /// still carry one afterwards.
    pub(crate) fn resolved(&self, outer: bool) -> Instruction {
        let effective = outer ^ self.is_dagger();
        if self.kind() == GateKind::X1 {
            let mut out = self.clone();
            out.head_mut().dagger = effective;
            return out;
        }
        let mut out = if effective {
            self.inverse()
        } else {
            self.clone()
        };
        out.head_mut().dagger = false;
        out
    }

    /// True when flattening would leave this instruction unchanged.
    pub(crate) fn is_resolved(&self) -> bool {
        let head = self.head();
        !head.dagger || head.kind == GateKind::X1
    }

    /// Same instruction on different qubits. `qubits` must have the same
    /// length as [`Instruction::qubits`].
    pub fn with_qubits(&self, qubits: &[usize]) -> Instruction {
        assert_eq!(
            qubits.len(),
            self.qubits().len(),
            "operand count must not change"
        );
        let mut out = self.clone();
        match &mut out.operands {
            Operands::One(_, q)
            | Operands::Angle(_, q, _)
            | Operands::U3(_, q, _)
            | Operands::Measure(_, q, _) => *q = qubits[0],
            Operands::Two(_, q) => *q = [qubits[0], qubits[1]],
            Operands::Barrier(_, q) => *q = qubits.into(),
        }
        out
    }

    pub(crate) fn with_param(&self, index: usize, value: f64) -> Instruction {
        let mut out = self.clone();
        match &mut out.operands {
            Operands::Angle(_, _, a) if index == 0 => *a = value,
            Operands::U3(_, _, p) => p[index] = value,
            _ => panic!("{} has no parameter {index}", self.kind()),
        }
        out
    }

    /// Every wire the instruction blocks: its qubits and, for MEASURE, its
    /// classical bit offset by `num_qubits`.
    pub(crate) fn wires(&self, num_qubits: usize) -> impl Iterator<Item = usize> + '_ {
        self.qubits()
            .iter()
            .copied()
            .chain(self.cbit().map(|c| num_qubits + c))
    }
}

/// Structural equality; angles compare by bit pattern.
impl PartialEq for Instruction {
    fn eq(&self, other: &Self) -> bool {
        self.kind() == other.kind()
            && self.is_dagger() == other.is_dagger()
            && self.cbit() == other.cbit()
            && self.qubits() == other.qubits()
            && self.params().len() == other.params().len()
            && self
                .params()
                .iter()
                .zip(other.params())
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl Eq for Instruction {}
