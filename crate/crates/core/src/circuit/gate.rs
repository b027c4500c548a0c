use std::fmt;
use std::str::FromStr;

/// Every instruction kind the toolkit understands.
///
/// `X1` is the square root of X: `(1/2)·[[1+i, 1−i], [1−i, 1+i]]`. Its
/// adjoint is represented by an `X1` instruction carrying the dagger flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    I,
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    X1,
    Rx,
    Ry,
    Rz,
    U3,
    Cnot,
    Cz,
    Swap,
    Measure,
    Barrier,
}

impl GateKind {
    pub const ALL: [GateKind; 19] = [
        GateKind::I,
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::X1,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::U3,
        GateKind::Cnot,
        GateKind::Cz,
        GateKind::Swap,
        GateKind::Measure,
        GateKind::Barrier,
    ];

    /// Upper-case keyword, as written in OriginIR and device time tables.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::I => "I",
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::T => "T",
            GateKind::Tdg => "TDG",
            GateKind::X1 => "X1",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::U3 => "U3",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Swap => "SWAP",
            GateKind::Measure => "MEASURE",
            GateKind::Barrier => "BARRIER",
        }
    }

    /// Fixed qubit count, or `None` for BARRIER which takes one or more.
    pub fn arity(self) -> Option<usize> {
        match self {
            GateKind::Cnot | GateKind::Cz | GateKind::Swap => Some(2),
            GateKind::Barrier => None,
            _ => Some(1),
        }
    }

    pub fn num_params(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz => 1,
            GateKind::U3 => 3,
            _ => 0,
        }
    }

    pub fn is_two_qubit(self) -> bool {
        self.arity() == Some(2)
    }

    /// Unitary gates, i.e. everything except MEASURE and BARRIER.
    pub fn is_unitary(self) -> bool {
        !matches!(self, GateKind::Measure | GateKind::Barrier)
    }

    /// Operand order is irrelevant to the gate's action.
    pub fn is_symmetric(self) -> bool {
        matches!(self, GateKind::Cz | GateKind::Swap)
    }

    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownGate(pub String);

impl fmt::Display for UnknownGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown gate `{}`", self.0)
    }
}

impl std::error::Error for UnknownGate {}

impl FromStr for GateKind {
    type Err = UnknownGate;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| UnknownGate(s.to_string()))
    }
}
