use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TranspileError;
use crate::circuit::{Circuit, GateKind, Instruction};

/// Native gate set targeted by basis translation. MEASURE and BARRIER are
/// accepted by every basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Basis {
    /// Leave gates as they are.
    #[default]
    #[serde(rename = "none")]
    None,
    #[serde(rename = "rz-x1-cz")]
    RzX1Cz,
    #[serde(rename = "rz-rx-cnot")]
    RzRxCnot,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::None, Basis::RzX1Cz, Basis::RzRxCnot];

    pub fn name(self) -> &'static str {
        match self {
            Basis::None => "none",
            Basis::RzX1Cz => "rz-x1-cz",
            Basis::RzRxCnot => "rz-rx-cnot",
        }
    }

    pub fn contains(self, instr: &Instruction) -> bool {
        match instr.kind() {
            GateKind::Measure | GateKind::Barrier => true,
            kind => match self {
                Basis::None => true,
                Basis::RzX1Cz => {
                    matches!(kind, GateKind::Rz | GateKind::Cz)
                        || (kind == GateKind::X1 && !instr.is_dagger())
                }
                Basis::RzRxCnot => matches!(kind, GateKind::Rz | GateKind::Rx | GateKind::Cnot),
            },
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Basis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Basis::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown basis `{s}` (expected none, rz-x1-cz or rz-rx-cnot)"))
    }
}

/// Rewrites every out-of-basis gate. Each rule is exact up to global phase;
/// the table is in `docs/basis-rewrite-table.md`.
pub fn decompose_to_basis(circuit: &Circuit, basis: Basis) -> Result<Circuit, TranspileError> {
    let mut out = Circuit::with_capacity(circuit.num_qubits(), circuit.num_cbits(), circuit.size());
    if let Some(name) = circuit.name() {
        out = out.named(name);
    }
    let mut result = Ok(());
    circuit.visit_flat(|instr| {
        if result.is_ok() {
            result = rewrite(instr, basis, &mut |i| out.push_unchecked(i), 0);
        }
    });
    result.map(|()| out)
}

/// Longest chain of rule applications any gate needs.
const MAX_NESTING: usize = 4;

fn rewrite(
    instr: &Instruction,
    basis: Basis,
    emit: &mut impl FnMut(Instruction),
    nesting: usize,
) -> Result<(), TranspileError> {
    if basis.contains(instr) {
        emit(instr.clone());
        return Ok(());
    }
    let expansion =
        rule(instr, basis)
            .filter(|_| nesting < MAX_NESTING)
            .ok_or(TranspileError::NoRule {
                kind: instr.kind(),
                basis,
            })?;
    for step in &expansion {
        rewrite(step, basis, emit, nesting + 1)?;
    }
    Ok(())
}

/// One rewrite step, in circuit order. Results may still need rewriting.
fn rule(instr: &Instruction, basis: Basis) -> Option<Vec<Instruction>> {
    use Instruction as G;
    let q = instr.qubits();
    let p = instr.params();
    let a = q[0];
    let steps = match (instr.kind(), basis) {
        (_, Basis::None) => return None,
        (GateKind::I, _) => vec![],
        (GateKind::Z, _) => vec![G::rz(a, PI)],
        (GateKind::S, _) => vec![G::rz(a, FRAC_PI_2)],
        (GateKind::Sdg, _) => vec![G::rz(a, -FRAC_PI_2)],
        (GateKind::T, _) => vec![G::rz(a, FRAC_PI_4)],
        (GateKind::Tdg, _) => vec![G::rz(a, -FRAC_PI_4)],
        (GateKind::Swap, _) => vec![G::cnot(a, q[1]), G::cnot(q[1], a), G::cnot(a, q[1])],

        (GateKind::H, Basis::RzX1Cz) => vec![G::rz(a, FRAC_PI_2), G::x1(a), G::rz(a, FRAC_PI_2)],
        (GateKind::X, Basis::RzX1Cz) => vec![G::x1(a), G::x1(a)],
        (GateKind::Y, Basis::RzX1Cz) => vec![G::rz(a, PI), G::x1(a), G::x1(a)],
        (GateKind::X1, Basis::RzX1Cz) => vec![G::rz(a, PI), G::x1(a), G::rz(a, PI)],
        (GateKind::Rx, Basis::RzX1Cz) => vec![G::u3(a, p[0], -FRAC_PI_2, FRAC_PI_2)],
        (GateKind::Ry, Basis::RzX1Cz) => vec![G::u3(a, p[0], 0.0, 0.0)],
        (GateKind::U3, Basis::RzX1Cz) => vec![
            G::rz(a, p[2]),
            G::x1(a),
            G::rz(a, p[0] + PI),
            G::x1(a),
            G::rz(a, p[1] + PI),
        ],
        (GateKind::Cnot, Basis::RzX1Cz) => vec![G::h(q[1]), G::cz(a, q[1]), G::h(q[1])],

        (GateKind::H, Basis::RzRxCnot) => {
            vec![
                G::rz(a, FRAC_PI_2),
                G::rx(a, FRAC_PI_2),
                G::rz(a, FRAC_PI_2),
            ]
        }
        (GateKind::X, Basis::RzRxCnot) => vec![G::rx(a, PI)],
        (GateKind::Y, Basis::RzRxCnot) => vec![G::rz(a, PI), G::rx(a, PI)],
        (GateKind::X1, Basis::RzRxCnot) => {
            vec![G::rx(
                a,
                if instr.is_dagger() {
                    -FRAC_PI_2
                } else {
                    FRAC_PI_2
                },
            )]
        }
        (GateKind::Ry, Basis::RzRxCnot) => {
            vec![G::rz(a, -FRAC_PI_2), G::rx(a, p[0]), G::rz(a, FRAC_PI_2)]
        }
        (GateKind::U3, Basis::RzRxCnot) => vec![G::rz(a, p[2]), G::ry(a, p[0]), G::rz(a, p[1])],
        (GateKind::Cz, Basis::RzRxCnot) => vec![G::h(q[1]), G::cnot(a, q[1]), G::h(q[1])],
        _ => return None,
    };
    Some(steps)
}
