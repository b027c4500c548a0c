//! Dense statevector simulation, used as a correctness oracle.
//!
//! Qubit 0 is the least significant bit of a basis index. X1 is the
//! square root of X, `(1/2)[[1+i, 1-i], [1-i, 1+i]]`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::circuit::{Circuit, GateKind, Instruction};
use crate::transpiler::Layout;

/// Widest circuit the oracle will simulate.
pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("{0} qubits exceeds the simulator limit of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("MEASURE cannot be simulated")]
    MeasurePresent,
    #[error("state has {state} qubits but the circuit needs {circuit}")]
    DimensionMismatch { state: usize, circuit: usize },
    #[error("layouts must cover the {0} physical qubits of the routed circuit")]
    LayoutMismatch(usize),
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>`.
    pub fn zero(num_qubits: usize) -> Result<Self, SimError> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self, SimError> {
        if num_qubits > MAX_QUBITS {
            return Err(SimError::TooManyQubits(num_qubits));
        }
        let mut amps = vec![ZERO; 1 << num_qubits];
        amps[index] = ONE;
        Ok(Statevector { num_qubits, amps })
    }

    /// Normalized complex Gaussian vector.
    pub fn random(num_qubits: usize, rng: &mut impl rand::Rng) -> Result<Self, SimError> {
        if num_qubits > MAX_QUBITS {
            return Err(SimError::TooManyQubits(num_qubits));
        }
        let mut amps: Vec<Complex64> = (0..1usize << num_qubits)
            .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Statevector { num_qubits, amps })
    }

    /// Panics unless `amps.len()` is a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Self {
        assert!(amps.len().is_power_of_two(), "amplitude count must be 2^n");
        Statevector {
            num_qubits: amps.len().trailing_zeros() as usize,
            amps,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Moves bit `i` of every basis index to bit `map[i]`, widening to
    /// `width` qubits (new qubits start in `|0>`).
    pub fn permuted(&self, map: &[usize], width: usize) -> Statevector {
        debug_assert_eq!(map.len(), self.num_qubits);
        let mut amps = vec![ZERO; 1 << width];
        for (index, &a) in self.amps.iter().enumerate() {
            let mut target = 0;
            for (bit, &to) in map.iter().enumerate() {
                target |= ((index >> bit) & 1) << to;
            }
            amps[target] = a;
        }
        Statevector {
            num_qubits: width,
            amps,
        }
    }

    pub fn apply(&mut self, instr: &Instruction) -> Result<(), SimError> {
        let q = instr.qubits();
        match instr.kind() {
            GateKind::Measure => return Err(SimError::MeasurePresent),
            GateKind::Barrier | GateKind::I => {}
            GateKind::Cnot => {
                let (c, t) = (1 << q[0], 1 << q[1]);
                for i in 0..self.amps.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
            GateKind::Cz => {
                let mask = (1 << q[0]) | (1 << q[1]);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a = -*a;
                    }
                }
            }
            GateKind::Swap => {
                let (a, b) = (1 << q[0], 1 << q[1]);
                for i in 0..self.amps.len() {
                    if i & a != 0 && i & b == 0 {
                        self.amps.swap(i, i ^ a ^ b);
                    }
                }
            }
            _ => {
                let m = single_qubit_matrix(instr).expect("one-qubit unitary");
                let bit = 1 << q[0];
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                        self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                        self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Matrix of a one-qubit gate, or `None` for anything else.
pub fn single_qubit_matrix(instr: &Instruction) -> Option<Matrix2> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let p = instr.params();
    let m = match instr.kind() {
        GateKind::I => [[ONE, ZERO], [ZERO, ONE]],
        GateKind::H => {
            let h = c(FRAC_1_SQRT_2, 0.0);
            [[h, h], [h, -h]]
        }
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::Y => [[ZERO, -I], [I, ZERO]],
        GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
        GateKind::S => [[ONE, ZERO], [ZERO, I]],
        GateKind::Sdg => [[ONE, ZERO], [ZERO, -I]],
        GateKind::T => [[ONE, ZERO], [ZERO, c(FRAC_1_SQRT_2, FRAC_1_SQRT_2)]],
        GateKind::Tdg => [[ONE, ZERO], [ZERO, c(FRAC_1_SQRT_2, -FRAC_1_SQRT_2)]],
        GateKind::X1 if instr.is_dagger() => {
            [[c(0.5, -0.5), c(0.5, 0.5)], [c(0.5, 0.5), c(0.5, -0.5)]]
        }
        GateKind::X1 => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
        GateKind::Rx => {
            let (s, co) = (p[0] / 2.0).sin_cos();
            [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
        }
        GateKind::Ry => {
            let (s, co) = (p[0] / 2.0).sin_cos();
            [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
        }
        GateKind::Rz => [
            [Complex64::from_polar(1.0, -p[0] / 2.0), ZERO],
            [ZERO, Complex64::from_polar(1.0, p[0] / 2.0)],
        ],
        GateKind::U3 => {
            let (theta, phi, lambda) = (p[0], p[1], p[2]);
            let (s, co) = (theta / 2.0).sin_cos();
            [
                [c(co, 0.0), -Complex64::from_polar(s, lambda)],
                [
                    Complex64::from_polar(s, phi),
                    Complex64::from_polar(co, phi + lambda),
                ],
            ]
        }
        _ => return None,
    };
    Some(m)
}

/// Full `2^k × 2^k` matrix (row-major) of a unitary instruction on its own
/// `k` operands, first operand as the low bit.
pub fn instruction_unitary(instr: &Instruction) -> Vec<Complex64> {
    let k = instr.qubits().len();
    let dim = 1 << k;
    let local = instr.with_qubits(&(0..k).collect::<Vec<_>>());
    let mut out = vec![ZERO; dim * dim];
    for col in 0..dim {
        let mut sv = Statevector::basis(k, col).expect("small");
        sv.apply(&local).expect("unitary");
        for (row, a) in sv.amps.iter().enumerate() {
            out[row * dim + col] = *a;
        }
    }
    out
}

fn check_width(circuit: &Circuit) -> Result<(), SimError> {
    if circuit.num_qubits() > MAX_QUBITS {
        Err(SimError::TooManyQubits(circuit.num_qubits()))
    } else {
        Ok(())
    }
}

/// Runs `circuit` (flattened) on `initial`.
pub fn simulate(circuit: &Circuit, initial: &Statevector) -> Result<Statevector, SimError> {
    check_width(circuit)?;
    if initial.num_qubits != circuit.num_qubits() {
        return Err(SimError::DimensionMismatch {
            state: initial.num_qubits,
            circuit: circuit.num_qubits(),
        });
    }
    let mut state = initial.clone();
    let mut result = Ok(());
    circuit.visit_flat(|instr| {
        if result.is_ok() {
            result = state.apply(instr);
        }
    });
    result.map(|()| state)
}

/// `|<a|b>|`.
pub fn fidelity_up_to_phase(a: &Statevector, b: &Statevector) -> Result<f64, SimError> {
    if a.num_qubits != b.num_qubits {
        return Err(SimError::DimensionMismatch {
            state: a.num_qubits,
            circuit: b.num_qubits,
        });
    }
    let inner: Complex64 = a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum();
    Ok(inner.norm())
}

/// Checks that `routed`, run on physical wires, implements `original`.
///
/// Each trial prepares a random logical state, places logical qubit `l` on
/// physical `initial.physical(l)` (unused physical qubits in `|0>`), runs
/// `routed`, reads logical `l` back from `final_layout.physical(l)` and
/// compares with `original`'s output.
pub fn equivalent(
    original: &Circuit,
    routed: &Circuit,
    initial: &Layout,
    final_layout: &Layout,
    trials: usize,
    seed: u64,
) -> Result<bool, SimError> {
    check_width(original)?;
    check_width(routed)?;
    let n_log = original.num_qubits();
    let n_phys = routed.num_qubits();
    if initial.len() != n_phys || final_layout.len() != n_phys || n_log > n_phys {
        return Err(SimError::LayoutMismatch(n_phys));
    }
    let place: Vec<usize> = (0..n_log).map(|l| initial.physical(l)).collect();
    // Physical bit p goes back to logical bit final.logical(p).
    let read_back: Vec<usize> = (0..n_phys).map(|p| final_layout.logical(p)).collect();
    let identity: Vec<usize> = (0..n_log).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let psi = Statevector::random(n_log, &mut rng)?;
        let expected = simulate(original, &psi)?.permuted(&identity, n_phys);
        let got = simulate(routed, &psi.permuted(&place, n_phys))?.permuted(&read_back, n_phys);
        if fidelity_up_to_phase(&expected, &got)? < 1.0 - 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::tests::ghz3;
    use std::sync::Arc;

    fn run(n: usize, instrs: &[Instruction], index: usize) -> Statevector {
        let c = Circuit::from_instructions(n, 0, instrs.iter().cloned()).unwrap();
        simulate(&c, &Statevector::basis(n, index).unwrap()).unwrap()
    }

    fn close(a: Complex64, re: f64, im: f64) -> bool {
        (a - Complex64::new(re, im)).norm() < 1e-12
    }

    #[test]
    fn hadamard_on_zero() {
        let s = run(1, &[Instruction::h(0)], 0);
        assert!(close(s.amps[0], FRAC_1_SQRT_2, 0.0));
        assert!(close(s.amps[1], FRAC_1_SQRT_2, 0.0));
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        // q0 = 1 is index 0b01; expect 0b11
        let s = run(2, &[Instruction::cnot(0, 1)], 0b01);
        assert!(close(s.amps[0b11], 1.0, 0.0));
        let s = run(2, &[Instruction::cnot(0, 1)], 0b10);
        assert!(close(s.amps[0b10], 1.0, 0.0));
    }

    #[test]
    fn x1_squared_is_x() {
        let s = run(1, &[Instruction::x1(0), Instruction::x1(0)], 0);
        assert!(close(s.amps[1], 1.0, 0.0));
        let s = run(1, &[Instruction::x1(0), Instruction::x1(0).dagger()], 0);
        assert!(close(s.amps[0], 1.0, 0.0));
    }

    #[test]
    fn fidelity_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = Statevector::random(3, &mut rng).unwrap();
        assert!((fidelity_up_to_phase(&psi, &psi).unwrap() - 1.0).abs() < 1e-12);
        let phase = Complex64::from_polar(1.0, 0.7);
        let rotated = Statevector::from_amplitudes(psi.amps.iter().map(|a| a * phase).collect());
        assert!((fidelity_up_to_phase(&psi, &rotated).unwrap() - 1.0).abs() < 1e-12);
        let z = Statevector::basis(1, 0).unwrap();
        let o = Statevector::basis(1, 1).unwrap();
        assert_eq!(fidelity_up_to_phase(&z, &o).unwrap(), 0.0);
        assert!(fidelity_up_to_phase(&z, &psi).is_err());
    }

    #[test]
    fn every_gate_matrix_is_unitary() {
        let samples = GateKind::ALL
            .into_iter()
            .filter(|k| k.is_unitary())
            .map(|k| match k {
                GateKind::Rx | GateKind::Ry | GateKind::Rz => {
                    Instruction::new(k, &[0], &[0.37], None).unwrap()
                }
                GateKind::U3 => Instruction::u3(0, 0.3, -1.1, 2.4),
                k if k.is_two_qubit() => Instruction::new(k, &[0, 1], &[], None).unwrap(),
                k => Instruction::new(k, &[0], &[], None).unwrap(),
            });
        for instr in samples.chain([Instruction::x1(0).dagger()]) {
            let u = instruction_unitary(&instr);
            let dim = (u.len() as f64).sqrt() as usize;
            for r in 0..dim {
                for c in 0..dim {
                    let dot: Complex64 = (0..dim)
                        .map(|k| u[r * dim + k] * u[c * dim + k].conj())
                        .sum();
                    let want = if r == c { 1.0 } else { 0.0 };
                    assert!((dot - want).norm() < 1e-12, "{instr:?} not unitary");
                }
            }
        }
    }

    #[test]
    fn errors() {
        let mut c = Circuit::new(1, 1);
        c.append(Instruction::measure(0, 0)).unwrap();
        let z = Statevector::zero(1).unwrap();
        assert_eq!(simulate(&c, &z), Err(SimError::MeasurePresent));
        assert_eq!(Statevector::zero(13), Err(SimError::TooManyQubits(13)));
        assert!(matches!(
            simulate(&Circuit::new(2, 0), &z),
            Err(SimError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dagger_composes_to_identity() {
        let mut c = Circuit::new(2, 0);
        for instr in [
            Instruction::u3(0, 0.4, 1.2, -0.8),
            Instruction::x1(1),
            Instruction::cnot(0, 1),
            Instruction::t(1),
            Instruction::ry(0, 2.2),
        ] {
            c.append(instr).unwrap();
        }
        let c = Arc::new(c);
        let mut both = Circuit::new(2, 0);
        both.append_subcircuit(Arc::clone(&c)).unwrap();
        both.append_dagger(c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = Statevector::random(2, &mut rng).unwrap();
        let out = simulate(&both, &psi).unwrap();
        assert!(fidelity_up_to_phase(&psi, &out).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn equivalence_under_identity_and_swap() {
        let c = ghz3();
        let id = Layout::identity(3);
        assert!(equivalent(&c, &c, &id, &id, 4, 0).unwrap());

        // Route CNOT(0,2) on a path by swapping 1 and 2 first.
        let mut original = Circuit::new(3, 0);
        original.append(Instruction::cnot(0, 2)).unwrap();
        let mut routed = Circuit::new(3, 0);
        routed.append(Instruction::swap(1, 2)).unwrap();
        routed.append(Instruction::cnot(0, 1)).unwrap();
        let fin = Layout::from_logical_to_physical(vec![0, 2, 1]).unwrap();
        assert!(equivalent(&original, &routed, &id, &fin, 4, 0).unwrap());

        let mut broken = Circuit::new(3, 0);
        broken.append(Instruction::cnot(0, 1)).unwrap();
        assert!(!equivalent(&original, &broken, &id, &fin, 4, 0).unwrap());
    }
}
