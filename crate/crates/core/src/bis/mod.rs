//! Binary instruction stream (`.bis`).
//!
//! ```text
//! stream  := "OBIS" version:u8 flags:u8 reserved:u16 circuit_count:varint circuit*
//! circuit := num_qubits:varint num_cbits:varint instruction_count:varint record*
//! record  := opcode:u8 operands
//! ```
//!
//! The opcode's high three bits select the record class, the low five bits
//! the gate within the class. Each class has one operand layout:
//!
//! | class | gates                                    | operands                  |
//! |-------|------------------------------------------|---------------------------|
//! | 0     | I H X Y Z S SDG T TDG X1 X1†             | qubit                     |
//! | 1     | RX RY RZ                                 | qubit angle               |
//! | 2     | U3                                       | qubit angle angle angle   |
//! | 3     | CNOT CZ SWAP                             | qubit qubit               |
//! | 4     | MEASURE                                  | qubit cbit                |
//! | 5     | BARRIER                                  | count:varint qubit*       |
//!
//! Indices are 4-octet little-endian integers in the default mode and LEB128
//! varints in compressed mode (flags bit 0). Angles are always raw
//! little-endian IEEE-754 doubles. See `docs/bis-format.md`.

mod stream;
pub mod varint;

use thiserror::Error;

use crate::circuit::{
    visit_element, Circuit, CircuitError, Element, GateKind, Instruction, Operands, Qubits,
};

pub use stream::{StreamDecoder, StreamEncoder};

pub const MAGIC: [u8; 4] = *b"OBIS";
pub const VERSION: u8 = 1;
pub const FLAG_COMPRESSED: u8 = 0x01;
/// Magic, version, flags and reserved octets.
pub const FIXED_HEADER_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BisError {
    #[error("bad magic at offset {offset}")]
    BadMagic { offset: usize },
    #[error("unsupported format version {version} at offset {offset}")]
    UnsupportedVersion { offset: usize, version: u8 },
    #[error("invalid stream header at offset {offset}: {reason}")]
    InvalidHeader { offset: usize, reason: &'static str },
    #[error("truncated record at offset {offset}")]
    Truncated { offset: usize },
    #[error("unknown opcode {opcode:#04x} at offset {offset}")]
    UnknownOpcode { offset: usize, opcode: u8 },
    #[error("varint longer than 5 octets or wider than 32 bits at offset {offset}")]
    VarintOverflow { offset: usize },
    #[error("{count} trailing byte(s) after the last circuit at offset {offset}")]
    TrailingBytes { offset: usize, count: usize },
    #[error("invalid instruction at offset {offset}: {source}")]
    InvalidInstruction {
        offset: usize,
        #[source]
        source: CircuitError,
    },
    #[error("index {0} does not fit in 32 bits")]
    IndexTooLarge(usize),
    #[error("stream already finished")]
    StreamFinished,
}

impl BisError {
    /// Byte offset the error refers to, when it has one.
    pub fn offset(&self) -> Option<usize> {
        match *self {
            BisError::BadMagic { offset }
            | BisError::UnsupportedVersion { offset, .. }
            | BisError::InvalidHeader { offset, .. }
            | BisError::Truncated { offset }
            | BisError::UnknownOpcode { offset, .. }
            | BisError::VarintOverflow { offset }
            | BisError::TrailingBytes { offset, .. }
            | BisError::InvalidInstruction { offset, .. } => Some(offset),
            BisError::IndexTooLarge(_) | BisError::StreamFinished => None,
        }
    }
}

pub const CLASS_ONE_QUBIT: u8 = 0;
pub const CLASS_ROTATION: u8 = 1;
pub const CLASS_U3: u8 = 2;
pub const CLASS_TWO_QUBIT: u8 = 3;
pub const CLASS_MEASURE: u8 = 4;
pub const CLASS_BARRIER: u8 = 5;

const fn op(class: u8, id: u8) -> u8 {
    (class << 5) | id
}

/// Frozen gate-id table. New gates append; ids are never reused.
pub fn opcode(instr: &Instruction) -> u8 {
    match instr.kind() {
        GateKind::I => op(CLASS_ONE_QUBIT, 0),
        GateKind::H => op(CLASS_ONE_QUBIT, 1),
        GateKind::X => op(CLASS_ONE_QUBIT, 2),
        GateKind::Y => op(CLASS_ONE_QUBIT, 3),
        GateKind::Z => op(CLASS_ONE_QUBIT, 4),
        GateKind::S => op(CLASS_ONE_QUBIT, 5),
        GateKind::Sdg => op(CLASS_ONE_QUBIT, 6),
        GateKind::T => op(CLASS_ONE_QUBIT, 7),
        GateKind::Tdg => op(CLASS_ONE_QUBIT, 8),
        GateKind::X1 if instr.is_dagger() => op(CLASS_ONE_QUBIT, 10),
        GateKind::X1 => op(CLASS_ONE_QUBIT, 9),
        GateKind::Rx => op(CLASS_ROTATION, 0),
        GateKind::Ry => op(CLASS_ROTATION, 1),
        GateKind::Rz => op(CLASS_ROTATION, 2),
        GateKind::U3 => op(CLASS_U3, 0),
        GateKind::Cnot => op(CLASS_TWO_QUBIT, 0),
        GateKind::Cz => op(CLASS_TWO_QUBIT, 1),
        GateKind::Swap => op(CLASS_TWO_QUBIT, 2),
        GateKind::Measure => op(CLASS_MEASURE, 0),
        GateKind::Barrier => op(CLASS_BARRIER, 0),
    }
}

/// Inverse of [`opcode`]: kind and dagger flag.
pub fn decode_opcode(opcode: u8) -> Option<(GateKind, bool)> {
    let class = opcode >> 5;
    let id = opcode & 0x1f;
    let kind = match (class, id) {
        (CLASS_ONE_QUBIT, 0) => GateKind::I,
        (CLASS_ONE_QUBIT, 1) => GateKind::H,
        (CLASS_ONE_QUBIT, 2) => GateKind::X,
        (CLASS_ONE_QUBIT, 3) => GateKind::Y,
        (CLASS_ONE_QUBIT, 4) => GateKind::Z,
        (CLASS_ONE_QUBIT, 5) => GateKind::S,
        (CLASS_ONE_QUBIT, 6) => GateKind::Sdg,
        (CLASS_ONE_QUBIT, 7) => GateKind::T,
        (CLASS_ONE_QUBIT, 8) => GateKind::Tdg,
        (CLASS_ONE_QUBIT, 9) => GateKind::X1,
        (CLASS_ONE_QUBIT, 10) => return Some((GateKind::X1, true)),
        (CLASS_ROTATION, 0) => GateKind::Rx,
        (CLASS_ROTATION, 1) => GateKind::Ry,
        (CLASS_ROTATION, 2) => GateKind::Rz,
        (CLASS_U3, 0) => GateKind::U3,
        (CLASS_TWO_QUBIT, 0) => GateKind::Cnot,
        (CLASS_TWO_QUBIT, 1) => GateKind::Cz,
        (CLASS_TWO_QUBIT, 2) => GateKind::Swap,
        (CLASS_MEASURE, 0) => GateKind::Measure,
        (CLASS_BARRIER, 0) => GateKind::Barrier,
        _ => return None,
    };
    Some((kind, false))
}

/// Serializes `circuits` (each flattened) into one stream.
pub fn encode<'a, I>(circuits: I, compressed: bool) -> Result<Vec<u8>, BisError>
where
    I: IntoIterator<Item = &'a Circuit>,
    I::IntoIter: ExactSizeIterator,
{
    let circuits = circuits.into_iter();
    let mut buf = Vec::with_capacity(64);
    write_fixed_header(&mut buf, compressed);
    varint::write(&mut buf, to_u32(circuits.len())?);
    for circuit in circuits {
        write_circuit(&mut buf, circuit, compressed)?;
    }
    Ok(buf)
}

pub(crate) fn write_fixed_header(buf: &mut Vec<u8>, compressed: bool) {
    buf.extend_from_slice(&MAGIC);
    buf.push(VERSION);
    buf.push(if compressed { FLAG_COMPRESSED } else { 0 });
    buf.extend_from_slice(&[0, 0]);
}

fn to_u32(value: usize) -> Result<u32, BisError> {
    u32::try_from(value).map_err(|_| BisError::IndexTooLarge(value))
}

pub(crate) fn write_circuit(
    buf: &mut Vec<u8>,
    circuit: &Circuit,
    compressed: bool,
) -> Result<(), BisError> {
    let count = circuit.size();
    varint::write(buf, to_u32(circuit.num_qubits())?);
    varint::write(buf, to_u32(circuit.num_cbits())?);
    varint::write(buf, to_u32(count)?);
    buf.reserve(count * if compressed { 4 } else { 9 });

    for element in circuit.body() {
        match element {
            Element::Gate(instr) if instr.is_resolved() => {
                write_instruction(buf, instr, compressed)
            }
            _ => visit_element(element, &mut |instr| {
                write_instruction(buf, instr, compressed)
            }),
        }
    }
    Ok(())
}

#[inline]
fn write_instruction(buf: &mut Vec<u8>, instr: &Instruction, compressed: bool) {
    buf.push(opcode(instr));
    match instr.operands() {
        Operands::One(_, q) => write_index(buf, *q, compressed),
        Operands::Two(_, [a, b]) | Operands::Measure(_, a, b) => {
            write_index(buf, *a, compressed);
            write_index(buf, *b, compressed);
        }
        Operands::Angle(_, q, angle) => {
            write_index(buf, *q, compressed);
            buf.extend_from_slice(&angle.to_le_bytes());
        }
        Operands::U3(_, q, angles) => {
            write_index(buf, *q, compressed);
            for angle in angles.iter() {
                buf.extend_from_slice(&angle.to_le_bytes());
            }
        }
        Operands::Barrier(_, qubits) => {
            varint::write(buf, qubits.len() as u32);
            for &q in qubits.iter() {
                write_index(buf, q, compressed);
            }
        }
    }
}

// Register sizes fit 32 bits, so every in-range index does too.
#[inline(always)]
fn write_index(buf: &mut Vec<u8>, index: usize, compressed: bool) {
    let index = index as u32;
    if !compressed {
        buf.extend_from_slice(&index.to_le_bytes());
    } else if index < 0x80 {
        buf.push(index as u8);
    } else {
        varint::write(buf, index);
    }
}

/// Decodes a complete stream. Any byte sequence yields either the circuits
/// or a [`BisError`] carrying the offending offset.
pub fn decode(bytes: &[u8]) -> Result<Vec<Circuit>, BisError> {
    let mut r = Reader::new(bytes, 0);
    let (compressed, count) = r.stream_header()?;
    // Every circuit record is at least three octets.
    let mut circuits = Vec::with_capacity((count as usize).min(r.remaining() / 3));
    for _ in 0..count {
        let (mut circuit, n) = r.circuit_header(compressed)?;
        for _ in 0..n {
            let instr = r.instruction(compressed, &circuit)?;
            circuit.push_unchecked(instr);
        }
        circuits.push(circuit);
    }
    if r.remaining() > 0 {
        return Err(BisError::TrailingBytes {
            offset: r.offset(),
            count: r.remaining(),
        });
    }
    Ok(circuits)
}

/// Cursor over a byte slice whose first byte sits at absolute offset `base`.
pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    base: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8], base: usize) -> Self {
        Reader { buf, pos: 0, base }
    }

    pub fn offset(&self) -> usize {
        self.base + self.pos
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn rewind(&mut self, pos: usize) {
        debug_assert!(pos <= self.pos);
        self.pos = pos;
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    #[inline]
    fn take(&mut self, n: usize, record: usize) -> Result<&'a [u8], BisError> {
        if self.remaining() < n {
            return Err(BisError::Truncated { offset: record });
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    #[inline]
    fn varint(&mut self, record: usize) -> Result<u32, BisError> {
        match varint::read(&self.buf[self.pos..]) {
            Ok((value, len)) => {
                self.pos += len;
                Ok(value)
            }
            Err(varint::ReadError::Incomplete) => Err(BisError::Truncated { offset: record }),
            Err(varint::ReadError::Overflow) => Err(BisError::VarintOverflow {
                offset: self.offset(),
            }),
        }
    }

    #[inline]
    fn index(&mut self, compressed: bool, record: usize) -> Result<usize, BisError> {
        if compressed {
            self.varint(record).map(|v| v as usize)
        } else {
            let b = self.take(4, record)?;
            Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
        }
    }

    /// Returns the compression flag and the declared circuit count.
    pub fn stream_header(&mut self) -> Result<(bool, u32), BisError> {
        let start = self.offset();
        let fixed = self.take(FIXED_HEADER_LEN, start)?;
        if fixed[..4] != MAGIC {
            return Err(BisError::BadMagic { offset: start });
        }
        if fixed[4] != VERSION {
            return Err(BisError::UnsupportedVersion {
                offset: start + 4,
                version: fixed[4],
            });
        }
        if fixed[5] & !FLAG_COMPRESSED != 0 {
            return Err(BisError::InvalidHeader {
                offset: start + 5,
                reason: "unknown flag bits",
            });
        }
        if fixed[6] != 0 || fixed[7] != 0 {
            return Err(BisError::InvalidHeader {
                offset: start + 6,
                reason: "reserved octets must be zero",
            });
        }
        let count = self.varint(start)?;
        Ok((fixed[5] & FLAG_COMPRESSED != 0, count))
    }

    /// Reads a circuit record header and returns an empty circuit with
    /// capacity for the declared instructions, and that count.
    pub fn circuit_header(&mut self, compressed: bool) -> Result<(Circuit, u32), BisError> {
        let start = self.offset();
        let qubits = self.varint(start)? as usize;
        let cbits = self.varint(start)? as usize;
        let count = self.varint(start)?;
        let min_record = if compressed { 2 } else { 5 };
        let capacity = (count as usize).min(self.remaining() / min_record);
        Ok((Circuit::with_capacity(qubits, cbits, capacity), count))
    }

    /// Single-octet varints and in-bounds fixed fields take the fast path.
    #[inline(always)]
    fn index_fast(&mut self, compressed: bool, record: usize) -> Result<usize, BisError> {
        if compressed {
            if let Some(&b) = self.buf.get(self.pos) {
                if b < 0x80 {
                    self.pos += 1;
                    return Ok(b as usize);
                }
            }
            self.varint(record).map(|v| v as usize)
        } else {
            match self.buf.get(self.pos..self.pos + 4) {
                Some(b) => {
                    self.pos += 4;
                    Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
                }
                None => Err(BisError::Truncated { offset: record }),
            }
        }
    }

    #[inline(always)]
    fn angle(&mut self, record: usize) -> Result<f64, BisError> {
        match self.buf.get(self.pos..self.pos + 8) {
            Some(b) => {
                self.pos += 8;
                let angle = f64::from_le_bytes(b.try_into().expect("eight octets"));
                if !angle.is_finite() {
                    return Err(BisError::InvalidInstruction {
                        offset: record,
                        source: CircuitError::NonFiniteAngle(angle),
                    });
                }
                Ok(angle)
            }
            None => Err(BisError::Truncated { offset: record }),
        }
    }

    /// Reads one instruction record and validates it against `circuit`'s
    /// registers.
    #[inline]
    pub fn instruction(
        &mut self,
        compressed: bool,
        circuit: &Circuit,
    ) -> Result<Instruction, BisError> {
        let start = self.offset();
        let Some(&opcode) = self.buf.get(self.pos) else {
            return Err(BisError::Truncated { offset: start });
        };
        let (kind, dagger) = decode_opcode(opcode).ok_or(BisError::UnknownOpcode {
            offset: start,
            opcode,
        })?;
        self.pos += 1;
        let class = opcode >> 5;
        if class == CLASS_BARRIER || class == CLASS_MEASURE {
            return self.rare_instruction(compressed, circuit, kind, start);
        }
        let n = circuit.num_qubits();
        let q0 = self.index_fast(compressed, start)?;
        let instr = if class == CLASS_TWO_QUBIT {
            let q1 = self.index_fast(compressed, start)?;
            if q0 >= n || q1 >= n {
                return Err(out_of_range(if q0 >= n { q0 } else { q1 }, n, start));
            }
            if q0 == q1 {
                return Err(BisError::InvalidInstruction {
                    offset: start,
                    source: CircuitError::DuplicateOperand { kind, qubit: q0 },
                });
            }
            Instruction::with_operands(kind, |h| Operands::Two(h, [q0, q1]))
        } else {
            if q0 >= n {
                return Err(out_of_range(q0, n, start));
            }
            match class {
                CLASS_ROTATION => {
                    let angle = self.angle(start)?;
                    Instruction::with_operands(kind, |h| Operands::Angle(h, q0, angle))
                }
                CLASS_U3 => {
                    let angles = [self.angle(start)?, self.angle(start)?, self.angle(start)?];
                    Instruction::with_operands(kind, |h| Operands::U3(h, q0, Box::new(angles)))
                }
                _ => Instruction::with_operands(kind, |h| Operands::One(h, q0)),
            }
        };
        Ok(if dagger { instr.dagger() } else { instr })
    }

    #[cold]
    fn rare_instruction(
        &mut self,
        compressed: bool,
        circuit: &Circuit,
        kind: GateKind,
        start: usize,
    ) -> Result<Instruction, BisError> {
        let mut qubits = Qubits::new();
        let mut cbit = None;
        if kind == GateKind::Barrier {
            let n = self.varint(start)? as usize;
            let min_len = if compressed { n } else { n.saturating_mul(4) };
            if self.remaining() < min_len {
                return Err(BisError::Truncated { offset: start });
            }
            for _ in 0..n {
                qubits.push(self.index(compressed, start)?);
            }
        } else {
            qubits.push(self.index(compressed, start)?);
            cbit = Some(self.index(compressed, start)?);
        }
        let instr = Instruction::shaped(kind, &qubits, &[], cbit).map_err(|source| {
            BisError::InvalidInstruction {
                offset: start,
                source,
            }
        })?;
        check_operands(circuit, &instr).map_err(|source| BisError::InvalidInstruction {
            offset: start,
            source,
        })?;
        Ok(instr)
    }
}

#[cold]
fn out_of_range(index: usize, count: usize, offset: usize) -> BisError {
    BisError::InvalidInstruction {
        offset,
        source: CircuitError::QubitOutOfRange { index, count },
    }
}

/// Range and distinctness checks; record shape is fixed by the opcode.
fn check_operands(circuit: &Circuit, instr: &Instruction) -> Result<(), CircuitError> {
    let count = circuit.num_qubits();
    let qubits = instr.qubits();
    for (i, &q) in qubits.iter().enumerate() {
        if q >= count {
            return Err(CircuitError::QubitOutOfRange { index: q, count });
        }
        if qubits[..i].contains(&q) {
            return Err(CircuitError::DuplicateOperand {
                kind: instr.kind(),
                qubit: q,
            });
        }
    }
    if qubits.is_empty() {
        return Err(CircuitError::Arity {
            kind: instr.kind(),
            expected: 1,
            found: 0,
        });
    }
    match instr.cbit() {
        Some(c) if c >= circuit.num_cbits() => Err(CircuitError::CbitOutOfRange {
            index: c,
            count: circuit.num_cbits(),
        }),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn ghz3() -> Circuit {
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
    fn empty_stream_is_nine_octets() {
        let bytes = encode(&[], false).unwrap();
        assert_eq!(bytes, b"OBIS\x01\x00\x00\x00\x00");
        let bytes = encode(&[], true).unwrap();
        assert_eq!(bytes, b"OBIS\x01\x01\x00\x00\x00");
        assert!(decode(&bytes).unwrap().is_empty());
    }

    #[test]
    fn single_h_golden() {
        let mut c = Circuit::new(1, 0);
        c.append(Instruction::h(0)).unwrap();
        let bytes = encode([&c], false).unwrap();
        assert_eq!(
            bytes,
            [b'O', b'B', b'I', b'S', 1, 0, 0, 0, 1, 1, 0, 1, 0x01, 0, 0, 0, 0]
        );
        let bytes = encode([&c], true).unwrap();
        assert_eq!(
            bytes,
            [b'O', b'B', b'I', b'S', 1, 1, 0, 0, 1, 1, 0, 1, 0x01, 0]
        );
    }

    #[test]
    fn every_class_golden() {
        let c = Circuit::from_instructions(
            2,
            1,
            [
                Instruction::rz(1, 0.5),
                Instruction::cnot(0, 1),
                Instruction::x1(0),
                Instruction::x1(1).dagger(),
                Instruction::barrier(&[0, 1]),
                Instruction::measure(1, 0),
            ],
        )
        .unwrap();
        let hex = |bytes: Vec<u8>| {
            bytes
                .iter()
                .map(|b| format!("{b:02x}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        assert_eq!(
            hex(encode([&c], false).unwrap()),
            "4f 42 49 53 01 00 00 00 01 02 01 06 \
             22 01 00 00 00 00 00 00 00 00 00 e0 3f \
             60 00 00 00 00 01 00 00 00 \
             09 00 00 00 00 \
             0a 01 00 00 00 \
             a0 02 00 00 00 00 01 00 00 00 \
             80 01 00 00 00 00 00 00 00"
        );
        assert_eq!(
            hex(encode([&c], true).unwrap()),
            "4f 42 49 53 01 01 00 00 01 02 01 06 \
             22 01 00 00 00 00 00 00 e0 3f 60 00 01 09 00 0a 01 a0 02 00 01 80 01 00"
        );
    }

    #[test]
    fn opcode_table_is_a_bijection() {
        let mut seen = std::collections::HashSet::new();
        for kind in GateKind::ALL {
            let instr = match kind.num_params() {
                1 => Instruction::shaped(kind, &[0], &[0.0], None).unwrap(),
                3 => Instruction::u3(0, 0.0, 0.0, 0.0),
                _ if kind == GateKind::Measure => Instruction::measure(0, 0),
                _ if kind.is_two_qubit() => Instruction::shaped(kind, &[0, 1], &[], None).unwrap(),
                _ => Instruction::shaped(kind, &[0], &[], None).unwrap(),
            };
            let code = opcode(&instr);
            assert!(seen.insert(code));
            assert_eq!(decode_opcode(code), Some((kind, false)));
        }
        let x1dg = opcode(&Instruction::x1(0).dagger());
        assert!(seen.insert(x1dg));
        assert_eq!(decode_opcode(x1dg), Some((GateKind::X1, true)));
        assert_eq!(decode_opcode(0x1f), None);
        assert_eq!(decode_opcode(0xe0), None);
    }

    #[test]
    fn round_trip_both_modes() {
        let mut c = Circuit::new(4, 2);
        for instr in [
            Instruction::u3(3, 0.1, -2.5, 1e-300),
            Instruction::x1(1).dagger(),
            Instruction::rz(2, -0.0),
            Instruction::swap(3, 0),
            Instruction::barrier(&[2, 0, 3]),
            Instruction::measure(3, 1),
        ] {
            c.append(instr).unwrap();
        }
        for compressed in [false, true] {
            let bytes = encode([&ghz3(), &c], compressed).unwrap();
            assert_eq!(decode(&bytes).unwrap(), vec![ghz3(), c.clone()]);
        }
    }

    #[test]
    fn nested_circuits_are_flattened() {
        let inner = Arc::new(ghz3());
        let mut outer = Circuit::new(3, 3);
        outer.append_dagger(inner).unwrap();
        let bytes = encode([&outer], true).unwrap();
        assert_eq!(decode(&bytes).unwrap(), vec![outer.flatten()]);
    }

    #[test]
    fn non_finite_angles_are_rejected() {
        let mut c = Circuit::new(1, 0);
        c.append(Instruction::rz(0, 1.0)).unwrap();
        let mut bytes = encode([&c], true).unwrap();
        let at = bytes.len() - 8;
        bytes[at..].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(
            decode(&bytes),
            Err(BisError::InvalidInstruction {
                source: CircuitError::NonFiniteAngle(_),
                ..
            })
        ));
    }

    #[test]
    fn compressed_is_smaller() {
        let bytes_c = encode([&ghz3()], true).unwrap();
        let bytes_u = encode([&ghz3()], false).unwrap();
        assert!(bytes_c.len() < bytes_u.len());
    }

    #[test]
    fn named_errors_with_offsets() {
        let good = encode([&ghz3()], false).unwrap();

        let mut bad = good.clone();
        bad[0] = b'X';
        assert_eq!(decode(&bad), Err(BisError::BadMagic { offset: 0 }));

        let mut bad = good.clone();
        bad[4] = 2;
        assert_eq!(
            decode(&bad),
            Err(BisError::UnsupportedVersion {
                offset: 4,
                version: 2
            })
        );

        let mut bad = good.clone();
        bad[12] = 0xff;
        assert_eq!(
            decode(&bad),
            Err(BisError::UnknownOpcode {
                offset: 12,
                opcode: 0xff
            })
        );

        let mut bad = good.clone();
        bad.push(0);
        assert_eq!(
            decode(&bad),
            Err(BisError::TrailingBytes {
                offset: good.len(),
                count: 1
            })
        );

        let mut bad = good.clone();
        bad[8] = 0x80;
        bad.splice(9..9, [0x80, 0x80, 0x80, 0x80, 0x80]);
        assert_eq!(decode(&bad), Err(BisError::VarintOverflow { offset: 8 }));

        // qubit index 7 in a 3-qubit circuit
        let mut bad = good.clone();
        bad[13] = 7;
        assert!(matches!(
            decode(&bad),
            Err(BisError::InvalidInstruction { offset: 12, .. })
        ));
    }

    #[test]
    fn truncation_reports_record_start() {
        let mut c = Circuit::new(1, 0);
        c.append(Instruction::rz(0, 0.5)).unwrap();
        let bytes = encode([&c], true).unwrap();
        // header 9, circuit header 3, record at 12: opcode, qubit, 8 angle octets
        assert_eq!(bytes.len(), 22);
        for cut in 12..bytes.len() {
            assert_eq!(
                decode(&bytes[..cut]),
                Err(BisError::Truncated { offset: 12 })
            );
        }
        for cut in 9..12 {
            assert_eq!(
                decode(&bytes[..cut]),
                Err(BisError::Truncated { offset: 9 })
            );
        }
        for cut in 0..9 {
            assert_eq!(
                decode(&bytes[..cut]),
                Err(BisError::Truncated { offset: 0 })
            );
        }
    }

    #[test]
    fn huge_declared_counts_do_not_allocate() {
        let mut bytes = b"OBIS\x01\x01\x00\x00".to_vec();
        varint::write(&mut bytes, u32::MAX);
        varint::write(&mut bytes, 3);
        varint::write(&mut bytes, 0);
        varint::write(&mut bytes, u32::MAX);
        assert!(matches!(decode(&bytes), Err(BisError::Truncated { .. })));

        let mut bytes = b"OBIS\x01\x01\x00\x00\x01\x02\x00\x01\xa0".to_vec();
        varint::write(&mut bytes, u32::MAX);
        assert_eq!(decode(&bytes), Err(BisError::Truncated { offset: 12 }));
    }
}
