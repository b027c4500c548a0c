use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write;

use smallvec::smallvec;

use super::lexing::{strip_comments, Cursor};
use super::{ParseError, ParseErrorKind};
use crate::circuit::{Circuit, GateKind, Instruction, Params, Qubits};

/// OpenQASM 2.0 rendering over a single `q` and `c` register.
///
/// Gate names follow `qelib1.inc`; X1 is written `sx` (or `sxdg` when
/// daggered). The output is accepted by [`import_qasm2`] and reproduces the
/// circuit exactly.
pub fn emit_qasm2(circuit: &Circuit) -> String {
    let mut out = String::with_capacity(64 + circuit.size() * 18);
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", circuit.num_qubits());
    if circuit.num_cbits() > 0 {
        let _ = writeln!(out, "creg c[{}];", circuit.num_cbits());
    }
    circuit.visit_flat(|instr| {
        let name = match (instr.kind(), instr.is_dagger()) {
            (GateKind::X1, false) => "sx",
            (GateKind::X1, true) => "sxdg",
            (GateKind::I, _) => "id",
            (GateKind::Cnot, _) => "cx",
            (GateKind::Sdg, _) => "sdg",
            (GateKind::Tdg, _) => "tdg",
            (GateKind::H, _) => "h",
            (GateKind::X, _) => "x",
            (GateKind::Y, _) => "y",
            (GateKind::Z, _) => "z",
            (GateKind::S, _) => "s",
            (GateKind::T, _) => "t",
            (GateKind::Rx, _) => "rx",
            (GateKind::Ry, _) => "ry",
            (GateKind::Rz, _) => "rz",
            (GateKind::U3, _) => "u3",
            (GateKind::Cz, _) => "cz",
            (GateKind::Swap, _) => "swap",
            (GateKind::Measure, _) => "measure",
            (GateKind::Barrier, _) => "barrier",
        };
        out.push_str(name);
        if !instr.params().is_empty() {
            out.push('(');
            for (i, p) in instr.params().iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{p}");
            }
            out.push(')');
        }
        out.push(' ');
        for (i, q) in instr.qubits().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "q[{q}]");
        }
        if let Some(c) = instr.cbit() {
            let _ = write!(out, " -> c[{c}]");
        }
        out.push_str(";\n");
    });
    out
}

#[derive(Debug, Clone, Copy)]
struct Register {
    offset: usize,
    size: usize,
}

/// A statement argument: one register element or a whole register.
#[derive(Debug, Clone, Copy)]
enum Arg {
    One(usize),
    All(Register),
}

impl Arg {
    fn width(self) -> Option<usize> {
        match self {
            Arg::One(_) => None,
            Arg::All(r) => Some(r.size),
        }
    }

    fn at(self, i: usize) -> usize {
        match self {
            Arg::One(idx) => idx,
            Arg::All(r) => r.offset + i,
        }
    }
}

#[derive(Default)]
struct Registers {
    qregs: HashMap<String, Register>,
    cregs: HashMap<String, Register>,
    num_qubits: usize,
    num_cbits: usize,
}

/// Imports the supported OpenQASM 2.0 subset.
///
/// Registers are concatenated into one qubit and one bit index space in
/// declaration order. `gate`, `opaque`, `if` and `reset` are rejected, as is
/// any gate outside the supported table.
pub fn import_qasm2(text: &str) -> Result<Circuit, ParseError> {
    let text = strip_comments(text, true)?;
    let mut regs = Registers::default();
    // Instructions are collected first: register totals are only known once
    // every declaration has been seen.
    let mut pending: Vec<(usize, Instruction)> = Vec::new();
    let mut saw_header = false;

    let mut line = 1;
    for raw in text.split(';') {
        let leading = raw.len() - raw.trim_start().len();
        let stmt_line = line + raw[..leading].matches('\n').count();
        line += raw.matches('\n').count();
        let stmt = raw.trim();
        if stmt.is_empty() {
            continue;
        }
        let err = |kind: ParseErrorKind| ParseError::new(stmt_line, kind);
        let mut cur = Cursor::new(stmt);
        let word = cur
            .ident()
            .ok_or_else(|| err(ParseErrorKind::Malformed(format!("statement `{stmt}`"))))?;

        if !saw_header {
            if word != "OPENQASM" {
                return Err(err(ParseErrorKind::MissingHeader("OPENQASM 2.0")));
            }
            let version = cur.until(&[]);
            if version != "2.0" {
                return Err(err(ParseErrorKind::Unsupported(format!(
                    "OPENQASM version {version}"
                ))));
            }
            saw_header = true;
            continue;
        }

        match word {
            "include" => continue,
            "qreg" | "creg" => declare(&mut regs, word == "qreg", &mut cur).map_err(err)?,
            "gate" | "opaque" | "if" | "reset" | "OPENQASM" => {
                return Err(err(ParseErrorKind::Unsupported(word.to_string())))
            }
            "measure" => {
                let q = arg(&regs, &mut cur, true).map_err(err)?;
                if !cur.eat_str("->") {
                    return Err(err(ParseErrorKind::Malformed("measure statement".into())));
                }
                let c = arg(&regs, &mut cur, false).map_err(err)?;
                expect_end(&mut cur).map_err(err)?;
                for (qs, cbit) in broadcast(&[q], Some(c)).map_err(err)? {
                    pending.push((
                        stmt_line,
                        Instruction::shaped(GateKind::Measure, &qs, &[], cbit)
                            .map_err(|e| err(e.into()))?,
                    ));
                }
            }
            "barrier" => {
                let args = arg_list(&regs, &mut cur).map_err(err)?;
                let qubits: Qubits = args
                    .iter()
                    .flat_map(|a| (0..a.width().unwrap_or(1)).map(move |i| a.at(i)))
                    .collect();
                pending.push((
                    stmt_line,
                    Instruction::shaped(GateKind::Barrier, &qubits, &[], None)
                        .map_err(|e| err(e.into()))?,
                ));
            }
            name => {
                let params = if cur.eat(b'(') {
                    let list = cur.until(b")");
                    if !cur.eat(b')') {
                        return Err(err(ParseErrorKind::Malformed("parameter list".into())));
                    }
                    list.split(',')
                        .map(|e| eval_expr(e.trim()))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(err)?
                } else {
                    Vec::new()
                };
                let (kind, params, dagger) = map_gate(name, &params).map_err(err)?;
                let args = arg_list(&regs, &mut cur).map_err(err)?;
                for (qs, _) in broadcast(&args, None).map_err(err)? {
                    let mut instr =
                        Instruction::shaped(kind, &qs, &params, None).map_err(|e| err(e.into()))?;
                    if dagger {
                        instr = instr.dagger();
                    }
                    pending.push((stmt_line, instr));
                }
            }
        }
    }
    if !saw_header {
        return Err(ParseError::new(
            line,
            ParseErrorKind::MissingHeader("OPENQASM 2.0"),
        ));
    }

    let mut circuit = Circuit::with_capacity(regs.num_qubits, regs.num_cbits, pending.len());
    for (line, instr) in pending {
        circuit
            .check(&instr)
            .map_err(|e| ParseError::new(line, e))?;
        circuit.push_unchecked(instr);
    }
    Ok(circuit)
}

fn declare(
    regs: &mut Registers,
    quantum: bool,
    cur: &mut Cursor<'_>,
) -> Result<(), ParseErrorKind> {
    let malformed = || ParseErrorKind::Malformed("register declaration".into());
    let name = cur.ident().ok_or_else(malformed)?;
    if !cur.eat(b'[') {
        return Err(malformed());
    }
    let size = cur.index().ok_or_else(malformed)?;
    if !cur.eat(b']') || !cur.at_end() {
        return Err(malformed());
    }
    let (map, total) = if quantum {
        (&mut regs.qregs, &mut regs.num_qubits)
    } else {
        (&mut regs.cregs, &mut regs.num_cbits)
    };
    if map.contains_key(name) {
        return Err(ParseErrorKind::Malformed(format!(
            "duplicate register `{name}`"
        )));
    }
    map.insert(
        name.to_string(),
        Register {
            offset: *total,
            size,
        },
    );
    *total += size;
    Ok(())
}

fn arg(regs: &Registers, cur: &mut Cursor<'_>, quantum: bool) -> Result<Arg, ParseErrorKind> {
    let name = cur
        .ident()
        .ok_or_else(|| ParseErrorKind::Malformed("argument".into()))?;
    let map = if quantum { &regs.qregs } else { &regs.cregs };
    let reg = *map
        .get(name)
        .ok_or_else(|| ParseErrorKind::UndeclaredRegister(name.to_string()))?;
    if !cur.eat(b'[') {
        return Ok(Arg::All(reg));
    }
    let idx = cur
        .index()
        .ok_or_else(|| ParseErrorKind::Malformed("register index".into()))?;
    if !cur.eat(b']') {
        return Err(ParseErrorKind::Malformed("register index".into()));
    }
    if idx >= reg.size {
        return Err(ParseErrorKind::Malformed(format!(
            "index {idx} out of range for register `{name}` of size {}",
            reg.size
        )));
    }
    Ok(Arg::One(reg.offset + idx))
}

fn arg_list(regs: &Registers, cur: &mut Cursor<'_>) -> Result<Vec<Arg>, ParseErrorKind> {
    let mut args = vec![arg(regs, cur, true)?];
    while cur.eat(b',') {
        args.push(arg(regs, cur, true)?);
    }
    expect_end(cur)?;
    Ok(args)
}

fn expect_end(cur: &mut Cursor<'_>) -> Result<(), ParseErrorKind> {
    if cur.at_end() {
        Ok(())
    } else {
        Err(ParseErrorKind::Malformed(
            "trailing text in statement".into(),
        ))
    }
}

/// Expands whole-register arguments element-wise.
fn broadcast(
    args: &[Arg],
    cbit: Option<Arg>,
) -> Result<Vec<(Qubits, Option<usize>)>, ParseErrorKind> {
    let widths: Vec<usize> = args
        .iter()
        .chain(cbit.iter())
        .filter_map(|a| a.width())
        .collect();
    let n = match widths.first() {
        None => 1,
        Some(&w) if widths.iter().all(|&x| x == w) => w,
        Some(_) => {
            return Err(ParseErrorKind::Malformed(
                "register arguments of different sizes".into(),
            ))
        }
    };
    Ok((0..n)
        .map(|i| {
            (
                args.iter().map(|a| a.at(i)).collect(),
                cbit.map(|c| c.at(i)),
            )
        })
        .collect())
}

fn map_gate(name: &str, p: &[f64]) -> Result<(GateKind, Params, bool), ParseErrorKind> {
    let (kind, params, dagger): (GateKind, Params, bool) = match (name, p) {
        ("id", []) => (GateKind::I, smallvec![], false),
        ("h", []) => (GateKind::H, smallvec![], false),
        ("x", []) => (GateKind::X, smallvec![], false),
        ("y", []) => (GateKind::Y, smallvec![], false),
        ("z", []) => (GateKind::Z, smallvec![], false),
        ("s", []) => (GateKind::S, smallvec![], false),
        ("sdg", []) => (GateKind::Sdg, smallvec![], false),
        ("t", []) => (GateKind::T, smallvec![], false),
        ("tdg", []) => (GateKind::Tdg, smallvec![], false),
        ("sx", []) => (GateKind::X1, smallvec![], false),
        ("sxdg", []) => (GateKind::X1, smallvec![], true),
        ("rx", [a]) => (GateKind::Rx, smallvec![*a], false),
        ("ry", [a]) => (GateKind::Ry, smallvec![*a], false),
        ("rz" | "u1", [a]) => (GateKind::Rz, smallvec![*a], false),
        ("u2", [phi, lambda]) => (GateKind::U3, smallvec![FRAC_PI_2, *phi, *lambda], false),
        ("u3" | "U", [t, ph, l]) => (GateKind::U3, smallvec![*t, *ph, *l], false),
        ("cx" | "CX", []) => (GateKind::Cnot, smallvec![], false),
        ("cz", []) => (GateKind::Cz, smallvec![], false),
        ("swap", []) => (GateKind::Swap, smallvec![], false),
        (
            "id" | "h" | "x" | "y" | "z" | "s" | "sdg" | "t" | "tdg" | "sx" | "sxdg" | "rx" | "ry"
            | "rz" | "u1" | "u2" | "u3" | "U" | "cx" | "CX" | "cz" | "swap",
            _,
        ) => {
            return Err(ParseErrorKind::Malformed(format!(
                "parameter count for `{name}`"
            )))
        }
        _ => return Err(ParseErrorKind::Unsupported(format!("gate `{name}`"))),
    };
    Ok((kind, params, dagger))
}

/// Decimal literals, `pi`, unary minus, `pi/INT`, `INT*pi` and
/// `INT*pi/INT`.
fn eval_expr(expr: &str) -> Result<f64, ParseErrorKind> {
    let unsupported = || ParseErrorKind::Unsupported(format!("expression `{expr}`"));
    let compact: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let (negate, body) = match compact.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, compact.as_str()),
    };
    let int = |s: &str| -> Result<f64, ParseErrorKind> {
        if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) {
            s.parse::<f64>().map_err(|_| unsupported())
        } else {
            Err(unsupported())
        }
    };
    let value = if body == "pi" {
        PI
    } else if let Some(den) = body.strip_prefix("pi/") {
        PI / int(den)?
    } else if let Some((num, rest)) = body.split_once("*pi") {
        let num = int(num)?;
        match rest.strip_prefix('/') {
            Some(den) => num * PI / int(den)?,
            None if rest.is_empty() => num * PI,
            None => return Err(unsupported()),
        }
    } else if !body.is_empty()
        && body.starts_with(|c: char| c.is_ascii_digit() || c == '.')
        && body
            .bytes()
            .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-'))
    {
        body.parse::<f64>().map_err(|_| unsupported())?
    } else {
        return Err(unsupported());
    };
    Ok(if negate { -value } else { value })
}
