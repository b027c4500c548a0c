use std::fmt::Write;

use smallvec::SmallVec;

use super::lexing::{strip_comments, Cursor};
use super::{ParseError, ParseErrorKind};
use crate::circuit::{Circuit, GateKind, Instruction, Params, Qubits};

/// Canonical OriginIR text for the flattened circuit.
///
/// `QINIT n` and `CREG m` head the document, followed by one statement per
/// instruction. Angles use the shortest decimal that parses back to the
/// same double. A daggered X1 has no keyword of its own and is written as a
/// one-line DAGGER block.
pub fn emit_originir(circuit: &Circuit) -> String {
    let mut out = String::with_capacity(16 + circuit.size() * 16);
    let _ = writeln!(out, "QINIT {}", circuit.num_qubits());
    let _ = writeln!(out, "CREG {}", circuit.num_cbits());
    circuit.visit_flat(|instr| write_instruction(&mut out, instr));
    out
}

fn write_instruction(out: &mut String, instr: &Instruction) {
    if instr.is_dagger() {
        out.push_str("DAGGER\n");
    }
    out.push_str(instr.kind().name());
    out.push(' ');
    for (i, q) in instr.qubits().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "q[{q}]");
    }
    if let Some(c) = instr.cbit() {
        let _ = write!(out, ",c[{c}]");
    }
    if !instr.params().is_empty() {
        out.push_str(",(");
        for (i, p) in instr.params().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{p}");
        }
        out.push(')');
    }
    out.push('\n');
    if instr.is_dagger() {
        out.push_str("ENDDAGGER\n");
    }
}

/// Parses OriginIR text into a flat circuit.
///
/// Accepts everything [`emit_originir`] produces plus indentation, blank
/// lines, `//` and `/* */` comments, CRLF line endings and (nested)
/// `DAGGER` ... `ENDDAGGER` blocks, which are expanded in place.
pub fn parse_originir(text: &str) -> Result<Circuit, ParseError> {
    let text = strip_comments(text, true)?;
    let mut lines = text
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (num_qubits, qinit_line) = header(lines.next(), "QINIT", 1)?;
    let (num_cbits, _) = header(lines.next(), "CREG", qinit_line)?;

    let mut circuit = Circuit::with_capacity(num_qubits, num_cbits, text.len() / 12);
    // Open DAGGER blocks with their opening line numbers.
    let mut blocks: Vec<(usize, Vec<Instruction>)> = Vec::new();

    for (line, stmt) in lines {
        let (keyword, rest) = match stmt.find(|c: char| c.is_ascii_whitespace()) {
            Some(pos) => (&stmt[..pos], &stmt[pos..]),
            None => (stmt, ""),
        };
        match keyword {
            "DAGGER" => {
                expect_empty(rest, line, "DAGGER")?;
                blocks.push((line, Vec::new()));
                continue;
            }
            "ENDDAGGER" => {
                expect_empty(rest, line, "ENDDAGGER")?;
                let (_, block) = blocks
                    .pop()
                    .ok_or_else(|| ParseError::new(line, ParseErrorKind::UnmatchedEndDagger))?;
                let target = match blocks.last_mut() {
                    Some((_, parent)) => parent,
                    None => {
                        for instr in block.iter().rev() {
                            circuit.push_unchecked(instr.resolved(true));
                        }
                        continue;
                    }
                };
                target.extend(block.iter().rev().map(|i| i.resolved(true)));
                continue;
            }
            "CONTROL" | "ENDCONTROL" => {
                return Err(ParseError::new(
                    line,
                    ParseErrorKind::Unsupported("CONTROL blocks".into()),
                ))
            }
            _ => {}
        }
        let kind: GateKind = keyword
            .parse()
            .map_err(|_| ParseError::new(line, ParseErrorKind::UnknownKeyword(keyword.into())))?;
        let (qubits, params, cbit) = parse_operands(kind, rest).map_err(|what| {
            ParseError::new(
                line,
                ParseErrorKind::Malformed(format!("{what} for {kind}")),
            )
        })?;
        let instr = Instruction::shaped(kind, &qubits, &params, cbit)
            .map_err(|e| ParseError::new(line, e))?;
        circuit
            .check(&instr)
            .map_err(|e| ParseError::new(line, e))?;
        match blocks.last_mut() {
            Some(_) if kind == GateKind::Measure => {
                return Err(ParseError::new(line, ParseErrorKind::MeasureInDagger))
            }
            Some((_, block)) => block.push(instr),
            None => circuit.push_unchecked(instr),
        }
    }
    if let Some((open_line, _)) = blocks.first() {
        return Err(ParseError::new(
            *open_line,
            ParseErrorKind::UnterminatedDagger,
        ));
    }
    Ok(circuit)
}

fn header(
    line: Option<(usize, &str)>,
    keyword: &'static str,
    prev_line: usize,
) -> Result<(usize, usize), ParseError> {
    let (line, stmt) =
        line.ok_or_else(|| ParseError::new(prev_line, ParseErrorKind::MissingHeader(keyword)))?;
    let rest = stmt
        .strip_prefix(keyword)
        .filter(|r| r.starts_with(|c: char| c.is_ascii_whitespace()))
        .ok_or_else(|| ParseError::new(line, ParseErrorKind::MissingHeader(keyword)))?;
    let mut cur = Cursor::new(rest);
    match (cur.index(), cur.at_end()) {
        (Some(n), true) => Ok((n, line)),
        _ => Err(ParseError::new(
            line,
            ParseErrorKind::Malformed(format!("{keyword} count")),
        )),
    }
}

fn expect_empty(rest: &str, line: usize, keyword: &str) -> Result<(), ParseError> {
    if rest.trim().is_empty() {
        Ok(())
    } else {
        Err(ParseError::new(
            line,
            ParseErrorKind::Malformed(format!("{keyword} takes no operands")),
        ))
    }
}

fn register_ref(cur: &mut Cursor<'_>, prefix: &str) -> Result<usize, &'static str> {
    if !cur.eat_str(prefix) || !cur.eat(b'[') {
        return Err("operand list");
    }
    let idx = cur.index().ok_or("register index")?;
    if !cur.eat(b']') {
        return Err("operand list");
    }
    Ok(idx)
}

type Operands = (Qubits, Params, Option<usize>);

fn parse_operands(kind: GateKind, rest: &str) -> Result<Operands, &'static str> {
    let mut cur = Cursor::new(rest);
    let mut qubits = Qubits::new();
    let mut cbit = None;
    let mut params = Params::new();

    qubits.push(register_ref(&mut cur, "q")?);
    loop {
        if !cur.eat(b',') {
            break;
        }
        match cur.peek() {
            Some(b'q') => qubits.push(register_ref(&mut cur, "q")?),
            Some(b'c') if kind == GateKind::Measure && cbit.is_none() => {
                cbit = Some(register_ref(&mut cur, "c")?)
            }
            Some(b'(') => {
                cur.eat(b'(');
                params = parse_params(cur.until(b")"))?;
                if !cur.eat(b')') {
                    return Err("parameter list");
                }
                break;
            }
            _ => return Err("operand list"),
        }
    }
    if !cur.at_end() {
        return Err("trailing text");
    }
    Ok((qubits, params, cbit))
}

fn parse_params(list: &str) -> Result<Params, &'static str> {
    let mut params: Params = SmallVec::new();
    for item in list.split(',') {
        let item = item.trim();
        // Plain decimals only: no `pi`, no arithmetic, no inf/nan spellings.
        if item.is_empty()
            || !item
                .bytes()
                .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E'))
        {
            return Err("parameter list");
        }
        params.push(item.parse().map_err(|_| "parameter list")?);
    }
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn emit_examples() {
        assert_eq!(
            emit_originir(&ghz3()),
            "QINIT 3\nCREG 3\nH q[0]\nCNOT q[0],q[1]\nCNOT q[1],q[2]\n"
        );
        assert_eq!(emit_originir(&Circuit::new(2, 0)), "QINIT 2\nCREG 0\n");
        let mut c = Circuit::new(1, 0);
        c.append(Instruction::rz(0, std::f64::consts::PI)).unwrap();
        assert_eq!(
            emit_originir(&c),
            "QINIT 1\nCREG 0\nRZ q[0],(3.141592653589793)\n"
        );
    }

    #[test]
    fn emits_measure_barrier_u3() {
        let c = Circuit::from_instructions(
            2,
            1,
            [
                Instruction::u3(1, 0.5, -1.0, 2.0),
                Instruction::barrier(&[0, 1]),
                Instruction::measure(1, 0),
            ],
        )
        .unwrap();
        assert_eq!(
            emit_originir(&c),
            "QINIT 2\nCREG 1\nU3 q[1],(0.5,-1,2)\nBARRIER q[0],q[1]\nMEASURE q[1],c[0]\n"
        );
    }

    #[test]
    fn parse_filters_comments_and_indentation() {
        let c = parse_originir("QINIT 1\nCREG 0\n  // prep\n  H q[0]\n").unwrap();
        assert_eq!(c.flat_instructions(), vec![Instruction::h(0)]);
        let c =
            parse_originir("/* header */QINIT 2\r\n\tCREG 0\r\n\r\nCNOT q[0], q[1] /* x */\r\n")
                .unwrap();
        assert_eq!(c.flat_instructions(), vec![Instruction::cnot(0, 1)]);
    }

    #[test]
    fn parse_dagger_block() {
        let c = parse_originir("QINIT 1\nCREG 0\nDAGGER\nRZ q[0],(0.3)\nENDDAGGER\n").unwrap();
        assert_eq!(c.flat_instructions(), vec![Instruction::rz(0, -0.3)]);

        let nested =
            "QINIT 1\nCREG 0\nDAGGER\nS q[0]\nDAGGER\nT q[0]\nH q[0]\nENDDAGGER\nENDDAGGER\n";
        let c = parse_originir(nested).unwrap();
        // outer reverses [S, H, TDG] -> [T, H, SDG]
        assert_eq!(
            c.flat_instructions(),
            vec![Instruction::t(0), Instruction::h(0), Instruction::sdg(0)]
        );
    }

    #[test]
    fn daggered_x1_round_trips() {
        let mut c = Circuit::new(1, 0);
        c.append(Instruction::x1(0).dagger()).unwrap();
        let text = emit_originir(&c);
        assert_eq!(text, "QINIT 1\nCREG 0\nDAGGER\nX1 q[0]\nENDDAGGER\n");
        assert_eq!(parse_originir(&text).unwrap(), c);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err = parse_originir("QINIT 1\nCREG 0\nH q[1]\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.to_string().contains("qubit index 1 out of range"));

        let err = parse_originir("QINIT 1\nCREG 0\nFOO q[0]\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownKeyword("FOO".into()));

        let err = parse_originir("QINIT 1\nCREG 0\nRZ q[0],(pi)\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Malformed(_)));

        let err = parse_originir("QINIT 1\nCREG 0\nRZ q[0],(0.1\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Malformed(_)));

        let err = parse_originir("QINIT 1\nCREG 0\n/* open\nH q[0]\n").unwrap_err();
        assert_eq!(
            (err.line, err.kind),
            (3, ParseErrorKind::UnterminatedComment)
        );

        let err = parse_originir("QINIT 1\nCREG 0\nDAGGER\nH q[0]\n").unwrap_err();
        assert_eq!(
            (err.line, err.kind),
            (3, ParseErrorKind::UnterminatedDagger)
        );

        let err = parse_originir("QINIT 1\nCREG 0\nENDDAGGER\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnmatchedEndDagger);

        let err =
            parse_originir("QINIT 2\nCREG 0\nCONTROL q[0]\nX q[1]\nENDCONTROL\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Unsupported(_)));

        let err = parse_originir("CREG 0\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MissingHeader("QINIT"));

        let err = parse_originir("QINIT 2\nCREG 0\nh q[0]\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::UnknownKeyword(_)));

        let err = parse_originir("QINIT 2\nCREG 1\nMEASURE q[0],c[1]\n").unwrap_err();
        assert!(err.to_string().contains("classical bit index 1"));
    }
}
