//! Wire-per-line ASCII rendering. The glyph layout is not stable.

use qcircuit::{Circuit, GateKind, Instruction};

fn label(instr: &Instruction) -> String {
    let mut name = instr.kind().name().to_string();
    if instr.is_dagger() {
        name.push_str("dg");
    }
    match instr.kind() {
        GateKind::Measure => format!("M{}", instr.cbit().unwrap_or(0)),
        _ if instr.params().is_empty() => name,
        _ => {
            let params: Vec<String> = instr.params().iter().map(|p| format!("{p:.3}")).collect();
            format!("{name}({})", params.join(","))
        }
    }
}

/// Text for qubit `q` in the column of `instr`.
fn cell(instr: &Instruction, q: usize) -> String {
    let qs = instr.qubits();
    let role = qs.iter().position(|&x| x == q);
    match (instr.kind(), role) {
        (GateKind::Barrier, Some(_)) => "||".into(),
        (GateKind::Cnot, Some(0)) | (GateKind::Cz, Some(_)) => "*".into(),
        (GateKind::Cnot, Some(_)) => "(+)".into(),
        (GateKind::Swap, Some(_)) => "x".into(),
        (_, Some(_)) => format!("[{}]", label(instr)),
        (_, None) => "|".into(),
    }
}

pub fn draw(circuit: &Circuit) -> String {
    let n = circuit.num_qubits();
    // Greedy columns: an instruction goes right of everything its span touches.
    let mut columns: Vec<Vec<Instruction>> = Vec::new();
    let mut next = vec![0usize; n];
    for instr in circuit.flat_instructions() {
        let qs = instr.qubits();
        let lo = *qs.iter().min().unwrap_or(&0);
        let hi = *qs.iter().max().unwrap_or(&0);
        let col = (lo..=hi).map(|q| next[q]).max().unwrap_or(0);
        for slot in &mut next[lo..=hi] {
            *slot = col + 1;
        }
        if col == columns.len() {
            columns.push(Vec::new());
        }
        columns[col].push(instr);
    }

    let prefix: Vec<String> = (0..n).map(|q| format!("q{q}: ")).collect();
    let pad = prefix.iter().map(String::len).max().unwrap_or(0);
    let mut lines: Vec<String> = prefix.iter().map(|p| format!("{p:<pad$}-")).collect();
    for column in &columns {
        let mut cells = vec![String::new(); n];
        for instr in column {
            let qs = instr.qubits();
            let lo = *qs.iter().min().unwrap_or(&0);
            let hi = *qs.iter().max().unwrap_or(&0);
            for (q, c) in cells.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *c = cell(instr, q);
            }
        }
        let width = cells.iter().map(String::len).max().unwrap_or(0);
        for (line, c) in lines.iter_mut().zip(&cells) {
            let left = (width - c.len()) / 2;
            let right = width - c.len() - left;
            line.push_str(&"-".repeat(left));
            line.push_str(c);
            line.push_str(&"-".repeat(right + 1));
        }
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}
