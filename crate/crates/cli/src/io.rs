use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, Context};
use qcircuit::text_ir::{emit_originir, emit_qasm2, import_qasm2, parse_originir};
use qcircuit::{bis, Circuit};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    OriginIr,
    Qasm,
    Bis,
}

impl FromStr for FileFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oir" | "originir" => Ok(FileFormat::OriginIr),
            "qasm" | "qasm2" => Ok(FileFormat::Qasm),
            "bis" => Ok(FileFormat::Bis),
            _ => Err(format!(
                "unknown circuit format `{s}` (expected oir, qasm or bis)"
            )),
        }
    }
}

impl FileFormat {
    /// Explicit choice, else the file extension.
    pub fn resolve(explicit: Option<FileFormat>, path: &Path) -> Result<FileFormat, Failure> {
        if let Some(f) = explicit {
            return Ok(f);
        }
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        ext.parse().map_err(|_| {
            Failure::Usage(format!(
                "cannot infer the format of {} from its extension; pass --format",
                path.display()
            ))
        })
    }
}

pub fn read_circuits(path: &Path, format: FileFormat) -> Result<Vec<Circuit>, Failure> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let context = || format!("{}", path.display());
    let circuits = match format {
        FileFormat::Bis => bis::decode(&bytes).with_context(context)?,
        FileFormat::OriginIr | FileFormat::Qasm => {
            let text = String::from_utf8(bytes).map_err(|e| {
                anyhow!(
                    "{}: not UTF-8 at byte {}",
                    path.display(),
                    e.utf8_error().valid_up_to()
                )
            })?;
            let circuit = if format == FileFormat::Qasm {
                import_qasm2(&text)
            } else {
                parse_originir(&text)
            };
            vec![circuit.with_context(context)?]
        }
    };
    Ok(circuits)
}

pub fn read_circuit(path: &Path, format: Option<FileFormat>) -> Result<Circuit, Failure> {
    let format = FileFormat::resolve(format, path)?;
    let mut circuits = read_circuits(path, format)?;
    if circuits.len() != 1 {
        return Err(anyhow!(
            "{} holds {} circuits, expected one",
            path.display(),
            circuits.len()
        )
        .into());
    }
    Ok(circuits.remove(0))
}

pub fn render(
    circuits: &[Circuit],
    format: FileFormat,
    compress: bool,
) -> Result<Vec<u8>, Failure> {
    match format {
        FileFormat::Bis => Ok(bis::encode(circuits, compress)?),
        FileFormat::OriginIr | FileFormat::Qasm => {
            let [circuit] = circuits else {
                return Err(
                    anyhow!("text formats hold one circuit, got {}", circuits.len()).into(),
                );
            };
            if compress {
                return Err(Failure::Usage(
                    "--compress only applies to bis output".into(),
                ));
            }
            Ok(if format == FileFormat::Qasm {
                emit_qasm2(circuit)
            } else {
                emit_originir(circuit)
            }
            .into_bytes())
        }
    }
}

/// Writes `bytes` to `path` through a sibling temporary file, or to stdout
/// when `path` is `None`.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(bytes).context("writing to stdout")?;
        stdout.flush().context("writing to stdout")?;
        return Ok(());
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)
        .with_context(|| format!("writing {}", path.display()))?;
    tmp.persist(path)
        .map_err(|e| anyhow!("writing {}: {}", path.display(), e.error))?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String, Failure> {
    Ok(fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)
}
