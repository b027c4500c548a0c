mod draw;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use qcircuit::bench::{
    random_circuit, run_transmission_bench, write_csv, BenchConfig, Format, Sweep,
};
use qcircuit::profiler::{circuit_metrics, profile, report_dot, report_gprof, DeviceTimeTable};
use qcircuit::sim::{simulate, Statevector};
use qcircuit::topology::{generate_topology, CouplingGraph, TopologyKind};
use qcircuit::transpiler::{transpile, Basis, TranspileConfig};

use io::{read_circuit, read_circuits, read_text, render, write_output, FileFormat};

/// Widest circuit `sim` prints amplitudes for.
const SIM_PRINT_LIMIT: usize = 5;

pub enum Failure {
    /// Bad flags or arguments; exit code 1.
    Usage(String),
    /// Unreadable or invalid input; exit code 2.
    Data(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.into())
    }
}

#[derive(Parser)]
#[command(
    name = "qcircuit",
    version,
    about = "Convert, transpile, profile and benchmark quantum circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert between .oir, .qasm and .bis
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Input format, overriding the extension
        #[arg(long)]
        from: Option<FileFormat>,
        /// Output format, overriding the extension
        #[arg(long)]
        format: Option<FileFormat>,
        /// Varint-compressed BIS
        #[arg(long)]
        compress: bool,
    },
    /// Route a circuit onto a device
    Transpile {
        #[arg(long = "in")]
        input: PathBuf,
        /// Edge-list JSON file or `kind:n` (linear, square, full, random, heavy_hex)
        #[arg(long)]
        topology: String,
        #[arg(long, default_value_t = 0)]
        level: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "none")]
        basis: Basis,
        /// Output file; standard output when absent
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<FileFormat>,
        #[arg(long)]
        compress: bool,
        /// Write transpile statistics as JSON
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Time profile over the subcircuit containment graph
    Profile {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        format: Option<FileFormat>,
        /// JSON object of gate name to duration
        #[arg(long)]
        times: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
        /// gprof-style text; printed to standard output if neither report is requested
        #[arg(long)]
        gprof: Option<PathBuf>,
    },
    /// Structural metrics vector as JSON
    Metrics {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        format: Option<FileFormat>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Generate random circuits or topologies
    #[command(subcommand)]
    Gen(Gen),
    /// Transmission benchmark over one swept parameter
    Bench(BenchArgs),
    /// ASCII drawing of a circuit
    Draw {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        format: Option<FileFormat>,
    },
    /// Amplitudes of the output state from |0...0>
    Sim {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        format: Option<FileFormat>,
    },
}

#[derive(Subcommand)]
enum Gen {
    Circuit {
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output format, overriding the extension; OriginIR on standard output
        #[arg(long)]
        format: Option<FileFormat>,
        #[arg(long)]
        compress: bool,
    },
    Topology {
        #[arg(long)]
        kind: TopologyKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Extra edges for `random`, as a fraction of n
        #[arg(long, default_value_t = 0.3)]
        extra: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// count, depth or qubits
    #[arg(long)]
    sweep: Sweep,
    /// Comma-separated sweep values
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<usize>,
    #[arg(long, default_value_t = 500)]
    count: usize,
    #[arg(long, default_value_t = 500)]
    depth: usize,
    #[arg(long, default_value_t = 72)]
    qubits: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    repetitions: usize,
    /// Comma-separated subset of bis_compressed, bis_uncompressed, originir, qasm2
    #[arg(long, value_delimiter = ',')]
    formats: Vec<Format>,
    /// CSV output; standard output when absent
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Convert {
            input,
            out,
            from,
            format,
            compress,
        } => {
            let circuits = read_circuits(&input, FileFormat::resolve(from, &input)?)?;
            let bytes = render(&circuits, FileFormat::resolve(format, &out)?, compress)?;
            write_output(Some(&out), &bytes)
        }
        Command::Transpile {
            input,
            topology,
            level,
            seed,
            basis,
            out,
            format,
            compress,
            stats,
        } => {
            let circuit = read_circuit(&input, None)?;
            let graph = load_topology(&topology)?;
            let config = TranspileConfig {
                level,
                seed,
                basis,
                ..TranspileConfig::default()
            };
            config
                .validate()
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let result = transpile(&circuit, &graph, &config)?;
            let out_format = match (&out, format) {
                (_, Some(f)) => f,
                (Some(path), None) => FileFormat::resolve(None, path)?,
                (None, None) => FileFormat::OriginIr,
            };
            let bytes = render(&[result.circuit], out_format, compress)?;
            if let Some(path) = &stats {
                let mut json =
                    serde_json::to_string_pretty(&result.stats).context("serializing stats")?;
                json.push('\n');
                write_output(Some(path), json.as_bytes())?;
            }
            write_output(out.as_deref(), &bytes)
        }
        Command::Profile {
            input,
            format,
            times,
            dot,
            gprof,
        } => {
            let circuit = read_circuit(&input, format)?;
            let table = DeviceTimeTable::from_json(&read_text(&times)?)
                .with_context(|| format!("{}", times.display()))?;
            let report = profile(&circuit, &table)?;
            if let Some(path) = &dot {
                write_output(Some(path), report_dot(&report).as_bytes())?;
            }
            if gprof.is_some() || dot.is_none() {
                write_output(gprof.as_deref(), report_gprof(&report).as_bytes())?;
            }
            Ok(())
        }
        Command::Metrics {
            input,
            format,
            json,
        } => {
            let circuit = read_circuit(&input, format)?;
            let mut text = serde_json::to_string_pretty(&circuit_metrics(&circuit))
                .context("serializing metrics")?;
            text.push('\n');
            write_output(json.as_deref(), text.as_bytes())
        }
        Command::Gen(Gen::Circuit {
            qubits,
            depth,
            seed,
            out,
            format,
            compress,
        }) => {
            if qubits == 0 || depth == 0 {
                return Err(Failure::Usage(
                    "--qubits and --depth must be at least 1".into(),
                ));
            }
            let circuit = random_circuit(qubits, depth, seed);
            let out_format = match (&out, format) {
                (_, Some(f)) => f,
                (Some(path), None) => FileFormat::resolve(None, path)?,
                (None, None) => FileFormat::OriginIr,
            };
            write_output(out.as_deref(), &render(&[circuit], out_format, compress)?)
        }
        Command::Gen(Gen::Topology {
            kind,
            n,
            seed,
            extra,
            out,
        }) => {
            let graph = generate_topology(kind, n, seed, extra)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let mut json = graph.to_json();
            json.push('\n');
            write_output(out.as_deref(), json.as_bytes())
        }
        Command::Bench(args) => bench(args),
        Command::Draw { input, format } => {
            let circuit = read_circuit(&input, format)?;
            write_output(None, draw::draw(&circuit).as_bytes())
        }
        Command::Sim { input, format } => {
            let circuit = read_circuit(&input, format)?;
            let n = circuit.num_qubits();
            if n > SIM_PRINT_LIMIT {
                return Err(anyhow!(
                    "sim prints at most {SIM_PRINT_LIMIT} qubits, circuit has {n}"
                )
                .into());
            }
            let state = simulate(&circuit, &Statevector::zero(n)?)?;
            let mut text = String::new();
            for (i, a) in state.amplitudes().iter().enumerate() {
                // Qubit 0 is the rightmost bit.
                let bits: String = (0..n)
                    .rev()
                    .map(|q| if i >> q & 1 == 1 { '1' } else { '0' })
                    .collect();
                text.push_str(&format!("|{bits}> {:+.6} {:+.6}i\n", a.re, a.im));
            }
            write_output(None, text.as_bytes())
        }
    }
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    if args.values.contains(&0) || args.count == 0 || args.depth == 0 || args.qubits == 0 {
        return Err(Failure::Usage(
            "sweep values and fixed parameters must be positive".into(),
        ));
    }
    let config = BenchConfig {
        sweep: args.sweep,
        sweep_values: args.values,
        fixed_circuit_count: args.count,
        fixed_depth: args.depth,
        fixed_qubits: args.qubits,
        seed: args.seed,
        formats: if args.formats.is_empty() {
            Format::ALL.to_vec()
        } else {
            args.formats
        },
        repetitions: args.repetitions,
    };
    let rows = run_transmission_bench(&config).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut csv = Vec::new();
    write_csv(&rows, &mut csv).context("formatting CSV")?;
    write_output(args.csv.as_deref(), &csv)
}

/// `kind:n` or a path to an edge-list JSON file.
fn load_topology(arg: &str) -> Result<CouplingGraph, Failure> {
    if let Some((kind, n)) = arg.split_once(':') {
        if let Ok(kind) = kind.parse::<TopologyKind>() {
            let n: usize = n
                .parse()
                .map_err(|_| Failure::Usage(format!("bad topology size in `{arg}`")))?;
            return generate_topology(kind, n, 0, 0.3).map_err(|e| Failure::Usage(e.to_string()));
        }
    }
    let path = Path::new(arg);
    Ok(CouplingGraph::from_json(&read_text(path)?)
        .with_context(|| format!("{}", path.display()))?)
}
