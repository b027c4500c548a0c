use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const GHZ_QASM: &str =
    "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\nh q[0];\ncx q[0],q[1];\ncx q[1],q[2];\n";
const GHZ_OIR: &str = "QINIT 3\nCREG 0\nH q[0]\nCNOT q[0],q[1]\nCNOT q[1],q[2]\n";

fn qcircuit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcircuit"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn setup(files: &[(&str, &str)]) -> TempDir {
    let dir = TempDir::new().unwrap();
    for (name, text) in files {
        fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn qasm_converts_to_originir_and_back() {
    let dir = setup(&[("ghz.qasm", GHZ_QASM)]);
    let out = qcircuit(
        dir.path(),
        &["convert", "--in", "ghz.qasm", "--out", "ghz.oir"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(fs::read_to_string(path(&dir, "ghz.oir")).unwrap(), GHZ_OIR);
    let out = qcircuit(
        dir.path(),
        &["convert", "--in", "ghz.oir", "--out", "again.qasm"],
    );
    assert!(out.status.success());
    let out = qcircuit(
        dir.path(),
        &["convert", "--in", "again.qasm", "--out", "again.oir"],
    );
    assert!(out.status.success());
    assert_eq!(
        fs::read_to_string(path(&dir, "again.oir")).unwrap(),
        GHZ_OIR
    );
}

#[test]
fn bis_round_trip_is_byte_identical() {
    let dir = setup(&[("ghz.oir", GHZ_OIR)]);
    for compress in [false, true] {
        let mut args = vec!["convert", "--in", "ghz.oir", "--out", "ghz.bis"];
        if compress {
            args.push("--compress");
        }
        assert!(qcircuit(dir.path(), &args).status.success());
        let out = qcircuit(
            dir.path(),
            &["convert", "--in", "ghz.bis", "--out", "ghz2.oir"],
        );
        assert!(out.status.success(), "{}", stderr(&out));
        assert_eq!(
            fs::read(path(&dir, "ghz2.oir")).unwrap(),
            GHZ_OIR.as_bytes()
        );
    }
}

#[test]
fn format_flag_overrides_extension() {
    let dir = setup(&[("ghz.txt", GHZ_OIR)]);
    let out = qcircuit(
        dir.path(),
        &[
            "convert", "--in", "ghz.txt", "--from", "oir", "--out", "ghz.out", "--format", "bis",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(&fs::read(path(&dir, "ghz.out")).unwrap()[..4], b"OBIS");
    let out = qcircuit(
        dir.path(),
        &["convert", "--in", "ghz.txt", "--out", "x.oir"],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn corrupt_bis_exits_2_with_offset_and_no_output() {
    let dir = setup(&[("ghz.oir", GHZ_OIR)]);
    assert!(qcircuit(
        dir.path(),
        &["convert", "--in", "ghz.oir", "--out", "ghz.bis"]
    )
    .status
    .success());
    let mut bytes = fs::read(path(&dir, "ghz.bis")).unwrap();
    bytes[9] = 0xff;
    fs::write(path(&dir, "bad.bis"), bytes).unwrap();
    let out = qcircuit(
        dir.path(),
        &["convert", "--in", "bad.bis", "--out", "bad.oir"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("offset"), "{}", stderr(&out));
    assert!(!path(&dir, "bad.oir").exists());
}

#[test]
fn unsupported_qasm_exits_2() {
    let text = format!("{GHZ_QASM}gate g a {{ h a; }}\n");
    let dir = setup(&[("g.qasm", &text)]);
    let out = qcircuit(dir.path(), &["convert", "--in", "g.qasm", "--out", "g.oir"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unsupported"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_1() {
    let dir = setup(&[("ghz.oir", GHZ_OIR)]);
    assert_eq!(
        qcircuit(dir.path(), &["convert", "--in"]).status.code(),
        Some(1)
    );
    assert_eq!(qcircuit(dir.path(), &["frobnicate"]).status.code(), Some(1));
    let out = qcircuit(
        dir.path(),
        &[
            "transpile",
            "--in",
            "ghz.oir",
            "--topology",
            "linear:3",
            "--level",
            "3",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(qcircuit(dir.path(), &["--help"]).status.success());
}

const ALL_PAIRS_CZ: &str = "QINIT 3\nCREG 0\nCZ q[0],q[1]\nCZ q[0],q[2]\nCZ q[1],q[2]\n";

fn stats(dir: &TempDir) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path(dir, "stats.json")).unwrap()).unwrap()
}

#[test]
fn all_pairs_cz_on_a_path_needs_a_swap() {
    let dir = setup(&[
        ("cz.oir", ALL_PAIRS_CZ),
        ("path.json", r#"{"n": 3, "edges": [[0, 2], [1, 2]]}"#),
    ]);
    let out = qcircuit(
        dir.path(),
        &[
            "transpile",
            "--in",
            "cz.oir",
            "--topology",
            "path.json",
            "--level",
            "0",
            "--out",
            "routed.oir",
            "--stats",
            "stats.json",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stats(&dir)["swaps_inserted"].as_u64().unwrap() >= 1);
    for key in [
        "depth_before",
        "depth_after",
        "two_q_count",
        "two_q_depth",
        "elapsed",
    ] {
        assert!(stats(&dir).get(key).is_some(), "{key}");
    }
}

#[test]
fn swap_pair_cancels_at_level_2() {
    let dir = setup(&[(
        "swapswap.oir",
        "QINIT 2\nCREG 0\nSWAP q[0],q[1]\nSWAP q[1],q[0]\n",
    )]);
    let out = qcircuit(
        dir.path(),
        &[
            "transpile",
            "--in",
            "swapswap.oir",
            "--topology",
            "linear:2",
            "--level",
            "2",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "QINIT 2\nCREG 0\n");
}

#[test]
fn full_topology_needs_no_swaps() {
    let dir = TempDir::new().unwrap();
    let out = qcircuit(
        dir.path(),
        &[
            "gen", "circuit", "--qubits", "5", "--depth", "30", "--seed", "3", "--out", "c.oir",
        ],
    );
    assert!(out.status.success());
    let out = qcircuit(
        dir.path(),
        &[
            "transpile",
            "--in",
            "c.oir",
            "--topology",
            "full:5",
            "--out",
            "r.bis",
            "--stats",
            "stats.json",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stats(&dir)["swaps_inserted"], 0);
}

#[test]
fn profile_reports() {
    let dir = setup(&[
        ("cir.oir", "QINIT 2\nCREG 0\nH q[0]\nCNOT q[0],q[1]\n"),
        ("times.json", r#"{"H": 40, "CNOT": 200}"#),
        ("short.json", r#"{"H": 40}"#),
    ]);
    let out = qcircuit(
        dir.path(),
        &[
            "profile",
            "--in",
            "cir.oir",
            "--times",
            "times.json",
            "--dot",
            "p.dot",
            "--gprof",
            "p.txt",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let dot = fs::read_to_string(path(&dir, "p.dot")).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("[label=\"1x\"]"), "{dot}");
    assert!(fs::read_to_string(path(&dir, "p.txt"))
        .unwrap()
        .contains("CNOT"));

    let out = qcircuit(
        dir.path(),
        &["profile", "--in", "cir.oir", "--times", "short.json"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("CNOT"), "{}", stderr(&out));
}

#[test]
fn metrics_json_for_ghz() {
    let dir = setup(&[("ghz.oir", GHZ_OIR)]);
    let out = qcircuit(
        dir.path(),
        &["metrics", "--in", "ghz.oir", "--json", "m.json"],
    );
    assert!(out.status.success());
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(path(&dir, "m.json")).unwrap()).unwrap();
    let expected = [
        ("communication", 0.667),
        ("critical_depth", 1.0),
        ("entanglement_ratio", 0.667),
        ("parallelism", 0.0),
        ("liveness", 0.556),
    ];
    for (key, value) in expected {
        assert!((m[key].as_f64().unwrap() - value).abs() < 1e-3, "{key}");
    }
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let out = qcircuit(
        dir.path(),
        &["gen", "topology", "--kind", "linear", "--n", "3"],
    );
    assert_eq!(stdout(&out), "{\"n\":3,\"edges\":[[0,1],[1,2]]}\n");
    for name in ["a.oir", "b.oir"] {
        let out = qcircuit(
            dir.path(),
            &[
                "gen", "circuit", "--qubits", "72", "--depth", "500", "--seed", "7", "--out", name,
            ],
        );
        assert!(out.status.success());
    }
    assert_eq!(
        fs::read(path(&dir, "a.oir")).unwrap(),
        fs::read(path(&dir, "b.oir")).unwrap()
    );
}

#[test]
fn bench_writes_one_row_per_value_and_format() {
    let dir = TempDir::new().unwrap();
    let out = qcircuit(
        dir.path(),
        &[
            "bench",
            "--sweep",
            "qubits",
            "--values",
            "10,20,30",
            "--count",
            "5",
            "--depth",
            "10",
            "--repetitions",
            "3",
            "--csv",
            "b.csv",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(path(&dir, "b.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "sweep,value,format,encode_s,decode_s,size_bytes,gate_count"
    );
    assert_eq!(lines.len(), 1 + 3 * 4);
}

#[test]
fn draw_and_sim() {
    let dir = setup(&[("ghz.oir", GHZ_OIR)]);
    let out = qcircuit(dir.path(), &["draw", "--in", "ghz.oir"]);
    assert_eq!(stdout(&out).lines().count(), 3);
    let out = qcircuit(dir.path(), &["sim", "--in", "ghz.oir"]);
    let text = stdout(&out);
    assert!(text.starts_with("|000> +0.707107"), "{text}");
    assert!(text.contains("|111> +0.707107"), "{text}");
}
