use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, Element, GateKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("device time table has no duration for {0}")]
    MissingDuration(GateKind),
    #[error("duration for {0} must be a positive number")]
    InvalidDuration(String),
    #[error("invalid device time table: {0}")]
    Json(String),
}

/// Average duration per gate kind, in any consistent unit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DeviceTimeTable {
    times: BTreeMap<GateKind, f64>,
}

impl DeviceTimeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, kind: GateKind, duration: f64) -> Result<(), ProfileError> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(ProfileError::InvalidDuration(kind.name().to_string()));
        }
        self.times.insert(kind, duration);
        Ok(())
    }

    pub fn with(mut self, kind: GateKind, duration: f64) -> Result<Self, ProfileError> {
        self.set(kind, duration)?;
        Ok(self)
    }

    pub fn get(&self, kind: GateKind) -> Option<f64> {
        self.times.get(&kind).copied()
    }

    /// Parses `{"H": 40, "CNOT": 200, ...}`.
    pub fn from_json(text: &str) -> Result<Self, ProfileError> {
        let raw: BTreeMap<String, f64> =
            serde_json::from_str(text).map_err(|e| ProfileError::Json(e.to_string()))?;
        let mut table = Self::new();
        for (name, duration) in raw {
            let kind = name
                .parse::<GateKind>()
                .map_err(|e| ProfileError::Json(e.to_string()))?;
            table.set(kind, duration)?;
        }
        Ok(table)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Circuit,
    Gate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileNode {
    pub name: String,
    pub kind: NodeKind,
    pub calls: u64,
    pub self_time: f64,
    pub cumulative_time: f64,
    /// `cumulative_time / total_time`.
    pub time_share: f64,
}

/// Containment arc; `calls` is how often the parent invokes the child over
/// the whole run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileEdge {
    pub parent: usize,
    pub child: usize,
    pub calls: u64,
}

/// Containment call graph with serial-time accounting. Nodes are in
/// topological order (ties by name), edges by (parent, child) position.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileReport {
    pub nodes: Vec<ProfileNode>,
    pub edges: Vec<ProfileEdge>,
    pub total_time: f64,
}

/// One definition in one orientation: a daggered instance runs different
/// gates (S becomes SDG) and so is profiled as its own node.
type DefKey = (*const Circuit, bool);

struct Def<'a> {
    circuit: &'a Circuit,
    dagger: bool,
    subs: BTreeMap<usize, u64>,
    gates: BTreeMap<GateKind, u64>,
}

struct Collector<'a> {
    defs: Vec<Def<'a>>,
    index: HashMap<DefKey, usize>,
    /// Definition number per circuit, in post-order of first visit.
    numbers: HashMap<*const Circuit, usize>,
}

impl<'a> Collector<'a> {
    fn visit(&mut self, circuit: &'a Circuit, dagger: bool) -> usize {
        let key = (circuit as *const Circuit, dagger);
        if let Some(&idx) = self.index.get(&key) {
            return idx;
        }
        let mut subs = BTreeMap::new();
        let mut gates = BTreeMap::new();
        for element in circuit.body() {
            match element {
                Element::Gate(instr) => {
                    let kind = instr.resolved(dagger).kind();
                    if kind != GateKind::Barrier {
                        *gates.entry(kind).or_insert(0) += 1;
                    }
                }
                Element::Sub(sub) => {
                    let child = self.visit(&sub.definition, dagger ^ sub.dagger);
                    *subs.entry(child).or_insert(0) += 1;
                }
            }
        }
        let next = self.numbers.len();
        self.numbers.entry(key.0).or_insert(next);
        let idx = self.defs.len();
        self.defs.push(Def {
            circuit,
            dagger,
            subs,
            gates,
        });
        self.index.insert(key, idx);
        idx
    }
}

/// Profiles the unflattened circuit. Unnamed definitions are called
/// `QCircuit_k`, numbered in post-order so the root comes last. A circuit
/// with no gates yields an empty report.
pub fn profile(circuit: &Circuit, times: &DeviceTimeTable) -> Result<ProfileReport, ProfileError> {
    let mut col = Collector {
        defs: Vec::new(),
        index: HashMap::new(),
        numbers: HashMap::new(),
    };
    let root = col.visit(circuit, false);
    let defs = col.defs;

    // Post-order: children precede parents, so one pass gives per-instance
    // time.
    let mut instance_time = vec![0.0f64; defs.len()];
    for (i, def) in defs.iter().enumerate() {
        let mut t = 0.0;
        for (&kind, &n) in &def.gates {
            t += n as f64 * times.get(kind).ok_or(ProfileError::MissingDuration(kind))?;
        }
        for (&child, &n) in &def.subs {
            t += n as f64 * instance_time[child];
        }
        instance_time[i] = t;
    }
    let gate_total: u64 = defs.iter().map(|d| d.gates.values().sum::<u64>()).sum();
    if gate_total == 0 {
        return Ok(ProfileReport {
            nodes: Vec::new(),
            edges: Vec::new(),
            total_time: 0.0,
        });
    }

    // Reverse post-order is topological from the root.
    let mut def_calls = vec![0u64; defs.len()];
    def_calls[root] = 1;
    let mut gate_calls: BTreeMap<GateKind, u64> = BTreeMap::new();
    let mut raw_edges: Vec<(NodeRef, NodeRef, u64)> = Vec::new();
    for i in (0..defs.len()).rev() {
        let calls = def_calls[i];
        if calls == 0 {
            continue;
        }
        for (&child, &n) in &defs[i].subs {
            let c = n.saturating_mul(calls);
            def_calls[child] = def_calls[child].saturating_add(c);
            raw_edges.push((NodeRef::Def(i), NodeRef::Def(child), c));
        }
        for (&kind, &n) in &defs[i].gates {
            let c = n.saturating_mul(calls);
            *gate_calls.entry(kind).or_insert(0) += c;
            raw_edges.push((NodeRef::Def(i), NodeRef::Gate(kind), c));
        }
    }
    let total_time = instance_time[root];

    let mut names = BTreeSet::new();
    let mut make_name = |base: String| {
        let mut name = base.clone();
        let mut k = 2;
        while !names.insert(name.clone()) {
            name = format!("{base}_{k}");
            k += 1;
        }
        name
    };
    let mut nodes: Vec<(NodeRef, ProfileNode)> = Vec::new();
    for (kind, &calls) in &gate_calls {
        let t = calls as f64 * times.get(*kind).expect("checked above");
        nodes.push((
            NodeRef::Gate(*kind),
            ProfileNode {
                name: make_name(kind.name().to_string()),
                kind: NodeKind::Gate,
                calls,
                self_time: t,
                cumulative_time: t,
                time_share: t / total_time,
            },
        ));
    }
    for (i, def) in defs.iter().enumerate() {
        let base = match def.circuit.name() {
            Some(name) => name.to_string(),
            None => format!("QCircuit_{}", col.numbers[&(def.circuit as *const Circuit)]),
        };
        let base = if def.dagger {
            format!("{base}_dagger")
        } else {
            base
        };
        let t = def_calls[i] as f64 * instance_time[i];
        nodes.push((
            NodeRef::Def(i),
            ProfileNode {
                name: make_name(base),
                kind: NodeKind::Circuit,
                calls: def_calls[i],
                self_time: 0.0,
                cumulative_time: t,
                time_share: t / total_time,
            },
        ));
    }

    // Kahn's algorithm, smallest name first among ready nodes.
    let position_of: HashMap<NodeRef, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, (r, _))| (*r, i))
        .collect();
    let mut indegree = vec![0usize; nodes.len()];
    let mut children = vec![Vec::new(); nodes.len()];
    for &(p, c, _) in &raw_edges {
        indegree[position_of[&c]] += 1;
        children[position_of[&p]].push(position_of[&c]);
    }
    let mut ready: BTreeSet<(String, usize)> = (0..nodes.len())
        .filter(|&i| indegree[i] == 0)
        .map(|i| (nodes[i].1.name.clone(), i))
        .collect();
    let mut order = Vec::with_capacity(nodes.len());
    while let Some((_, i)) = ready.pop_first() {
        order.push(i);
        for &c in &children[i] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert((nodes[c].1.name.clone(), c));
            }
        }
    }
    let mut rank = vec![0usize; nodes.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let mut edges: Vec<ProfileEdge> = raw_edges
        .iter()
        .map(|&(p, c, calls)| ProfileEdge {
            parent: rank[position_of[&p]],
            child: rank[position_of[&c]],
            calls,
        })
        .collect();
    edges.sort_by_key(|e| (e.parent, e.child));
    let mut slots: Vec<Option<ProfileNode>> = nodes.into_iter().map(|(_, n)| Some(n)).collect();
    let nodes = order
        .iter()
        .map(|&i| slots[i].take().expect("each node once"))
        .collect();
    Ok(ProfileReport {
        nodes,
        edges,
        total_time,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum NodeRef {
    Def(usize),
    Gate(GateKind),
}

fn percent(share: f64) -> String {
    format!("{:.1}", share * 100.0)
}

/// gprof-style text: a flat profile sorted by self time, then the call
/// graph with each node's parents and children.
pub fn report_gprof(report: &ProfileReport) -> String {
    let mut out = String::new();
    out.push_str("Flat profile:\n\n");
    out.push_str("  %        cumulative          self\n");
    out.push_str(" time            time          time       calls  name\n");
    let mut flat: Vec<&ProfileNode> = report.nodes.iter().collect();
    flat.sort_by(|a, b| {
        b.self_time
            .total_cmp(&a.self_time)
            .then_with(|| a.name.cmp(&b.name))
    });
    let mut running = 0.0;
    for node in flat {
        running += node.self_time;
        let share = if report.total_time > 0.0 {
            node.self_time / report.total_time
        } else {
            0.0
        };
        let _ = writeln!(
            out,
            "{:>5} {:>15.2} {:>13.2} {:>11}  {}",
            percent(share),
            running,
            node.self_time,
            node.calls,
            node.name
        );
    }

    out.push_str("\nCall graph:\n\n");
    out.push_str("index  % time          self      children        called  name\n");
    let label = |i: usize| format!("{} [{}]", report.nodes[i].name, i + 1);
    let attributed = |edge: &ProfileEdge| {
        let child = &report.nodes[edge.child];
        let frac = if child.calls > 0 {
            edge.calls as f64 / child.calls as f64
        } else {
            0.0
        };
        (
            child.self_time * frac,
            (child.cumulative_time - child.self_time) * frac,
        )
    };
    for (i, node) in report.nodes.iter().enumerate() {
        let parents: Vec<&ProfileEdge> = report.edges.iter().filter(|e| e.child == i).collect();
        if parents.is_empty() {
            let _ = writeln!(out, "{:>54}  <spontaneous>", "");
        }
        for edge in parents {
            let (s, c) = attributed(edge);
            let called = format!("{}/{}", edge.calls, node.calls);
            let _ = writeln!(
                out,
                "{:>20.2} {:>13.2} {:>13}      {}",
                s,
                c,
                called,
                label(edge.parent)
            );
        }
        let _ = writeln!(
            out,
            "{:<6} {:>6} {:>13.2} {:>13.2} {:>13}  {}",
            format!("[{}]", i + 1),
            percent(node.time_share),
            node.self_time,
            node.cumulative_time - node.self_time,
            node.calls,
            label(i)
        );
        for edge in report.edges.iter().filter(|e| e.parent == i) {
            let (s, c) = attributed(edge);
            let called = format!("{}/{}", edge.calls, report.nodes[edge.child].calls);
            let _ = writeln!(
                out,
                "{:>20.2} {:>13.2} {:>13}      {}",
                s,
                c,
                called,
                label(edge.child)
            );
        }
        out.push_str("-----------------------------------------------\n");
    }
    out
}

fn dot_id(name: &str) -> String {
    let plain = name
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if plain {
        name.to_string()
    } else {
        dot_string(name)
    }
}

fn dot_string(text: &str) -> String {
    format!("\"{}\"", text.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz digraph: nodes labelled with name and time share, edges with
/// the `Nx` call count.
pub fn report_dot(report: &ProfileReport) -> String {
    if report.nodes.is_empty() {
        return "digraph { }\n".to_string();
    }
    let mut out = String::from("digraph {\n");
    for node in &report.nodes {
        let label = format!(
            "\"{}\\n{}%\"",
            node.name.replace('\\', "\\\\").replace('"', "\\\""),
            percent(node.time_share)
        );
        let shape = match node.kind {
            NodeKind::Circuit => "box",
            NodeKind::Gate => "ellipse",
        };
        let _ = writeln!(
            out,
            "  {} [label={}, shape={}];",
            dot_id(&node.name),
            label,
            shape
        );
    }
    for edge in &report.edges {
        let _ = writeln!(
            out,
            "  {} -> {} [label=\"{}x\"];",
            dot_id(&report.nodes[edge.parent].name),
            dot_id(&report.nodes[edge.child].name),
            edge.calls
        );
    }
    out.push_str("}\n");
    out
}
