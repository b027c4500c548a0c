//! Sabre layout and swap routing.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Layout, TranspileConfig, TranspileError};
use crate::circuit::{Circuit, CircuitDag, Instruction};
use crate::topology::CouplingGraph;

/// Routing output: physical circuit, final layout and inserted swap count.
#[derive(Debug, Clone, PartialEq)]
pub struct Routed {
    pub circuit: Circuit,
    pub final_layout: Layout,
    pub swaps: usize,
}

fn check_width(dag: &CircuitDag, graph: &CouplingGraph) -> Result<(), TranspileError> {
    if dag.num_qubits() > graph.num_physical() {
        return Err(TranspileError::TooWide {
            circuit: dag.num_qubits(),
            device: graph.num_physical(),
        });
    }
    Ok(())
}

/// Picks an initial layout by forward-backward-forward routing from
/// `layout_trials` seeded random starts. The winner has the fewest swaps
/// on its last forward pass, then the lowest depth, then the lowest trial.
pub fn sabre_layout(
    dag: &CircuitDag,
    graph: &CouplingGraph,
    config: &TranspileConfig,
) -> Result<Layout, TranspileError> {
    check_width(dag, graph)?;
    let n = graph.num_physical();
    let reversed = {
        let mut nodes = dag.nodes().to_vec();
        nodes.reverse();
        CircuitDag::from_instructions(dag.num_qubits(), 0, nodes)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<(usize, usize, Layout)> = None;
    for _ in 0..config.layout_trials.max(1) {
        let mut start: Vec<usize> = (0..n).collect();
        start.shuffle(&mut rng);
        let start = Layout::from_logical_to_physical(start).expect("shuffle is a permutation");
        let forward = route(dag, graph, &start, config);
        let backward = route(&reversed, graph, &forward.final_layout, config);
        let candidate = backward.final_layout;
        let last = route(dag, graph, &candidate, config);
        let key = (last.swaps, last.circuit.depth());
        if best.as_ref().is_none_or(|(s, d, _)| key < (*s, *d)) {
            best = Some((key.0, key.1, candidate));
        }
    }
    Ok(best.expect("at least one trial").2)
}

/// Routes `dag` onto `graph` starting from `initial`, inserting SWAPs so
/// every two-qubit gate acts on an edge.
pub fn sabre_route(
    dag: &CircuitDag,
    graph: &CouplingGraph,
    initial: &Layout,
    config: &TranspileConfig,
) -> Result<Routed, TranspileError> {
    check_width(dag, graph)?;
    if initial.len() != graph.num_physical() {
        return Err(TranspileError::LayoutSize {
            layout: initial.len(),
            device: graph.num_physical(),
        });
    }
    Ok(route(dag, graph, initial, config))
}

struct Router<'a> {
    dag: &'a CircuitDag,
    graph: &'a CouplingGraph,
    config: &'a TranspileConfig,
    layout: Layout,
    out: Circuit,
    swaps: usize,
    /// Unexecuted predecessor counts.
    pending: Vec<usize>,
    front: BTreeSet<usize>,
    decay: Vec<f64>,
    swaps_since_reset: usize,
    swaps_since_progress: usize,
}

fn route(
    dag: &CircuitDag,
    graph: &CouplingGraph,
    initial: &Layout,
    config: &TranspileConfig,
) -> Routed {
    let n = graph.num_physical();
    let pending: Vec<usize> = (0..dag.len()).map(|i| dag.predecessors(i).len()).collect();
    let front = (0..dag.len()).filter(|&i| pending[i] == 0).collect();
    let mut router = Router {
        dag,
        graph,
        config,
        layout: initial.clone(),
        out: Circuit::with_capacity(n, 0, dag.len()),
        swaps: 0,
        pending,
        front,
        decay: vec![1.0; n],
        swaps_since_reset: 0,
        swaps_since_progress: 0,
    };
    router.run();
    Routed {
        circuit: router.out,
        final_layout: router.layout,
        swaps: router.swaps,
    }
}

impl Router<'_> {
    fn physical_pair(&self, node: usize) -> (usize, usize) {
        let q = self.dag.node(node).qubits();
        (self.layout.physical(q[0]), self.layout.physical(q[1]))
    }

    fn executable(&self, node: usize) -> bool {
        let instr = self.dag.node(node);
        if !instr.kind().is_two_qubit() {
            return true;
        }
        let (a, b) = self.physical_pair(node);
        self.graph.is_edge(a, b)
    }

    fn execute(&mut self, node: usize) {
        let instr = self.dag.node(node);
        let mapped: Vec<usize> = instr
            .qubits()
            .iter()
            .map(|&q| self.layout.physical(q))
            .collect();
        self.out.push_unchecked(instr.with_qubits(&mapped));
        self.front.remove(&node);
        for &s in self.dag.successors(node) {
            self.pending[s] -= 1;
            if self.pending[s] == 0 {
                self.front.insert(s);
            }
        }
    }

    /// Executes everything executable; true if anything ran.
    fn drain_executable(&mut self) -> bool {
        let mut progressed = false;
        loop {
            let ready: Vec<usize> = self
                .front
                .iter()
                .copied()
                .filter(|&n| self.executable(n))
                .collect();
            if ready.is_empty() {
                return progressed;
            }
            for node in ready {
                self.execute(node);
            }
            progressed = true;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        let (a, b) = (a.min(b), a.max(b));
        self.out.push_unchecked(Instruction::swap(a, b));
        self.layout.swap_physical(a, b);
        self.swaps += 1;
        self.swaps_since_progress += 1;
        self.decay[a] += self.config.decay_delta;
        self.decay[b] += self.config.decay_delta;
        self.swaps_since_reset += 1;
        if self.config.decay_reset_interval > 0
            && self.swaps_since_reset >= self.config.decay_reset_interval
        {
            self.reset_decay();
        }
    }

    fn reset_decay(&mut self) {
        self.decay.iter_mut().for_each(|d| *d = 1.0);
        self.swaps_since_reset = 0;
    }

    /// Two-qubit gates reachable from the front layer, breadth first, up
    /// to the configured size.
    fn extended_set(&self) -> Vec<usize> {
        let limit = self.config.extended_set_size;
        let mut out = Vec::new();
        if limit == 0 {
            return out;
        }
        let mut seen: BTreeSet<usize> = self.front.clone();
        let mut queue: VecDeque<usize> = self.front.iter().copied().collect();
        while let Some(node) = queue.pop_front() {
            for &s in self.dag.successors(node) {
                if seen.insert(s) {
                    if self.dag.node(s).kind().is_two_qubit() {
                        out.push(s);
                        if out.len() >= limit {
                            return out;
                        }
                    }
                    queue.push_back(s);
                }
            }
        }
        out
    }

    fn layer_cost(&self, nodes: &[usize], layout: &Layout) -> f64 {
        if nodes.is_empty() {
            return 0.0;
        }
        let total: u32 = nodes
            .iter()
            .map(|&n| {
                let q = self.dag.node(n).qubits();
                self.graph
                    .distance(layout.physical(q[0]), layout.physical(q[1]))
            })
            .sum();
        total as f64 / nodes.len() as f64
    }

    fn choose_swap(&self, front: &[usize], extended: &[usize]) -> (usize, usize) {
        let mut candidates = BTreeSet::new();
        for &node in front {
            let (a, b) = self.physical_pair(node);
            for p in [a, b] {
                for &nb in self.graph.neighbors(p) {
                    candidates.insert((p.min(nb), p.max(nb)));
                }
            }
        }
        let mut best: Option<((usize, usize), f64)> = None;
        let mut trial = self.layout.clone();
        for &(a, b) in &candidates {
            trial.swap_physical(a, b);
            let h = self.layer_cost(front, &trial)
                + self.config.extended_weight * self.layer_cost(extended, &trial);
            let score = self.decay[a].max(self.decay[b]) * h;
            trial.swap_physical(a, b);
            if best.is_none_or(|(_, s)| score < s) {
                best = Some(((a, b), score));
            }
        }
        best.expect("a blocked gate always has candidate swaps").0
    }

    /// Walks the lowest-index blocked gate's first operand along a
    /// shortest path until its operands touch.
    fn force_route(&mut self, front: &[usize]) {
        let (a, b) = self.physical_pair(front[0]);
        let path = self.graph.shortest_path(a, b);
        for w in path[..path.len() - 1].windows(2) {
            self.swap(w[0], w[1]);
        }
        self.reset_decay();
    }

    fn run(&mut self) {
        let stall_limit = 10 * self.graph.num_physical().max(1);
        loop {
            if self.drain_executable() {
                self.reset_decay();
                self.swaps_since_progress = 0;
            }
            if self.front.is_empty() {
                return;
            }
            let front: Vec<usize> = self.front.iter().copied().collect();
            if self.swaps_since_progress >= stall_limit {
                self.force_route(&front);
                continue;
            }
            let extended = self.extended_set();
            let (a, b) = self.choose_swap(&front, &extended);
            self.swap(a, b);
        }
    }
}
