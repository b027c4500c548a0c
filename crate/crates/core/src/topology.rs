//! Physical coupling graphs and their all-pairs distance matrices.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("a coupling graph needs at least one qubit")]
    Empty,
    #[error("self-loop on qubit {0}")]
    SelfLoop(usize),
    #[error("edge ({a}, {b}) is out of range for {n} qubits")]
    OutOfRange { a: usize, b: usize, n: usize },
    #[error("coupling graph is disconnected: qubit {0} is unreachable from qubit 0")]
    Disconnected(usize),
    #[error("heavy-hex distance must be odd and at least 3, got {0}")]
    HeavyHexDistance(usize),
    #[error("invalid topology JSON: {0}")]
    Json(String),
}

/// Undirected, connected coupling graph over physical qubits `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingGraph {
    n: usize,
    /// Canonical edges `(a, b)` with `a < b`, sorted.
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    /// Row-major `n × n` hop distances.
    dist: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct EdgeListJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl CouplingGraph {
    /// Builds a graph from an undirected edge list. Duplicate and reversed
    /// pairs collapse to one edge.
    pub fn from_edge_list(n: usize, edges: &[(usize, usize)]) -> Result<Self, TopologyError> {
        if n == 0 {
            return Err(TopologyError::Empty);
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(TopologyError::OutOfRange { a, b, n });
            }
            if a == b {
                return Err(TopologyError::SelfLoop(a));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let mut dist = vec![u32::MAX; n * n];
        let mut queue = VecDeque::new();
        for src in 0..n {
            let row = &mut dist[src * n..(src + 1) * n];
            row[src] = 0;
            queue.push_back(src);
            while let Some(u) = queue.pop_front() {
                for &v in &adjacency[u] {
                    if row[v] == u32::MAX {
                        row[v] = row[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            if let Some(unreached) = row.iter().position(|&d| d == u32::MAX) {
                return Err(TopologyError::Disconnected(unreached));
            }
        }
        Ok(CouplingGraph {
            n,
            edges,
            adjacency,
            dist,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, TopologyError> {
        let parsed: EdgeListJson =
            serde_json::from_str(text).map_err(|e| TopologyError::Json(e.to_string()))?;
        let edges: Vec<_> = parsed.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::from_edge_list(parsed.n, &edges)
    }

    /// `{"n": .., "edges": [[a, b], ..]}` with canonical edges.
    pub fn to_json(&self) -> String {
        let doc = EdgeListJson {
            n: self.n,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        };
        serde_json::to_string(&doc).expect("edge lists always serialize")
    }

    pub fn num_physical(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, p: usize) -> &[usize] {
        &self.adjacency[p]
    }

    #[inline]
    pub fn distance(&self, a: usize, b: usize) -> u32 {
        self.dist[a * self.n + b]
    }

    #[inline]
    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.distance(a, b) == 1
    }

    /// A shortest path from `a` to `b`, both ends included. At each step
    /// the lowest-numbered neighbour that gets closer is taken.
    pub fn shortest_path(&self, a: usize, b: usize) -> Vec<usize> {
        let mut path = vec![a];
        let mut at = a;
        while at != b {
            at = *self.adjacency[at]
                .iter()
                .find(|&&v| self.distance(v, b) + 1 == self.distance(at, b))
                .expect("connected graph has a closer neighbour");
            path.push(at);
        }
        path
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TopologyKind {
    Linear,
    Square,
    Full,
    Random,
    /// Heavy-hexagon lattice; the size parameter is the code distance.
    HeavyHex,
}

impl TopologyKind {
    pub const ALL: [TopologyKind; 5] = [
        TopologyKind::Linear,
        TopologyKind::Square,
        TopologyKind::Full,
        TopologyKind::Random,
        TopologyKind::HeavyHex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TopologyKind::Linear => "linear",
            TopologyKind::Square => "square",
            TopologyKind::Full => "full",
            TopologyKind::Random => "random",
            TopologyKind::HeavyHex => "heavy_hex",
        }
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TopologyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "heavy-hex" => Ok(TopologyKind::HeavyHex),
            _ => TopologyKind::ALL
                .into_iter()
                .find(|k| k.name() == s)
                .ok_or_else(|| format!("unknown topology kind `{s}`")),
        }
    }
}

/// Generates a standard topology.
///
/// `seed` and `extra_edge_fraction` only affect [`TopologyKind::Random`],
/// which is a uniform random spanning tree plus
/// `round(extra_edge_fraction * n)` further distinct edges.
pub fn generate_topology(
    kind: TopologyKind,
    n: usize,
    seed: u64,
    extra_edge_fraction: f64,
) -> Result<CouplingGraph, TopologyError> {
    if n == 0 {
        return Err(TopologyError::Empty);
    }
    let (n, edges) = match kind {
        TopologyKind::Linear => (n, (1..n).map(|i| (i - 1, i)).collect()),
        TopologyKind::Full => (
            n,
            (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .collect(),
        ),
        TopologyKind::Square => (n, grid_edges(n)),
        TopologyKind::Random => (n, random_edges(n, seed, extra_edge_fraction)),
        TopologyKind::HeavyHex => heavy_hex(n)?,
    };
    CouplingGraph::from_edge_list(n, &edges)
}

/// `r = floor(sqrt n)` rows of `c = ceil(n / r)` columns, row-major, last
/// row possibly short.
fn grid_edges(n: usize) -> Vec<(usize, usize)> {
    let r = (1..=n).take_while(|k| k * k <= n).last().unwrap_or(1);
    let c = n.div_ceil(r);
    let mut edges = Vec::new();
    for i in 0..n {
        if (i + 1) % c != 0 && i + 1 < n {
            edges.push((i, i + 1));
        }
        if i + c < n {
            edges.push((i, i + c));
        }
    }
    edges
}

fn random_edges(n: usize, seed: u64, extra_fraction: f64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = BTreeSet::new();
    if n == 2 {
        edges.insert((0, 1));
    } else if n > 2 {
        // Decode a random Prüfer sequence: uniform over labelled trees.
        let prufer: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
        let mut degree = vec![1usize; n];
        for &v in &prufer {
            degree[v] += 1;
        }
        let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        for &v in &prufer {
            let leaf = leaves.pop_first().expect("a tree always has a leaf");
            edges.insert((leaf.min(v), leaf.max(v)));
            degree[v] -= 1;
            if degree[v] == 1 {
                leaves.insert(v);
            }
        }
        let a = leaves.pop_first().unwrap();
        let b = leaves.pop_first().unwrap();
        edges.insert((a, b));
    }

    let wanted = (extra_fraction.max(0.0) * n as f64).round() as usize;
    let mut candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|e| !edges.contains(e))
        .collect();
    candidates.shuffle(&mut rng);
    edges.extend(candidates.into_iter().take(wanted));
    edges.into_iter().collect()
}

/// Heavy-hex lattice of odd distance `d`: `d` rows of `2d - 1` qubits
/// joined by bridge qubits. Bridges sit at columns 0, 4, 8, .. below even
/// rows and at columns 2, 6, .. plus the last column below odd rows, giving
/// `(5d^2 - 2d - 1) / 2` qubits.
pub fn heavy_hex(d: usize) -> Result<(usize, Vec<(usize, usize)>), TopologyError> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(TopologyError::HeavyHexDistance(d));
    }
    let width = 2 * d - 1;
    let row = |r: usize, col: usize| r * width + col;
    let mut edges = Vec::new();
    for r in 0..d {
        for col in 1..width {
            edges.push((row(r, col - 1), row(r, col)));
        }
    }
    let mut next = d * width;
    for gap in 0..d - 1 {
        let mut cols: Vec<usize> = if gap % 2 == 0 {
            (0..width).step_by(4).collect()
        } else {
            (2..width).step_by(4).collect()
        };
        if gap % 2 == 1 && !cols.contains(&(width - 1)) {
            cols.push(width - 1);
        }
        for col in cols {
            edges.push((row(gap, col), next));
            edges.push((next, row(gap + 1, col)));
            next += 1;
        }
    }
    Ok((next, edges))
}
