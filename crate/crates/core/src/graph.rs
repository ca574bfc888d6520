//! Interaction graphs with positive couplings.
//!
//! A [`CouplingGraph`] is validated on construction: at least two vertices,
//! canonical `i < j` edges without duplicates or self-loops, strictly positive
//! couplings, and connectivity. Every unordered pair appears at most once, so
//! the Hamiltonian sum runs over each edge exactly once.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("edge list is empty")]
    EmptyEdgeList,
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("coupling on edge ({i}, {j}) must be strictly positive, got {coupling}")]
    NonPositiveCoupling { i: usize, j: usize, coupling: f64 },
    #[error("graph is disconnected: vertex {unreachable} is not reachable from vertex 0")]
    DisconnectedGraph { unreachable: usize },
    #[error("vertex index {index} out of range for {vertex_count} vertices")]
    IndexOutOfRange { index: usize, vertex_count: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
}

/// One undirected bond, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub coupling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
}

/// Two distinct vertices, each removable without disconnecting the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovablePair {
    pub first: usize,
    pub second: usize,
}

impl CouplingGraph {
    /// Validates and canonicalizes an edge list. Edge endpoints may be given
    /// in either order; they are stored sorted by `(i, j)`.
    pub fn build(vertex_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        let g = Self::build_allow_disconnected(vertex_count, edges)?;
        if let Some(unreachable) = g.first_unreachable(None) {
            return Err(GraphError::DisconnectedGraph { unreachable });
        }
        Ok(g)
    }

    /// Same as [`CouplingGraph::build`] without the connectivity check.
    ///
    /// Only meant for negative controls: the ground-state guarantees do not
    /// hold for disconnected graphs.
    pub fn build_allow_disconnected(vertex_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        if vertex_count < 2 {
            return Err(GraphError::TooFewVertices(vertex_count));
        }
        if edges.is_empty() {
            return Err(GraphError::EmptyEdgeList);
        }
        let mut seen = BTreeSet::new();
        let mut canonical = Vec::with_capacity(edges.len());
        for &(a, b, coupling) in edges {
            for v in [a, b] {
                if v >= vertex_count {
                    return Err(GraphError::IndexOutOfRange { index: v, vertex_count });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if coupling.is_nan() || coupling <= 0.0 || !coupling.is_finite() {
                return Err(GraphError::NonPositiveCoupling { i, j, coupling });
            }
            if !seen.insert((i, j)) {
                return Err(GraphError::DuplicateEdge(i, j));
            }
            canonical.push(Edge { i, j, coupling });
        }
        canonical.sort_by_key(|e| (e.i, e.j));
        Ok(Self { vertex_count, edges: canonical })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_coupling(&self) -> f64 {
        self.edges.iter().map(|e| e.coupling).sum()
    }

    pub fn min_coupling(&self) -> f64 {
        self.edges.iter().map(|e| e.coupling).fold(f64::INFINITY, f64::min)
    }

    /// Distinct coupling values in ascending order.
    pub fn distinct_couplings(&self) -> Vec<f64> {
        let mut js: Vec<f64> = self.edges.iter().map(|e| e.coupling).collect();
        js.sort_by(f64::total_cmp);
        js.dedup();
        js
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        self.edges.binary_search_by_key(&(i, j), |e| (e.i, e.j)).is_ok()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        adj
    }

    /// BFS from the lowest surviving vertex; returns a vertex it misses.
    fn first_unreachable(&self, removed: Option<usize>) -> Option<usize> {
        let n = self.vertex_count;
        let adj = self.adjacency();
        let start = (0..n).find(|&v| Some(v) != removed)?;
        let mut visited = vec![false; n];
        if let Some(r) = removed {
            visited[r] = true;
        }
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !visited[w] {
                    visited[w] = true;
                    queue.push_back(w);
                }
            }
        }
        visited.iter().position(|&seen| !seen)
    }

    /// True iff deleting `v` and its incident edges leaves the remaining
    /// `N - 1` vertices connected.
    pub fn is_connected_without(&self, v: usize) -> Result<bool, GraphError> {
        if v >= self.vertex_count {
            return Err(GraphError::IndexOutOfRange { index: v, vertex_count: self.vertex_count });
        }
        Ok(self.first_unreachable(Some(v)).is_none())
    }

    /// Every vertex whose removal keeps the graph connected, ascending.
    pub fn removable_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count).filter(|&v| self.first_unreachable(Some(v)).is_none()).collect()
    }

    /// Two distinct non-cut vertices.
    ///
    /// Builds a depth-first spanning tree rooted at vertex 0 and returns the
    /// two lowest-numbered vertices of tree degree one. Deleting a tree leaf
    /// leaves the rest of the tree intact, so a leaf is never a cut vertex.
    pub fn find_removable_pair(&self) -> Result<RemovablePair, GraphError> {
        let n = self.vertex_count;
        let adj = self.adjacency();
        let mut tree_degree = vec![0usize; n];
        let mut visited = vec![false; n];
        let mut stack = vec![(0usize, 0usize)];
        visited[0] = true;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if let Some(&w) = adj[v].get(*next) {
                *next += 1;
                if !visited[w] {
                    visited[w] = true;
                    tree_degree[v] += 1;
                    tree_degree[w] += 1;
                    stack.push((w, 0));
                }
            } else {
                stack.pop();
            }
        }
        if let Some(v) = visited.iter().position(|&seen| !seen) {
            return Err(GraphError::InternalInvariantViolation(format!("spanning tree misses vertex {v}")));
        }
        let mut leaves = (0..n).filter(|&v| tree_degree[v] == 1);
        let (Some(first), Some(second)) = (leaves.next(), leaves.next()) else {
            return Err(GraphError::InternalInvariantViolation("spanning tree has fewer than two leaves".into()));
        };
        for v in [first, second] {
            if !self.is_connected_without(v)? {
                return Err(GraphError::InternalInvariantViolation(format!("tree leaf {v} is a cut vertex")));
            }
        }
        Ok(RemovablePair { first, second })
    }

    /// Serializes to the line-oriented edge-list format read by
    /// [`parse_edge_list`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("N {}\n", self.vertex_count);
        for e in &self.edges {
            let _ = writeln!(out, "E {} {} {:?}", e.i, e.j, e.coupling);
        }
        out
    }
}

/// Parses the edge-list text format:
///
/// ```text
/// # comment
/// N 3
/// E 0 1 1.0
/// E 1 2 0.5
/// ```
///
/// Blank lines and lines starting with `#` are skipped. Errors carry the
/// 1-based line number; graph-level validation failures (disconnected,
/// duplicate edges) are reported against the line that introduced them or,
/// for connectivity, the header line.
pub fn parse_edge_list(text: &str) -> Result<CouplingGraph, GraphError> {
    let mut vertex_count: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut edge_lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| GraphError::Parse { line, message };
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match (vertex_count, fields.as_slice()) {
            (None, ["N", count]) => {
                let count = count.parse::<usize>().map_err(|_| parse_err(format!("invalid vertex count '{count}'")))?;
                vertex_count = Some((count, line));
            }
            (None, _) => return Err(parse_err(format!("expected 'N <vertex_count>', found '{trimmed}'"))),
            (Some(_), ["E", i, j, coupling]) => {
                let i = i.parse::<usize>().map_err(|_| parse_err(format!("invalid vertex index '{i}'")))?;
                let j = j.parse::<usize>().map_err(|_| parse_err(format!("invalid vertex index '{j}'")))?;
                let coupling =
                    coupling.parse::<f64>().map_err(|_| parse_err(format!("invalid coupling '{coupling}'")))?;
                edges.push((i, j, coupling));
                edge_lines.push(line);
            }
            (Some(_), _) => return Err(parse_err(format!("expected 'E <i> <j> <J>', found '{trimmed}'"))),
        }
    }
    let Some((count, header_line)) = vertex_count else {
        return Err(GraphError::Parse {
            line: text.lines().count().max(1),
            message: "missing 'N <vertex_count>' header".into(),
        });
    };
    // Validate edge by edge first so local errors point at their own line.
    for (prefix_len, &line) in edge_lines.iter().enumerate() {
        if let Err(err) = CouplingGraph::build_allow_disconnected(count, &edges[..=prefix_len]) {
            return Err(GraphError::Parse { line, message: err.to_string() });
        }
    }
    CouplingGraph::build(count, &edges).map_err(|err| GraphError::Parse { line: header_line, message: err.to_string() })
}

/// Graph families accepted by [`generate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphKind {
    Chain(usize),
    Ring(usize),
    Grid {
        rows: usize,
        cols: usize,
    },
    Complete(usize),
    /// Vertex 0 joined to every other vertex.
    Star(usize),
    /// Random spanning tree plus each remaining pair with probability `edge_prob`.
    RandomConnected {
        vertex_count: usize,
        edge_prob: f64,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingRule {
    Uniform(f64),
    /// Independent draws from `(lo, hi]`.
    RandomUniform {
        lo: f64,
        hi: f64,
        seed: u64,
    },
}

impl GraphKind {
    pub fn vertex_count(&self) -> usize {
        match *self {
            GraphKind::Chain(n) | GraphKind::Ring(n) | GraphKind::Complete(n) | GraphKind::Star(n) => n,
            GraphKind::Grid { rows, cols } => rows * cols,
            GraphKind::RandomConnected { vertex_count, .. } => vertex_count,
        }
    }

    fn pairs(&self) -> Result<Vec<(usize, usize)>, GraphError> {
        let n = self.vertex_count();
        if n < 2 {
            return Err(GraphError::InvalidParameter(format!("need at least 2 vertices, got {n}")));
        }
        let pairs = match *self {
            GraphKind::Chain(n) => (0..n - 1).map(|i| (i, i + 1)).collect(),
            GraphKind::Ring(n) => {
                if n < 3 {
                    return Err(GraphError::InvalidParameter(format!("ring needs at least 3 vertices, got {n}")));
                }
                let mut p: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
                p.push((0, n - 1));
                p
            }
            GraphKind::Grid { rows, cols } => {
                let mut p = Vec::new();
                for r in 0..rows {
                    for c in 0..cols {
                        let v = r * cols + c;
                        if c + 1 < cols {
                            p.push((v, v + 1));
                        }
                        if r + 1 < rows {
                            p.push((v, v + cols));
                        }
                    }
                }
                p
            }
            GraphKind::Complete(n) => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
            GraphKind::Star(n) => (1..n).map(|j| (0, j)).collect(),
            GraphKind::RandomConnected { vertex_count: n, edge_prob, seed } => {
                if !(0.0..=1.0).contains(&edge_prob) {
                    return Err(GraphError::InvalidParameter(format!(
                        "edge probability must lie in [0, 1], got {edge_prob}"
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut rng);
                let mut in_tree = BTreeSet::new();
                for t in 1..n {
                    let parent = order[rng.random_range(0..t)];
                    let v = order[t];
                    in_tree.insert((parent.min(v), parent.max(v)));
                }
                let mut p: Vec<_> = in_tree.iter().copied().collect();
                for i in 0..n {
                    for j in i + 1..n {
                        if !in_tree.contains(&(i, j)) && rng.random_bool(edge_prob) {
                            p.push((i, j));
                        }
                    }
                }
                p.sort_unstable();
                p
            }
        };
        Ok(pairs)
    }
}

/// Builds a graph from a family and a coupling rule; deterministic for fixed seeds.
pub fn generate(kind: GraphKind, rule: CouplingRule) -> Result<CouplingGraph, GraphError> {
    let pairs = kind.pairs()?;
    let couplings: Vec<f64> = match rule {
        CouplingRule::Uniform(j) => {
            if j.is_nan() || j <= 0.0 || !j.is_finite() {
                return Err(GraphError::InvalidParameter(format!("uniform coupling must be positive, got {j}")));
            }
            vec![j; pairs.len()]
        }
        CouplingRule::RandomUniform { lo, hi, seed } => {
            if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
                return Err(GraphError::InvalidParameter(format!(
                    "random couplings need 0 <= lo < hi, got ({lo}, {hi}]"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // hi - u*(hi - lo) with u in [0, 1) lands in (lo, hi].
            (0..pairs.len()).map(|_| hi - rng.random::<f64>() * (hi - lo)).collect()
        }
    };
    let edges: Vec<_> = pairs.iter().zip(couplings).map(|(&(i, j), c)| (i, j, c)).collect();
    CouplingGraph::build(kind.vertex_count(), &edges)
}
