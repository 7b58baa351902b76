//! Combinatorial substrate: symmetric directed graphs, simple cycles,
//! connectivity, edge components and spanning forests.

mod components;
mod connectivity;
mod cycles;
mod forest;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{validate_metric, FiniteMetricSpace};
use crate::scalar::{Rational, Scalar};

pub use components::{block_cut_tree, edge_components, BlockCutTree};
pub use connectivity::{is_2_connected, is_3_connected, is_k_connected, vertex_connectivity, ConnectivityReport};
pub use cycles::{simple_cycles, CycleList, CycleOptions, CycleSet, SimpleCycle, DEFAULT_MAX_CYCLES};
pub use forest::{
    exhaustive_bases, extend_to_basis, has_unoriented_cycle, is_basis, is_basis_of, molecule_rank, random_basis,
    rank_of, UnionFind,
};

/// A directed edge. Undirected edge `k` (stored as `(u, v)` with `u < v`)
/// has the two orientations `2k` (`u → v`) and `2k + 1` (`v → u`), so the
/// opposite edge `−e` is `e ^ 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

impl EdgeId {
    pub fn new(undirected: usize, reversed: bool) -> Self {
        EdgeId((undirected as u32) << 1 | reversed as u32)
    }

    pub fn undirected(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_reversed(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn rev(self) -> Self {
        EdgeId(self.0 ^ 1)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}{}", self.undirected(), if self.is_reversed() { "-" } else { "+" })
    }
}

/// An undirected simple graph viewed as a directed graph in which every edge
/// comes with its opposite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedSymGraph {
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, EdgeId)>>,
    lookup: HashMap<(usize, usize), usize>,
}

impl DirectedSymGraph {
    /// Builds a graph from undirected vertex pairs. Duplicate pairs are
    /// merged; loops are rejected.
    pub fn new(labels: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut seen = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if seen.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let mut g = DirectedSymGraph { labels, edges: Vec::new(), adj: vec![Vec::new(); n], lookup: HashMap::new() };
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::UnknownLabel(format!("#{}", a.max(b))));
            }
            if a == b {
                return Err(Error::SamePoint(g.labels[a].clone()));
            }
            let key = (a.min(b), a.max(b));
            if g.lookup.contains_key(&key) {
                continue;
            }
            let k = g.edges.len();
            g.edges.push(key);
            g.lookup.insert(key, k);
            g.adj[key.0].push((key.1, EdgeId::new(k, false)));
            g.adj[key.1].push((key.0, EdgeId::new(k, true)));
        }
        for list in &mut g.adj {
            list.sort();
        }
        Ok(g)
    }

    /// Builds a graph from label pairs, in the order the vertex labels are given.
    pub fn from_labeled(vertices: &[String], edges: &[(String, String)]) -> Result<Self> {
        let index: HashMap<&str, usize> = vertices.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut pairs = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let ia = *index.get(a.as_str()).ok_or_else(|| Error::UnknownLabel(a.clone()))?;
            let ib = *index.get(b.as_str()).ok_or_else(|| Error::UnknownLabel(b.clone()))?;
            pairs.push((ia, ib));
        }
        DirectedSymGraph::new(vertices.to_vec(), &pairs)
    }

    /// Numbered vertices `"0"`, `"1"`, ...
    pub fn numbered(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        DirectedSymGraph::new((0..n).map(|i| i.to_string()).collect(), pairs)
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_directed(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Undirected edges as `(u, v)` with `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn directed_edges(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.num_directed() as u32).map(EdgeId)
    }

    pub fn source(&self, e: EdgeId) -> usize {
        let (u, v) = self.edges[e.undirected()];
        if e.is_reversed() {
            v
        } else {
            u
        }
    }

    pub fn target(&self, e: EdgeId) -> usize {
        self.source(e.rev())
    }

    pub fn endpoints(&self, e: EdgeId) -> (usize, usize) {
        (self.source(e), self.target(e))
    }

    /// The undirected edge index joining `u` and `v`.
    pub fn undirected_between(&self, u: usize, v: usize) -> Option<usize> {
        self.lookup.get(&(u.min(v), u.max(v))).copied()
    }

    /// The directed edge `u → v`.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<EdgeId> {
        self.undirected_between(u, v).map(|k| EdgeId::new(k, u > v))
    }

    /// Neighbours of `v` with the directed edge leaving `v`.
    pub fn neighbors(&self, v: usize) -> &[(usize, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_without(&[])
    }

    /// Connectivity after deleting `removed` (a graph with at most one
    /// remaining vertex counts as connected).
    pub fn is_connected_without(&self, removed: &[usize]) -> bool {
        let n = self.num_vertices();
        let mut dead = vec![false; n];
        for &r in removed {
            dead[r] = true;
        }
        let Some(start) = (0..n).find(|&v| !dead[v]) else { return true };
        let mut seen = dead.clone();
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// BFS distances from `source` in edge count.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_vertices()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].unwrap();
            for &(w, _) in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(dv + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// The subgraph on the given undirected edges, keeping only incident
    /// vertices. Returns the subgraph and, for each of its vertices, the
    /// vertex of `self` it came from.
    pub fn edge_subgraph(&self, edges: &[usize]) -> (DirectedSymGraph, Vec<usize>) {
        let mut vertices: Vec<usize> = edges.iter().flat_map(|&k| [self.edges[k].0, self.edges[k].1]).collect();
        vertices.sort_unstable();
        vertices.dedup();
        let pos: HashMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut sorted = edges.to_vec();
        sorted.sort_unstable();
        let pairs: Vec<(usize, usize)> =
            sorted.iter().map(|&k| (pos[&self.edges[k].0], pos[&self.edges[k].1])).collect();
        let labels = vertices.iter().map(|&v| self.labels[v].clone()).collect();
        (DirectedSymGraph::new(labels, &pairs).expect("subgraph of a valid graph"), vertices)
    }

    /// Directed edges as label pairs, for reports.
    pub fn edge_labels(&self, e: EdgeId) -> (String, String) {
        let (u, v) = self.endpoints(e);
        (self.labels[u].clone(), self.labels[v].clone())
    }
}

/// The graph metric (shortest-path edge count) of a connected graph.
pub fn graph_metric(g: &DirectedSymGraph) -> Result<FiniteMetricSpace<Rational>> {
    graph_metric_as(g)
}

/// The graph metric in an arbitrary scalar type.
pub fn graph_metric_as<S: Scalar>(g: &DirectedSymGraph) -> Result<FiniteMetricSpace<S>> {
    let n = g.num_vertices();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    let mut d = Vec::with_capacity(n);
    for v in 0..n {
        let row = g.bfs_distances(v);
        let mut out = Vec::with_capacity(n);
        for x in row {
            out.push(S::from_i64(x.ok_or(Error::NotConnected)? as i64));
        }
        d.push(out);
    }
    validate_metric(d, g.labels.clone())
}

/// Small named graphs used by tests, benches and the CLI.
pub mod families {
    use super::DirectedSymGraph;

    pub fn path(edges: usize) -> DirectedSymGraph {
        let pairs: Vec<_> = (0..edges).map(|i| (i, i + 1)).collect();
        DirectedSymGraph::numbered(edges + 1, &pairs).unwrap()
    }

    pub fn cycle(n: usize) -> DirectedSymGraph {
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        DirectedSymGraph::numbered(n, &pairs).unwrap()
    }

    pub fn complete(n: usize) -> DirectedSymGraph {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((i, j));
            }
        }
        DirectedSymGraph::numbered(n, &pairs).unwrap()
    }

    /// Two triangles sharing vertex 0.
    pub fn bowtie() -> DirectedSymGraph {
        DirectedSymGraph::numbered(5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]).unwrap()
    }

    /// Hubs 0 and 1 joined by paths whose interior lengths are given
    /// (`theta(&[1, 1, 1])` has three paths of two edges each).
    pub fn theta(interiors: &[usize]) -> DirectedSymGraph {
        let mut pairs = Vec::new();
        let mut next = 2;
        for &k in interiors {
            let mut prev = 0;
            for _ in 0..k {
                pairs.push((prev, next));
                prev = next;
                next += 1;
            }
            pairs.push((prev, 1));
        }
        DirectedSymGraph::numbered(next, &pairs).unwrap()
    }

    /// Hub `0` joined to every vertex of a rim cycle on `rim` vertices.
    pub fn wheel(rim: usize) -> DirectedSymGraph {
        let mut pairs: Vec<_> = (0..rim).map(|i| (1 + i, 1 + (i + 1) % rim)).collect();
        pairs.extend((0..rim).map(|i| (0, 1 + i)));
        DirectedSymGraph::numbered(rim + 1, &pairs).unwrap()
    }

    /// Triangular prism: two triangles joined by a perfect matching.
    pub fn prism() -> DirectedSymGraph {
        DirectedSymGraph::numbered(
            6,
            &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)],
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn edge_ids_encode_orientation() {
        let g = families::path(2);
        let e = g.edge_between(1, 0).unwrap();
        assert_eq!(g.endpoints(e), (1, 0));
        assert_eq!(g.endpoints(e.rev()), (0, 1));
        assert_eq!(e.rev().rev(), e);
        assert_eq!(g.num_directed(), 4);
    }

    #[test]
    fn rejects_loops_and_unknown_vertices() {
        assert!(matches!(DirectedSymGraph::numbered(2, &[(0, 0)]), Err(Error::SamePoint(_))));
        assert!(matches!(DirectedSymGraph::numbered(2, &[(0, 2)]), Err(Error::UnknownLabel(_))));
        assert_eq!(DirectedSymGraph::numbered(2, &[(0, 1), (1, 0)]).unwrap().num_edges(), 1);
    }

    #[test]
    fn graph_metric_of_c4() {
        let m = graph_metric(&families::cycle(4)).unwrap();
        assert_eq!(*m.dist(0, 2), rat(2, 1));
        assert_eq!(*m.dist(0, 3), rat(1, 1));
        let disconnected = DirectedSymGraph::numbered(3, &[(0, 1)]).unwrap();
        assert_eq!(graph_metric(&disconnected).unwrap_err(), Error::NotConnected);
    }

    #[test]
    fn families_have_expected_sizes() {
        assert_eq!(families::theta(&[1, 1, 1]).num_vertices(), 5);
        assert_eq!(families::theta(&[1, 1, 1]).num_edges(), 6);
        assert_eq!(families::wheel(5).num_edges(), 10);
        assert_eq!(families::prism().num_edges(), 9);
        assert_eq!(families::bowtie().num_edges(), 6);
    }
}
