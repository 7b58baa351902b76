//! Vertex connectivity by unit-capacity max-flow on the split graph.
//!
//! We use the standard convention: a graph is k-connected when it has more
//! than k vertices and stays connected after deleting any k − 1 of them.

use std::collections::VecDeque;

use serde::Serialize;

use super::DirectedSymGraph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectivityReport {
    pub k: usize,
    pub connected: bool,
    /// A separating vertex set of size < k when one exists. `None` when the
    /// graph fails only because it has too few vertices.
    pub min_cut: Option<Vec<usize>>,
}

pub fn is_2_connected(g: &DirectedSymGraph) -> ConnectivityReport {
    is_k_connected(g, 2)
}

pub fn is_3_connected(g: &DirectedSymGraph) -> ConnectivityReport {
    is_k_connected(g, 3)
}

pub fn is_k_connected(g: &DirectedSymGraph, k: usize) -> ConnectivityReport {
    let n = g.num_vertices();
    if !g.is_connected() {
        return ConnectivityReport { k, connected: false, min_cut: Some(Vec::new()) };
    }
    match separator_below(g, k) {
        Some(cut) => ConnectivityReport { k, connected: false, min_cut: Some(cut) },
        None => ConnectivityReport { k, connected: n > k, min_cut: None },
    }
}

/// Vertex connectivity κ(G); `n − 1` for complete graphs.
pub fn vertex_connectivity(g: &DirectedSymGraph) -> usize {
    let n = g.num_vertices();
    if !g.is_connected() {
        return 0;
    }
    let mut best = n.saturating_sub(1);
    for s in 0..n {
        for t in s + 1..n {
            if g.undirected_between(s, t).is_none() {
                best = best.min(FlowNet::new(g, s, t).max_flow(best).0);
            }
        }
    }
    best
}

/// A vertex separator of size < k, if any.
fn separator_below(g: &DirectedSymGraph, k: usize) -> Option<Vec<usize>> {
    let n = g.num_vertices();
    let mut best: Option<Vec<usize>> = None;
    for s in 0..n {
        for t in s + 1..n {
            if g.undirected_between(s, t).is_some() {
                continue;
            }
            let limit = best.as_ref().map_or(k, |c| c.len());
            let mut net = FlowNet::new(g, s, t);
            let (flow, saturated) = net.max_flow(limit);
            if !saturated {
                let cut = net.min_cut();
                debug_assert_eq!(cut.len(), flow);
                if cut.is_empty() {
                    return Some(cut);
                }
                best = Some(cut);
            }
        }
    }
    best
}

/// Split graph: vertex v becomes `2v` (in) and `2v + 1` (out) joined by a
/// unit arc; graph edges become unbounded arcs between out and in copies.
struct FlowNet {
    head: Vec<usize>,
    cap: Vec<i64>,
    adj: Vec<Vec<usize>>,
    src: usize,
    sink: usize,
}

impl FlowNet {
    fn new(g: &DirectedSymGraph, s: usize, t: usize) -> Self {
        let n = g.num_vertices();
        let big = n as i64 + 1;
        let mut net = FlowNet { head: Vec::new(), cap: Vec::new(), adj: vec![Vec::new(); 2 * n], src: 2 * s + 1, sink: 2 * t };
        for v in 0..n {
            let c = if v == s || v == t { big } else { 1 };
            net.arc(2 * v, 2 * v + 1, c);
        }
        for &(u, v) in g.edges() {
            net.arc(2 * u + 1, 2 * v, big);
            net.arc(2 * v + 1, 2 * u, big);
        }
        net
    }

    fn arc(&mut self, u: usize, v: usize, c: i64) {
        self.adj[u].push(self.head.len());
        self.head.push(v);
        self.cap.push(c);
        self.adj[v].push(self.head.len());
        self.head.push(u);
        self.cap.push(0);
    }

    /// Augments until `limit` units flow or no path remains. Returns the
    /// flow and whether the limit was reached.
    fn max_flow(&mut self, limit: usize) -> (usize, bool) {
        let mut flow = 0;
        while flow < limit {
            let mut pred: Vec<Option<usize>> = vec![None; self.adj.len()];
            let mut seen = vec![false; self.adj.len()];
            seen[self.src] = true;
            let mut queue = VecDeque::from([self.src]);
            while let Some(u) = queue.pop_front() {
                if u == self.sink {
                    break;
                }
                for &a in &self.adj[u] {
                    let v = self.head[a];
                    if self.cap[a] > 0 && !seen[v] {
                        seen[v] = true;
                        pred[v] = Some(a);
                        queue.push_back(v);
                    }
                }
            }
            if !seen[self.sink] {
                return (flow, false);
            }
            let mut v = self.sink;
            while let Some(a) = pred[v] {
                self.cap[a] -= 1;
                self.cap[a ^ 1] += 1;
                v = self.head[a ^ 1];
            }
            flow += 1;
        }
        (flow, true)
    }

    /// Vertices whose unit arc crosses the residual reachability frontier.
    fn min_cut(&self) -> Vec<usize> {
        let mut seen = vec![false; self.adj.len()];
        seen[self.src] = true;
        let mut queue = VecDeque::from([self.src]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let v = self.head[a];
                if self.cap[a] > 0 && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        (0..self.adj.len() / 2).filter(|&v| seen[2 * v] && !seen[2 * v + 1]).collect()
    }
}
