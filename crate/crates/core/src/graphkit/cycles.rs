//! Enumeration of simple directed cycles.
//!
//! Each simple undirected cycle of length ≥ 3 is found once per orientation
//! by a backtracking search rooted at its smallest vertex, which never
//! revisits vertices below the root. The 2-cycles `{e, −e}` are added
//! separately when requested.

use std::collections::HashSet;

use serde::Serialize;

use super::{DirectedSymGraph, EdgeId};
use crate::error::{Error, Result};

/// Default cap on the number of cycles collected.
pub const DEFAULT_MAX_CYCLES: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CycleOptions {
    pub min_len: usize,
    /// `None` means the number of vertices.
    pub max_len: Option<usize>,
    pub max_count: usize,
}

impl Default for CycleOptions {
    fn default() -> Self {
        CycleOptions { min_len: 3, max_len: None, max_count: DEFAULT_MAX_CYCLES }
    }
}

impl CycleOptions {
    pub fn with_min_len(min_len: usize) -> Self {
        CycleOptions { min_len, ..Default::default() }
    }
}

/// A simple directed cycle as an edge sequence, rotated so the smallest
/// edge id comes first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SimpleCycle {
    edges: Vec<EdgeId>,
}

impl SimpleCycle {
    /// Canonicalizes a closed edge walk. The caller guarantees simplicity.
    pub fn from_edges(mut edges: Vec<EdgeId>) -> Self {
        if let Some(pos) = edges.iter().enumerate().min_by_key(|(_, e)| **e).map(|(i, _)| i) {
            edges.rotate_left(pos);
        }
        SimpleCycle { edges }
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The same cycle traversed backwards: `(−eₙ, …, −e₁)`.
    pub fn reversed(&self) -> SimpleCycle {
        SimpleCycle::from_edges(self.edges.iter().rev().map(|e| e.rev()).collect())
    }

    /// Edge set as a sorted vector, the key used for set semantics.
    pub fn edge_set(&self) -> Vec<EdgeId> {
        let mut s = self.edges.clone();
        s.sort_unstable();
        s
    }

    pub fn vertices(&self, g: &DirectedSymGraph) -> Vec<usize> {
        self.edges.iter().map(|&e| g.source(e)).collect()
    }
}

/// Result of [`simple_cycles`]; `complete` is false when the count cap cut
/// the enumeration short.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleList {
    pub cycles: Vec<SimpleCycle>,
    pub complete: bool,
}

impl CycleList {
    pub fn require_complete(self, cap: usize) -> Result<Vec<SimpleCycle>> {
        if self.complete {
            Ok(self.cycles)
        } else {
            Err(Error::CapExceeded { cap })
        }
    }
}

/// All simple directed cycles with `min_len ≤ length ≤ max_len`, in
/// canonical order.
pub fn simple_cycles(g: &DirectedSymGraph, opts: CycleOptions) -> Result<CycleList> {
    if opts.min_len < 2 {
        return Err(Error::PreconditionViolated("min_len must be at least 2".into()));
    }
    let n = g.num_vertices();
    let max_len = opts.max_len.unwrap_or(n).max(2);
    let mut out: Vec<SimpleCycle> = Vec::new();
    let mut complete = true;

    if opts.min_len <= 2 && max_len >= 2 {
        for k in 0..g.num_edges() {
            if out.len() >= opts.max_count {
                complete = false;
                break;
            }
            out.push(SimpleCycle::from_edges(vec![EdgeId::new(k, false), EdgeId::new(k, true)]));
        }
    }

    let min_long = opts.min_len.max(3);
    if complete && max_len >= min_long {
        let mut on_path = vec![false; n];
        let mut path: Vec<EdgeId> = Vec::new();
        'roots: for root in 0..n {
            on_path[root] = true;
            let mut search = Search { g, root, min_len: min_long, max_len, cap: opts.max_count, out: &mut out };
            if !search.extend(root, &mut on_path, &mut path) {
                complete = false;
                break 'roots;
            }
            on_path[root] = false;
        }
    }

    out.sort();
    Ok(CycleList { cycles: out, complete })
}

struct Search<'a> {
    g: &'a DirectedSymGraph,
    root: usize,
    min_len: usize,
    max_len: usize,
    cap: usize,
    out: &'a mut Vec<SimpleCycle>,
}

impl Search<'_> {
    /// Returns false once the cap is exceeded.
    fn extend(&mut self, v: usize, on_path: &mut [bool], path: &mut Vec<EdgeId>) -> bool {
        for &(w, e) in self.g.neighbors(v) {
            if w == self.root {
                let len = path.len() + 1;
                if len >= self.min_len && len <= self.max_len {
                    if self.out.len() >= self.cap {
                        return false;
                    }
                    let mut edges = path.clone();
                    edges.push(e);
                    self.out.push(SimpleCycle::from_edges(edges));
                }
                continue;
            }
            if w < self.root || on_path[w] || path.len() + 1 >= self.max_len {
                continue;
            }
            on_path[w] = true;
            path.push(e);
            let ok = self.extend(w, on_path, path);
            path.pop();
            on_path[w] = false;
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Membership test for cycles given as edge sets.
#[derive(Clone, Debug, Default)]
pub struct CycleSet {
    sets: HashSet<Vec<EdgeId>>,
}

impl CycleSet {
    pub fn new(cycles: &[SimpleCycle]) -> Self {
        CycleSet { sets: cycles.iter().map(|c| c.edge_set()).collect() }
    }

    /// `edges` in any order.
    pub fn contains_edges(&self, edges: &[EdgeId]) -> bool {
        let mut s = edges.to_vec();
        s.sort_unstable();
        self.sets.contains(&s)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}
