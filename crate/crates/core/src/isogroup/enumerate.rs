//! Backtracking search for edge bijections satisfying (Sa), (Sb) and
//! optionally (Sc).
//!
//! Undirected edges of the source are assigned a directed image one at a
//! time. Pruning uses three necessary conditions that only look at pairs of
//! edges: equal cycle-length signatures, equal co-cycle counts (how many
//! simple cycles contain both directed edges) and equal weight ratios on
//! co-cyclic pairs. Every cycle is checked explicitly as soon as its last
//! edge is assigned.

use std::cmp::Ordering;

use serde::Serialize;

use super::conditions::sc_failure;
use super::{Caps, Mode};
use crate::error::{Error, Result};
use crate::extgraph::{classify_ext, ext_graph, ExtGraph, PragueClass};
use crate::graphkit::{CycleSet, EdgeId, SimpleCycle};
use crate::metric::FiniteMetricSpace;
use crate::scalar::Scalar;
use crate::whitney::SignedEdgeBijection;

/// Result of a search, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaSet {
    #[serde(skip)]
    pub sigmas: Vec<SignedEdgeBijection>,
    /// Conditions actually enforced. A weak-Prague-only edge set forces (Sc).
    pub mode: Mode,
    pub nodes: u64,
}

impl SigmaSet {
    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }
}

/// Every `σ : E_ext(M) → E_ext(M)` passing the conditions of `mode`.
pub fn enumerate_sigma<S: Scalar>(m: &FiniteMetricSpace<S>, mode: Mode, caps: &Caps) -> Result<SigmaSet> {
    let g = ext_graph(m);
    find_sigmas(&g, &g, m, m, mode, caps, None)
}

/// Bijections between two edge sets, stopping after `limit` hits if given.
pub fn find_sigmas<S: Scalar>(
    g1: &ExtGraph<S>,
    g2: &ExtGraph<S>,
    m1: &FiniteMetricSpace<S>,
    m2: &FiniteMetricSpace<S>,
    mode: Mode,
    caps: &Caps,
    limit: Option<usize>,
) -> Result<SigmaSet> {
    let mut mode = mode;
    for (m, g) in [(m1, g1), (m2, g2)] {
        match classify_ext(m, g).class {
            PragueClass::NotWeakPrague => return Err(Error::NotWeakPrague),
            PragueClass::WeakPragueOnly => mode = Mode::SaSbSc,
            PragueClass::Prague => {}
        }
    }
    let mut out = SigmaSet { sigmas: Vec::new(), mode, nodes: 0 };
    let n_edges = g1.graph().num_edges();
    if n_edges != g2.graph().num_edges() {
        return Ok(out);
    }
    let c1 = caps.long_cycles(g1.graph())?;
    let c2 = caps.long_cycles(g2.graph())?;
    if c1.len() != c2.len() {
        return Ok(out);
    }
    let side1 = Census::new(n_edges, &c1);
    let side2 = Census::new(n_edges, &c2);
    let mut s1 = side1.signature.clone();
    let mut s2 = side2.signature.clone();
    s1.sort_unstable();
    s2.sort_unstable();
    if s1 != s2 {
        return Ok(out);
    }

    let order = edge_order(n_edges, &side1);
    let mut pos = vec![0; n_edges];
    for (i, &k) in order.iter().enumerate() {
        pos[k] = i;
    }
    // Cycles to check at each depth: one orientation per undirected cycle,
    // at the depth of its last assigned edge.
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); n_edges];
    for (i, c) in c1.iter().enumerate() {
        if *c > c.reversed() {
            continue;
        }
        let last = c.edges().iter().map(|e| pos[e.undirected()]).max().unwrap();
        due[last].push(i);
    }

    let mut search = Search {
        g1,
        g2,
        m1,
        m2,
        mode,
        side1,
        side2,
        c1: &c1,
        set2: CycleSet::new(&c2),
        order,
        due,
        image: vec![None; n_edges],
        used: vec![false; n_edges],
        nodes: 0,
        cap: caps.search_nodes,
        limit,
        found: Vec::new(),
    };
    search.run(0)?;
    out.nodes = search.nodes;
    out.sigmas = search.found;
    out.sigmas.sort();
    Ok(out)
}

fn mix(x: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Cycle statistics of one side, per directed edge.
struct Census {
    width: usize,
    /// Hash of the multiset of lengths of the cycles through each
    /// undirected edge (an edge and its reverse share it).
    signature: Vec<u64>,
    /// `together[a * width + b]`: cycles containing directed edges a and b.
    together: Vec<u32>,
}

impl Census {
    fn new(n_edges: usize, cycles: &[SimpleCycle]) -> Self {
        let width = 2 * n_edges;
        let mut signature = vec![0u64; n_edges];
        let mut together = vec![0u32; width * width];
        for c in cycles {
            let h = mix(c.len() as u64);
            for &a in c.edges() {
                signature[a.undirected()] = signature[a.undirected()].wrapping_add(h);
                for &b in c.edges() {
                    together[a.index() * width + b.index()] += 1;
                }
            }
        }
        Census { width, signature, together }
    }

    fn together(&self, a: EdgeId, b: EdgeId) -> u32 {
        self.together[a.index() * self.width + b.index()]
    }

    fn cyclic_degree(&self, k: usize) -> usize {
        let a = EdgeId::new(k, false);
        (0..self.width).filter(|&b| b / 2 != k && self.together[a.index() * self.width + b] > 0).count()
    }
}

/// Greedy order: start from the most co-cyclic edge, then repeatedly take
/// the edge sharing cycles with the most already placed edges.
fn edge_order(n_edges: usize, c: &Census) -> Vec<usize> {
    let linked = |a: usize, b: usize| {
        let (ea, eb) = (EdgeId::new(a, false), EdgeId::new(b, false));
        c.together(ea, eb) > 0 || c.together(ea, eb.rev()) > 0
    };
    let degree: Vec<usize> = (0..n_edges).map(|k| c.cyclic_degree(k)).collect();
    let mut placed = vec![false; n_edges];
    let mut score = vec![0usize; n_edges];
    let mut order = Vec::with_capacity(n_edges);
    for _ in 0..n_edges {
        let next = (0..n_edges)
            .filter(|&k| !placed[k])
            .max_by(|&a, &b| (score[a], degree[a]).cmp(&(score[b], degree[b])).then(b.cmp(&a)))
            .unwrap();
        placed[next] = true;
        order.push(next);
        for k in 0..n_edges {
            if !placed[k] && linked(k, next) {
                score[k] += 1;
            }
        }
    }
    order
}

struct Search<'a, S: Scalar> {
    g1: &'a ExtGraph<S>,
    g2: &'a ExtGraph<S>,
    m1: &'a FiniteMetricSpace<S>,
    m2: &'a FiniteMetricSpace<S>,
    mode: Mode,
    side1: Census,
    side2: Census,
    c1: &'a [SimpleCycle],
    set2: CycleSet,
    order: Vec<usize>,
    due: Vec<Vec<usize>>,
    /// Image of the forward orientation of each source edge.
    image: Vec<Option<EdgeId>>,
    used: Vec<bool>,
    nodes: u64,
    cap: u64,
    limit: Option<usize>,
    found: Vec<SignedEdgeBijection>,
}

impl<S: Scalar> Search<'_, S> {
    fn done(&self) -> bool {
        self.limit.is_some_and(|l| self.found.len() >= l)
    }

    fn run(&mut self, depth: usize) -> Result<()> {
        if depth == self.order.len() {
            let forward: Vec<EdgeId> = self.image.iter().map(|e| e.unwrap()).collect();
            let sigma = SignedEdgeBijection::from_forward_images(&forward);
            if self.mode == Mode::SaSb || sc_failure(&sigma, self.g1, self.g2, self.m1, self.m2)?.is_none() {
                self.found.push(sigma);
            }
            return Ok(());
        }
        let k = self.order[depth];
        for t in 0..self.used.len() {
            if self.used[t] || self.side1.signature[k] != self.side2.signature[t] {
                continue;
            }
            for rev in [false, true] {
                let img = EdgeId::new(t, rev);
                self.nodes += 1;
                if self.nodes > self.cap {
                    return Err(Error::SearchCapExceeded { cap: self.cap });
                }
                if !self.compatible(depth, k, img) {
                    continue;
                }
                self.image[k] = Some(img);
                self.used[t] = true;
                if self.cycles_ok(depth) {
                    self.run(depth + 1)?;
                }
                self.image[k] = None;
                self.used[t] = false;
                if self.done() {
                    return Ok(());
                }
            }
        }
        Ok(())
    }

    /// Pairwise checks of `k ↦ img` against every assigned edge.
    fn compatible(&self, depth: usize, k: usize, img: EdgeId) -> bool {
        let e = EdgeId::new(k, false);
        if self.side1.together(e, e) != self.side2.together(img, img) {
            return false;
        }
        let (w1, w2) = (self.g1.weight(e), self.g2.weight(img));
        for &j in &self.order[..depth] {
            let f = EdgeId::new(j, false);
            let s = self.image[j].unwrap();
            for (f, s) in [(f, s), (f.rev(), s.rev())] {
                let n = self.side1.together(e, f);
                if n != self.side2.together(img, s) {
                    return false;
                }
                if n > 0 {
                    let lhs = w1.clone() * self.g2.weight(s).clone();
                    let rhs = self.g1.weight(f).clone() * w2.clone();
                    if lhs.cmp_tol(&rhs) != Ordering::Equal {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn cycles_ok(&self, depth: usize) -> bool {
        self.due[depth].iter().all(|&i| {
            let image: Vec<EdgeId> = self.c1[i]
                .edges()
                .iter()
                .map(|&e| {
                    let f = self.image[e.undirected()].unwrap();
                    if e.is_reversed() {
                        f.rev()
                    } else {
                        f
                    }
                })
                .collect();
            self.set2.contains_edges(&image)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphkit::{families, graph_metric};
    use crate::metric::tests::space;

    fn count(g: &crate::graphkit::DirectedSymGraph) -> usize {
        enumerate_sigma(&graph_metric(g).unwrap(), Mode::SaSbSc, &Caps::default()).unwrap().len()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(count(&families::path(1)), 2);
        assert_eq!(count(&families::path(2)), 8);
        assert_eq!(count(&families::cycle(3)), 12);
    }

    #[test]
    fn golden_graph_counts() {
        assert_eq!(count(&families::path(3)), 48);
        assert_eq!(count(&families::cycle(4)), 48);
        assert_eq!(count(&families::complete(4)), 48);
        assert_eq!(count(&families::bowtie()), 288);
        assert_eq!(count(&families::theta(&[1, 1, 1])), 96);
    }

    #[test]
    fn modes_agree_on_prague_spaces() {
        let m = graph_metric(&families::cycle(4)).unwrap();
        let a = enumerate_sigma(&m, Mode::SaSb, &Caps::default()).unwrap();
        let b = enumerate_sigma(&m, Mode::SaSbSc, &Caps::default()).unwrap();
        assert_eq!(a.sigmas, b.sigmas);
    }

    #[test]
    fn weak_prague_edge_set_forces_sc() {
        // Star at the middle point of a collinear triple is weakly admissible
        // only; the edge swap breaks (Sc) and must not be returned.
        let m = space(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]);
        let g = ExtGraph::from_pairs(&m, &[(0, 1), (1, 0), (0, 2), (2, 0)]).unwrap();
        let r = find_sigmas(&g, &g, &m, &m, Mode::SaSb, &Caps::default(), None).unwrap();
        assert_eq!(r.mode, Mode::SaSbSc);
        assert!(r.sigmas.iter().all(|s| s.undirected() == vec![0, 1]));
    }

    #[test]
    fn not_weak_prague_is_rejected() {
        let m = space(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]);
        let g = ExtGraph::from_pairs(&m, &[(0, 1), (1, 0)]).unwrap();
        let r = find_sigmas(&g, &g, &m, &m, Mode::SaSb, &Caps::default(), None);
        assert_eq!(r, Err(Error::NotWeakPrague));
    }

    #[test]
    fn node_cap_and_limit() {
        let m = graph_metric(&families::path(4)).unwrap();
        let caps = Caps { search_nodes: 10, ..Caps::default() };
        assert_eq!(enumerate_sigma(&m, Mode::SaSb, &caps), Err(Error::SearchCapExceeded { cap: 10 }));
        let g = ext_graph(&m);
        let one = find_sigmas(&g, &g, &m, &m, Mode::SaSb, &Caps::default(), Some(1)).unwrap();
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn weighted_ratio_pruning() {
        // Triangle 1,1,1.5 is uniformly concave: E_ext is the triangle; the
        // edge of length 1.5 must be fixed up to sign.
        let m = crate::metric::validate_metric(
            vec![
                vec![crate::rat(0, 1), crate::rat(1, 1), crate::rat(3, 2)],
                vec![crate::rat(1, 1), crate::rat(0, 1), crate::rat(1, 1)],
                vec![crate::rat(3, 2), crate::rat(1, 1), crate::rat(0, 1)],
            ],
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        let r = enumerate_sigma(&m, Mode::SaSb, &Caps::default()).unwrap();
        // 2 isometries × 2 signs.
        assert_eq!(r.len(), 4);
    }
}
