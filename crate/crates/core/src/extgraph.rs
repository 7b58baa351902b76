//! The graph of preserved extreme molecules and the Prague classification.
//!
//! On a finite space `m_{x,y}` is a preserved extreme point exactly when no
//! third point lies on the metric segment between `x` and `y`: the minimum
//! of `d(x,z) + d(z,y) − d(x,y)` over the finitely many `z` is either zero
//! or a positive slack that works for every ε.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphkit::{DirectedSymGraph, EdgeId};
use crate::metric::FiniteMetricSpace;
use crate::scalar::Scalar;

/// Strict triangle test for the pair `(x, y)`.
pub fn is_preserved_extreme<S: Scalar>(space: &FiniteMetricSpace<S>, x: usize, y: usize) -> Result<bool> {
    if x == y {
        return Err(Error::SamePoint(space.label(x).to_string()));
    }
    let dxy = space.dist(x, y);
    Ok((0..space.len())
        .filter(|&z| z != x && z != y)
        .all(|z| dxy.cmp_tol(&(space.dist(x, z).clone() + space.dist(z, y).clone())) == Ordering::Less))
}

/// A symmetric edge set of a metric space with its distance weights.
///
/// The underlying graph has one vertex per point of the space (same
/// indices), so points outside `V_E` show up as isolated vertices.
#[derive(Clone, Debug)]
pub struct ExtGraph<S = crate::scalar::Rational> {
    graph: DirectedSymGraph,
    weights: Vec<S>,
}

impl<S: Scalar> ExtGraph<S> {
    /// Builds the weighted graph of a symmetric set of ordered pairs.
    pub fn from_pairs(space: &FiniteMetricSpace<S>, pairs: &[(usize, usize)]) -> Result<Self> {
        let set: HashSet<(usize, usize)> = pairs.iter().copied().collect();
        for &(a, b) in &set {
            if a >= space.len() || b >= space.len() {
                return Err(Error::UnknownLabel(format!("#{}", a.max(b))));
            }
            if a == b {
                return Err(Error::SamePoint(space.label(a).to_string()));
            }
            if !set.contains(&(b, a)) {
                return Err(Error::Input(format!(
                    "edge set is not symmetric: ({}, {}) without its opposite",
                    space.label(a),
                    space.label(b)
                )));
            }
        }
        let mut undirected: Vec<(usize, usize)> = set.into_iter().filter(|(a, b)| a < b).collect();
        undirected.sort_unstable();
        let graph = DirectedSymGraph::new(space.labels().to_vec(), &undirected)?;
        let weights = graph.edges().iter().map(|&(a, b)| space.dist(a, b).clone()).collect();
        Ok(ExtGraph { graph, weights })
    }

    pub fn graph(&self) -> &DirectedSymGraph {
        &self.graph
    }

    /// `w(e) = d(s(e), r(e))`.
    pub fn weight(&self, e: EdgeId) -> &S {
        &self.weights[e.undirected()]
    }

    /// Weights per undirected edge.
    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    /// `V_E`: the points incident to some edge.
    pub fn vertices(&self) -> Vec<usize> {
        (0..self.graph.num_vertices()).filter(|&v| self.graph.degree(v) > 0).collect()
    }

    /// All directed edges as ordered point pairs.
    pub fn directed_pairs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self.graph.directed_edges().map(|e| self.graph.endpoints(e)).collect();
        out.sort_unstable();
        out
    }

    /// Weighted shortest-path distances from `source` (Dijkstra), with
    /// predecessor edges for path reconstruction.
    pub fn shortest_paths(&self, source: usize) -> (Vec<Option<S>>, Vec<Option<EdgeId>>) {
        let n = self.graph.num_vertices();
        let mut dist: Vec<Option<S>> = vec![None; n];
        let mut pred: Vec<Option<EdgeId>> = vec![None; n];
        let mut done = vec![false; n];
        dist[source] = Some(S::zero());
        loop {
            let next = (0..n)
                .filter(|&v| !done[v] && dist[v].is_some())
                .min_by(|&a, &b| dist[a].as_ref().unwrap().cmp_tol(dist[b].as_ref().unwrap()));
            let Some(u) = next else { break };
            done[u] = true;
            let du = dist[u].clone().unwrap();
            for &(w, e) in self.graph.neighbors(u) {
                let cand = du.clone() + self.weight(e).clone();
                let better = match &dist[w] {
                    None => true,
                    Some(dw) => cand.cmp_tol(dw) == Ordering::Less,
                };
                if better && !done[w] {
                    dist[w] = Some(cand);
                    pred[w] = Some(e);
                }
            }
        }
        (dist, pred)
    }

    /// A shortest directed edge path from `x` to `y`, if connected.
    pub fn shortest_path(&self, x: usize, y: usize) -> Option<Vec<EdgeId>> {
        let (_, pred) = self.shortest_paths(x);
        path_from_pred(&self.graph, &pred, x, y)
    }
}

pub(crate) fn path_from_pred(g: &DirectedSymGraph, pred: &[Option<EdgeId>], x: usize, y: usize) -> Option<Vec<EdgeId>> {
    let mut path = Vec::new();
    let mut v = y;
    while v != x {
        let e = pred[v]?;
        path.push(e);
        v = g.source(e);
    }
    path.reverse();
    Some(path)
}

/// `G_ext`: all ordered pairs passing [`is_preserved_extreme`].
pub fn ext_graph<S: Scalar>(space: &FiniteMetricSpace<S>) -> ExtGraph<S> {
    let n = space.len();
    let mut pairs = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if x != y && is_preserved_extreme(space, x, y).unwrap() {
                pairs.push((x, y));
            }
        }
    }
    ExtGraph::from_pairs(space, &pairs).expect("strict triangle test is symmetric")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PragueClass {
    Prague,
    WeakPragueOnly,
    NotWeakPrague,
}

/// What made a stronger class fail.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PragueDiagnostic {
    /// Points not incident to any edge.
    MissingVertices { points: Vec<String> },
    /// The component of the first edge vertex, when the graph is disconnected.
    Disconnected { component: Vec<String> },
    /// A pair whose shortest edge path is longer than its distance.
    PathTooLong { x: String, y: String, path: String, distance: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PragueVerdict {
    pub class: PragueClass,
    pub diagnostics: Option<PragueDiagnostic>,
}

/// Classifies the space by its extreme-molecule graph.
pub fn classify_prague<S: Scalar>(space: &FiniteMetricSpace<S>) -> PragueVerdict {
    classify_ext(space, &ext_graph(space))
}

/// Classifies an arbitrary symmetric edge set: weakly admissible when it
/// touches every point and is connected, admissible when moreover its
/// shortest paths realize every distance.
pub fn classify_edge_set<S: Scalar>(space: &FiniteMetricSpace<S>, pairs: &[(usize, usize)]) -> Result<PragueVerdict> {
    Ok(classify_ext(space, &ExtGraph::from_pairs(space, pairs)?))
}

pub fn classify_ext<S: Scalar>(space: &FiniteMetricSpace<S>, ext: &ExtGraph<S>) -> PragueVerdict {
    let g = ext.graph();
    let n = space.len();
    let missing: Vec<String> = (0..n).filter(|&v| g.degree(v) == 0).map(|v| space.label(v).to_string()).collect();
    if !missing.is_empty() {
        return PragueVerdict {
            class: PragueClass::NotWeakPrague,
            diagnostics: Some(PragueDiagnostic::MissingVertices { points: missing }),
        };
    }
    let reach = g.bfs_distances(0);
    if reach.iter().any(Option::is_none) {
        let component = (0..n).filter(|&v| reach[v].is_some()).map(|v| space.label(v).to_string()).collect();
        return PragueVerdict {
            class: PragueClass::NotWeakPrague,
            diagnostics: Some(PragueDiagnostic::Disconnected { component }),
        };
    }
    for x in 0..n {
        let (dist, _) = ext.shortest_paths(x);
        for y in 0..n {
            let path = dist[y].as_ref().expect("connected");
            if path.cmp_tol(space.dist(x, y)) != Ordering::Equal {
                return PragueVerdict {
                    class: PragueClass::WeakPragueOnly,
                    diagnostics: Some(PragueDiagnostic::PathTooLong {
                        x: space.label(x).to_string(),
                        y: space.label(y).to_string(),
                        path: path.render(),
                        distance: space.dist(x, y).render(),
                    }),
                };
            }
        }
    }
    PragueVerdict { class: PragueClass::Prague, diagnostics: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphkit::{families, graph_metric};
    use crate::metric::validate_metric;
    use crate::scalar::rat;

    fn space(rows: &[&[i64]]) -> FiniteMetricSpace {
        let labels = (0..rows.len()).map(|i| i.to_string()).collect();
        let d = rows.iter().map(|r| r.iter().map(|&v| rat(v, 1)).collect()).collect();
        validate_metric(d, labels).unwrap()
    }

    fn collinear() -> FiniteMetricSpace {
        space(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]])
    }

    #[test]
    fn strict_triangle_test() {
        let two = space(&[&[0, 3], &[3, 0]]);
        assert!(is_preserved_extreme(&two, 0, 1).unwrap());
        assert!(!is_preserved_extreme(&collinear(), 0, 2).unwrap());
        let eq = space(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]);
        assert!((0..3).all(|x| (0..3).all(|y| x == y || is_preserved_extreme(&eq, x, y).unwrap())));
        assert!(matches!(is_preserved_extreme(&eq, 1, 1), Err(Error::SamePoint(_))));
    }

    #[test]
    fn ext_graph_examples() {
        let c4 = graph_metric(&families::cycle(4)).unwrap();
        let ext = ext_graph(&c4);
        let mut expected = families::cycle(4).edges().to_vec();
        expected.sort_unstable();
        assert_eq!(ext.graph().edges(), expected.as_slice());
        assert_eq!(ext.directed_pairs().len(), 8);

        assert_eq!(ext_graph(&collinear()).directed_pairs(), vec![(0, 1), (1, 0), (1, 2), (2, 1)]);

        // l1 unit square with corners (0,0), (1,0), (0,1), (1,1).
        let sq = space(&[&[0, 1, 1, 2], &[1, 0, 2, 1], &[1, 2, 0, 1], &[2, 1, 1, 0]]);
        let pairs = ext_graph(&sq).directed_pairs();
        assert_eq!(pairs.len(), 8);
        assert!(!pairs.contains(&(0, 3)) && !pairs.contains(&(1, 2)));
    }

    #[test]
    fn weights_match_distances() {
        let m = space(&[&[0, 2, 3], &[2, 0, 4], &[3, 4, 0]]);
        let ext = ext_graph(&m);
        for e in ext.graph().directed_edges() {
            let (a, b) = ext.graph().endpoints(e);
            assert_eq!(ext.weight(e), m.dist(a, b));
            assert_eq!(ext.weight(e), ext.weight(e.rev()));
        }
    }

    #[test]
    fn graphs_and_collinear_points_are_prague() {
        assert_eq!(classify_prague(&collinear()).class, PragueClass::Prague);
        let m = graph_metric(&families::bowtie()).unwrap();
        assert_eq!(classify_prague(&m), PragueVerdict { class: PragueClass::Prague, diagnostics: None });
    }

    #[test]
    fn weaker_classes_from_explicit_edge_sets() {
        let m = collinear();
        // A star at 0 reaches every point but 1 -> 0 -> 2 is longer than d(1,2).
        let star = [(0, 1), (1, 0), (0, 2), (2, 0)];
        let v = classify_edge_set(&m, &star).unwrap();
        assert_eq!(v.class, PragueClass::WeakPragueOnly);
        assert!(matches!(v.diagnostics, Some(PragueDiagnostic::PathTooLong { .. })));

        let partial = [(0, 1), (1, 0)];
        let v = classify_edge_set(&m, &partial).unwrap();
        assert_eq!(v.class, PragueClass::NotWeakPrague);
        assert_eq!(v.diagnostics, Some(PragueDiagnostic::MissingVertices { points: vec!["2".into()] }));

        let sq = space(&[&[0, 1, 1, 2], &[1, 0, 2, 1], &[1, 2, 0, 1], &[2, 1, 1, 0]]);
        let split = [(0, 1), (1, 0), (2, 3), (3, 2)];
        let v = classify_edge_set(&sq, &split).unwrap();
        assert_eq!(v.class, PragueClass::NotWeakPrague);
        assert_eq!(v.diagnostics, Some(PragueDiagnostic::Disconnected { component: vec!["0".into(), "1".into()] }));

        assert!(matches!(classify_edge_set(&m, &[(0, 1)]), Err(Error::Input(_))));
    }

    #[test]
    fn shortest_path_reconstruction() {
        let m = graph_metric(&families::cycle(5)).unwrap();
        let ext = ext_graph(&m);
        let p = ext.shortest_path(0, 2).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(ext.graph().source(p[0]), 0);
        assert_eq!(ext.graph().target(p[1]), 2);
    }
}
