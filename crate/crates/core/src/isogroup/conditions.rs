//! Checking (Sa), (Sb), (Sc) for an edge bijection and applying the
//! induced operator to molecules.

use std::cmp::Ordering;

use serde::Serialize;

use super::{Caps, Mode};
use crate::error::{Error, Result};
use crate::extgraph::{path_from_pred, ExtGraph};
use crate::graphkit::{CycleSet, EdgeId, SimpleCycle};
use crate::metric::{FiniteMetricSpace, Molecule};
use crate::scalar::Scalar;
use crate::transport::free_norm;
use crate::whitney::SignedEdgeBijection;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub sa: bool,
    pub sb: bool,
    /// `None` when (Sa) or (Sb) already failed.
    pub sc: Option<bool>,
    /// First violation found, in words.
    pub failure: Option<String>,
}

impl ConditionReport {
    pub fn passes(&self, mode: Mode) -> bool {
        self.sa && self.sb && (mode == Mode::SaSb || self.sc == Some(true))
    }
}

/// `Σ d₁(eᵢ) m_{σ(eᵢ)}` in the target space for an edge path of `g1`.
pub fn path_sum<S: Scalar>(
    sigma: &SignedEdgeBijection,
    path: &[EdgeId],
    g1: &ExtGraph<S>,
    g2: &ExtGraph<S>,
) -> Molecule<S> {
    let mut out = Molecule::zero();
    for &e in path {
        let f = sigma.apply(e);
        let c = g1.weight(e).clone() / g2.weight(f).clone();
        let (s, r) = g2.graph().endpoints(f);
        out.add_term(s, c.clone());
        out.add_term(r, -c);
    }
    out
}

/// Per-condition verdicts for `σ : E₁ → E₂`.
pub fn check_conditions<S: Scalar>(
    sigma: &SignedEdgeBijection,
    g1: &ExtGraph<S>,
    g2: &ExtGraph<S>,
    m1: &FiniteMetricSpace<S>,
    m2: &FiniteMetricSpace<S>,
    caps: &Caps,
) -> Result<ConditionReport> {
    if sigma.num_edges() != g1.graph().num_edges() {
        return Err(Error::InvalidBijection("domain is not the source edge set".into()));
    }
    let sigma = sigma.clone().validated(g2.graph().num_edges())?;
    let c1 = caps.long_cycles(g1.graph())?;
    let c2 = caps.long_cycles(g2.graph())?;

    if let Some(why) = sa_failure(&sigma, &c1, &c2) {
        return Ok(ConditionReport { sa: false, sb: false, sc: None, failure: Some(why) });
    }
    if let Some(c) = c1.iter().find(|c| !ratio_constant(&sigma, c.edges(), g1, g2)) {
        let why = format!("weight ratio varies on cycle {}", cycle_text(g1, c));
        return Ok(ConditionReport { sa: true, sb: false, sc: None, failure: Some(why) });
    }
    let sc = sc_failure(&sigma, g1, g2, m1, m2)?;
    Ok(ConditionReport { sa: true, sb: true, sc: Some(sc.is_none()), failure: sc })
}

fn cycle_text<S: Scalar>(g: &ExtGraph<S>, c: &SimpleCycle) -> String {
    c.vertices(g.graph()).iter().map(|&v| g.graph().label(v)).collect::<Vec<_>>().join("->")
}

fn sa_failure(sigma: &SignedEdgeBijection, c1: &[SimpleCycle], c2: &[SimpleCycle]) -> Option<String> {
    if c1.len() != c2.len() {
        return Some(format!("{} simple cycles map onto {}", c1.len(), c2.len()));
    }
    let set2 = CycleSet::new(c2);
    for c in c1 {
        let image: Vec<EdgeId> = c.edges().iter().map(|&e| sigma.apply(e)).collect();
        if !set2.contains_edges(&image) {
            return Some(format!("image of cycle {:?} is not a simple cycle", c.edges()));
        }
    }
    // Injective on a finite set of equal size, so the inverse direction holds.
    None
}

pub(crate) fn ratio_constant<S: Scalar>(
    sigma: &SignedEdgeBijection,
    edges: &[EdgeId],
    g1: &ExtGraph<S>,
    g2: &ExtGraph<S>,
) -> bool {
    let Some(&first) = edges.first() else { return true };
    let (a, b) = (g1.weight(first).clone(), g2.weight(sigma.apply(first)).clone());
    edges.iter().all(|&e| {
        let lhs = g1.weight(e).clone() * b.clone();
        let rhs = a.clone() * g2.weight(sigma.apply(e)).clone();
        lhs.cmp_tol(&rhs) == Ordering::Equal
    })
}

/// (Sc) on one shortest path per ordered pair, both directions. Once (Sa)
/// and (Sb) hold the path sum does not depend on the path.
pub(crate) fn sc_failure<S: Scalar>(
    sigma: &SignedEdgeBijection,
    g1: &ExtGraph<S>,
    g2: &ExtGraph<S>,
    m1: &FiniteMetricSpace<S>,
    m2: &FiniteMetricSpace<S>,
) -> Result<Option<String>> {
    if let Some(why) = sc_one_way(sigma, g1, g2, m1, m2)? {
        return Ok(Some(why));
    }
    sc_one_way(&sigma.inverse(), g2, g1, m2, m1)
}

fn sc_one_way<S: Scalar>(
    sigma: &SignedEdgeBijection,
    g1: &ExtGraph<S>,
    g2: &ExtGraph<S>,
    m1: &FiniteMetricSpace<S>,
    m2: &FiniteMetricSpace<S>,
) -> Result<Option<String>> {
    let vertices = g1.vertices();
    for &x in &vertices {
        let (_, pred) = g1.shortest_paths(x);
        for &y in &vertices {
            if x == y {
                continue;
            }
            let Some(path) = path_from_pred(g1.graph(), &pred, x, y) else {
                return Ok(Some(format!("no edge path from {} to {}", m1.label(x), m1.label(y))));
            };
            let phi = path_sum(sigma, &path, g1, g2);
            let norm = free_norm(m2, &phi)?.value;
            if norm.cmp_tol(m1.dist(x, y)) != Ordering::Equal {
                return Ok(Some(format!(
                    "path sum from {} to {} has norm {} but the distance is {}",
                    m1.label(x),
                    m1.label(y),
                    norm.render(),
                    m1.dist(x, y).render()
                )));
            }
        }
    }
    Ok(None)
}

/// An edge bijection known to satisfy the conditions of its mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckedSigma {
    sigma: SignedEdgeBijection,
    mode: Mode,
}

impl CheckedSigma {
    /// Runs [`check_conditions`] and keeps `σ` only if it passes.
    pub fn verify<S: Scalar>(
        sigma: SignedEdgeBijection,
        g1: &ExtGraph<S>,
        g2: &ExtGraph<S>,
        m1: &FiniteMetricSpace<S>,
        m2: &FiniteMetricSpace<S>,
        mode: Mode,
        caps: &Caps,
    ) -> Result<Self> {
        if check_conditions(&sigma, g1, g2, m1, m2, caps)?.passes(mode) {
            Ok(CheckedSigma { sigma, mode })
        } else {
            Err(Error::ConditionsNotVerified)
        }
    }

    #[cfg(test)]
    pub(crate) fn trusted(sigma: SignedEdgeBijection, mode: Mode) -> Self {
        CheckedSigma { sigma, mode }
    }

    pub fn sigma(&self) -> &SignedEdgeBijection {
        &self.sigma
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn into_inner(self) -> SignedEdgeBijection {
        self.sigma
    }
}

/// `T_σ(x)`: writes `x = Σ c_v (δ_v − δ_r)`, expands each difference along
/// a shortest edge path and maps every `m_e` to `m_{σ(e)}`.
pub fn apply_sigma<S: Scalar>(
    checked: &CheckedSigma,
    x: &Molecule<S>,
    g1: &ExtGraph<S>,
    g2: &ExtGraph<S>,
) -> Result<Molecule<S>> {
    let vertices = g1.vertices();
    let g = g1.graph();
    if x.support().any(|v| v >= g.num_vertices() || g.degree(v) == 0) {
        return Err(Error::SupportOutsideVext);
    }
    let Some(&root) = vertices.first() else { return Ok(Molecule::zero()) };
    let (_, pred) = g1.shortest_paths(root);
    let mut out = Molecule::zero();
    for (v, c) in x.iter() {
        if v == root {
            continue;
        }
        let to_v = path_from_pred(g, &pred, root, v).ok_or(Error::NotConnected)?;
        // δ_v − δ_r runs along the path from v back to r.
        let back: Vec<EdgeId> = to_v.iter().rev().map(|e| e.rev()).collect();
        out = out.plus(&path_sum(&checked.sigma, &back, g1, g2).scaled(c));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extgraph::ext_graph;
    use crate::graphkit::{families, graph_metric};
    use crate::metric::validate_metric;
    use crate::scalar::{rat, Rational};

    fn collinear() -> FiniteMetricSpace {
        let d = [[0, 1, 2], [1, 0, 1], [2, 1, 0]].iter().map(|r| r.iter().map(|&v| rat(v, 1)).collect()).collect();
        validate_metric(d, vec!["0".into(), "1".into(), "2".into()]).unwrap()
    }

    #[test]
    fn identity_passes_everything() {
        let m = graph_metric(&families::prism()).unwrap();
        let g = ext_graph(&m);
        let id = SignedEdgeBijection::identity(g.graph().num_edges());
        let r = check_conditions(&id, &g, &g, &m, &m, &Caps::default()).unwrap();
        assert_eq!(r, ConditionReport { sa: true, sb: true, sc: Some(true), failure: None });
    }

    #[test]
    fn c4_edge_permutations_keep_orientation_class() {
        // Rotating the edges of the 4-cycle by one step and by a transposition
        // both keep the single cycle's orientation.
        let m = graph_metric(&families::cycle(4)).unwrap();
        let g = ext_graph(&m);
        let gr = g.graph();
        let e = |a, b| gr.edge_between(a, b).unwrap();
        // Forward edges of the cycle 0->1->2->3->0, permuted arbitrarily.
        let forward_cycle = [e(0, 1), e(1, 2), e(2, 3), e(3, 0)];
        let perm = [2, 0, 3, 1];
        let mut forward = vec![EdgeId(0); 4];
        for (i, &src) in forward_cycle.iter().enumerate() {
            let img = forward_cycle[perm[i]];
            let (src, img) = if src.is_reversed() { (src.rev(), img.rev()) } else { (src, img) };
            forward[src.undirected()] = img;
        }
        let s = SignedEdgeBijection::from_forward_images(&forward);
        let r = check_conditions(&s, &g, &g, &m, &m, &Caps::default()).unwrap();
        assert!(r.sa && r.sb && r.sc == Some(true));
    }

    #[test]
    fn weakly_admissible_star_fails_sc() {
        // Star edge set at 0 in the collinear space: swapping its two edges
        // keeps (Sa) and (Sb) trivially but breaks the path-sum norms.
        let m = collinear();
        let g = ExtGraph::from_pairs(&m, &[(0, 1), (1, 0), (0, 2), (2, 0)]).unwrap();
        let gr = g.graph();
        let a = gr.edge_between(0, 1).unwrap();
        let b = gr.edge_between(0, 2).unwrap();
        let mut forward = vec![EdgeId(0); 2];
        forward[a.undirected()] = b;
        forward[b.undirected()] = a;
        let s = SignedEdgeBijection::from_forward_images(&forward);
        let r = check_conditions(&s, &g, &g, &m, &m, &Caps::default()).unwrap();
        assert!(r.sa && r.sb);
        assert_eq!(r.sc, Some(false));
        // 1 -> 0 -> 2 maps to (1/2)(δ2 − δ0) + 2(δ0 − δ1), whose norm 2 exceeds d(1,2) = 1.
        let path = vec![gr.edge_between(1, 0).unwrap(), gr.edge_between(0, 2).unwrap()];
        let phi = path_sum(&s, &path, &g, &g);
        assert_eq!(free_norm(&m, &phi).unwrap().value, rat(2, 1));
        assert!(!r.passes(Mode::SaSbSc) && r.passes(Mode::SaSb));
    }

    #[test]
    fn k4_edge_swap_fails_sa() {
        let m = graph_metric(&families::complete(4)).unwrap();
        let g = ext_graph(&m);
        let gr = g.graph();
        let a = gr.undirected_between(0, 1).unwrap();
        let b = gr.undirected_between(2, 3).unwrap();
        let forward: Vec<EdgeId> =
            (0..6).map(|k| EdgeId::new(if k == a { b } else if k == b { a } else { k }, false)).collect();
        let s = SignedEdgeBijection::from_forward_images(&forward);
        let r = check_conditions(&s, &g, &g, &m, &m, &Caps::default()).unwrap();
        assert!(!r.sa && r.sc.is_none() && r.failure.is_some());
    }

    #[test]
    fn apply_identity_negation_and_rotation() {
        let m = graph_metric(&families::cycle(3)).unwrap();
        let g = ext_graph(&m);
        let x = Molecule::new(&m, [(0, rat(2, 1)), (1, rat(-3, 1)), (2, rat(1, 1))]).unwrap();
        let id = CheckedSigma::verify(SignedEdgeBijection::identity(3), &g, &g, &m, &m, Mode::SaSb, &Caps::default())
            .unwrap();
        assert!(apply_sigma(&id, &x, &g, &g).unwrap().same(&x));
        let neg = CheckedSigma::verify(SignedEdgeBijection::negation(3), &g, &g, &m, &m, Mode::SaSb, &Caps::default())
            .unwrap();
        assert!(apply_sigma(&neg, &x, &g, &g).unwrap().same(&x.scaled(&rat(-1, 1))));
        let rot = [1, 2, 0];
        let s = SignedEdgeBijection::induced(g.graph(), g.graph(), &rot, false).unwrap();
        let s = CheckedSigma::verify(s, &g, &g, &m, &m, Mode::SaSb, &Caps::default()).unwrap();
        let y = apply_sigma(&s, &x, &g, &g).unwrap();
        assert!(y.same(&x.map_points(|v| rot[v])));
    }

    #[test]
    fn apply_rejects_unverified_and_outside_support() {
        let m = collinear();
        let g = ExtGraph::from_pairs(&m, &[(0, 1), (1, 0)]).unwrap();
        let s = CheckedSigma::trusted(SignedEdgeBijection::identity(1), Mode::SaSb);
        let x: Molecule<Rational> = Molecule::new(&m, [(0, rat(1, 1)), (2, rat(-1, 1))]).unwrap();
        assert_eq!(apply_sigma(&s, &x, &g, &g), Err(Error::SupportOutsideVext));

        let m4 = graph_metric(&families::complete(4)).unwrap();
        let g4 = ext_graph(&m4);
        let gr = g4.graph();
        let a = gr.undirected_between(0, 1).unwrap();
        let b = gr.undirected_between(2, 3).unwrap();
        let forward: Vec<EdgeId> =
            (0..6).map(|k| EdgeId::new(if k == a { b } else if k == b { a } else { k }, false)).collect();
        let bad = SignedEdgeBijection::from_forward_images(&forward);
        assert_eq!(
            CheckedSigma::verify(bad, &g4, &g4, &m4, &m4, Mode::SaSb, &Caps::default()),
            Err(Error::ConditionsNotVerified)
        );
    }
}
