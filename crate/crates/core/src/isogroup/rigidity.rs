//! Deciding whether every isometry-inducing σ is a sign times the edge map
//! of an isometry of the space.

use std::cmp::Ordering;
use std::collections::VecDeque;

use serde::Serialize;

use super::enumerate::find_sigmas;
use super::{Caps, Mode};
use crate::error::{Error, Result};
use crate::extgraph::{classify_ext, ext_graph, ExtGraph, PragueClass};
use crate::graphkit::{is_3_connected, EdgeId};
use crate::metric::{compute_isometries, FiniteMetricSpace};
use crate::scalar::Scalar;
use crate::whitney::{vertex_map_from_stars, SignedEdgeBijection, VertexMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RigidityPath {
    /// `E_ext` is 3-connected; witnesses come from the isometries.
    ThreeConnected,
    /// All σ were enumerated and factored one by one.
    Enumerated,
}

/// `σ(x, y) = ε (f(x), f(y))` on every edge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Factorization {
    pub epsilon: i8,
    pub vertex_map: VertexMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidityVerdict {
    pub rigid: bool,
    pub path: RigidityPath,
    /// Number of σ, i.e. the order of the isometry group of the free space.
    pub sigma_count: usize,
    pub isometries: usize,
    pub witnesses: Vec<(SignedEdgeBijection, Factorization)>,
    /// A σ with no factorization, when not rigid.
    pub counterexample: Option<SignedEdgeBijection>,
}

/// Tries `ε = +1` then `ε = −1`; the vertex map is forced by the first edge
/// and propagated along edges, then checked to be a bijective isometry.
pub fn factor_sigma<S: Scalar>(
    sigma: &SignedEdgeBijection,
    g: &ExtGraph<S>,
    m: &FiniteMetricSpace<S>,
) -> Option<Factorization> {
    [1i8, -1].into_iter().find_map(|epsilon| {
        let tau = if epsilon < 0 { sigma.negated() } else { sigma.clone() };
        vertex_map_of(&tau, g, m).map(|vertex_map| Factorization { epsilon, vertex_map })
    })
}

fn vertex_map_of<S: Scalar>(tau: &SignedEdgeBijection, g: &ExtGraph<S>, m: &FiniteMetricSpace<S>) -> Option<VertexMap> {
    let gr = g.graph();
    let n = gr.num_vertices();
    if tau.num_edges() != gr.num_edges() {
        return None;
    }
    let mut f: Vec<Option<usize>> = vec![None; n];
    for start in 0..n {
        if f[start].is_some() {
            continue;
        }
        let &(_, e0) = gr.neighbors(start).first()?;
        f[start] = Some(gr.source(tau.apply(e0)));
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in gr.neighbors(v) {
                let (a, b) = gr.endpoints(tau.apply(e));
                if f[v] != Some(a) {
                    return None;
                }
                match f[w] {
                    None => {
                        f[w] = Some(b);
                        queue.push_back(w);
                    }
                    Some(x) if x != b => return None,
                    _ => {}
                }
            }
        }
    }
    let f: VertexMap = f.into_iter().collect::<Option<_>>()?;
    let mut seen = vec![false; n];
    if f.iter().any(|&x| std::mem::replace(&mut seen[x], true)) {
        return None;
    }
    let isometry =
        (0..n).all(|x| (x + 1..n).all(|y| m.dist(x, y).cmp_tol(m.dist(f[x], f[y])) == Ordering::Equal));
    isometry.then_some(f)
}

/// Rigidity of `M` with its own `E_ext`.
pub fn decide_rigidity<S: Scalar>(m: &FiniteMetricSpace<S>, caps: &Caps) -> Result<RigidityVerdict> {
    decide_rigidity_with_ext(m, &ext_graph(m), caps)
}

/// Same, with `E_ext` supplied by the caller (e.g. computed exactly for a
/// space whose distances are only available approximately).
pub fn decide_rigidity_with_ext<S: Scalar>(
    m: &FiniteMetricSpace<S>,
    ext: &ExtGraph<S>,
    caps: &Caps,
) -> Result<RigidityVerdict> {
    decide(m, ext, caps, true)
}

pub(crate) fn decide<S: Scalar>(
    m: &FiniteMetricSpace<S>,
    ext: &ExtGraph<S>,
    caps: &Caps,
    fast: bool,
) -> Result<RigidityVerdict> {
    if classify_ext(m, ext).class == PragueClass::NotWeakPrague {
        return Err(Error::NotWeakPrague);
    }
    let isos = compute_isometries(m);
    let g = ext.graph();
    if fast && is_3_connected(g).connected {
        let mut witnesses = Vec::with_capacity(2 * isos.len());
        for f in &isos {
            for (negate, epsilon) in [(false, 1i8), (true, -1)] {
                let sigma = SignedEdgeBijection::induced(g, g, f, negate)?;
                // The star matching has to give f back and the sign read off
                // along edges has to be the global one.
                let back = vertex_map_from_stars(g, &sigma)?;
                let fac = factor_sigma(&sigma, ext, m);
                if &back != f || fac.as_ref().map(|x| x.epsilon) != Some(epsilon) {
                    return Err(Error::NoConsistentVertexMap("isometry-induced σ does not factor back".into()));
                }
                witnesses.push((sigma, Factorization { epsilon, vertex_map: f.clone() }));
            }
        }
        witnesses.sort();
        return Ok(RigidityVerdict {
            rigid: true,
            path: RigidityPath::ThreeConnected,
            sigma_count: witnesses.len(),
            isometries: isos.len(),
            witnesses,
            counterexample: None,
        });
    }
    let all = find_sigmas(ext, ext, m, m, Mode::SaSb, caps, None)?;
    let mut witnesses = Vec::new();
    let mut counterexample = None;
    for sigma in &all.sigmas {
        match factor_sigma(sigma, ext, m) {
            Some(fac) => witnesses.push((sigma.clone(), fac)),
            None => {
                if counterexample.is_none() {
                    counterexample = Some(sigma.clone());
                }
            }
        }
    }
    Ok(RigidityVerdict {
        rigid: counterexample.is_none(),
        path: RigidityPath::Enumerated,
        sigma_count: all.len(),
        isometries: isos.len(),
        witnesses,
        counterexample,
    })
}

/// Checks `σ(e) = ε (f × f)(e)` on every directed edge.
pub fn factorization_holds<S: Scalar>(sigma: &SignedEdgeBijection, g: &ExtGraph<S>, fac: &Factorization) -> bool {
    let gr = g.graph();
    gr.directed_edges().all(|e: EdgeId| {
        let (s, r) = gr.endpoints(e);
        let want = if fac.epsilon > 0 { (fac.vertex_map[s], fac.vertex_map[r]) } else { (fac.vertex_map[r], fac.vertex_map[s]) };
        gr.endpoints(sigma.apply(e)) == want
    })
}
