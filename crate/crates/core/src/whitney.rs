//! Signed edge bijections, the vertex-star characterization, and recovery
//! of a vertex map from a cycle-preserving edge bijection of a 3-connected
//! graph.

use std::collections::{HashMap, HashSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphkit::{
    exhaustive_bases, extend_to_basis, is_2_connected, is_3_connected, is_basis, random_basis, simple_cycles,
    CycleList, CycleOptions, CycleSet, DirectedSymGraph, EdgeId,
};

/// A bijection between the directed edge sets of two graphs with
/// `σ(−e) = −σ(e)`. Stored as the image of every directed edge id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedEdgeBijection {
    images: Vec<EdgeId>,
}

impl SignedEdgeBijection {
    /// Builds σ from the images of the forward orientations `2k`.
    pub fn from_forward_images(forward: &[EdgeId]) -> Self {
        let mut images = Vec::with_capacity(2 * forward.len());
        for &f in forward {
            images.push(f);
            images.push(f.rev());
        }
        SignedEdgeBijection { images }
    }

    /// Checks bijectivity onto a graph with `target_edges` undirected edges.
    pub fn validated(self, target_edges: usize) -> Result<Self> {
        if self.images.len() != 2 * target_edges {
            return Err(Error::InvalidBijection(format!(
                "{} undirected edges map to {}",
                self.images.len() / 2,
                target_edges
            )));
        }
        let mut seen = vec![false; 2 * target_edges];
        for (i, &e) in self.images.iter().enumerate() {
            if e.index() >= seen.len() || seen[e.index()] {
                return Err(Error::InvalidBijection(format!("edge image {e:?} repeated or out of range")));
            }
            seen[e.index()] = true;
            if self.images[i ^ 1] != e.rev() {
                return Err(Error::InvalidBijection("map is not symmetric".into()));
            }
        }
        Ok(self)
    }

    pub fn identity(edges: usize) -> Self {
        SignedEdgeBijection { images: (0..2 * edges as u32).map(EdgeId).collect() }
    }

    /// `e ↦ −e`.
    pub fn negation(edges: usize) -> Self {
        SignedEdgeBijection { images: (0..2 * edges as u32).map(|i| EdgeId(i ^ 1)).collect() }
    }

    /// The edge map induced by a vertex bijection, times a global sign.
    pub fn induced(g1: &DirectedSymGraph, g2: &DirectedSymGraph, f: &[usize], negate: bool) -> Result<Self> {
        let mut forward = Vec::with_capacity(g1.num_edges());
        for &(u, v) in g1.edges() {
            let e = g2.edge_between(f[u], f[v]).ok_or_else(|| {
                Error::InvalidBijection(format!("{}-{} has no image edge", g1.label(u), g1.label(v)))
            })?;
            forward.push(if negate { e.rev() } else { e });
        }
        SignedEdgeBijection::from_forward_images(&forward).validated(g2.num_edges())
    }

    pub fn apply(&self, e: EdgeId) -> EdgeId {
        self.images[e.index()]
    }

    pub fn images(&self) -> &[EdgeId] {
        &self.images
    }

    pub fn num_edges(&self) -> usize {
        self.images.len() / 2
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        SignedEdgeBijection { images: other.images.iter().map(|&e| self.apply(e)).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![EdgeId(0); self.images.len()];
        for (i, &e) in self.images.iter().enumerate() {
            images[e.index()] = EdgeId(i as u32);
        }
        SignedEdgeBijection { images }
    }

    pub fn negated(&self) -> Self {
        SignedEdgeBijection { images: self.images.iter().map(|e| e.rev()).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, e)| e.index() == i)
    }

    /// The induced map on undirected edges.
    pub fn undirected(&self) -> Vec<usize> {
        self.images.iter().step_by(2).map(|e| e.undirected()).collect()
    }

    /// One `(edge, image)` label pair per undirected edge, forward
    /// orientation first.
    pub fn to_label_pairs(&self, g1: &DirectedSymGraph, g2: &DirectedSymGraph) -> Vec<SigmaPair> {
        (0..self.num_edges())
            .map(|k| {
                let e = EdgeId::new(k, false);
                let (a, b) = g1.edge_labels(e);
                let (c, d) = g2.edge_labels(self.apply(e));
                [[a, b], [c, d]]
            })
            .collect()
    }

    /// Parses label pairs; one orientation per undirected edge is enough.
    pub fn from_label_pairs(g1: &DirectedSymGraph, g2: &DirectedSymGraph, pairs: &[SigmaPair]) -> Result<Self> {
        let mut forward: Vec<Option<EdgeId>> = vec![None; g1.num_edges()];
        for [[a, b], [c, d]] in pairs {
            let e = g1
                .edge_between(g1.index_of(a)?, g1.index_of(b)?)
                .ok_or_else(|| Error::InvalidBijection(format!("{a}-{b} is not an edge")))?;
            let f = g2
                .edge_between(g2.index_of(c)?, g2.index_of(d)?)
                .ok_or_else(|| Error::InvalidBijection(format!("{c}-{d} is not an edge")))?;
            let (e, f) = if e.is_reversed() { (e.rev(), f.rev()) } else { (e, f) };
            match forward[e.undirected()] {
                Some(prev) if prev != f => {
                    return Err(Error::InvalidBijection(format!("{a}-{b} given two images")));
                }
                _ => forward[e.undirected()] = Some(f),
            }
        }
        let forward: Vec<EdgeId> = forward
            .into_iter()
            .enumerate()
            .map(|(k, f)| {
                f.ok_or_else(|| {
                    let (a, b) = g1.edge_labels(EdgeId::new(k, false));
                    Error::InvalidBijection(format!("no image for {a}-{b}"))
                })
            })
            .collect::<Result<_>>()?;
        SignedEdgeBijection::from_forward_images(&forward).validated(g2.num_edges())
    }
}

/// `[[source, range], [image source, image range]]`.
pub type SigmaPair = [[String; 2]; 2];

/// A vertex bijection.
pub type VertexMap = Vec<usize>;

/// Whether the image of every listed cycle is a listed cycle, and likewise
/// for the inverse.
pub fn is_cycle_preserving(sigma: &SignedEdgeBijection, cycles: &CycleList) -> Result<bool> {
    if !cycles.complete {
        return Err(Error::IncompleteCycleList);
    }
    let set = CycleSet::new(&cycles.cycles);
    let inv = sigma.inverse();
    let maps = |s: &SignedEdgeBijection| {
        cycles.cycles.iter().all(|c| {
            let image: Vec<EdgeId> = c.edges().iter().map(|&e| s.apply(e)).collect();
            set.contains_edges(&image)
        })
    };
    Ok(maps(sigma) && maps(&inv))
}

/// `E_v`: the undirected edges avoiding `v`.
pub fn star_complement(g: &DirectedSymGraph, v: usize) -> Vec<usize> {
    (0..g.num_edges()).filter(|&k| g.edges()[k].0 != v && g.edges()[k].1 != v).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StarOptions {
    /// Check condition (ii) on every basis of `E'` (at most 12 edges in `G`).
    pub exhaustive: bool,
    pub random_bases: usize,
    pub seed: u64,
}

impl Default for StarOptions {
    fn default() -> Self {
        StarOptions { exhaustive: false, random_bases: 20, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarVerdict {
    pub is_star_complement: bool,
    /// Condition (i): `E'` spans a connected subgraph.
    pub connected: bool,
    /// Condition (ii) on the bases that were checked.
    pub bases_ok: bool,
    pub bases_checked: usize,
    /// Condition (iii): every two edges of `E'` share a simple cycle inside `E'`.
    pub pairwise_cyclic: bool,
}

/// Decides whether `sub` equals some `E_v` using only conditions (i) and
/// (ii); (iii) is reported alongside.
pub fn is_vertex_star_complement(g: &DirectedSymGraph, sub: &[usize], opts: StarOptions) -> Result<StarVerdict> {
    let mut set: Vec<usize> = sub.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.len() >= g.num_edges() || set.iter().any(|&k| k >= g.num_edges()) {
        return Err(Error::NotProperSubset);
    }
    if !is_2_connected(g).connected {
        return Err(Error::GraphNot2Connected);
    }
    let (subgraph, _) = g.edge_subgraph(&set);
    let connected = subgraph.is_connected();

    let inside: HashSet<usize> = set.iter().copied().collect();
    let outside: Vec<usize> = (0..g.num_edges()).filter(|k| !inside.contains(k)).collect();
    let bases = candidate_bases(g, &set, opts)?;
    let bases_ok = bases.iter().all(|b| {
        outside.iter().all(|&e| {
            let mut with = b.clone();
            with.push(e);
            is_basis(g, &with)
        })
    });

    Ok(StarVerdict {
        is_star_complement: connected && bases_ok,
        connected,
        bases_ok,
        bases_checked: bases.len(),
        pairwise_cyclic: pairwise_cyclic(&subgraph),
    })
}

/// One greedy forest, all its single-swap neighbours and some random
/// forests; or every forest in exhaustive mode.
fn candidate_bases(g: &DirectedSymGraph, sub: &[usize], opts: StarOptions) -> Result<Vec<Vec<usize>>> {
    if opts.exhaustive {
        if g.num_edges() > 12 {
            return Err(Error::PreconditionViolated("exhaustive basis mode needs at most 12 edges".into()));
        }
        return Ok(exhaustive_bases(g, sub));
    }
    let base = extend_to_basis(g, sub, &[]);
    let mut out: HashSet<Vec<usize>> = HashSet::new();
    out.insert(base.clone());
    for i in 0..base.len() {
        for &f in sub {
            if base.contains(&f) {
                continue;
            }
            let mut cand = base.clone();
            cand[i] = f;
            cand.sort_unstable();
            // Same size as a basis, so acyclic is enough.
            if extend_to_basis(g, &cand, &[]).len() == cand.len() {
                out.insert(cand);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_bases {
        out.insert(random_basis(g, sub, &mut rng));
    }
    let mut v: Vec<_> = out.into_iter().collect();
    v.sort();
    Ok(v)
}

/// Every two edges lie on a common simple cycle (edges with no cycle at all
/// fail unless the graph has a single edge).
fn pairwise_cyclic(g: &DirectedSymGraph) -> bool {
    let m = g.num_edges();
    if m <= 1 {
        return true;
    }
    let Ok(list) = simple_cycles(g, CycleOptions::default()) else { return false };
    if !list.complete {
        return false;
    }
    let mut together = vec![vec![false; m]; m];
    for c in &list.cycles {
        let ks: Vec<usize> = c.edges().iter().map(|e| e.undirected()).collect();
        for &a in &ks {
            for &b in &ks {
                together[a][b] = true;
            }
        }
    }
    (0..m).all(|a| (0..m).all(|b| a == b || together[a][b]))
}

/// Recovers the vertex bijection `f` with `σ({v,w}) = {f(v), f(w)}` for a
/// cycle-preserving `σ` of a 3-connected graph, by matching the images of
/// the star complements.
pub fn reconstruct_vertex_map(
    g: &DirectedSymGraph,
    sigma: &SignedEdgeBijection,
    cycles: Option<&CycleList>,
) -> Result<VertexMap> {
    if sigma.num_edges() != g.num_edges() {
        return Err(Error::InvalidBijection("edge count mismatch".into()));
    }
    if !is_3_connected(g).connected {
        return Err(Error::Not3Connected);
    }
    let owned;
    let cycles = match cycles {
        Some(c) => c,
        None => {
            owned = simple_cycles(g, CycleOptions::default())?;
            &owned
        }
    };
    if !is_cycle_preserving(sigma, cycles)? {
        return Err(Error::NotCyclePreserving);
    }
    vertex_map_from_stars(g, sigma)
}

/// The star-matching step alone; the caller vouches for the preconditions.
pub(crate) fn vertex_map_from_stars(g: &DirectedSymGraph, sigma: &SignedEdgeBijection) -> Result<VertexMap> {
    let n = g.num_vertices();
    let und = sigma.undirected();
    let stars: HashMap<Vec<usize>, usize> = (0..n).map(|w| (star_complement(g, w), w)).collect();
    let mut f = Vec::with_capacity(n);
    for v in 0..n {
        let mut image: Vec<usize> = star_complement(g, v).into_iter().map(|k| und[k]).collect();
        image.sort_unstable();
        let w = stars
            .get(&image)
            .ok_or_else(|| Error::NoConsistentVertexMap(format!("image of E_{} is no star complement", g.label(v))))?;
        f.push(*w);
    }
    let mut seen = vec![false; n];
    for &w in &f {
        if std::mem::replace(&mut seen[w], true) {
            return Err(Error::NoConsistentVertexMap("two stars share an image".into()));
        }
    }
    for (k, &(u, v)) in g.edges().iter().enumerate() {
        let (a, b) = g.edges()[und[k]];
        if !((f[u] == a && f[v] == b) || (f[u] == b && f[v] == a)) {
            return Err(Error::NoConsistentVertexMap(format!(
                "edge {}-{} does not map to the edge between the matched vertices",
                g.label(u),
                g.label(v)
            )));
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphkit::families;

    fn cycles(g: &DirectedSymGraph) -> CycleList {
        simple_cycles(g, CycleOptions::default()).unwrap()
    }

    /// Swaps the undirected edges {0,1} and {2,3} of K4 and fixes the rest.
    fn k4_swap(g: &DirectedSymGraph) -> SignedEdgeBijection {
        let a = g.undirected_between(0, 1).unwrap();
        let b = g.undirected_between(2, 3).unwrap();
        let forward: Vec<EdgeId> = (0..g.num_edges())
            .map(|k| EdgeId::new(if k == a { b } else if k == b { a } else { k }, false))
            .collect();
        SignedEdgeBijection::from_forward_images(&forward).validated(g.num_edges()).unwrap()
    }

    #[test]
    fn bijection_algebra() {
        let g = families::complete(4);
        let s = SignedEdgeBijection::induced(&g, &g, &[1, 2, 3, 0], false).unwrap();
        assert!(s.compose(&s.inverse()).is_identity());
        assert_eq!(s.negated().negated(), s);
        assert!(SignedEdgeBijection::negation(6).compose(&SignedEdgeBijection::negation(6)).is_identity());
        let bad = SignedEdgeBijection { images: vec![EdgeId(0), EdgeId(0)] };
        assert!(bad.validated(1).is_err());
    }

    #[test]
    fn label_pairs_round_trip() {
        let g = families::cycle(4);
        let s = SignedEdgeBijection::induced(&g, &g, &[1, 2, 3, 0], true).unwrap();
        let pairs = s.to_label_pairs(&g, &g);
        assert_eq!(SignedEdgeBijection::from_label_pairs(&g, &g, &pairs).unwrap(), s);
        // Giving the reverse orientation instead works too.
        let flipped: Vec<SigmaPair> =
            pairs.iter().map(|[[a, b], [c, d]]| [[b.clone(), a.clone()], [d.clone(), c.clone()]]).collect();
        assert_eq!(SignedEdgeBijection::from_label_pairs(&g, &g, &flipped).unwrap(), s);
        assert!(SignedEdgeBijection::from_label_pairs(&g, &g, &pairs[..3]).is_err());
    }

    #[test]
    fn cycle_preservation() {
        let g = families::complete(4);
        let list = cycles(&g);
        assert!(is_cycle_preserving(&SignedEdgeBijection::identity(6), &list).unwrap());
        let auto = SignedEdgeBijection::induced(&g, &g, &[1, 0, 2, 3], false).unwrap();
        assert!(is_cycle_preserving(&auto, &list).unwrap());
        assert!(!is_cycle_preserving(&k4_swap(&g), &list).unwrap());
        let partial = CycleList { cycles: list.cycles.clone(), complete: false };
        assert_eq!(is_cycle_preserving(&auto, &partial), Err(Error::IncompleteCycleList));
    }

    #[test]
    fn star_complements_of_k4() {
        let g = families::complete(4);
        let tri = star_complement(&g, 3);
        assert_eq!(tri.len(), 3);
        let v = is_vertex_star_complement(&g, &tri, StarOptions::default()).unwrap();
        assert!(v.is_star_complement && v.pairwise_cyclic);
        let single = is_vertex_star_complement(&g, &[0], StarOptions::default()).unwrap();
        assert!(!single.is_star_complement);
        let all: Vec<usize> = (0..6).collect();
        assert_eq!(is_vertex_star_complement(&g, &all, StarOptions::default()), Err(Error::NotProperSubset));
        let path = families::path(3);
        assert_eq!(is_vertex_star_complement(&path, &[0], StarOptions::default()), Err(Error::GraphNot2Connected));
    }

    #[test]
    fn reconstructs_transposition() {
        let g = families::complete(4);
        let s = SignedEdgeBijection::induced(&g, &g, &[1, 0, 2, 3], false).unwrap();
        assert_eq!(reconstruct_vertex_map(&g, &s, None).unwrap(), vec![1, 0, 2, 3]);
        assert_eq!(reconstruct_vertex_map(&g, &SignedEdgeBijection::identity(6), None).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(reconstruct_vertex_map(&g, &k4_swap(&g), None), Err(Error::NotCyclePreserving));
        assert_eq!(
            reconstruct_vertex_map(&families::cycle(4), &SignedEdgeBijection::identity(4), None),
            Err(Error::Not3Connected)
        );
    }
}
